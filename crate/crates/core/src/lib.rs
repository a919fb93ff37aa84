//! Weierstrass-type functions `f(t) = Σ ξ_m ψ(b^{-m}) φ(b^m t)` and their
//! p-th and Riesz variation along b-adic partitions.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod numeric;
pub mod report;
pub mod stochastic;
pub mod variation;
pub mod waves;
pub mod weights;
pub mod wtf;

pub use error::{Error, Result};
pub use report::{BoundEntry, BoundReport, CertificateReport};
pub use waves::{WaveKind, WavePhi, WaveTable};
pub use weights::{Regime, RegimeReport, WeightPsi};
pub use wtf::{GridPoint, HolderBound, SignRule, WtfSpec};
