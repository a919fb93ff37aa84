//! Digit-path representation of grid increments.
//!
//! A path `U_1, …, U_n` of base-`b` digits selects the cell
//! `R_n = Σ U_i b^{i−1}`; the slopes `Y_m = λ_{m, R_m}` seen along it give
//! the increment of `f` over cell `R_n` and, after normalization, the
//! functionals `W_n`, `T_n` and `Z_n`. Enumerating all `b^n` paths in
//! odometer order (`U_1` fastest) visits `R_n = 0, 1, …, b^n − 1`, so
//! `R_m = R_n mod b^m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{checked_pow, chunked_sum, pow_abs, CompensatedSum};
use crate::report::{BoundEntry, BoundReport};
use crate::weights::Regime;
use crate::wtf::{SignRule, WtfSpec};

/// Largest number of paths `enumerate_variation` will visit.
pub const ENUMERATION_BUDGET: u64 = 1 << 22;
/// Largest number of paths `exhaustive_bound_check` will visit.
pub const EXHAUSTIVE_BOUND_BUDGET: u64 = 1 << 20;
/// Digit paths used by Monte Carlo satisfy `b^N ≤ 2^53`, so that cell
/// coordinates `R / b^m` are correctly rounded.
pub const MC_CELL_LIMIT: u64 = 1 << 53;
/// Samples per Monte Carlo chunk; chunk `c` draws from ChaCha8 stream `c`.
pub const MC_CHUNK: usize = 1024;
/// How many `φ(b^{-k})` values the non-degeneracy certificate inspects.
pub const HYPOTHESIS_SCAN_DEPTH: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitPath {
    b: u32,
    digits: Vec<u32>,
}

impl DigitPath {
    pub fn new(b: u32, digits: Vec<u32>) -> Result<Self> {
        if b < 2 {
            return Err(Error::Domain(format!("base b = {b} must be >= 2")));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= b) {
            return Err(Error::Domain(format!("digit {d} not below base {b}")));
        }
        checked_pow(b, digits.len() as u32)?;
        Ok(DigitPath { b, digits })
    }

    /// The path whose cell index is `R_n = k`.
    pub fn from_cell(b: u32, n: u32, k: u64) -> Result<Self> {
        let cells = checked_pow(b, n)?;
        if k >= cells {
            return Err(Error::Domain(format!("cell {k} not below {b}^{n}")));
        }
        let mut rest = k;
        let digits = (0..n)
            .map(|_| {
                let d = (rest % b as u64) as u32;
                rest /= b as u64;
                d
            })
            .collect();
        Ok(DigitPath { b, digits })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// `R_1, …, R_n`.
    pub fn cells(&self) -> Vec<u64> {
        let mut pow = 1u64;
        let mut r = 0u64;
        self.digits
            .iter()
            .map(|&u| {
                r += u as u64 * pow;
                pow = pow.saturating_mul(self.b as u64);
                r
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathFunctionals {
    /// `Y_1, …, Y_n`.
    pub y: Vec<f64>,
    pub w_n: f64,
    pub t_n: f64,
    /// Defined only under a constant sign rule.
    pub z_n: Option<f64>,
}

/// Per-level coefficients for paths of length `n`.
struct PathCoefficients {
    n: u32,
    /// `b^m` for `m = 1..=n`.
    cells: Vec<u64>,
    /// `ξ_{n−m} ψ(b^{m−n}) b^{−m}`: increment of `f` over the cell, per slope.
    increment: Vec<f64>,
    /// `ξ_{n−m} ψ(b^{m−n}) b^{nγ−m}`, the weights of `W_n`.
    w: Vec<f64>,
    /// `ψ(b^{-1})^{−n} ξ_{n−m} ψ(b^{m−n}) b^{−m}`, the weights of `T_n`.
    t: Vec<f64>,
    /// `(ψ(b^{-1}) b)^{−m}`, the weights of `Z_n`.
    z: Vec<f64>,
}

impl PathCoefficients {
    fn new(spec: &WtfSpec, n: u32) -> Result<Self> {
        checked_pow(spec.b, n)?;
        let signs = spec.signs.signs(n as usize)?;
        let b = spec.b as f64;
        let g = spec.phi.gamma;
        let r = spec.ratio();
        let nf = n as f64;
        let mut c = PathCoefficients {
            n,
            cells: Vec::with_capacity(n as usize),
            increment: Vec::with_capacity(n as usize),
            w: Vec::with_capacity(n as usize),
            t: Vec::with_capacity(n as usize),
            z: Vec::with_capacity(n as usize),
        };
        for m in 1..=n {
            let mf = m as f64;
            let a = signs[(n - m) as usize] * spec.psi.at_base_pow(spec.b, m as i32 - n as i32);
            c.cells.push((spec.b as u64).pow(m));
            c.increment.push(a * b.powf(-mf));
            c.w.push(a * b.powf(nf * g - mf));
            c.t.push(a * b.powf(-mf) * r.powf(-nf));
            c.z.push((r * b).powf(-mf));
        }
        Ok(c)
    }

    /// Slopes along the path whose level-`n` cell is `k`.
    fn slopes(&self, spec: &WtfSpec, k: u64) -> impl Iterator<Item = f64> + '_ {
        let phi = spec.phi.clone();
        self.cells
            .iter()
            .map(move |&cells| phi.slope_unchecked(cells, k % cells))
    }

    fn dot(weights: &[f64], ys: &[f64]) -> f64 {
        weights
            .iter()
            .zip(ys)
            .map(|(w, y)| w * y)
            .collect::<CompensatedSum>()
            .value()
    }
}

/// `Y_m`, `W_n`, `T_n` and (for constant signs) `Z_n` along one path.
///
/// `Z_n = Σ (ψ(b^{-1}) b)^{−m} Y_m` for both constant rules; with a
/// multiplicative weight this is `T_n` (all plus) or `−T_n` (all minus).
pub fn path_functionals(spec: &WtfSpec, path: &DigitPath) -> Result<PathFunctionals> {
    if path.b != spec.b {
        return Err(Error::Domain(format!(
            "path base {} differs from spec base {}",
            path.b, spec.b
        )));
    }
    let n = path.len() as u32;
    let coeffs = PathCoefficients::new(spec, n)?;
    let rs = path.cells();
    let y: Vec<f64> = coeffs
        .cells
        .iter()
        .zip(&rs)
        .map(|(&cells, &r)| spec.phi.slope_unchecked(cells, r))
        .collect();
    let z_n = spec
        .signs
        .constant_sign()
        .map(|_| PathCoefficients::dot(&coeffs.z, &y));
    Ok(PathFunctionals {
        w_n: PathCoefficients::dot(&coeffs.w, &y),
        t_n: PathCoefficients::dot(&coeffs.t, &y),
        z_n,
        y,
    })
}

/// `Z_n` along one path; refused for non-constant sign rules.
pub fn z_functional(spec: &WtfSpec, path: &DigitPath) -> Result<f64> {
    require_constant_signs(&spec.signs)?;
    Ok(path_functionals(spec, path)?.z_n.expect("constant signs"))
}

fn require_constant_signs(signs: &SignRule) -> Result<()> {
    if signs.constant_sign().is_none() {
        return Err(Error::UnsupportedSign(format!(
            "Z_n needs all-plus or all-minus signs, got `{signs}`"
        )));
    }
    Ok(())
}

fn require_super(spec: &WtfSpec, what: &str) -> Result<f64> {
    let report = spec.regime();
    if report.regime != Regime::Super {
        return Err(Error::Contract(format!(
            "{what} requires psi(1/b) > b^-gamma (super regime), spec is {}",
            report.regime
        )));
    }
    Ok(report.beta.expect("super"))
}

/// `b^n E|Σ_m ξ_{n−m} ψ(b^{m−n}) b^{−m} Y_m|^p`, by summing over all `b^n`
/// digit paths.
pub fn enumerate_variation(spec: &WtfSpec, p: f64, n: u32) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p = {p} must be >= 1")));
    }
    let paths = checked_pow(spec.b, n)?;
    if paths > ENUMERATION_BUDGET {
        return Err(Error::Capacity(format!(
            "{}^{n} = {paths} paths exceed the enumeration budget {ENUMERATION_BUDGET}",
            spec.b
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let coeffs = PathCoefficients::new(spec, n)?;
    Ok(chunked_sum(paths as usize, |k| {
        let inc = coeffs
            .increment
            .iter()
            .zip(coeffs.slopes(spec, k as u64))
            .map(|(c, y)| c * y)
            .collect::<CompensatedSum>()
            .value();
        pow_abs(inc, p)
    }))
}

/// Where the truncated sum `Z_N` starts.
///
/// `FromOne` is `Σ_{m=1}^{N} (ψ(b^{-1}) b)^{−m} Y_m`. `FromZero` is
/// `Σ_{m=0}^{N−1} (ψ(b^{-1}) b)^{−m} Y_{m+1}`, the indexing of the
/// Bernoulli-convolution form `Σ_{m≥0} 2^{m(H−1)} Y_m`. Both are computed as
/// stated; no relation between their moments is assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ZIndexing {
    #[default]
    FromOne,
    FromZero,
}

impl ZIndexing {
    fn scale(self, spec: &WtfSpec) -> f64 {
        match self {
            ZIndexing::FromOne => 1.0,
            ZIndexing::FromZero => spec.ratio() * spec.b as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZMomentEstimate {
    pub p: f64,
    pub indexing: ZIndexing,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub trunc_n: u32,
    /// Per-sample bound on `|Z − Z_N|`.
    pub tail_bound: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `C (ψ(b^{-1}) b^γ)^{−N} / (ψ(b^{-1}) b^γ − 1)`.
pub fn z_tail_bound(spec: &WtfSpec, trunc_n: u32) -> f64 {
    let q = spec.ratio() * (spec.b as f64).powf(spec.phi.gamma);
    spec.phi.holder_const * q.powi(-(trunc_n as i32)) / (q - 1.0)
}

struct ZSampler<'a> {
    spec: &'a WtfSpec,
    weights: Vec<f64>,
    cells: Vec<u64>,
}

impl<'a> ZSampler<'a> {
    fn new(spec: &'a WtfSpec, trunc_n: u32, indexing: ZIndexing) -> Result<Self> {
        let cells = checked_pow(spec.b, trunc_n)?;
        if cells > MC_CELL_LIMIT {
            return Err(Error::Capacity(format!(
                "{}^{trunc_n} exceeds 2^53; lower the truncation level",
                spec.b
            )));
        }
        let rb = spec.ratio() * spec.b as f64;
        let scale = indexing.scale(spec);
        Ok(ZSampler {
            spec,
            weights: (1..=trunc_n)
                .map(|m| scale * rb.powf(-(m as f64)))
                .collect(),
            cells: (1..=trunc_n).map(|m| (spec.b as u64).pow(m)).collect(),
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let b = self.spec.b as u64;
        let mut r = 0u64;
        let mut pow = 1u64;
        let mut z = CompensatedSum::new();
        for (w, &cells) in self.weights.iter().zip(&self.cells) {
            r += rng.gen_range(0..b) * pow;
            pow = cells;
            z.add(w * self.spec.phi.slope_unchecked(cells, r));
        }
        z.value()
    }

    /// Applies `fold` to every sample of every chunk, chunks in parallel,
    /// and returns the per-chunk accumulators in chunk order.
    fn run<A, F>(&self, samples: usize, seed: u64, fold: F) -> Vec<A>
    where
        A: Default + Send,
        F: Fn(&mut A, f64) + Sync,
    {
        let chunks = samples.div_ceil(MC_CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let count = MC_CHUNK.min(samples - c * MC_CHUNK);
                let mut acc = A::default();
                for _ in 0..count {
                    fold(&mut acc, self.draw(&mut rng));
                }
                acc
            })
            .collect()
    }
}

/// Welford accumulator, merged with Chan's formula.
#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

/// Monte Carlo estimate of `E|Z_N|^p` over i.i.d. uniform digit paths.
pub fn z_moment(
    spec: &WtfSpec,
    p: f64,
    samples: usize,
    trunc_n: u32,
    seed: u64,
) -> Result<ZMomentEstimate> {
    z_moment_indexed(spec, p, samples, trunc_n, seed, ZIndexing::FromOne)
}

/// [`z_moment`] with an explicit choice of where `Z_N` starts.
pub fn z_moment_indexed(
    spec: &WtfSpec,
    p: f64,
    samples: usize,
    trunc_n: u32,
    seed: u64,
    indexing: ZIndexing,
) -> Result<ZMomentEstimate> {
    require_super(spec, "z_moment")?;
    require_constant_signs(&spec.signs)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p = {p} must be > 0")));
    }
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let sampler = ZSampler::new(spec, trunc_n, indexing)?;
    let total = sampler
        .run(samples, seed, |acc: &mut Moments, z| {
            acc.push(pow_abs(z, p))
        })
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let stderr = if samples > 1 {
        (total.m2 / (total.count - 1.0) / total.count).sqrt()
    } else {
        0.0
    };
    Ok(ZMomentEstimate {
        p,
        indexing,
        mc_mean: total.mean,
        mc_stderr: stderr,
        trunc_n,
        tail_bound: indexing.scale(spec) * z_tail_bound(spec, trunc_n),
        samples,
        seed,
    })
}

/// Fraction of `samples` seeded draws with `|Z_N| > delta`.
pub fn z_exceedance_frequency(
    spec: &WtfSpec,
    delta: f64,
    samples: usize,
    trunc_n: u32,
    seed: u64,
) -> Result<f64> {
    require_super(spec, "z_exceedance_frequency")?;
    require_constant_signs(&spec.signs)?;
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let sampler = ZSampler::new(spec, trunc_n, ZIndexing::FromOne)?;
    let hits: usize = sampler
        .run(samples, seed, |acc: &mut usize, z| {
            *acc += usize::from(z.abs() > delta)
        })
        .into_iter()
        .sum();
    Ok(hits as f64 / samples as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonzeroCertificate {
    /// Smallest `M` with `φ(b^{-M}) > 0`.
    pub m: u32,
    /// Smallest `N > M` with `C Σ_{m≥N} (ψ(b^{-1}) b^γ)^{−m} < φ(b^{-M})`.
    pub n: u32,
    pub delta: f64,
    /// `b^{-N} ≤ P(|Z| > δ)`.
    pub prob_lower: f64,
}

/// Certifies `P(|Z| > δ) ≥ b^{-N}` under all-plus signs when the values
/// `φ(b^{-k})` are nonnegative and not all zero.
pub fn nonzero_certificate(spec: &WtfSpec) -> Result<NonzeroCertificate> {
    require_super(spec, "nonzero_certificate")?;
    if spec.signs != SignRule::AllPlus {
        return Err(Error::UnsupportedSign(format!(
            "the certificate covers all-plus signs only, got `{}`",
            spec.signs
        )));
    }
    let phi_at = |k: u32| match checked_pow(spec.b, k) {
        Ok(den) => spec.phi.eval_ratio(1, den),
        Err(_) => spec.phi.eval((spec.b as f64).powi(-(k as i32))),
    };
    let values: Vec<f64> = (1..=HYPOTHESIS_SCAN_DEPTH).map(phi_at).collect();
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::Hypothesis(format!(
            "phi(b^-{}) = {v} < 0; need phi(b^-k) >= 0 for all k",
            i + 1
        )));
    }
    let (m_idx, &peak) = values
        .iter()
        .enumerate()
        .find(|(_, v)| **v > 0.0)
        .ok_or_else(|| {
            Error::Hypothesis(format!(
                "phi(b^-k) = 0 for every k <= {HYPOTHESIS_SCAN_DEPTH}"
            ))
        })?;
    let m = m_idx as u32 + 1;
    let q = spec.ratio() * (spec.b as f64).powf(spec.phi.gamma);
    let c = spec.phi.holder_const;
    // C Σ_{j≥N} q^{−j} = C q^{−N} / (1 − 1/q)
    let tail = |n: u32| c * q.powi(-(n as i32)) / (1.0 - 1.0 / q);
    let n = (m + 1..=HYPOTHESIS_SCAN_DEPTH)
        .find(|&n| tail(n) < peak)
        .ok_or_else(|| {
            Error::Hypothesis(format!(
                "no N <= {HYPOTHESIS_SCAN_DEPTH} makes the tail smaller than phi(b^-{m}) = {peak}"
            ))
        })?;
    Ok(NonzeroCertificate {
        m,
        n,
        delta: (peak - tail(n)) / 2.0,
        prob_lower: (spec.b as f64).powi(-(n as i32)),
    })
}

/// Maximum of `|W_n|` (sub regime) or `|T_n|` (super regime) over all
/// `b^n` paths against the uniform bound `C / |1 − ψ(b^{-1}) b^γ|`. In the
/// critical regime `W_n = T_n` is reported without a bound.
pub fn exhaustive_bound_check(spec: &WtfSpec, n: u32) -> Result<BoundReport> {
    let paths = checked_pow(spec.b, n)?;
    if paths > EXHAUSTIVE_BOUND_BUDGET {
        return Err(Error::Capacity(format!(
            "{}^{n} = {paths} paths exceed the budget {EXHAUSTIVE_BOUND_BUDGET}",
            spec.b
        )));
    }
    let regime = spec.regime().regime;
    let q = spec.ratio() * (spec.b as f64).powf(spec.phi.gamma);
    let c = spec.phi.holder_const;
    let (statement, bound) = match regime {
        Regime::Sub => ("max |W_n| <= C/(1-psi(1/b) b^gamma)", Some(c / (1.0 - q))),
        Regime::Super => ("max |T_n| <= C/(psi(1/b) b^gamma - 1)", Some(c / (q - 1.0))),
        Regime::Critical => ("max |W_n| = max |T_n| (no uniform bound)", None),
    };
    let max = if n == 0 {
        0.0
    } else {
        let coeffs = PathCoefficients::new(spec, n)?;
        let weights = if regime == Regime::Super {
            &coeffs.t
        } else {
            &coeffs.w
        };
        debug_assert_eq!(coeffs.n, n);
        (0..paths)
            .into_par_iter()
            .map(|k| {
                let ys: Vec<f64> = coeffs.slopes(spec, k).collect();
                PathCoefficients::dot(weights, &ys).abs()
            })
            .reduce(|| 0.0, f64::max)
    };
    Ok(BoundReport::from_entries(
        statement,
        vec![BoundEntry {
            n,
            value: max,
            bound,
            margin: bound.map(|b| b - max),
        }],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waves::WavePhi;
    use crate::weights::WeightPsi;

    fn spec(b: u32, alpha: f64, signs: SignRule) -> WtfSpec {
        WtfSpec::new(b, WeightPsi::Power(alpha), WavePhi::triangular(), signs).unwrap()
    }

    #[test]
    fn all_zero_path_functionals() {
        let s = spec(2, 1.0, SignRule::AllPlus);
        let f = path_functionals(&s, &DigitPath::new(2, vec![0, 0, 0]).unwrap()).unwrap();
        assert_eq!(f.y, vec![1.0, 1.0, 1.0]);
        let s = spec(2, 0.5, SignRule::AllPlus);
        let f = path_functionals(&s, &DigitPath::new(2, vec![0, 0]).unwrap()).unwrap();
        let expect = 0.5f64.sqrt() + 0.5;
        assert!((f.z_n.unwrap() - expect).abs() < 1e-15);
        assert!((f.t_n - expect).abs() < 1e-15);
    }

    #[test]
    fn z_refused_for_varying_signs() {
        let s = spec(2, 0.5, SignRule::Alternating);
        let p = DigitPath::new(2, vec![1, 0, 1]).unwrap();
        assert!(path_functionals(&s, &p).unwrap().z_n.is_none());
        assert!(matches!(
            z_functional(&s, &p),
            Err(Error::UnsupportedSign(_))
        ));
        assert!(matches!(
            z_moment(&s, 2.0, 10, 10, 1),
            Err(Error::UnsupportedSign(_))
        ));
    }

    #[test]
    fn digit_path_cells() {
        let p = DigitPath::from_cell(3, 4, 50).unwrap();
        // 50 = 2 + 1·3 + 2·9 + 1·27
        assert_eq!(p.digits(), &[2, 1, 2, 1]);
        assert_eq!(p.cells(), vec![2, 5, 23, 50]);
        assert!(DigitPath::new(2, vec![0, 2]).is_err());
        assert!(DigitPath::from_cell(2, 3, 8).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let v = enumerate_variation(&spec(2, 1.0, SignRule::AllPlus), 2.0, 4).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let v = enumerate_variation(&spec(2, 0.5, SignRule::AllPlus), 2.0, 4).unwrap();
        assert!((v - 15.0 / 16.0).abs() < 1e-14);
        assert!(matches!(
            enumerate_variation(&spec(2, 1.0, SignRule::AllPlus), 2.0, 23),
            Err(Error::Capacity(_))
        ));
        assert_eq!(
            enumerate_variation(&spec(3, 2.0, SignRule::AllPlus), 1.0, 0).unwrap(),
            0.0
        );
    }

    #[test]
    fn z_moment_tail_bound_and_zero_wave() {
        let s = spec(2, 0.5, SignRule::AllPlus);
        let expect = 2f64.powi(-10) / (2f64.sqrt() - 1.0);
        assert!((z_tail_bound(&s, 20) - expect).abs() < 1e-15);
        let zero =
            WtfSpec::new(2, WeightPsi::Power(0.5), WavePhi::zero(), SignRule::AllPlus).unwrap();
        let est = z_moment(&zero, 2.0, 5000, 30, 3).unwrap();
        assert_eq!(est.mc_mean, 0.0);
        assert_eq!(est.mc_stderr, 0.0);
        let crit = spec(2, 1.0, SignRule::AllPlus);
        assert!(matches!(
            z_moment(&crit, 2.0, 10, 10, 1),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            z_moment(&s, 2.0, 10, 54, 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn z_indexing_variants() {
        let s = spec(2, 0.5, SignRule::AllPlus);
        let one = z_moment_indexed(&s, 2.0, 4000, 30, 9, ZIndexing::FromOne).unwrap();
        let zero = z_moment_indexed(&s, 2.0, 4000, 30, 9, ZIndexing::FromZero).unwrap();
        assert_eq!(one, z_moment(&s, 2.0, 4000, 30, 9).unwrap());
        assert_eq!(zero.indexing, ZIndexing::FromZero);
        // same draws, every term scaled by ψ(1/2)·2 = √2
        assert!((zero.mc_mean - 2.0 * one.mc_mean).abs() < 1e-12);
        assert!((zero.tail_bound - 2f64.sqrt() * one.tail_bound).abs() < 1e-15);
    }

    #[test]
    fn z_moment_is_reproducible() {
        let s = spec(2, 0.5, SignRule::AllPlus);
        let a = z_moment(&s, 2.0, 3000, 30, 11).unwrap();
        let b = z_moment(&s, 2.0, 3000, 30, 11).unwrap();
        assert_eq!(a, b);
        let c = z_moment(&s, 2.0, 3000, 30, 12).unwrap();
        assert_ne!(a.mc_mean, c.mc_mean);
    }

    #[test]
    fn certificate_h_half() {
        let c = nonzero_certificate(&spec(2, 0.5, SignRule::AllPlus)).unwrap();
        assert_eq!(c.m, 1);
        assert_eq!(c.n, 6);
        let tail = 2f64.powi(-3) / (1.0 - 0.5f64.sqrt());
        assert!((c.delta - (0.5 - tail) / 2.0).abs() < 1e-15);
        assert!((c.delta - 0.0366).abs() < 1e-3);
        assert_eq!(c.prob_lower, 1.0 / 64.0);
    }

    #[test]
    fn certificate_hypothesis_failures() {
        let zero =
            WtfSpec::new(2, WeightPsi::Power(0.5), WavePhi::zero(), SignRule::AllPlus).unwrap();
        assert!(matches!(
            nonzero_certificate(&zero),
            Err(Error::Hypothesis(_))
        ));
        let neg = WtfSpec::new(
            2,
            WeightPsi::Power(0.5),
            WavePhi::sine_cosine(0.0, 1.0).unwrap(),
            SignRule::AllPlus,
        )
        .unwrap();
        assert!(matches!(
            nonzero_certificate(&neg),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            nonzero_certificate(&spec(2, 0.5, SignRule::AllMinus)),
            Err(Error::UnsupportedSign(_))
        ));
    }

    #[test]
    fn exhaustive_bound_examples() {
        let r = exhaustive_bound_check(&spec(3, 2.0, SignRule::AllPlus), 8).unwrap();
        assert!(r.passed);
        assert!(r.max_value <= 1.5);
        let r = exhaustive_bound_check(&spec(2, 0.5, SignRule::AllPlus), 12).unwrap();
        assert!(r.passed);
        assert!(r.max_value <= 1.0 / (2f64.sqrt() - 1.0));
        let r = exhaustive_bound_check(&spec(2, 0.5, SignRule::AllPlus), 0).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_value, 0.0);
        let r = exhaustive_bound_check(&spec(2, 1.0, SignRule::AllPlus), 6).unwrap();
        assert_eq!(r.entries[0].bound, None);
        assert!(r.passed);
    }
}
