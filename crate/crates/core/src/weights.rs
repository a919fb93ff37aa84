//! Submultiplicative weights `ψ` and the regime trichotomy against `b^{-γ}`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::least_squares_3;
use crate::report::CertificateReport;
use crate::waves::CERTIFY_SEED;

/// Relative tolerance deciding the critical case `ψ(b^{-1}) = b^{-γ}`.
pub const CRITICAL_RTOL: f64 = 1e-12;

/// Relative slack in the submultiplicativity check.
const SUBMULT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightPsi {
    /// `x^α`, the only multiplicative entry.
    Power(f64),
    /// `A + |ln x|`.
    LogPlus(f64),
    /// `x^A (1 + |ln x|)`.
    PowerLog(f64),
    /// `A + |sin(ln x)|`.
    SinLog(f64),
    /// `x^A (1 + |sin(ln x)|)`.
    PowerSinLog(f64),
}

impl WeightPsi {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "power exponent {alpha} must be > 0"
            )));
        }
        Ok(WeightPsi::Power(alpha))
    }

    fn with_a(a: f64, make: fn(f64) -> WeightPsi) -> Result<Self> {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "parameter A = {a} must be >= 1"
            )));
        }
        Ok(make(a))
    }

    pub fn log_plus(a: f64) -> Result<Self> {
        Self::with_a(a, WeightPsi::LogPlus)
    }

    pub fn power_log(a: f64) -> Result<Self> {
        Self::with_a(a, WeightPsi::PowerLog)
    }

    pub fn sin_log(a: f64) -> Result<Self> {
        Self::with_a(a, WeightPsi::SinLog)
    }

    pub fn power_sin_log(a: f64) -> Result<Self> {
        Self::with_a(a, WeightPsi::PowerSinLog)
    }

    pub fn multiplicative(&self) -> bool {
        matches!(self, WeightPsi::Power(_))
    }

    /// `ln ψ(x)`, evaluated without forming `ψ(x)` for the power factors.
    pub fn ln_eval(&self, x: f64) -> f64 {
        let l = x.ln();
        match *self {
            WeightPsi::Power(a) => a * l,
            WeightPsi::LogPlus(a) => (a + l.abs()).ln(),
            WeightPsi::PowerLog(a) => a * l + (1.0 + l.abs()).ln(),
            WeightPsi::SinLog(a) => (a + l.sin().abs()).ln(),
            WeightPsi::PowerSinLog(a) => a * l + (1.0 + l.sin().abs()).ln(),
        }
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        match *self {
            WeightPsi::Power(a) => x.powf(a),
            WeightPsi::LogPlus(a) => a + x.ln().abs(),
            WeightPsi::PowerLog(a) => x.powf(a) * (1.0 + x.ln().abs()),
            WeightPsi::SinLog(a) => a + x.ln().sin().abs(),
            WeightPsi::PowerSinLog(a) => x.powf(a) * (1.0 + x.ln().sin().abs()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(Error::Domain(format!("weight evaluated at x = {x} <= 0")));
        }
        Ok(self.eval_unchecked(x))
    }

    /// `ψ(b^{-1})`.
    pub fn at_inv_base(&self, b: u32) -> f64 {
        self.eval_unchecked(1.0 / b as f64)
    }

    /// `ψ(b^{-m})` for `m ≥ 0`.
    pub fn at_inv_base_pow(&self, b: u32, m: u32) -> f64 {
        match *self {
            // b^{-mα} in one step; keeps ψ(b^{-m}) = ψ(b^{-1})^m tight.
            WeightPsi::Power(a) => (b as f64).powf(-(m as f64) * a),
            _ => self.eval_unchecked((b as f64).powi(-(m as i32))),
        }
    }

    /// `ψ(b^{j})` for signed `j`, used for the `ψ(b^{m−n})` coefficients.
    pub fn at_base_pow(&self, b: u32, j: i32) -> f64 {
        if j <= 0 {
            self.at_inv_base_pow(b, (-j) as u32)
        } else {
            match *self {
                WeightPsi::Power(a) => (b as f64).powf(j as f64 * a),
                _ => self.eval_unchecked((b as f64).powi(j)),
            }
        }
    }

    /// `−log_b ψ(b^{-1})`, in closed form for powers.
    pub fn decay_exponent(&self, b: u32) -> f64 {
        match *self {
            WeightPsi::Power(a) => a,
            _ => -self.at_inv_base(b).ln() / (b as f64).ln(),
        }
    }

    /// Classifies `ψ(b^{-1})` against `b^{-γ}`.
    pub fn classify_regime(&self, b: u32, gamma: f64) -> Result<RegimeReport> {
        if b < 2 {
            return Err(Error::UnsupportedSpec(format!("base b = {b} must be >= 2")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::UnsupportedSpec(format!(
                "gamma = {gamma} not in (0, 1]"
            )));
        }
        let psi = self.at_inv_base(b);
        if !(psi > 0.0 && psi < 1.0) {
            return Err(Error::UnsupportedSpec(format!(
                "psi(1/{b}) = {psi} is not in (0, 1) for weight {self}"
            )));
        }
        let threshold = (b as f64).powf(-gamma);
        let regime = match *self {
            // exact comparison of exponents for pure powers
            WeightPsi::Power(a) => match a.partial_cmp(&gamma).expect("finite") {
                std::cmp::Ordering::Greater => Regime::Sub,
                std::cmp::Ordering::Equal => Regime::Critical,
                std::cmp::Ordering::Less => Regime::Super,
            },
            _ if (psi - threshold).abs() <= CRITICAL_RTOL * threshold => Regime::Critical,
            _ if psi < threshold => Regime::Sub,
            _ => Regime::Super,
        };
        let (beta, q) = match regime {
            Regime::Super => {
                let beta = self.decay_exponent(b);
                (Some(beta), 1.0 / beta)
            }
            _ => (None, 1.0 / gamma),
        };
        Ok(RegimeReport {
            regime,
            psi_at_inv_b: psi,
            threshold,
            beta,
            q,
        })
    }

    /// Estimates `α = lim_{x↓0} ln ψ(x) / ln x`.
    ///
    /// The slowly varying factor of a submultiplicative weight makes the
    /// plain ratio converge only like `ln|ln x| / |ln x|`, so the estimate
    /// is the `ln x` coefficient of a least-squares fit of
    /// `ln ψ(x) ≈ α ln x + c ln|ln x| + d` over a geometric sequence of
    /// 40 points decreasing to `x_min`. The raw ratios are returned for
    /// inspection.
    pub fn estimate_alpha(&self, x_min: f64) -> Result<AlphaEstimate> {
        if !(x_min > 0.0 && x_min < 1.0) {
            return Err(Error::Domain(format!("x_min = {x_min} not in (0, 1)")));
        }
        const POINTS: usize = 40;
        let l_min = x_min.ln();
        let mut rows = Vec::with_capacity(POINTS);
        let mut ys = Vec::with_capacity(POINTS);
        let mut ratios = Vec::with_capacity(POINTS);
        for j in 1..=POINTS {
            let l = l_min * j as f64 / POINTS as f64;
            let y = self.ln_eval(l.exp());
            rows.push([l, (-l).ln(), 1.0]);
            ys.push(y);
            ratios.push((l.exp(), y / l));
        }
        let alpha = match self {
            WeightPsi::Power(a) => *a,
            _ => least_squares_3(&rows, &ys)
                .map(|c| c[0])
                .unwrap_or_else(|| ratios.last().unwrap().1),
        };
        Ok(AlphaEstimate { alpha, ratios })
    }

    /// Checks `ψ(xy) ≤ ψ(x)ψ(y)` on deterministic pseudo-random pairs.
    pub fn verify_submultiplicative(&self, pair_count: usize) -> CertificateReport {
        verify_submultiplicative_fn(|x| self.eval_unchecked(x), pair_count)
    }
}

/// Submultiplicativity check for an arbitrary positive function on `(0, 1]`.
///
/// `worst` is the smallest relative margin `(ψ(x)ψ(y) − ψ(xy)) / (ψ(x)ψ(y))`
/// seen; it is `0` (up to rounding) for multiplicative functions.
pub fn verify_submultiplicative_fn<F: Fn(f64) -> f64>(
    psi: F,
    pair_count: usize,
) -> CertificateReport {
    let mut rng = ChaCha8Rng::seed_from_u64(CERTIFY_SEED ^ 0x5b);
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..pair_count {
        // (0, 1]: 1 − [0, 1)
        let x = 1.0 - rng.gen::<f64>();
        let y = 1.0 - rng.gen::<f64>();
        let prod = psi(x) * psi(y);
        let joint = psi(x * y);
        if joint > prod * (1.0 + SUBMULT_SLACK) {
            violations += 1;
        }
        worst = worst.min((prod - joint) / prod);
    }
    CertificateReport {
        passed: violations == 0,
        worst: if pair_count == 0 { 0.0 } else { worst },
        worst_label: "min relative margin (psi(x)psi(y)-psi(xy))/(psi(x)psi(y))".into(),
        bound: 0.0,
        pairs: pair_count,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// `(x, ln ψ(x) / ln x)` along the sequence.
    pub ratios: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Sub,
    Critical,
    Super,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Sub => "Sub",
            Regime::Critical => "Critical",
            Regime::Super => "Super",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub psi_at_inv_b: f64,
    pub threshold: f64,
    pub beta: Option<f64>,
    /// Variation index: `1/β` in the super regime, `1/γ` otherwise.
    pub q: f64,
}

impl fmt::Display for WeightPsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightPsi::Power(a) => write!(f, "power:{a}"),
            WeightPsi::LogPlus(a) => write!(f, "logplus:{a}"),
            WeightPsi::PowerLog(a) => write!(f, "powerlog:{a}"),
            WeightPsi::SinLog(a) => write!(f, "sinlog:{a}"),
            WeightPsi::PowerSinLog(a) => write!(f, "powersinlog:{a}"),
        }
    }
}

impl FromStr for WeightPsi {
    type Err = Error;

    /// Parses `power:0.5`, `logplus:1`, `powerlog:1`, `sinlog:1`, `powersinlog:1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidWeight(format!("expected `name:param`, got `{s}`")))?;
        let v: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::InvalidWeight(format!("bad parameter `{arg}` in `{s}`")))?;
        match name.trim().to_ascii_lowercase().as_str() {
            "power" => WeightPsi::power(v),
            "logplus" => WeightPsi::log_plus(v),
            "powerlog" => WeightPsi::power_log(v),
            "sinlog" => WeightPsi::sin_log(v),
            "powersinlog" => WeightPsi::power_sin_log(v),
            other => Err(Error::InvalidWeight(format!("unknown weight `{other}`"))),
        }
    }
}
