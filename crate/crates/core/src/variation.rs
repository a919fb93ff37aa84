//! p-th variation and Riesz variation along b-adic partitions.
//!
//! All sums over grid increments go through the same deterministic
//! compensated reduction, so `riesz_variation` is bit-for-bit the product of
//! `b^{n(p−1)}` with the `t = 1` p-th variation.

use std::borrow::Cow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{chunked_sum, log_base, ols_slope, pow_abs};
use crate::report::{BoundEntry, BoundReport};
use crate::weights::Regime;
use crate::wtf::WtfSpec;

/// Log-slope (base `b`, per level) below which a curve is `Vanishing` and
/// above which it is `Diverging`.
pub const TREND_SLOPE_THRESHOLD: f64 = 0.05;

/// Tolerance for matching `p` to a regime's critical exponent.
const EXPONENT_MATCH_TOL: f64 = 1e-9;

/// Infers `n` from a sample vector of length `b^n + 1`.
pub fn grid_level(len: usize, b: u32) -> Result<u32> {
    if b < 2 {
        return Err(Error::Domain(format!("base b = {b} must be >= 2")));
    }
    let cells = len.checked_sub(1).filter(|c| *c >= 1);
    let mut n = 0u32;
    let mut pow = 1usize;
    if let Some(cells) = cells {
        while pow < cells {
            match pow.checked_mul(b as usize) {
                Some(p) => {
                    pow = p;
                    n += 1;
                }
                None => break,
            }
        }
        if pow == cells {
            return Ok(n);
        }
    }
    Err(Error::Shape(format!(
        "length {len} is not of the form {b}^n + 1"
    )))
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p = {p} must be >= 1")));
    }
    Ok(())
}

/// `Σ_{k=0}^{⌊t b^n⌋} |g((k+1) b^{-n}) − g(k b^{-n})|^p`; the index `k = b^n`
/// (reached at `t = 1`) contributes zero since `g` is extended by `g(1)`.
pub fn pth_variation(samples: &[f64], b: u32, p: f64, t: f64) -> Result<f64> {
    let n = grid_level(samples.len(), b)?;
    check_p(p)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    let cells = samples.len() - 1;
    let last = ((t * (b as f64).powi(n as i32)).floor() as usize).min(cells);
    // indices 0..=last, with last = cells contributing nothing
    let terms = last.min(cells - 1) + 1;
    Ok(chunked_sum(terms, |k| {
        pow_abs(samples[k + 1] - samples[k], p)
    }))
}

/// `b^{n(p−1)}`, the Riesz normalization on the level-`n` grid.
pub fn riesz_factor(b: u32, n: u32, p: f64) -> f64 {
    (b as f64).powf(n as f64 * (p - 1.0))
}

/// `RV^p_n = b^{n(p−1)} V^{p,1}_n`.
pub fn riesz_variation(samples: &[f64], b: u32, p: f64) -> Result<f64> {
    let n = grid_level(samples.len(), b)?;
    Ok(riesz_factor(b, n, p) * pth_variation(samples, b, p, 1.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    Vanishing,
    Converging,
    Diverging,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveLevel {
    pub n: u32,
    pub value: f64,
    /// Value divided by the regime growth factor, when a spec is known.
    pub normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationCurve {
    pub p: f64,
    pub t: f64,
    pub levels: Vec<CurveLevel>,
    pub limit_estimate: Option<f64>,
    pub trend: Trend,
}

impl VariationCurve {
    pub(crate) fn from_levels(p: f64, t: f64, b: u32, levels: Vec<CurveLevel>) -> Self {
        let values: Vec<(u32, f64)> = levels.iter().map(|l| (l.n, l.value)).collect();
        let trend = classify_trend(&values, b);
        let limit_estimate = match trend {
            Trend::Converging => values.last().map(|v| v.1),
            _ => None,
        };
        VariationCurve {
            p,
            t,
            levels,
            limit_estimate,
            trend,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }
}

/// Trend of the last three levels: least-squares slope of `log_b V` against
/// `n`, then shrinking successive differences for `Converging`.
pub fn classify_trend(values: &[(u32, f64)], b: u32) -> Trend {
    if values.len() < 3 {
        return Trend::Undetermined;
    }
    let tail = &values[values.len() - 3..];
    if tail.iter().all(|v| v.1 == 0.0) {
        return Trend::Vanishing;
    }
    if tail.iter().any(|v| v.1 <= 0.0) {
        return Trend::Undetermined;
    }
    let xs: Vec<f64> = tail.iter().map(|v| v.0 as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|v| log_base(v.1, b as f64)).collect();
    let slope = ols_slope(&xs, &ys);
    if slope < -TREND_SLOPE_THRESHOLD {
        Trend::Vanishing
    } else if slope > TREND_SLOPE_THRESHOLD {
        Trend::Diverging
    } else if (tail[2].1 - tail[1].1).abs() < (tail[1].1 - tail[0].1).abs() {
        Trend::Converging
    } else {
        Trend::Undetermined
    }
}

/// Regime growth factor of `V^{p,1}_n`: `b^{n(1−γp)}` (sub),
/// `n^p b^{n(1−γp)}` (critical) or `b^{n(1−βp)}` (super). Dividing the
/// Riesz variation by `b^{p(1−h)n}` is the same normalization.
pub fn regime_normalizer(spec: &WtfSpec, p: f64, n: u32) -> f64 {
    let report = spec.regime();
    let b = spec.b as f64;
    let g = spec.phi.gamma;
    let nf = n as f64;
    match report.regime {
        Regime::Sub => b.powf(nf * (1.0 - g * p)),
        Regime::Critical => nf.powf(p) * b.powf(nf * (1.0 - g * p)),
        Regime::Super => b.powf(nf * (1.0 - report.beta.unwrap() * p)),
    }
}

/// `V^{p,t}_n(f)` for `n = 1..=n_max`, each from a freshly computed exact grid.
pub fn variation_curve(spec: &WtfSpec, p: f64, t: f64, n_max: u32) -> Result<VariationCurve> {
    check_p(p)?;
    let mut levels = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let grid = spec.eval_f_grid(n)?;
        let value = pth_variation(&grid, spec.b, p, t)?;
        levels.push(CurveLevel {
            n,
            value,
            normalized: Some(value / regime_normalizer(spec, p, n)),
        });
    }
    Ok(VariationCurve::from_levels(p, t, spec.b, levels))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszCurve {
    pub p: f64,
    pub regime: Regime,
    /// `(n, RV^p_n)`.
    pub levels: Vec<(u32, f64)>,
    /// `(n, RV^p_n / normalizer_n)`.
    pub normalized: Vec<(u32, f64)>,
    /// Explicit bound on every normalized value.
    pub bound: f64,
}

impl RieszCurve {
    pub fn max_normalized(&self) -> f64 {
        self.normalized.iter().map(|v| v.1).fold(0.0, f64::max)
    }
}

/// Riesz variations normalized by `b^{p(1−γ)n}`, `n^p b^{p(1−γ)n}` or
/// `b^{p(1−β)n}` according to the regime, with the explicit bound
/// `K^p` where `K` is the Hölder-modulus constant of [`WtfSpec::holder_bound`].
pub fn riesz_normalized_curve(spec: &WtfSpec, p: f64, n_max: u32) -> Result<RieszCurve> {
    check_p(p)?;
    let hb = spec.holder_bound();
    let h = hb.exponent;
    let b = spec.b as f64;
    let mut levels = Vec::with_capacity(n_max as usize);
    let mut normalized = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let grid = spec.eval_f_grid(n)?;
        let rv = riesz_variation(&grid, spec.b, p)?;
        let nf = n as f64;
        let mut norm = b.powf(p * (1.0 - h) * nf);
        if hb.log_factor {
            norm *= nf.powf(p);
        }
        levels.push((n, rv));
        normalized.push((n, rv / norm));
    }
    Ok(RieszCurve {
        p,
        regime: hb.regime,
        levels,
        normalized,
        bound: hb.constant.powf(p),
    })
}

/// Source of b-adic sample grids at several levels.
pub trait GridSource {
    fn base(&self) -> u32;
    fn grid(&self, n: u32) -> Result<Cow<'_, [f64]>>;
}

impl GridSource for WtfSpec {
    fn base(&self) -> u32 {
        self.b
    }

    fn grid(&self, n: u32) -> Result<Cow<'_, [f64]>> {
        self.eval_f_grid(n).map(Cow::Owned)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexEstimate {
    pub q_hat: f64,
    /// `(p, s(p))`: least-squares slope of `log_b V^{p,1}_n` against `n`.
    pub slopes: Vec<(f64, f64)>,
    pub n_min: u32,
    pub n_max: u32,
}

/// Estimates the variation index as the root of `p ↦ s(p)`, linearly
/// interpolated between the first bracketing pair of `p_grid`.
pub fn estimate_variation_index<S: GridSource + ?Sized>(
    source: &S,
    p_grid: &[f64],
    n_min: u32,
    n_max: u32,
) -> Result<IndexEstimate> {
    if n_max < n_min || n_max - n_min < 2 {
        return Err(Error::Domain(format!(
            "need at least 3 levels, got n in [{n_min}, {n_max}]"
        )));
    }
    if p_grid.len() < 2 {
        return Err(Error::Domain("p grid needs at least two values".into()));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("p grid must be strictly increasing".into()));
    }
    for &p in p_grid {
        check_p(p)?;
    }
    let b = source.base();
    let ns: Vec<f64> = (n_min..=n_max).map(|n| n as f64).collect();
    let mut logs = vec![Vec::with_capacity(ns.len()); p_grid.len()];
    for n in n_min..=n_max {
        let grid = source.grid(n)?;
        for (i, &p) in p_grid.iter().enumerate() {
            let v = pth_variation(&grid, b, p, 1.0)?;
            if v <= 0.0 {
                return Err(Error::Domain(format!(
                    "variation vanishes at n = {n}, p = {p}; index undefined"
                )));
            }
            logs[i].push(log_base(v, b as f64));
        }
    }
    let slopes: Vec<(f64, f64)> = p_grid
        .iter()
        .zip(&logs)
        .map(|(&p, ys)| (p, ols_slope(&ns, ys)))
        .collect();
    let q_hat = slopes
        .iter()
        .find(|(_, s)| *s == 0.0)
        .map(|(p, _)| *p)
        .or_else(|| {
            slopes.windows(2).find_map(|w| {
                let ((p0, s0), (p1, s1)) = (w[0], w[1]);
                (s0.signum() != s1.signum()).then(|| p0 + (p1 - p0) * s0 / (s0 - s1))
            })
        })
        .ok_or_else(|| Error::NoBracket {
            slopes: slopes.clone(),
        })?;
    Ok(IndexEstimate {
        q_hat,
        slopes,
        n_min,
        n_max,
    })
}

/// Compares computed `V^{p,1}_n` with the explicit bound that applies at
/// the regime's critical exponent:
///
/// * sub, `p = 1/γ`: `V ≤ (C / (1 − ψ(b^{-1}) b^γ))^p` for every `n`
///   (for `γ = 1` this is the total-variation bound);
/// * critical, `p = 1/γ`: `V ≤ (C n)^{1/γ}` for every `n`;
/// * super, `p = 1/β`: `V = E|T_n|^p ≤ (C / (ψ(b^{-1}) b^γ − 1))^p` for every
///   `n`, hence for the running maximum and the limsup.
pub fn check_regime_bounds(spec: &WtfSpec, p: f64, n_max: u32) -> Result<BoundReport> {
    check_p(p)?;
    let report = spec.regime();
    let c = spec.phi.holder_const;
    let g = spec.phi.gamma;
    let r = spec.ratio();
    let bg = (spec.b as f64).powf(g);
    let (critical_p, statement, bound_at): (f64, &str, Box<dyn Fn(u32) -> f64>) =
        match report.regime {
            Regime::Sub => (
                1.0 / g,
                "sub regime, p = 1/gamma: V^{p,1}_n <= (C/(1-psi(1/b) b^gamma))^p",
                Box::new(move |_| (c / (1.0 - r * bg)).powf(1.0 / g)),
            ),
            Regime::Critical => (
                1.0 / g,
                "critical regime, p = 1/gamma: V^{p,1}_n <= (C n)^{1/gamma}",
                Box::new(move |n| (c * n as f64).powf(1.0 / g)),
            ),
            Regime::Super => {
                let beta = report.beta.unwrap();
                (
                1.0 / beta,
                "super regime, p = 1/beta: V^{p,1}_n = E|T_n|^p <= (C/(psi(1/b) b^gamma - 1))^p",
                Box::new(move |_| (c / (r * bg - 1.0)).powf(1.0 / beta)),
            )
            }
        };
    if (p - critical_p).abs() > EXPONENT_MATCH_TOL * critical_p {
        let bound = match report.regime {
            Regime::Sub => "the sub-regime bound (psi(1/b) < b^-gamma)",
            Regime::Critical => "the critical-regime bound (psi(1/b) = b^-gamma)",
            Regime::Super => "the super-regime bound (psi(1/b) > b^-gamma)",
        };
        return Err(Error::Contract(format!(
            "{bound} applies only at p = {critical_p}, got p = {p}"
        )));
    }
    let mut entries = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let grid = spec.eval_f_grid(n)?;
        let value = pth_variation(&grid, spec.b, p, 1.0)?;
        let bound = bound_at(n);
        entries.push(BoundEntry {
            n,
            value,
            bound: Some(bound),
            margin: Some(bound - value),
        });
    }
    Ok(BoundReport::from_entries(statement, entries))
}
