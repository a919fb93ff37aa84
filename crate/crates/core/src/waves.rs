//! Period-1 wave functions that vanish on the integers.
//!
//! A [`WavePhi`] carries, besides its shape, the Hölder data the analysis
//! needs: exponent `gamma`, constant `holder_const` (so that
//! `|φ(x) − φ(y)| ≤ holder_const · |x − y|^gamma`) and `sup_abs ≥ sup |φ|`.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::checked_pow;
use crate::report::CertificateReport;

/// Seed of the deterministic pair sampler used by the certification routines.
pub(crate) const CERTIFY_SEED: u64 = 0x00f4_ac7a_1ce5_eed5;

/// Relative slack allowed on sampled Hölder ratios for float rounding.
const HOLDER_SLACK: f64 = 1e-9;

/// Piecewise-linear wave on `[0, 1]`, extended with period 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl WaveTable {
    /// Builds a table from `(x, φ(x))` points with strictly increasing
    /// `x ∈ [0, 1]`. Both endpoints are forced to zero (inserted if absent).
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidWave("empty wave table".into()));
        }
        let mut xs = Vec::with_capacity(points.len() + 2);
        let mut ys = Vec::with_capacity(points.len() + 2);
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidWave(format!("non-finite point at row {i}")));
            }
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidWave(format!("x = {x} outside [0, 1]")));
            }
            if let Some(&prev) = xs.last() {
                if x <= prev {
                    return Err(Error::InvalidWave(format!(
                        "x values must be strictly increasing ({prev} then {x})"
                    )));
                }
            }
            xs.push(x);
            ys.push(y);
        }
        if xs[0] > 0.0 {
            xs.insert(0, 0.0);
            ys.insert(0, 0.0);
        } else {
            ys[0] = 0.0;
        }
        if *xs.last().unwrap() < 1.0 {
            xs.push(1.0);
            ys.push(0.0);
        } else {
            *ys.last_mut().unwrap() = 0.0;
        }
        Ok(WaveTable { xs, ys })
    }

    /// Parses CSV text with header `x,phi`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim().replace(' ', "") == "x,phi" => {}
            Some((i, h)) => {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("expected header `x,phi`, found `{}`", h.trim()),
                })
            }
            None => return Err(Error::InvalidWave("empty wave table".into())),
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            let mut cols = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.parse::<f64>().ok())
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Format {
                        line: i + 1,
                        message: format!("cannot parse `{}` as two finite numbers", line.trim()),
                    })
            };
            let x = parse(cols.next())?;
            let y = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(Error::Format {
                    line: i + 1,
                    message: "expected exactly two columns".into(),
                });
            }
            points.push((x, y));
        }
        WaveTable::new(&points)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn eval_unit(&self, r: f64) -> f64 {
        // partition_point gives the first knot strictly greater than r.
        let hi = self
            .xs
            .partition_point(|&x| x <= r)
            .clamp(1, self.xs.len() - 1);
        let lo = hi - 1;
        let (x0, x1) = (self.xs[lo], self.xs[hi]);
        let (y0, y1) = (self.ys[lo], self.ys[hi]);
        y0 + (y1 - y0) * (r - x0) / (x1 - x0)
    }

    /// Lipschitz constant of the interpolant and `max |φ|` over the knots.
    fn lipschitz_and_sup(&self) -> (f64, f64) {
        let lip = self
            .xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max);
        let sup = self.ys.iter().map(|y| y.abs()).fold(0.0, f64::max);
        (lip, sup)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WaveKind {
    /// Distance to the nearest integer.
    Triangular,
    /// `ν sin(2πx) + ρ cos(2πx) − ρ`.
    SineCosine {
        nu: f64,
        rho: f64,
    },
    Custom(WaveTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePhi {
    pub kind: WaveKind,
    pub gamma: f64,
    pub holder_const: f64,
    pub sup_abs: f64,
}

impl WavePhi {
    pub fn triangular() -> Self {
        WavePhi {
            kind: WaveKind::Triangular,
            gamma: 1.0,
            holder_const: 1.0,
            sup_abs: 0.5,
        }
    }

    /// Sine/cosine wave with `sup_abs = |ν| + 2|ρ|` and Lipschitz constant
    /// `2π √(ν² + ρ²)`.
    pub fn sine_cosine(nu: f64, rho: f64) -> Result<Self> {
        if !nu.is_finite() || !rho.is_finite() {
            return Err(Error::InvalidWave(
                "non-finite sine/cosine coefficients".into(),
            ));
        }
        let holder_const = TAU * nu.hypot(rho);
        if holder_const == 0.0 {
            return Err(Error::InvalidWave(
                "sine/cosine wave with nu = rho = 0 has no positive Hölder constant; use the zero table"
                    .into(),
            ));
        }
        Ok(WavePhi {
            kind: WaveKind::SineCosine { nu, rho },
            gamma: 1.0,
            holder_const,
            sup_abs: nu.abs() + 2.0 * rho.abs(),
        })
    }

    /// Custom piecewise-linear wave with declared Hölder data.
    pub fn custom(table: WaveTable, gamma: f64, holder_const: f64, sup_abs: f64) -> Result<Self> {
        let w = WavePhi {
            kind: WaveKind::Custom(table),
            gamma,
            holder_const,
            sup_abs,
        };
        w.validate()?;
        Ok(w)
    }

    /// Custom wave whose Hölder data is read off the table itself
    /// (`gamma = 1`, Lipschitz constant of the interpolant, max knot value).
    pub fn custom_lipschitz(table: WaveTable) -> Self {
        let (lip, sup) = table.lipschitz_and_sup();
        WavePhi {
            kind: WaveKind::Custom(table),
            gamma: 1.0,
            // a zero table still needs a positive constant
            holder_const: if lip > 0.0 { lip } else { 1.0 },
            sup_abs: sup,
        }
    }

    /// The identically zero wave.
    pub fn zero() -> Self {
        Self::custom_lipschitz(WaveTable::new(&[(0.0, 0.0), (1.0, 0.0)]).expect("static table"))
    }

    pub fn with_holder(mut self, gamma: f64, holder_const: f64) -> Result<Self> {
        self.gamma = gamma;
        self.holder_const = holder_const;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sup_abs(mut self, sup_abs: f64) -> Result<Self> {
        self.sup_abs = sup_abs;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidWave(format!(
                "gamma = {} not in (0, 1]",
                self.gamma
            )));
        }
        if !(self.holder_const > 0.0 && self.holder_const.is_finite()) {
            return Err(Error::InvalidWave(format!(
                "Hölder constant {} must be positive",
                self.holder_const
            )));
        }
        if !(self.sup_abs >= 0.0 && self.sup_abs.is_finite()) {
            return Err(Error::InvalidWave(format!(
                "sup_abs = {} must be >= 0",
                self.sup_abs
            )));
        }
        Ok(())
    }

    /// `φ(r)` for `r ∈ [0, 1)`.
    fn eval_unit(&self, r: f64) -> f64 {
        match &self.kind {
            WaveKind::Triangular => r.min(1.0 - r),
            WaveKind::SineCosine { nu, rho } => {
                let a = TAU * r;
                nu * a.sin() + rho * a.cos() - rho
            }
            WaveKind::Custom(table) => table.eval_unit(r),
        }
    }

    /// `φ(x)` for any real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut r = x - x.floor();
        if r >= 1.0 {
            r = 0.0;
        }
        self.eval_unit(r)
    }

    /// `φ(num / den)` with the reduction `num mod den` done in integers.
    pub fn eval_ratio(&self, num: u64, den: u64) -> f64 {
        debug_assert!(den > 0);
        let j = num % den;
        if j == 0 {
            return 0.0;
        }
        self.eval_unit(j as f64 / den as f64)
    }

    /// Slope `(φ((k+1) b^{-m}) − φ(k b^{-m})) / b^{-m}` of the chord over the
    /// `k`-th cell of the level-`m` b-adic grid.
    pub fn slope(&self, b: u32, m: u32, k: u64) -> Result<f64> {
        let cells = checked_pow(b, m)?;
        if k >= cells {
            return Err(Error::Domain(format!(
                "cell index {k} not below {b}^{m} = {cells}"
            )));
        }
        Ok(self.slope_unchecked(cells, k))
    }

    #[inline]
    pub(crate) fn slope_unchecked(&self, cells: u64, k: u64) -> f64 {
        if let WaveKind::Triangular = self.kind {
            let dist = |j: u64| {
                let j = j % cells;
                j.min(cells - j) as i64
            };
            return (dist(k + 1) - dist(k)) as f64;
        }
        (self.eval_ratio(k + 1, cells) - self.eval_ratio(k, cells)) * cells as f64
    }

    /// `C · b^{m(1−γ)}`, the a-priori bound on level-`m` slopes.
    pub fn slope_bound(&self, b: u32, m: u32) -> f64 {
        self.holder_const * (b as f64).powf(m as f64 * (1.0 - self.gamma))
    }

    /// Samples `pair_count` deterministic pairs in `[−1, 2]²` and checks the
    /// declared Hölder constant.
    pub fn certify_holder(&self, pair_count: usize) -> CertificateReport {
        let mut rng = ChaCha8Rng::seed_from_u64(CERTIFY_SEED);
        let mut worst = 0.0f64;
        let mut violations = 0;
        let limit = self.holder_const * (1.0 + HOLDER_SLACK);
        for _ in 0..pair_count {
            let x: f64 = rng.gen_range(-1.0..2.0);
            let y: f64 = rng.gen_range(-1.0..2.0);
            if x == y {
                continue;
            }
            let ratio = (self.eval(x) - self.eval(y)).abs() / (x - y).abs().powf(self.gamma);
            if ratio > limit {
                violations += 1;
            }
            worst = worst.max(ratio);
        }
        CertificateReport {
            passed: violations == 0,
            worst,
            worst_label: "max |phi(x)-phi(y)|/|x-y|^gamma".into(),
            bound: self.holder_const,
            pairs: pair_count,
            violations,
        }
    }
}

impl fmt::Display for WavePhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WaveKind::Triangular => write!(f, "triangular"),
            WaveKind::SineCosine { nu, rho } => write!(f, "sincos:{nu},{rho}"),
            WaveKind::Custom(t) => write!(f, "custom[{} knots]", t.xs.len()),
        }
    }
}

impl FromStr for WavePhi {
    type Err = Error;

    /// Parses `triangular`, `zero`, `sincos:NU,RHO` or `custom:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "triangular" if arg.is_empty() => Ok(WavePhi::triangular()),
            "zero" if arg.is_empty() => Ok(WavePhi::zero()),
            "sincos" => {
                let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
                let parsed: Option<Vec<f64>> = parts.iter().map(|p| p.parse().ok()).collect();
                match parsed.as_deref() {
                    Some([nu, rho]) => WavePhi::sine_cosine(*nu, *rho),
                    _ => Err(Error::InvalidWave(format!(
                        "expected sincos:NU,RHO, got `{s}`"
                    ))),
                }
            }
            "custom" if !arg.is_empty() => {
                Ok(WavePhi::custom_lipschitz(WaveTable::from_csv_path(arg)?))
            }
            _ => Err(Error::InvalidWave(format!(
                "unknown wave `{s}` (triangular | sincos:NU,RHO | custom:PATH | zero)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_values() {
        let w = WavePhi::triangular();
        assert_eq!(w.eval(0.0), 0.0);
        assert_eq!(w.eval(0.25), 0.25);
        assert_eq!(w.eval(0.75), 0.25);
        assert_eq!(w.eval_ratio(1, 4), 0.25);
        assert_eq!(w.eval_ratio(7, 4), 0.25);
    }

    #[test]
    fn sine_cosine_half() {
        let w = WavePhi::sine_cosine(0.0, 1.0).unwrap();
        assert_eq!(w.eval(0.5), -2.0);
        assert_eq!(w.sup_abs, 2.0);
        assert!((w.holder_const - TAU).abs() < 1e-15);
    }

    #[test]
    fn vanishes_on_integers() {
        let waves = [
            WavePhi::triangular(),
            WavePhi::sine_cosine(1.0, 0.5).unwrap(),
            WavePhi::custom_lipschitz(WaveTable::new(&[(0.3, 0.7), (0.6, -0.2)]).unwrap()),
        ];
        for w in &waves {
            for z in -2..=2 {
                assert_eq!(w.eval(z as f64), 0.0, "{w} at {z}");
            }
        }
    }

    #[test]
    fn triangular_slopes() {
        let w = WavePhi::triangular();
        assert_eq!(w.slope(2, 1, 0).unwrap(), 1.0);
        assert_eq!(w.slope(2, 1, 1).unwrap(), -1.0);
        assert!(matches!(w.slope(2, 1, 2), Err(Error::Domain(_))));
        assert_eq!(WavePhi::zero().slope(3, 4, 17).unwrap(), 0.0);
    }

    #[test]
    fn triangular_even_base_slopes_balanced() {
        let w = WavePhi::triangular();
        for b in [2u32, 4, 6] {
            for m in 1..=6u32 {
                let cells = checked_pow(b, m).unwrap();
                if cells > 1 << 16 {
                    continue;
                }
                let (mut plus, mut minus) = (0u64, 0u64);
                for k in 0..cells {
                    let s = w.slope(b, m, k).unwrap();
                    if s == 1.0 {
                        plus += 1;
                    } else if s == -1.0 {
                        minus += 1;
                    } else {
                        panic!("slope {s} at b={b} m={m} k={k}");
                    }
                }
                assert_eq!(plus, cells / 2);
                assert_eq!(minus, cells / 2);
            }
        }
    }

    #[test]
    fn slopes_respect_a_priori_bound() {
        let waves = [
            WavePhi::triangular(),
            WavePhi::sine_cosine(1.0, 0.3).unwrap(),
            WavePhi::triangular().with_holder(0.5, 1.0).unwrap(),
        ];
        for w in &waves {
            for b in [2u32, 3, 5] {
                let mut m = 1;
                while checked_pow(b, m).unwrap() <= 1 << 16 {
                    let bound = w.slope_bound(b, m) * (1.0 + 1e-9);
                    for k in 0..checked_pow(b, m).unwrap() {
                        assert!(w.slope(b, m, k).unwrap().abs() <= bound);
                    }
                    m += 1;
                }
            }
        }
    }

    #[test]
    fn certify_holder_cases() {
        let r = WavePhi::triangular().certify_holder(10_000);
        assert!(r.passed && r.worst <= 1.0 + 1e-9);
        let r = WavePhi::sine_cosine(1.0, 0.0)
            .unwrap()
            .with_holder(1.0, TAU)
            .unwrap()
            .certify_holder(10_000);
        assert!(r.passed);
        let r = WavePhi::triangular()
            .with_holder(1.0, 0.5)
            .unwrap()
            .certify_holder(10_000);
        assert!(!r.passed && r.violations > 0);
    }

    #[test]
    fn table_validation() {
        assert!(matches!(WaveTable::new(&[]), Err(Error::InvalidWave(_))));
        assert!(WaveTable::new(&[(0.5, 1.0), (0.5, 2.0)]).is_err());
        assert!(WaveTable::new(&[(1.5, 1.0)]).is_err());
        let t = WaveTable::new(&[(0.0, 3.0), (0.5, 1.0), (1.0, 4.0)]).unwrap();
        let pts: Vec<_> = t.points().collect();
        assert_eq!(pts, vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn table_csv() {
        let t = WaveTable::from_csv_str("x,phi\n0.25,0.5\n0.75,-0.5\n").unwrap();
        let w = WavePhi::custom_lipschitz(t);
        assert_eq!(w.eval(0.25), 0.5);
        assert_eq!(w.eval(0.5), 0.0);
        assert_eq!(w.eval(1.25), 0.5);
        assert_eq!(w.holder_const, 2.0);
        assert!(matches!(
            WaveTable::from_csv_str("a,b\n0.1,0.2\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            WaveTable::from_csv_str("x,phi\n0.1,zz\n"),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn sup_abs_dominates_samples() {
        let waves = [
            WavePhi::triangular(),
            WavePhi::sine_cosine(0.7, -1.2).unwrap(),
            WavePhi::custom_lipschitz(WaveTable::new(&[(0.2, -0.9), (0.8, 0.4)]).unwrap()),
        ];
        for w in &waves {
            for i in 0..=10_000 {
                assert!(w.eval(i as f64 / 10_000.0).abs() <= w.sup_abs + 1e-15);
            }
        }
    }

    #[test]
    fn periodic() {
        let w = WavePhi::sine_cosine(0.4, 0.9).unwrap();
        for i in 0..1000 {
            let x = -3.0 + 0.00617 * i as f64;
            assert!((w.eval(x) - w.eval(x + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn wave_parsing() {
        assert!(WavePhi::from_str("triangular").is_ok());
        assert!(WavePhi::from_str("sincos:1,0.5").is_ok());
        assert!(matches!(
            WavePhi::from_str("sincos:1"),
            Err(Error::InvalidWave(_))
        ));
        assert!(matches!(
            WavePhi::from_str("square"),
            Err(Error::InvalidWave(_))
        ));
        assert!(WavePhi::from_str("custom:/nonexistent/wave.csv").is_err());
    }
}
