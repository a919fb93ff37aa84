//! Weierstrass-type functions `f(t) = Σ_{m≥0} ξ_m ψ(b^{-m}) φ(b^m t)`.
//!
//! Pointwise evaluation truncates the series with a certified tail bound;
//! grid evaluation at `k b^{-n}` is exact up to rounding because every term
//! with `m ≥ n` vanishes there.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{checked_pow, exact_decimal, log_base, CompensatedSum};
use crate::report::CertificateReport;
use crate::waves::{WavePhi, CERTIFY_SEED};
use crate::weights::{Regime, RegimeReport, WeightPsi};

/// Largest grid (number of cells) any routine will allocate.
pub const MAX_GRID_CELLS: u64 = 1 << 28;

/// Per-level signs `ξ_m ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignRule {
    AllPlus,
    AllMinus,
    /// `ξ_m = (−1)^m`.
    Alternating,
    /// `ξ_0, ξ_1, …` as given; requesting more levels than listed is an error.
    Explicit(Vec<i8>),
    /// `ξ_m` is the sign of the top bit of the `(m+1)`-th SplitMix64 output
    /// for the given seed (top bit 0 ↦ +1).
    Seeded(u64),
}

impl SignRule {
    /// `ξ_0, …, ξ_{n−1}` as ±1.0.
    pub fn signs(&self, n: usize) -> Result<Vec<f64>> {
        Ok(match self {
            SignRule::AllPlus => vec![1.0; n],
            SignRule::AllMinus => vec![-1.0; n],
            SignRule::Alternating => (0..n)
                .map(|m| if m % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
            SignRule::Explicit(list) => {
                if list.len() < n {
                    return Err(Error::Domain(format!(
                        "explicit sign list has {} entries, {n} levels requested",
                        list.len()
                    )));
                }
                list[..n].iter().map(|&s| s as f64).collect()
            }
            SignRule::Seeded(seed) => {
                let mut rng = SplitMix64::seed_from_u64(*seed);
                (0..n)
                    .map(|_| if rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 })
                    .collect()
            }
        })
    }

    /// `Some(±1)` when every level carries the same sign.
    pub fn constant_sign(&self) -> Option<f64> {
        match self {
            SignRule::AllPlus => Some(1.0),
            SignRule::AllMinus => Some(-1.0),
            _ => None,
        }
    }
}

impl fmt::Display for SignRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignRule::AllPlus => f.write_str("plus"),
            SignRule::AllMinus => f.write_str("minus"),
            SignRule::Alternating => f.write_str("alternating"),
            SignRule::Explicit(list) => {
                f.write_str("explicit:")?;
                for s in list {
                    f.write_str(if *s > 0 { "+" } else { "-" })?;
                }
                Ok(())
            }
            SignRule::Seeded(seed) => write!(f, "seeded:{seed}"),
        }
    }
}

impl FromStr for SignRule {
    type Err = Error;

    /// Accepts `plus`, `minus`, `alternating`, `explicit:+-+` (or
    /// `explicit:1,-1,1`) and `seeded:<u64>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unknown sign rule `{s}`"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a.trim())),
            None => (s.trim().to_ascii_lowercase(), None),
        };
        match (name.as_str(), arg) {
            ("plus" | "allplus" | "+", None) => Ok(SignRule::AllPlus),
            ("minus" | "allminus" | "-", None) => Ok(SignRule::AllMinus),
            ("alternating" | "alt", None) => Ok(SignRule::Alternating),
            ("seeded", Some(a)) => a.parse().map(SignRule::Seeded).map_err(|_| bad()),
            ("explicit", Some(a)) => {
                let list: Option<Vec<i8>> = if a.contains(',') {
                    a.split(',')
                        .map(|t| match t.trim() {
                            "1" | "+1" | "+" => Some(1),
                            "-1" | "-" => Some(-1),
                            _ => None,
                        })
                        .collect()
                } else {
                    a.chars()
                        .map(|c| match c {
                            '+' => Some(1),
                            '-' => Some(-1),
                            _ => None,
                        })
                        .collect()
                };
                list.filter(|l| !l.is_empty())
                    .map(SignRule::Explicit)
                    .ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}

/// Full description of a Weierstrass-type function.
#[derive(Debug, Clone, PartialEq)]
pub struct WtfSpec {
    pub b: u32,
    pub psi: WeightPsi,
    pub phi: WavePhi,
    pub signs: SignRule,
}

impl WtfSpec {
    pub fn new(b: u32, psi: WeightPsi, phi: WavePhi, signs: SignRule) -> Result<Self> {
        if b < 2 {
            return Err(Error::UnsupportedSpec(format!("base b = {b} must be >= 2")));
        }
        let r = psi.at_inv_base(b);
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::UnsupportedSpec(format!(
                "psi(1/{b}) = {r} is not in (0, 1) for weight {psi}"
            )));
        }
        Ok(WtfSpec { b, psi, phi, signs })
    }

    /// `ψ(b^{-1})`.
    pub fn ratio(&self) -> f64 {
        self.psi.at_inv_base(self.b)
    }

    pub fn regime(&self) -> RegimeReport {
        self.psi
            .classify_regime(self.b, self.phi.gamma)
            .expect("validated at construction")
    }

    /// `sup |f| ≤ sup|φ| / (1 − ψ(b^{-1}))`.
    pub fn sup_bound(&self) -> f64 {
        self.phi.sup_abs / (1.0 - self.ratio())
    }

    /// Number of cells `b^n` of the level-`n` grid, within the allocation budget.
    pub fn grid_cells(&self, n: u32) -> Result<u64> {
        let cells = checked_pow(self.b, n)?;
        if cells > MAX_GRID_CELLS {
            return Err(Error::Capacity(format!(
                "grid {}^{n} = {cells} cells exceeds the budget of {MAX_GRID_CELLS}",
                self.b
            )));
        }
        Ok(cells)
    }

    /// `f(t)` truncated at the first `N` with
    /// `sup|φ| ψ(b^{-1})^N / (1 − ψ(b^{-1})) < tol`; returns the value and
    /// that tail bound.
    pub fn eval_f(&self, t: f64, tol: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Domain(format!("tolerance {tol} must be > 0")));
        }
        let r = self.ratio();
        let tail = |n: i32| self.phi.sup_abs * r.powi(n) / (1.0 - r);
        let mut terms = 0i32;
        while tail(terms) >= tol {
            terms += 1;
        }
        let signs = self.signs.signs(terms as usize)?;
        let bf = self.b as f64;
        let mut acc = CompensatedSum::new();
        // x = frac(b^m t), advanced one factor of b at a time
        let mut x = t - t.floor();
        for (m, xi) in signs.iter().enumerate() {
            acc.add(xi * self.psi.at_inv_base_pow(self.b, m as u32) * self.phi.eval(x));
            x *= bf;
            x -= x.floor();
        }
        Ok((acc.value(), tail(terms)))
    }

    /// `f` extended with period 1.
    pub fn eval_f_periodic(&self, t: f64, tol: f64) -> Result<(f64, f64)> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("t = {t} is not finite")));
        }
        let r = t - t.floor();
        self.eval_f(if r >= 1.0 { 0.0 } else { r }, tol)
    }

    /// Level weights `ξ_m ψ(b^{-m})` for `m < n`, ordered by decreasing `|ψ|`.
    fn ordered_level_weights(&self, n: u32) -> Result<Vec<(u32, f64)>> {
        let signs = self.signs.signs(n as usize)?;
        let mut levels: Vec<(u32, f64)> = (0..n)
            .map(|m| (m, signs[m as usize] * self.psi.at_inv_base_pow(self.b, m)))
            .collect();
        levels.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
        Ok(levels)
    }

    /// `f(k b^{-n})` through the finite sum over `m < n`.
    pub fn eval_f_grid_point(&self, point: GridPoint) -> Result<f64> {
        let cells = self.grid_cells(point.n)?;
        if point.k > cells {
            return Err(Error::Domain(format!("k = {} exceeds {cells}", point.k)));
        }
        let levels = self.ordered_level_weights(point.n)?;
        let dens = self.level_denominators(point.n);
        Ok(levels
            .iter()
            .map(|&(m, w)| w * self.phi.eval_ratio(point.k, dens[m as usize]))
            .collect::<CompensatedSum>()
            .value())
    }

    /// `b^{n−m}` for `m = 0..n`.
    fn level_denominators(&self, n: u32) -> Vec<u64> {
        (0..n).map(|m| (self.b as u64).pow(n - m)).collect()
    }

    /// `f(k b^{-n})` for `k = 0..=b^n`.
    pub fn eval_f_grid(&self, n: u32) -> Result<Vec<f64>> {
        let cells = self.grid_cells(n)?;
        let levels = self.ordered_level_weights(n)?;
        let dens = self.level_denominators(n);
        let values = (0..=cells)
            .into_par_iter()
            .map(|k| {
                levels
                    .iter()
                    .map(|&(m, w)| w * self.phi.eval_ratio(k, dens[m as usize]))
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect();
        Ok(values)
    }

    /// Explicit Hölder-type modulus of continuity for this function.
    pub fn holder_bound(&self) -> HolderBound {
        let report = self.regime();
        let c = self.phi.holder_const;
        let g = self.phi.gamma;
        let r = self.ratio();
        let bg = (self.b as f64).powf(g);
        let sup = self.phi.sup_abs;
        match report.regime {
            Regime::Sub => HolderBound {
                regime: Regime::Sub,
                exponent: g,
                constant: c / (1.0 - r * bg),
                log_factor: false,
                base: self.b,
            },
            Regime::Super => HolderBound {
                regime: Regime::Super,
                exponent: report.beta.expect("super regime has beta"),
                constant: c * bg / (r * bg - 1.0) + 2.0 * sup / (1.0 - r),
                log_factor: false,
                base: self.b,
            },
            Regime::Critical => {
                let lb2 = log_base(2.0, self.b as f64);
                HolderBound {
                    regime: Regime::Critical,
                    exponent: g,
                    constant: c * (1.0 / lb2 + 1.0) + 2.0 * sup / ((1.0 - r) * lb2),
                    log_factor: true,
                    base: self.b,
                }
            }
        }
    }

    /// Checks `|f(t) − f(s)| ≤ bound(|t − s|)` on `pair_count` deterministic
    /// pairs with `0 < |t − s| ≤ 1/2`; half the pairs use log-uniform gaps
    /// down to `2^{-30}`.
    pub fn check_holder_bound(&self, pair_count: usize) -> Result<CertificateReport> {
        const TOL: f64 = 1e-13;
        let bound = self.holder_bound();
        let mut rng = ChaCha8Rng::seed_from_u64(CERTIFY_SEED ^ 0x01);
        let mut worst = 0.0f64;
        let mut violations = 0;
        let mut done = 0;
        while done < pair_count {
            let s: f64 = rng.gen();
            let h = if done % 2 == 0 {
                rng.gen_range(0.0..0.5)
            } else {
                0.5 * 2f64.powf(-30.0 * rng.gen::<f64>())
            };
            let t = if rng.gen::<bool>() { s + h } else { s - h };
            if !(0.0..=1.0).contains(&t) || h == 0.0 {
                continue;
            }
            done += 1;
            let (ft, et) = self.eval_f(t, TOL)?;
            let (fs, es) = self.eval_f(s, TOL)?;
            let lhs = (ft - fs).abs();
            let rhs = bound.modulus(h);
            if lhs > rhs + et + es + 1e-12 * rhs {
                violations += 1;
            }
            worst = worst.max(lhs / rhs);
        }
        Ok(CertificateReport {
            passed: violations == 0,
            worst,
            worst_label: "max |f(t)-f(s)| / modulus(|t-s|)".into(),
            bound: 1.0,
            pairs: pair_count,
            violations,
        })
    }
}

impl fmt::Display for WtfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "b={} weight={} wave={} signs={}",
            self.b, self.psi, self.phi, self.signs
        )
    }
}

/// Modulus `constant · h^exponent` (times `log_b(1/h)` in the critical regime).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderBound {
    pub regime: Regime,
    pub exponent: f64,
    pub constant: f64,
    pub log_factor: bool,
    pub base: u32,
}

impl HolderBound {
    pub fn modulus(&self, h: f64) -> f64 {
        let m = self.constant * h.powf(self.exponent);
        if self.log_factor {
            m * log_base(1.0 / h, self.base as f64)
        } else {
            m
        }
    }
}

/// The b-adic point `k b^{-n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub k: u64,
    pub n: u32,
}

impl GridPoint {
    pub fn new(k: u64, n: u32, b: u32) -> Result<Self> {
        let cells = checked_pow(b, n)?;
        if k > cells {
            return Err(Error::Domain(format!("k = {k} exceeds {b}^{n}")));
        }
        Ok(GridPoint { k, n })
    }

    pub fn t(&self, b: u32) -> f64 {
        self.k as f64 / (b as f64).powi(self.n as i32)
    }
}

/// Writes a grid as CSV with header `k,n,t,f`. `t` is an exact decimal for
/// `b ∈ {2, 5, 10}` and a float otherwise.
pub fn write_grid_csv<W: Write>(mut out: W, b: u32, n: u32, values: &[f64]) -> Result<()> {
    writeln!(out, "k,n,t,f")?;
    let den = (b as f64).powi(n as i32);
    for (k, v) in values.iter().enumerate() {
        let t =
            exact_decimal(k as u64, b as u64, n).unwrap_or_else(|| (k as f64 / den).to_string());
        writeln!(out, "{k},{n},{t},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn takagi() -> WtfSpec {
        WtfSpec::new(
            2,
            WeightPsi::Power(1.0),
            WavePhi::triangular(),
            SignRule::AllPlus,
        )
        .unwrap()
    }

    #[test]
    fn takagi_points() {
        let s = takagi();
        let (v, e) = s.eval_f(0.0, 1e-12).unwrap();
        assert_eq!(v, 0.0);
        assert!(e < 1e-12);
        assert!((s.eval_f(0.25, 1e-12).unwrap().0 - 0.5).abs() < 1e-12);
        assert!((s.eval_f(0.5, 1e-12).unwrap().0 - 0.5).abs() < 1e-12);
        assert!(matches!(s.eval_f(1.5, 1e-3), Err(Error::Domain(_))));
        assert!(matches!(s.eval_f(0.5, 0.0), Err(Error::Domain(_))));
        assert!((s.eval_f_periodic(1.25, 1e-12).unwrap().0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn takagi_grids() {
        let s = takagi();
        assert_eq!(s.eval_f_grid(0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(s.eval_f_grid(1).unwrap(), vec![0.0, 0.5, 0.0]);
        assert_eq!(s.eval_f_grid(2).unwrap(), vec![0.0, 0.5, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn grid_endpoints_vanish() {
        let s = WtfSpec::new(
            3,
            WeightPsi::PowerLog(1.0),
            WavePhi::sine_cosine(1.0, 0.5).unwrap(),
            SignRule::Seeded(9),
        )
        .unwrap();
        for n in 0..6 {
            let g = s.eval_f_grid(n).unwrap();
            assert_eq!(g.len() as u64, 3u64.pow(n) + 1);
            assert_eq!(g[0], 0.0);
            assert!(g.last().unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            WtfSpec::new(
                1,
                WeightPsi::Power(1.0),
                WavePhi::triangular(),
                SignRule::AllPlus
            ),
            Err(Error::UnsupportedSpec(_))
        ));
        assert!(matches!(
            WtfSpec::new(
                2,
                WeightPsi::LogPlus(1.0),
                WavePhi::triangular(),
                SignRule::AllPlus
            ),
            Err(Error::UnsupportedSpec(_))
        ));
    }

    #[test]
    fn grid_capacity() {
        assert!(matches!(takagi().eval_f_grid(64), Err(Error::Capacity(_))));
        assert!(matches!(takagi().eval_f_grid(40), Err(Error::Capacity(_))));
    }

    #[test]
    fn sign_rules() {
        assert_eq!(
            SignRule::Alternating.signs(4).unwrap(),
            vec![1.0, -1.0, 1.0, -1.0]
        );
        assert!(SignRule::Explicit(vec![1, -1]).signs(3).is_err());
        let a = SignRule::Seeded(42).signs(64).unwrap();
        assert_eq!(a, SignRule::Seeded(42).signs(64).unwrap());
        assert!(a.iter().any(|&s| s > 0.0) && a.iter().any(|&s| s < 0.0));
        assert_eq!(&SignRule::Seeded(42).signs(10).unwrap()[..], &a[..10]);
        assert_eq!(
            "explicit:+-+".parse::<SignRule>().unwrap(),
            SignRule::Explicit(vec![1, -1, 1])
        );
        assert_eq!(
            "explicit:1,-1".parse::<SignRule>().unwrap(),
            SignRule::Explicit(vec![1, -1])
        );
        assert_eq!("seeded:7".parse::<SignRule>().unwrap(), SignRule::Seeded(7));
        assert_eq!("plus".parse::<SignRule>().unwrap(), SignRule::AllPlus);
        assert!("explicit:+x".parse::<SignRule>().is_err());
        assert!("sometimes".parse::<SignRule>().is_err());
    }

    #[test]
    fn grid_csv_format() {
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, 2, 1, &[0.0, 0.5, 0.0]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,n,t,f\n0,1,0,0\n1,1,0.5,0.5\n2,1,1,0\n"
        );
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, 3, 1, &[0.0, 0.1, 0.2, 0.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("1,1,0.3333333333333333,0.1"));
    }

    #[test]
    fn holder_constants() {
        let sub = WtfSpec::new(
            3,
            WeightPsi::Power(2.0),
            WavePhi::triangular(),
            SignRule::AllPlus,
        )
        .unwrap()
        .holder_bound();
        assert!((sub.constant - 1.5).abs() < 1e-14);
        let sup = WtfSpec::new(
            2,
            WeightPsi::Power(0.5),
            WavePhi::triangular(),
            SignRule::AllPlus,
        )
        .unwrap()
        .holder_bound();
        let expect = 2.0 / (2f64.sqrt() - 1.0) + 1.0 / (1.0 - 0.5f64.sqrt());
        assert!((sup.constant - expect).abs() < 1e-12);
        assert_eq!(sup.exponent, 0.5);
        let crit = takagi().holder_bound();
        // C(1/log_2 2 + 1) + 2·(1/2)/((1/2)·1) = 2 + 2
        assert!((crit.constant - 4.0).abs() < 1e-14);
        assert!(crit.log_factor);
    }
}
