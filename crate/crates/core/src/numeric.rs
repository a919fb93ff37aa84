//! Small numeric kernels shared by the evaluation and variation code.
//!
//! Every reduction that may run in parallel goes through [`chunked_sum`],
//! which splits the index range into fixed-size chunks independent of the
//! thread count, sums each chunk with Neumaier compensation and merges the
//! chunk totals serially in index order. Results are therefore bit-identical
//! for any rayon pool size.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Number of terms per reduction chunk.
pub const REDUCTION_CHUNK: usize = 4096;

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Deterministic compensated sum of `term(i)` for `i in 0..len`.
pub fn chunked_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = len.div_ceil(REDUCTION_CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * REDUCTION_CHUNK;
            let end = (start + REDUCTION_CHUNK).min(len);
            (start..end).map(&term).collect::<CompensatedSum>().value()
        })
        .collect();
    partials.into_iter().collect::<CompensatedSum>().value()
}

/// `|x|^p` as `exp(p ln|x|)`, with an explicit zero branch.
#[inline]
pub fn pow_abs(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        0.0
    } else {
        (p * a.ln()).exp()
    }
}

/// `base^exp` as an integer, failing with a capacity error on overflow of
/// the 63-bit budget.
pub fn checked_pow(base: u32, exp: u32) -> Result<u64> {
    (base as u64)
        .checked_pow(exp)
        .filter(|v| *v <= 1u64 << 63)
        .ok_or_else(|| Error::Capacity(format!("{base}^{exp} exceeds 2^63")))
}

#[inline]
pub fn log_base(x: f64, base: f64) -> f64 {
    x.ln() / base.ln()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Exact decimal expansion of `k / base^n`, which terminates whenever every
/// prime factor of `base` divides 10. Trailing zeros are trimmed.
pub fn exact_decimal(k: u64, base: u64, n: u32) -> Option<String> {
    if !matches!(base, 2 | 5 | 10) {
        return None;
    }
    let den = (base as u128).checked_pow(n)?;
    let int = k as u128 / den;
    let mut rem = k as u128 % den;
    if rem == 0 {
        return Some(int.to_string());
    }
    let mut digits = String::new();
    while rem != 0 {
        rem *= 10;
        digits.push(char::from(b'0' + (rem / den) as u8));
        rem %= den;
    }
    Some(format!("{int}.{digits}"))
}

/// Solves the 3x3 normal equations of a least-squares fit with three
/// regressors. Returns `None` for a singular design.
pub fn least_squares_3(rows: &[[f64; 3]], ys: &[f64]) -> Option<[f64; 3]> {
    let mut a = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..3 {
            rhs[i] += row[i] * y;
            for j in 0..3 {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[r].iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-13).abs() < 1e-25);
    }

    #[test]
    fn chunked_sum_is_thread_count_independent() {
        let term = |i: usize| ((i as f64) * 0.37).sin() * 1e-3;
        let len = 3 * REDUCTION_CHUNK + 17;
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| chunked_sum(len, term));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| chunked_sum(len, term));
        assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn pow_abs_zero_branch() {
        assert_eq!(pow_abs(0.0, 2.5), 0.0);
        assert!((pow_abs(-0.5, 2.0) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn checked_pow_capacity() {
        assert_eq!(checked_pow(2, 63).unwrap(), 1u64 << 63);
        assert!(matches!(checked_pow(2, 64), Err(Error::Capacity(_))));
        assert!(matches!(checked_pow(3, 40), Err(Error::Capacity(_))));
    }

    #[test]
    fn decimals() {
        assert_eq!(exact_decimal(1, 2, 2).unwrap(), "0.25");
        assert_eq!(exact_decimal(0, 2, 3).unwrap(), "0");
        assert_eq!(exact_decimal(8, 2, 3).unwrap(), "1");
        assert_eq!(exact_decimal(3, 5, 2).unwrap(), "0.12");
        assert_eq!(exact_decimal(7, 10, 3).unwrap(), "0.007");
        assert_eq!(exact_decimal(1, 3, 1), None);
    }

    #[test]
    fn ls3_exact_fit() {
        let rows: Vec<[f64; 3]> = (1..10).map(|i| [i as f64, (i as f64).ln(), 1.0]).collect();
        let ys: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] - 0.5 * r[1] + 3.0).collect();
        let c = least_squares_3(&rows, &ys).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-10);
        assert!((c[1] + 0.5).abs() < 1e-10);
        assert!((c[2] - 3.0).abs() < 1e-10);
    }
}
