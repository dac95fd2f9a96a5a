//! Erdős–Turán–Koksma upper bound on discrepancy.
//!
//! `D <= C_r (1/N + sum_{0 < |h|_inf <= N} |S_h| / (m c(h)))` with
//! `c(h) = prod max(1, |h_i|)`.

use serde::{Deserialize, Serialize};

use super::sum::CompensatedSum;
use super::weyl::{weyl_sum, WeylSum};
use crate::error::{Error, Result};
use crate::lineseq::TorusSequence;

/// Upper limit on the number of frequency vectors evaluated.
pub const MAX_ETK_TERMS: u128 = 2_000_000;

pub fn default_c_r(r: usize) -> f64 {
    1.5f64.powi(r as i32)
}

pub fn c_weight(h: &[i64]) -> f64 {
    h.iter().map(|&x| x.unsigned_abs().max(1) as f64).product()
}

/// Number of nonzero `h` with `|h|_inf <= n`.
pub fn frequency_count(r: usize, n: u32) -> u128 {
    let side = 2 * n as u128 + 1;
    side.checked_pow(r as u32).map_or(u128::MAX, |c| c - 1)
}

/// All nonzero `h` in `[-n, n]^r`, in lexicographic order.
pub fn frequency_vectors(r: usize, n: u32) -> Result<Vec<Vec<i64>>> {
    if r == 0 || n == 0 {
        return Err(Error::InvalidArgument("r and N must be positive".into()));
    }
    let count = frequency_count(r, n);
    if count > MAX_ETK_TERMS {
        return Err(Error::SizeLimit {
            what: "ETK frequency vectors",
            count,
            limit: MAX_ETK_TERMS,
        });
    }
    let n = n as i64;
    let mut out = Vec::with_capacity(count as usize);
    let mut h = vec![-n; r];
    loop {
        if h.iter().any(|&x| x != 0) {
            out.push(h.clone());
        }
        let mut d = r;
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            if h[d] < n {
                h[d] += 1;
                break;
            }
            h[d] = -n;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtkEvaluation {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    /// `C_r (1/N + tail)`.
    pub value: f64,
    /// `sum |S_h| / (m c(h))`.
    pub tail: f64,
    pub terms: Vec<WeylSum>,
}

pub fn etk_evaluate(z: &TorusSequence, n: u32, c_r: f64) -> Result<EtkEvaluation> {
    if z.points.is_empty() {
        return Err(Error::InvalidArgument("ETK bound of an empty sequence".into()));
    }
    if !(c_r.is_finite() && c_r > 0.0) {
        return Err(Error::InvalidArgument(format!("C_r must be positive, got {c_r}")));
    }
    let hs = frequency_vectors(z.r, n)?;
    let terms: Vec<WeylSum> = hs.iter().map(|h| weyl_sum(z, h)).collect();
    let tail: CompensatedSum = terms.iter().map(|t| t.magnitude_over_m / c_weight(&t.h)).collect();
    let tail = tail.value();
    Ok(EtkEvaluation {
        n,
        c_r,
        value: c_r * (1.0 / n as f64 + tail),
        tail,
        terms,
    })
}

pub fn etk_bound(z: &TorusSequence, n: u32, c_r: f64) -> Result<f64> {
    etk_evaluate(z, n, c_r).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equidist::discrepancy::discrepancy_exact;

    #[test]
    fn frequencies_lexicographic() {
        let hs = frequency_vectors(2, 1).unwrap();
        assert_eq!(hs.len(), 8);
        assert_eq!(hs[0], vec![-1, -1]);
        assert_eq!(hs[3], vec![0, -1]);
        assert_eq!(hs[4], vec![0, 1]);
        assert_eq!(hs[7], vec![1, 1]);
        assert_eq!(frequency_vectors(1, 3).unwrap(), vec![vec![-3], vec![-2], vec![-1], vec![1], vec![2], vec![3]]);
        assert!(matches!(frequency_vectors(6, 20), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn weights() {
        assert_eq!(c_weight(&[0, -3, 2]), 6.0);
        assert_eq!(default_c_r(2), 2.25);
    }

    #[test]
    fn bound_dominates_exact() {
        let pts: Vec<Vec<f64>> = (1..=1000u64)
            .map(|j| vec![((j * j) as f64 * 0.217_571_317_288_168_47).fract()])
            .collect();
        let z = TorusSequence::new(1, pts, 52).unwrap();
        let d = discrepancy_exact(&z).unwrap();
        for n in [1, 5, 20, 60] {
            assert!(etk_bound(&z, n, default_c_r(1)).unwrap() >= d.d_extreme, "N={n}");
        }
    }
}
