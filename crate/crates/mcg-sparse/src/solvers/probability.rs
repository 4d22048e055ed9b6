//! Exact failure probability of the combinatorial search.
//!
//! A uniformly random s-sparse support defeats the search exactly when more
//! than P of its indices fall in the ill block D2. With |D2| = m2 out of K
//! atoms, that is the hypergeometric tail
//!
//!   Pe = sum_{i=P+1}^{s} C(K - m2, s - i) C(m2, i) / C(K, s),
//!
//! evaluated here with exact big-integer binomials. A closed-form upper
//! bound, (s-P) (s/(K-s+1))^(P-1) m2^(P+1) s^3 / (P+1)!, is reported
//! alongside for reference; it is looser by orders of magnitude and is
//! never used for decisions.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::combinatorics::binomial_big;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorProbability {
    pub exact: f64,
    pub bound: f64,
}

pub fn error_probability(k: usize, s: usize, m2: usize, p: usize) -> Result<ErrorProbability> {
    if s > k {
        return Err(Error::param(format!("sparsity {s} exceeds atom count {k}")));
    }
    if m2 > k {
        return Err(Error::param(format!(
            "ill block size {m2} exceeds atom count {k}"
        )));
    }
    if p > s {
        return Err(Error::param(format!(
            "subset size {p} exceeds sparsity {s}; the tail is empty by construction"
        )));
    }
    let mut numerator = BigUint::ZERO;
    for i in (p + 1)..=s {
        // terms with s - i > k - m2 or i > m2 are zero via the binomial
        numerator += binomial_big(k - m2, s - i) * binomial_big(m2, i);
    }
    let denominator = binomial_big(k, s);
    let exact = ratio_to_f64(&numerator, &denominator);

    let bound = if s == p {
        0.0
    } else {
        let (kf, sf, mf) = (k as f64, s as f64, m2 as f64);
        let pf = p as f64;
        (sf - pf) * (sf / (kf - sf + 1.0)).powi(p as i32 - 1) * mf.powi(p as i32 + 1)
            * sf.powi(3)
            / factorial_f64(p + 1)
    };
    Ok(ErrorProbability { exact, bound })
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0f64, |acc, i| acc * i as f64)
}

/// num/den as f64 for 0 <= num <= den, shifting both down when the
/// denominator would overflow the float range.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits().saturating_sub(512);
    let n = (num >> shift).to_f64().expect("shifted value fits in f64");
    let d = (den >> shift).to_f64().expect("shifted value fits in f64");
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn tail_is_empty_when_subset_covers_sparsity() {
        for s in 0..6 {
            let e = error_probability(20, s, 6, s).unwrap();
            assert_eq!(e.exact, 0.0);
            assert_eq!(e.bound, 0.0);
        }
    }

    #[test]
    fn matches_exhaustive_support_count() {
        // enumerate every C(20,5) support; D2 is the first 6 indices
        let (k, s, m2, p) = (20usize, 5usize, 6usize, 2usize);
        let mut bad = 0u64;
        let mut total = 0u64;
        for combo in (0..k).combinations(s) {
            total += 1;
            if combo.iter().filter(|&&i| i < m2).count() > p {
                bad += 1;
            }
        }
        let expect = bad as f64 / total as f64;
        let got = error_probability(k, s, m2, p).unwrap().exact;
        assert!(
            (got - expect).abs() <= 1e-15,
            "exact {got} vs enumerated {expect}"
        );
        assert!((got - 0.13132094943240455).abs() < 1e-15);
    }

    #[test]
    fn reference_point_value() {
        let e = error_probability(200, 12, 20, 6).unwrap();
        assert!(
            (e.exact / 1.979587533826156e-5 - 1.0).abs() < 1e-12,
            "exact = {}",
            e.exact
        );
        assert!(e.exact >= 2e-6 && e.exact <= 5e-5);
        assert!(
            (e.bound / 2716.887346332112 - 1.0).abs() < 1e-12,
            "bound = {}",
            e.bound
        );
    }

    #[test]
    fn tail_shrinks_as_the_subset_grows() {
        for (k, s, m2) in [(30usize, 6usize, 8usize), (50, 5, 10), (100, 8, 12)] {
            let mut prev = f64::INFINITY;
            for p in 0..=s {
                let e = error_probability(k, s, m2, p).unwrap().exact;
                assert!(
                    e <= prev + 1e-18,
                    "tail rose from {prev} to {e} at p = {p}"
                );
                prev = e;
            }
        }
    }

    #[test]
    fn handles_large_inputs_without_overflow() {
        let e = error_probability(500, 20, 30, 5).unwrap();
        assert!(e.exact.is_finite() && e.exact >= 0.0 && e.exact <= 1.0);
    }

    #[test]
    fn rejects_inconsistent_parameters() {
        assert!(error_probability(10, 12, 5, 2).is_err());
        assert!(error_probability(10, 5, 12, 2).is_err());
        assert!(error_probability(10, 5, 5, 6).is_err());
    }
}
