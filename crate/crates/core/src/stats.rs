//! Interval estimates and goodness-of-fit tests used by the Monte Carlo checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Two-sided normal quantile for confidence `level`, e.g. 1.96 at 0.95.
pub fn normal_quantile(level: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: u64, trials: u64, level: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let z = normal_quantile(level);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` counts against cell probabilities
/// `expected`. Cells with zero expected probability must be empty.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != expected.len() {
        return Err(Error::domain("observed and expected differ in length"));
    }
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            if o > 0 {
                return Err(Error::domain("observation in a cell of probability zero"));
            }
            continue;
        }
        let e = n * p;
        statistic += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::domain("goodness of fit needs at least two cells"));
    }
    let dof = cells - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map_err(|e| Error::domain(e.to_string()))?
        .sf(statistic);
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 50 of 100 at 95%: centre 0.5, half-width 0.0961...
        let iv = wilson_interval(50, 100, 0.95);
        assert!((iv.lo - 0.4038).abs() < 1e-4 && (iv.hi - 0.5962).abs() < 1e-4);
        let zero = wilson_interval(0, 1000, 0.95);
        assert_eq!(zero.lo, 0.0);
        assert!(zero.hi > 0.0 && zero.hi < 0.005);
        assert!((normal_quantile(0.95) - 1.959964).abs() < 1e-6);
    }

    #[test]
    fn chi_square_perfect_fit() {
        let t = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.dof, 3);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let skew = chi_square_gof(&[100, 0, 0, 0], &[0.25; 4]).unwrap();
        assert!(skew.p_value < 1e-10);
        assert!(chi_square_gof(&[1, 1], &[1.0, 0.0]).is_err());
    }
}
