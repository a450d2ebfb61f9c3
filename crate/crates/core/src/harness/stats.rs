//! Two-sample tests used to compare grid cells.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::factorial::ln_factorial;
use thiserror::Error;

/// Significance level after a Bonferroni correction over four comparisons.
pub const ALPHA_STAT: f64 = 0.05 / 4.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("sample of size {0} is too small, need at least 2")]
    SampleTooSmall(usize),
    #[error("invalid counts: {successes} successes out of {n}")]
    Counts { successes: u64, n: u64 },
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the `n - 1` denominator.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Two-sided Welch t-test p-value. `NaN` when both samples are constant
/// with equal means, `0` when they are constant with different means.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    for x in [a, b] {
        if x.len() < 2 {
            return Err(StatsError::SampleTooSmall(x.len()));
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Ok(if ma == mb { f64::NAN } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

fn ln_hypergeom(k: u64, row: u64, col: u64, n: u64) -> f64 {
    // P(X = k) for the top-left cell with row sum `row`, column sum `col`.
    let lc = |n: u64, k: u64| ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    lc(col, k) + lc(n - col, row - k) - lc(n, row)
}

/// Two-tailed Fisher exact test on `[[sa, na - sa], [sb, nb - sb]]`: the
/// total probability of tables with the same margins that are no more
/// likely than the observed one.
pub fn fisher_exact(sa: u64, na: u64, sb: u64, nb: u64) -> Result<f64, StatsError> {
    if sa > na {
        return Err(StatsError::Counts { successes: sa, n: na });
    }
    if sb > nb {
        return Err(StatsError::Counts { successes: sb, n: nb });
    }
    let n = na + nb;
    let col = sa + sb;
    if n == 0 {
        return Ok(1.0);
    }
    let lo = col.saturating_sub(nb);
    let hi = col.min(na);
    let observed = ln_hypergeom(sa, na, col, n);
    let p: f64 = (lo..=hi)
        .map(|k| ln_hypergeom(k, na, col, n))
        .filter(|&lp| lp <= observed + 1e-7)
        .map(f64::exp)
        .sum();
    Ok(p.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_examples() {
        assert!(welch_t_test(&[3.0, 3.0], &[3.0, 3.0]).unwrap().is_nan());
        assert_eq!(welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(welch_t_test(&[1.0], &[1.0, 2.0]), Err(StatsError::SampleTooSmall(1)));
    }

    #[test]
    fn fisher_examples() {
        assert!((fisher_exact(10, 20, 10, 20).unwrap() - 1.0).abs() < 1e-12);
        assert!(fisher_exact(75, 75, 0, 75).unwrap() < 1e-30);
        assert!(fisher_exact(3, 2, 0, 1).is_err());
    }
}
