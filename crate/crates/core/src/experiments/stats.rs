use serde::Serialize;

use crate::error::{Error, Result};

/// Width, in standard errors, of every empirical confidence radius.
pub const CONFIDENCE_SE: f64 = 4.0;

/// 0.999 quantiles of the chi-square distribution for the degrees of freedom
/// that occur here: `2^n - 1` for `n <= 10` and `C(n, n/2) - 1` for even
/// `n <= 12`.
const CRITICAL_999: &[(usize, f64)] = &[
    (1, 10.8276),
    (3, 16.2662),
    (5, 20.5150),
    (7, 24.3219),
    (15, 37.6973),
    (19, 43.8202),
    (31, 61.0983),
    (63, 103.4424),
    (69, 111.0551),
    (127, 181.9930),
    (251, 325.9704),
    (255, 330.5197),
    (511, 615.5149),
    (923, 1061.4905),
    (1023, 1168.4972),
];

pub fn chi_square_critical_999(dof: usize) -> Option<f64> {
    CRITICAL_999
        .iter()
        .find(|(d, _)| *d == dof)
        .map(|(_, v)| *v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

impl ChiSquare {
    /// Whether the statistic stays below the 0.999 quantile. `None` when no
    /// quantile is tabulated for this dof.
    pub fn passes_999(&self) -> Option<bool> {
        chi_square_critical_999(self.dof).map(|c| self.statistic < c)
    }
}

/// Pearson statistic of `counts` against the uniform distribution over the
/// cells. Requires at least 5 expected observations per cell.
pub fn chi_square_equidist(counts: &[u64]) -> Result<ChiSquare> {
    let cells = counts.len();
    if cells < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two cells, got {cells}"
        )));
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / cells as f64;
    if expected < 5.0 {
        return Err(Error::InsufficientData(format!(
            "{total} observations over {cells} cells; at least {} needed for 5 per cell",
            5 * cells
        )));
    }
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    Ok(ChiSquare {
        statistic,
        dof: cells - 1,
    })
}

/// Binomial standard error `sqrt(p (1 - p) / trials)`.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn table_matches_reference_quantiles() {
        for &(dof, value) in CRITICAL_999 {
            let q = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
            assert!((q - value).abs() < 1e-3, "dof {dof}: {q} vs {value}");
        }
        assert_eq!(chi_square_critical_999(2), None);
    }

    #[test]
    fn uniform_counts_give_zero() {
        let s = chi_square_equidist(&[10, 10, 10, 10, 10, 10]).unwrap();
        assert_eq!(s.statistic, 0.0);
        assert_eq!(s.dof, 5);
        assert_eq!(s.passes_999(), Some(true));
    }

    #[test]
    fn concentrated_counts_fail() {
        let s = chi_square_equidist(&[600, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(s.statistic, 3000.0);
        assert_eq!(s.passes_999(), Some(false));
    }

    #[test]
    fn too_few_observations() {
        assert!(matches!(
            chi_square_equidist(&[3, 4, 5, 6, 2, 1]),
            Err(Error::InsufficientData(_))
        ));
        assert!(chi_square_equidist(&[100]).is_err());
    }

    #[test]
    fn null_calibration_six_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let reps = 4000u64;
        let mut rejections = 0u64;
        for _ in 0..reps {
            let mut counts = [0u64; 6];
            for _ in 0..600 {
                counts[rng.random_range(0..6)] += 1;
            }
            if chi_square_equidist(&counts).unwrap().passes_999() == Some(false) {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / reps as f64;
        assert!(rate <= 0.001 + CONFIDENCE_SE * binomial_se(0.001, reps), "rate {rate}");
    }
}
