use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;

use crate::error::{Error, Result};

fn require_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "n must be even and at least 2, got {n}"
        )));
    }
    Ok(())
}

/// `C(n, n/2)`, the size of the target orbit.
pub fn central_binomial(n: usize) -> Result<BigUint> {
    require_even(n)?;
    Ok(binomial(BigUint::from(n), BigUint::from(n / 2)))
}

/// Upper bound `2t / C(n, n/2)` on `Pr[T <= t]` (unclamped).
pub fn theorem1_bound(n: usize, t: u64) -> Result<BigRational> {
    let c = central_binomial(n)?;
    Ok(BigRational::new(
        BigInt::from(2u64) * BigInt::from(t),
        BigInt::from(c),
    ))
}

/// Lower bound `C(n, n/2) / 4` on the expected hitting time.
pub fn expectation_bound(n: usize) -> Result<BigRational> {
    Ok(BigRational::new(
        BigInt::from(central_binomial(n)?),
        BigInt::from(4),
    ))
}

/// Shape-only reference curve `exp(n^(delta/2))` of the earlier bound, which
/// carries no known constant. `None` when `mu >= sqrt(n)`, where that bound is
/// trivial.
pub fn sutton_witt_reference(n: usize, mu: usize, delta: f64) -> Result<Option<f64>> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1/2), got {delta}"
        )));
    }
    if (mu as f64) >= (n as f64).sqrt() {
        return Ok(None);
    }
    Ok(Some((n as f64).powf(delta / 2.0).exp()))
}
