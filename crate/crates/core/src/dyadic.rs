//! Exact dyadic rationals `numer / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `numer / 2^exp` in lowest terms (odd numerator, or zero with `exp == 0`),
/// so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numer: BigUint,
    exp: u32,
}

impl Dyadic {
    pub fn new(numer: impl Into<BigUint>, exp: u32) -> Self {
        let mut d = Self {
            numer: numer.into(),
            exp,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Self::new(0u32, 0)
    }

    pub fn one() -> Self {
        Self::new(1u32, 0)
    }

    pub fn half() -> Self {
        Self::new(1u32, 1)
    }

    /// `2^-exp`.
    pub fn pow2_inv(exp: u32) -> Self {
        Self::new(1u32, exp)
    }

    fn normalize(&mut self) {
        if self.numer.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.numer.trailing_zeros().unwrap_or(0).min(self.exp as u64) as u32;
        self.numer >>= tz;
        self.exp -= tz;
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::new(self.numer.pow(k), self.exp * k)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            self.numer.clone().into(),
            (BigUint::one() << self.exp as usize).into(),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.numer.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(self.exp as i32)
    }

    fn aligned(&self, other: &Self) -> (BigUint, BigUint, u32) {
        let exp = self.exp.max(other.exp);
        (
            &self.numer << (exp - self.exp) as usize,
            &other.numer << (exp - other.exp) as usize,
            exp,
        )
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a + b, exp)
    }
}

/// Panics if the result would be negative.
impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        assert!(a >= b, "dyadic subtraction would go negative");
        Dyadic::new(a - b, exp)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numer * &rhs.numer, self.exp + rhs.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, BigUint::one() << self.exp as usize)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

/// Parses `"p"` or `"p/q"` with `q` a power of two.
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a dyadic rational: {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let numer: BigUint = p.parse().map_err(|_| bad())?;
        let denom: u64 = q.parse().map_err(|_| bad())?;
        if denom == 0 || !denom.is_power_of_two() {
            return Err(bad());
        }
        Ok(Dyadic::new(numer, denom.trailing_zeros()))
    }
}
