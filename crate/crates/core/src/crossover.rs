//! Two-parent two-offspring uniform crossover.
//!
//! Positions where the parents agree are copied into both offspring. At each
//! position where they differ, the offspring receive `(1, 0)` or `(0, 1)`.
//! The standard operator picks each with probability 1/2; [`Crossover`] also
//! admits a biased coin, which is used as a deliberately broken fixture.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::bitspace::BitString;
use crate::dyadic::Dyadic;
use crate::error::{check_lengths, Error, Result};
use crate::symmetry::Automorphism;

/// Default cap on `H(x, y)` for [`Crossover::distribution`]; the support has
/// `2^H(x, y)` elements.
pub const DISTRIBUTION_GUARD: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OffspringPair {
    pub first: BitString,
    pub second: BitString,
}

impl OffspringPair {
    pub fn new(first: BitString, second: BitString) -> Self {
        Self { first, second }
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.first == *x || self.second == *x
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.second, self.first)
    }

    pub fn map(&self, sigma: &Automorphism) -> Result<Self> {
        Ok(Self::new(sigma.apply(&self.first)?, sigma.apply(&self.second)?))
    }
}

/// The factor `p(a, b, c, d)`: probability that parents with bits `(a, b)` at a
/// position produce offspring bits `(c, d)` there.
pub fn p_factor(a: bool, b: bool, c: bool, d: bool) -> Dyadic {
    if a == b && b == c && c == d {
        Dyadic::one()
    } else if a != b && c != d {
        Dyadic::half()
    } else {
        Dyadic::zero()
    }
}

/// Exact law of an offspring pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairDistribution {
    support: BTreeMap<OffspringPair, Dyadic>,
}

impl PairDistribution {
    pub fn point(pair: OffspringPair) -> Self {
        Self {
            support: BTreeMap::from([(pair, Dyadic::one())]),
        }
    }

    pub fn from_map(support: BTreeMap<OffspringPair, Dyadic>) -> Self {
        let support = support.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Self { support }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn prob(&self, pair: &OffspringPair) -> Dyadic {
        self.support.get(pair).cloned().unwrap_or_else(Dyadic::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OffspringPair, &Dyadic)> {
        self.support.iter()
    }

    pub fn total(&self) -> Dyadic {
        self.support.values().fold(Dyadic::zero(), |acc, p| &acc + p)
    }

    /// Law of `(sigma(first), sigma(second))`.
    pub fn pushforward(&self, sigma: &Automorphism) -> Result<Self> {
        let mut support = BTreeMap::new();
        for (pair, p) in &self.support {
            // sigma is a bijection, so keys cannot collide
            support.insert(pair.map(sigma)?, p.clone());
        }
        Ok(Self { support })
    }

    pub fn swap_components(&self) -> Self {
        Self {
            support: self
                .support
                .iter()
                .map(|(pair, p)| (pair.swapped(), p.clone()))
                .collect(),
        }
    }
}

/// Deposits the low bits of `coins` into the set bits of `positions`, taking
/// position 1 (the most significant set bit) first.
#[inline]
fn deposit(mut coins: u64, positions: u64) -> u64 {
    let mut out = 0u64;
    let mut rest = positions;
    while rest != 0 {
        let top = 63 - rest.leading_zeros();
        let bit = 1u64 << top;
        if coins & 1 == 1 {
            out |= bit;
        }
        coins >>= 1;
        rest &= !bit;
    }
    out
}

/// The crossover operator, parameterized by the probability that a differing
/// position yields `(1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossover {
    one_first: Dyadic,
    // one_first * 2^64, only meaningful for biased coins
    threshold: u128,
}

impl Default for Crossover {
    fn default() -> Self {
        Self::fair()
    }
}

impl Crossover {
    pub fn fair() -> Self {
        Self {
            one_first: Dyadic::half(),
            threshold: 1u128 << 63,
        }
    }

    /// Crossover whose coin gives `(1, 0)` with probability `one_first`.
    pub fn biased(one_first: Dyadic) -> Result<Self> {
        if one_first > Dyadic::one() || one_first.exp() > 64 {
            return Err(Error::InvalidArgument(format!(
                "coin probability must be a dyadic in [0, 1] with denominator at most 2^64, got {one_first}"
            )));
        }
        let threshold = u128::try_from(one_first.numer().clone()).expect("numerator <= 2^64")
            << (64 - one_first.exp());
        Ok(Self {
            one_first,
            threshold,
        })
    }

    pub fn is_fair(&self) -> bool {
        self.one_first == Dyadic::half()
    }

    pub fn coin(&self) -> &Dyadic {
        &self.one_first
    }

    /// Draws one offspring pair.
    ///
    /// Coins are consumed in position order over the differing positions. The
    /// fair operator draws a single `u64` when the parents differ anywhere and
    /// uses its low `H(x, y)` bits as the coins; a biased operator draws one
    /// `u64` per differing position.
    pub fn sample<R: RngCore + ?Sized>(
        &self,
        x: &BitString,
        y: &BitString,
        rng: &mut R,
    ) -> Result<OffspringPair> {
        check_lengths(x.len(), y.len())?;
        Ok(self.sample_unchecked(x, y, rng))
    }

    #[inline]
    pub(crate) fn sample_unchecked<R: RngCore + ?Sized>(
        &self,
        x: &BitString,
        y: &BitString,
        rng: &mut R,
    ) -> OffspringPair {
        let n = x.len();
        let diff = x.word() ^ y.word();
        if diff == 0 {
            return OffspringPair::new(*x, *y);
        }
        let h = diff.count_ones();
        let coins = if self.is_fair() {
            let r = rng.next_u64();
            if h == 64 {
                r
            } else {
                r & ((1u64 << h) - 1)
            }
        } else {
            let mut c = 0u64;
            for k in 0..h {
                if (rng.next_u64() as u128) < self.threshold {
                    c |= 1 << k;
                }
            }
            c
        };
        let first = (x.word() & y.word()) | deposit(coins, diff);
        OffspringPair::new(
            BitString::from_word_unchecked(n, first),
            BitString::from_word_unchecked(n, first ^ diff),
        )
    }

    /// Exact offspring law, refusing parents with `H(x, y) > DISTRIBUTION_GUARD`.
    pub fn distribution(&self, x: &BitString, y: &BitString) -> Result<PairDistribution> {
        self.distribution_with_guard(x, y, DISTRIBUTION_GUARD)
    }

    pub fn distribution_with_guard(
        &self,
        x: &BitString,
        y: &BitString,
        guard: u32,
    ) -> Result<PairDistribution> {
        let h = x.hamming(y)?;
        if h > guard {
            return Err(Error::GuardExceeded(format!(
                "crossover support has 2^{h} pairs; guard is H(x,y) <= {guard}"
            )));
        }
        let n = x.len();
        let diff = x.word() ^ y.word();
        let common = x.word() & y.word();
        let zero_first = &Dyadic::one() - &self.one_first;
        let mut support = BTreeMap::new();
        for coins in 0..1u64 << h {
            let ones = coins.count_ones();
            let p = &self.one_first.pow(ones) * &zero_first.pow(h - ones);
            if p.is_zero() {
                continue;
            }
            let first = common | deposit(coins, diff);
            let pair = OffspringPair::new(
                BitString::from_word_unchecked(n, first),
                BitString::from_word_unchecked(n, first ^ diff),
            );
            support.insert(pair, p);
        }
        Ok(PairDistribution { support })
    }
}

pub fn crossover_sample<R: Rng + ?Sized>(
    x: &BitString,
    y: &BitString,
    rng: &mut R,
) -> Result<OffspringPair> {
    Crossover::fair().sample(x, y, rng)
}

pub fn crossover_distribution(x: &BitString, y: &BitString) -> Result<PairDistribution> {
    Crossover::fair().distribution(x, y)
}
