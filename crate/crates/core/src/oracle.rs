//! Exact evolution of the population law on tiny instances.
//!
//! States are ordered population tuples with arbitrary-precision rational
//! probabilities. Parent choice contributes factors `1 / (mu (mu - 1))` per
//! ordered slot pair and crossover contributes dyadic factors, so all
//! identities checked here hold with exact equality.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bitspace::BitString;
use crate::crossover::Crossover;
use crate::engine::{canonical_population, Init, Population, RunConfig};
use crate::error::{check_lengths, Error, Result};
use crate::symmetry::Automorphism;

/// Default limit on `n * mu` for exact evolution.
pub const STATE_GUARD: usize = 16;

fn check_guard(n: usize, mu: usize) -> Result<()> {
    if n * mu > STATE_GUARD {
        return Err(Error::GuardExceeded(format!(
            "exact oracle limited to n*mu <= {STATE_GUARD} (got n={n}, mu={mu}); use Monte Carlo mode"
        )));
    }
    Ok(())
}

fn ratio(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn add_to<K: Ord>(map: &mut BTreeMap<K, BigRational>, key: K, p: BigRational) {
    let slot = map.entry(key).or_insert_with(BigRational::zero);
    *slot += p;
}

/// Law of the population at some iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDistribution {
    n: usize,
    mu: usize,
    states: BTreeMap<Population, BigRational>,
}

impl StateDistribution {
    pub fn point(pop: Population) -> Result<Self> {
        check_guard(pop.n(), pop.size())?;
        Ok(Self {
            n: pop.n(),
            mu: pop.size(),
            states: BTreeMap::from([(pop, BigRational::one())]),
        })
    }

    /// Law of the initial population for `config`.
    pub fn initial(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        check_guard(config.n, config.mu)?;
        match config.init {
            Init::Canonical => Self::point(canonical_population(config.n, config.mu)?),
            Init::Random => {
                let (n, mu) = (config.n, config.mu);
                let cells = 1u64 << (n * mu);
                let p = ratio(1, cells);
                let states = (0..cells)
                    .map(|code| {
                        let members = (0..mu)
                            .map(|k| {
                                let w = (code >> (k * n)) & ((1 << n) - 1);
                                BitString::from_word_unchecked(n, w)
                            })
                            .collect();
                        (Population::new(members).expect("mu >= 2"), p.clone())
                    })
                    .collect();
                Ok(Self { n, mu, states })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn prob(&self, pop: &Population) -> BigRational {
        self.states.get(pop).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Population, &BigRational)> {
        self.states.iter()
    }

    pub fn total(&self) -> BigRational {
        self.states.values().fold(BigRational::zero(), |acc, p| acc + p)
    }

    fn pair_weight(&self) -> BigRational {
        ratio(1, (self.mu * (self.mu - 1)) as u64)
    }

    /// Calls `visit(next_population, offspring, probability)` for every
    /// one-iteration outcome from every state.
    fn for_each_transition<F>(&self, crossover: &Crossover, mut visit: F) -> Result<()>
    where
        F: FnMut(Population, &crate::crossover::OffspringPair, BigRational),
    {
        let w = self.pair_weight();
        for (pop, p) in &self.states {
            let pw = p * &w;
            let members = pop.members();
            for i in 0..self.mu {
                for j in 0..self.mu {
                    if i == j {
                        continue;
                    }
                    let dist = crossover.distribution(&members[i], &members[j])?;
                    for (pair, q) in dist.iter() {
                        let mut next = pop.clone();
                        next.replace(i, j, pair);
                        visit(next, pair, &pw * q.to_rational());
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn exact_step(d: &StateDistribution) -> Result<StateDistribution> {
    exact_step_with(d, &Crossover::fair())
}

/// One iteration of the algorithm applied to the law `d`.
pub fn exact_step_with(d: &StateDistribution, crossover: &Crossover) -> Result<StateDistribution> {
    check_guard(d.n, d.mu)?;
    let mut states = BTreeMap::new();
    d.for_each_transition(crossover, |next, _, p| add_to(&mut states, next, p))?;
    Ok(StateDistribution {
        n: d.n,
        mu: d.mu,
        states,
    })
}

/// Laws `d_0 = initial, d_1, ..., d_steps`.
pub fn evolve(
    initial: &StateDistribution,
    steps: usize,
    crossover: &Crossover,
) -> Result<Vec<StateDistribution>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial.clone());
    for _ in 0..steps {
        let next = exact_step_with(out.last().expect("non-empty"), crossover)?;
        out.push(next);
    }
    Ok(out)
}

/// Exact laws of the two offspring generated by one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffspringLaw {
    pub first: BTreeMap<BitString, BigRational>,
    pub second: BTreeMap<BitString, BigRational>,
}

impl OffspringLaw {
    pub fn first_prob(&self, x: &BitString) -> BigRational {
        self.first.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn second_prob(&self, x: &BitString) -> BigRational {
        self.second.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `Pr[first offspring in set]`.
    pub fn first_mass<'a>(&self, set: impl IntoIterator<Item = &'a BitString>) -> BigRational {
        set.into_iter().fold(BigRational::zero(), |acc, x| acc + self.first_prob(x))
    }

    pub fn second_mass<'a>(&self, set: impl IntoIterator<Item = &'a BitString>) -> BigRational {
        set.into_iter().fold(BigRational::zero(), |acc, x| acc + self.second_prob(x))
    }
}

pub fn offspring_distribution(d: &StateDistribution) -> Result<OffspringLaw> {
    offspring_distribution_with(d, &Crossover::fair())
}

/// Law of `(x_t, y_t)` marginals when one iteration is applied to a
/// population drawn from `d`.
pub fn offspring_distribution_with(
    d: &StateDistribution,
    crossover: &Crossover,
) -> Result<OffspringLaw> {
    check_guard(d.n, d.mu)?;
    let mut first = BTreeMap::new();
    let mut second = BTreeMap::new();
    d.for_each_transition(crossover, |_, pair, p| {
        add_to(&mut first, pair.first, p.clone());
        add_to(&mut second, pair.second, p);
    })?;
    Ok(OffspringLaw { first, second })
}

/// Law of `sigma(P)` for `P ~ d`.
pub fn pushforward_population(sigma: &Automorphism, d: &StateDistribution) -> Result<StateDistribution> {
    check_lengths(sigma.len(), d.n)?;
    let states = d
        .states
        .iter()
        .map(|(pop, p)| (pop.map_members(|x| sigma.apply_unchecked(x)), p.clone()))
        .collect();
    Ok(StateDistribution {
        n: d.n,
        mu: d.mu,
        states,
    })
}

/// Population law restricted to runs that have not yet generated the target,
/// plus the aggregated mass of runs that have.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitAugmentedDistribution {
    pub live: StateDistribution,
    pub hit: BigRational,
    pub target: BitString,
}

impl HitAugmentedDistribution {
    pub fn new(initial: StateDistribution, target: BitString) -> Result<Self> {
        check_lengths(initial.n, target.len())?;
        Ok(Self {
            live: initial,
            hit: BigRational::zero(),
            target,
        })
    }

    pub fn step(&self, crossover: &Crossover) -> Result<Self> {
        let mut states = BTreeMap::new();
        let mut newly_hit = BigRational::zero();
        let target = self.target;
        self.live.for_each_transition(crossover, |next, pair, p| {
            if pair.contains(&target) {
                newly_hit += p;
            } else {
                add_to(&mut states, next, p);
            }
        })?;
        Ok(Self {
            live: StateDistribution {
                n: self.live.n,
                mu: self.live.mu,
                states,
            },
            hit: &self.hit + newly_hit,
            target,
        })
    }

    pub fn total(&self) -> BigRational {
        self.live.total() + &self.hit
    }
}

/// Exact `Pr[T <= t]` for `t = 0..=t_max`.
pub fn hit_probabilities(
    config: &RunConfig,
    t_max: u64,
    crossover: &Crossover,
) -> Result<Vec<BigRational>> {
    let mut chain = HitAugmentedDistribution::new(StateDistribution::initial(config)?, config.target)?;
    let mut out = vec![chain.hit.clone()];
    for _ in 0..t_max {
        chain = chain.step(crossover)?;
        out.push(chain.hit.clone());
    }
    Ok(out)
}

/// Exact `Pr[T <= t]`.
pub fn exact_hit_probability(config: &RunConfig, t: u64) -> Result<BigRational> {
    Ok(hit_probabilities(config, t, &Crossover::fair())?
        .pop()
        .expect("non-empty"))
}
