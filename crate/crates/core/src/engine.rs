//! The selection-free steady-state GA.
//!
//! Each iteration draws two distinct population slots uniformly at random,
//! applies crossover to their occupants and writes the two offspring back into
//! the same slots: the first offspring into the first-drawn slot.
//!
//! Trial `k` of a configuration uses a ChaCha8 stream seeded from the
//! configuration seed with stream id `k`, so results do not depend on how
//! trials are scheduled across threads.

use std::fmt;

use num_traits::ToPrimitive;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitspace::{canonical_strings, BitString};
use crate::crossover::{Crossover, OffspringPair};
use crate::error::{check_lengths, Error, Result};
use crate::experiments::central_binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    /// `mu/2` copies of `z = 1010...10` followed by `mu/2` copies of `z'`.
    Canonical,
    /// `mu` independent uniform strings.
    Random,
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Init::Canonical => "canonical",
            Init::Random => "random",
        })
    }
}

impl std::str::FromStr for Init {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Init::Canonical),
            "random" => Ok(Init::Random),
            other => Err(Error::InvalidArgument(format!(
                "init must be canonical or random, got {other:?}"
            ))),
        }
    }
}

/// An ordered `mu`-tuple of individuals. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Population(Vec<BitString>);

impl Population {
    pub fn new(members: Vec<BitString>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "population size must be at least 2, got {}",
                members.len()
            )));
        }
        let n = members[0].len();
        for m in &members {
            check_lengths(n, m.len())?;
        }
        Ok(Self(members))
    }

    pub fn members(&self) -> &[BitString] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn n(&self) -> usize {
        self.0[0].len()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.0.contains(x)
    }

    /// Number of ones at each position `1..=n`.
    pub fn column_counts(&self) -> Vec<usize> {
        let n = self.n();
        (1..=n)
            .map(|i| self.0.iter().filter(|x| x.get(i)).count())
            .collect()
    }

    /// Replaces the occupants of slots `i` and `j` (0-based).
    pub fn replace(&mut self, i: usize, j: usize, offspring: &OffspringPair) {
        self.0[i] = offspring.first;
        self.0[j] = offspring.second;
    }

    pub(crate) fn map_members(&self, f: impl Fn(&BitString) -> BitString) -> Self {
        Self(self.0.iter().map(f).collect())
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub mu: usize,
    pub init: Init,
    pub t_max: u64,
    pub target: BitString,
    pub seed: u64,
}

/// `16 * C(n, n/2)`, saturating.
pub fn default_t_max(n: usize) -> u64 {
    central_binomial(n)
        .ok()
        .and_then(|c| (c * 16u32).to_u64())
        .unwrap_or(u64::MAX)
}

impl RunConfig {
    /// Canonical initialization, all-ones target, default `t_max`, seed 0.
    pub fn new(n: usize, mu: usize) -> Result<Self> {
        let config = Self {
            n,
            mu,
            init: Init::Canonical,
            t_max: default_t_max(n),
            target: BitString::ones(n)?,
            seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_t_max(mut self, t_max: u64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_target(mut self, target: BitString) -> Self {
        self.target = target;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 != 0 || self.n > crate::bitspace::MAX_LEN {
            return Err(Error::InvalidArgument(format!(
                "n must be even and in 2..=64, got {}",
                self.n
            )));
        }
        if self.mu < 2 {
            return Err(Error::InvalidArgument(format!(
                "population size must be at least 2, got {}",
                self.mu
            )));
        }
        if self.init == Init::Canonical && self.mu % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "canonical initialization needs an even population size, got {}",
                self.mu
            )));
        }
        check_lengths(self.n, self.target.len())
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    /// First iteration whose offspring pair contains the target, or `None`
    /// if the run was censored at `t_max`.
    pub hitting_time: Option<u64>,
    pub iterations: u64,
}

impl TrialRecord {
    pub fn censored(&self) -> bool {
        self.hitting_time.is_none()
    }

    /// Hitting time, or the number of iterations run when censored (a lower
    /// bound on the hitting time).
    pub fn time_or_bound(&self) -> u64 {
        self.hitting_time.unwrap_or(self.iterations)
    }
}

/// Uniform unordered pair of distinct 0-based slots, in draw order.
pub fn select_parents<R: Rng + ?Sized>(mu: usize, rng: &mut R) -> (usize, usize) {
    debug_assert!(mu >= 2);
    let i = rng.random_range(0..mu);
    let mut j = rng.random_range(0..mu - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// One iteration in place; returns the offspring pair.
pub fn step<R: RngCore + ?Sized>(
    pop: &mut Population,
    crossover: &Crossover,
    rng: &mut R,
) -> OffspringPair {
    let (i, j) = select_parents(pop.size(), rng);
    let (x, y) = (pop.0[i], pop.0[j]);
    let offspring = crossover.sample_unchecked(&x, &y, rng);
    pop.replace(i, j, &offspring);
    offspring
}

/// `mu/2` copies of `z` followed by `mu/2` copies of `z'`.
pub fn canonical_population(n: usize, mu: usize) -> Result<Population> {
    if mu % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "canonical initialization needs an even population size, got {mu}"
        )));
    }
    let c = canonical_strings(n)?;
    Population::new(
        std::iter::repeat_n(c.z, mu / 2)
            .chain(std::iter::repeat_n(c.z_prime, mu / 2))
            .collect(),
    )
}

pub fn init_population<R: RngCore + ?Sized>(config: &RunConfig, rng: &mut R) -> Result<Population> {
    config.validate()?;
    let n = config.n;
    let members = match config.init {
        Init::Canonical => return canonical_population(n, config.mu),
        Init::Random => {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            (0..config.mu)
                .map(|_| BitString::from_word_unchecked(n, rng.next_u64() & mask))
                .collect()
        }
    };
    Population::new(members)
}

/// Runs trials of one configuration with a given crossover operator.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: RunConfig,
    crossover: Crossover,
}

impl Simulator {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            crossover: Crossover::fair(),
        })
    }

    pub fn with_crossover(mut self, crossover: Crossover) -> Self {
        self.crossover = crossover;
        self
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn crossover(&self) -> &Crossover {
        &self.crossover
    }

    pub fn trial_rng(&self, trial_id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(trial_id);
        rng
    }

    pub fn run_trial(&self, trial_id: u64) -> TrialRecord {
        self.run_trial_observed(trial_id, |_, _, _| {})
    }

    /// Runs one trial, calling `observe(t, population, offspring)` after every
    /// iteration `t`.
    pub fn run_trial_observed<F>(&self, trial_id: u64, mut observe: F) -> TrialRecord
    where
        F: FnMut(u64, &Population, &OffspringPair),
    {
        let mut rng = self.trial_rng(trial_id);
        let mut pop = init_population(&self.config, &mut rng).expect("config validated");
        let target = self.config.target;
        for t in 1..=self.config.t_max {
            let offspring = step(&mut pop, &self.crossover, &mut rng);
            observe(t, &pop, &offspring);
            if offspring.contains(&target) {
                return TrialRecord {
                    trial_id,
                    hitting_time: Some(t),
                    iterations: t,
                };
            }
        }
        TrialRecord {
            trial_id,
            hitting_time: None,
            iterations: self.config.t_max,
        }
    }

    /// Trials `0..trials` in parallel, returned in trial order.
    pub fn run_trials(&self, trials: u64) -> Vec<TrialRecord> {
        (0..trials)
            .into_par_iter()
            .map(|k| self.run_trial(k))
            .collect()
    }

    /// The offspring pair generated at iteration `t` of trial `trial_id`,
    /// ignoring the target (the run is not stopped at a hit).
    pub fn offspring_at(&self, trial_id: u64, t: u64) -> Result<OffspringPair> {
        if t == 0 {
            return Err(Error::InvalidArgument("iterations are numbered from 1".into()));
        }
        let mut rng = self.trial_rng(trial_id);
        let mut pop = init_population(&self.config, &mut rng)?;
        let mut last = None;
        for _ in 0..t {
            last = Some(step(&mut pop, &self.crossover, &mut rng));
        }
        Ok(last.expect("t >= 1"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_init_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pop = init_population(&RunConfig::new(4, 2).unwrap(), &mut rng).unwrap();
        assert_eq!(pop.members(), &[bs("1010"), bs("0101")]);
        let pop = init_population(&RunConfig::new(2, 4).unwrap(), &mut rng).unwrap();
        assert_eq!(pop.members(), &[bs("10"), bs("10"), bs("01"), bs("01")]);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(4, 3).is_err());
        assert!(RunConfig::new(3, 2).is_err());
        assert!(RunConfig::new(4, 1).is_err());
        assert!(RunConfig::new(4, 2).unwrap().with_target(bs("11")).validate().is_err());
        let odd_random = RunConfig {
            mu: 3,
            init: Init::Random,
            ..RunConfig::new(4, 2).unwrap()
        };
        assert!(odd_random.validate().is_ok());
        assert_eq!(RunConfig::new(8, 2).unwrap().t_max, 16 * 70);
    }

    #[test]
    fn random_init_is_uniform_per_position() {
        let config = RunConfig::new(10, 2).unwrap().with_init(Init::Random);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 10_000;
        let mut ones = vec![0usize; 10];
        for _ in 0..draws / 2 {
            let pop = init_population(&config, &mut rng).unwrap();
            for (i, c) in pop.column_counts().into_iter().enumerate() {
                ones[i] += c;
            }
        }
        let se = (0.25 / draws as f64).sqrt();
        for c in ones {
            assert!((c as f64 / draws as f64 - 0.5).abs() <= 4.0 * se);
        }
    }

    #[test]
    fn select_parents_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (i, j) = select_parents(2, &mut rng);
            assert_eq!((i.min(j), i.max(j)), (0, 1));
        }
    }

    #[test]
    fn select_parents_uniform_over_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 100_000;
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for _ in 0..draws {
            let (i, j) = select_parents(4, &mut rng);
            assert_ne!(i, j);
            *counts.entry((i.min(j), i.max(j))).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        for c in counts.values() {
            assert!((*c as f64 / draws as f64 - p).abs() <= 4.0 * se);
        }
    }

    #[test]
    fn step_with_complementary_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fair = Crossover::fair();
        let mut seen = BTreeMap::new();
        for _ in 0..4000 {
            let mut pop = Population::new(vec![bs("10"), bs("01")]).unwrap();
            step(&mut pop, &fair, &mut rng);
            assert_eq!(pop.members()[1], pop.members()[0].complement());
            *seen.entry(pop.clone()).or_insert(0) += 1;
        }
        assert_eq!(seen.len(), 4);
        for c in seen.values() {
            assert!((*c as f64 - 1000.0).abs() < 4.0 * (4000.0f64 * 0.25 * 0.75).sqrt());
        }
    }

    #[test]
    fn step_places_first_offspring_in_first_slot() {
        let mut pop = Population::new(vec![bs("00"), bs("11"), bs("00")]).unwrap();
        // advance until the next draw selects slots 1 then 0
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        while select_parents(3, &mut rng.clone()) != (1, 0) {
            select_parents(3, &mut rng);
        }
        let mut probe = rng.clone();
        select_parents(3, &mut probe);
        let coins = probe.next_u64() & 0b11;
        let offspring = step(&mut pop, &Crossover::fair(), &mut rng);
        assert_eq!(pop.members()[1], offspring.first);
        assert_eq!(pop.members()[0], offspring.second);
        assert_eq!(pop.members()[2], bs("00"));
        // coin bit 0 decides position 1
        assert_eq!(offspring.first.get(1), coins & 1 == 1);
        assert_eq!(offspring.first.get(2), coins & 2 == 2);
    }

    #[test]
    fn identical_population_is_fixed() {
        let x = bs("101100");
        let mut pop = Population::new(vec![x; 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            step(&mut pop, &Crossover::fair(), &mut rng);
        }
        assert_eq!(pop.members(), &[x; 5]);
    }

    #[test]
    fn column_sums_are_preserved() {
        let config = RunConfig::new(8, 6).unwrap().with_init(Init::Random).with_seed(6);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut pop = init_population(&config, &mut rng).unwrap();
        let before = pop.column_counts();
        for _ in 0..1000 {
            step(&mut pop, &Crossover::fair(), &mut rng);
            assert_eq!(pop.column_counts(), before);
        }
    }

    #[test]
    fn zero_budget_is_censored() {
        let sim = Simulator::new(RunConfig::new(4, 2).unwrap().with_t_max(0)).unwrap();
        let r = sim.run_trial(0);
        assert!(r.censored());
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn hit_iteration_contains_target() {
        let sim = Simulator::new(RunConfig::new(6, 4).unwrap().with_seed(99)).unwrap();
        for k in 0..200 {
            let mut last = None;
            let r = sim.run_trial_observed(k, |_, _, o| last = Some(*o));
            if let Some(t) = r.hitting_time {
                assert!(t >= 1);
                assert!(last.unwrap().contains(&sim.config().target));
            }
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let sim = Simulator::new(RunConfig::new(6, 4).unwrap().with_seed(42)).unwrap();
        let a = sim.run_trials(300);
        let b = sim.run_trials(300);
        assert_eq!(a, b);
        assert_eq!(sim.run_trial(123), a[123]);
        let other = Simulator::new(RunConfig::new(6, 4).unwrap().with_seed(43)).unwrap();
        assert_ne!(other.run_trials(300), a);
    }

    #[test]
    fn two_bit_mean_hitting_time() {
        // mu = 2, n = 2: each iteration hits with probability 1/2
        let sim = Simulator::new(RunConfig::new(2, 2).unwrap().with_seed(1)).unwrap();
        let trials = 100_000;
        let records = sim.run_trials(trials);
        assert!(records.iter().all(|r| !r.censored()));
        let mean = records.iter().map(|r| r.time_or_bound() as f64).sum::<f64>() / trials as f64;
        // geometric(1/2): mean 2, variance 2
        let se = (2.0 / trials as f64).sqrt();
        assert!((mean - 2.0).abs() <= 3.0 * se, "mean {mean}");
    }
}
