use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitspace::{canonical_strings, BitString};
use crate::crossover::Crossover;
use crate::engine::{Init, RunConfig, Simulator, TrialRecord};
use crate::error::{Error, Result};
use crate::symmetry::hamming_shell;

use super::bounds::{expectation_bound, theorem1_bound};
use super::stats::{binomial_se, chi_square_critical_999, chi_square_equidist, ChiSquare, CONFIDENCE_SE};

/// Largest `n` for the random-initialization uniformity test.
pub const UNIFORMITY_GUARD: usize = 10;

const BATCH: u64 = 1 << 14;

/// Goodness-of-fit of offspring counts against uniformity over a cell set.
#[derive(Debug, Clone, Serialize)]
pub struct EquidistReport {
    pub cells_label: String,
    pub iteration: u64,
    pub trials: u64,
    pub observations: u64,
    pub cells: Vec<BitString>,
    pub counts: Vec<u64>,
    pub chi_square: ChiSquare,
    pub critical_999: Option<f64>,
    pub passed: bool,
}

impl EquidistReport {
    fn new(label: String, iteration: u64, trials: u64, cells: Vec<BitString>, counts: Vec<u64>) -> Result<Self> {
        let chi_square = chi_square_equidist(&counts)?;
        let critical_999 = chi_square_critical_999(chi_square.dof);
        Ok(Self {
            cells_label: label,
            iteration,
            trials,
            observations: counts.iter().sum(),
            cells,
            counts,
            passed: critical_999.is_some_and(|c| chi_square.statistic < c),
            chi_square,
            critical_999,
        })
    }
}

/// Counts the first offspring `x_t` over the target orbit `B` (the strings at
/// distance `n/2` from `z`), running trials in deterministic batches until at
/// least `hits` offspring have landed in `B`.
pub fn equidist_over_orbit(sim: &Simulator, t: u64, hits: u64) -> Result<EquidistReport> {
    let n = sim.config().n;
    let z = canonical_strings(n)?.z;
    let cells: Vec<BitString> = hamming_shell(&z, n / 2)?.into_iter().collect();
    let needed = hits.max(5 * cells.len() as u64);
    let max_trials = needed.saturating_mul(1 << 12);
    let mut counts = vec![0u64; cells.len()];
    let mut observed = 0u64;
    let mut trials = 0u64;
    while observed < needed {
        if trials >= max_trials {
            return Err(Error::InsufficientData(format!(
                "only {observed} of {needed} offspring landed in the orbit after {trials} trials"
            )));
        }
        let batch: Vec<Option<usize>> = (trials..trials + BATCH)
            .into_par_iter()
            .map(|k| {
                sim.offspring_at(k, t)
                    .map(|pair| cells.binary_search(&pair.first).ok())
            })
            .collect::<Result<_>>()?;
        for idx in batch.into_iter().flatten() {
            counts[idx] += 1;
            observed += 1;
        }
        trials += BATCH;
    }
    EquidistReport::new(format!("orbit of target, n={n}"), t, trials, cells, counts)
}

/// Chi-square test of `x_1` over all of `{0,1}^n` under random initialization.
pub fn uniformity_random_init(
    n: usize,
    mu: usize,
    trials: u64,
    seed: u64,
    crossover: &Crossover,
) -> Result<EquidistReport> {
    if n > UNIFORMITY_GUARD {
        return Err(Error::GuardExceeded(format!(
            "uniformity test limited to n <= {UNIFORMITY_GUARD}, got {n}"
        )));
    }
    let config = RunConfig {
        init: Init::Random,
        mu,
        ..RunConfig::new(n, 2)?
    }
    .with_seed(seed);
    let sim = Simulator::new(config)?.with_crossover(crossover.clone());
    let cells: Vec<BitString> = BitString::all(n)?.collect();
    if trials < 5 * cells.len() as u64 {
        return Err(Error::InsufficientData(format!(
            "{trials} trials over {} cells; at least {} needed",
            cells.len(),
            5 * cells.len()
        )));
    }
    let firsts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|k| sim.offspring_at(k, 1).map(|pair| pair.first.word()))
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; cells.len()];
    for w in firsts {
        counts[w as usize] += 1;
    }
    EquidistReport::new(format!("all strings, n={n}"), 1, trials, cells, counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub t: u64,
    /// `2t / C(n, n/2)`, unclamped.
    pub bound: BigRational,
    pub hits: u64,
    pub empirical: f64,
    pub radius: f64,
    /// `empirical <= bound + radius`.
    pub consistent: bool,
}

impl BoundRow {
    /// The bound clamped to `[0, 1]` for display.
    pub fn bound_clamped(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.bound.to_f64().unwrap_or(f64::INFINITY).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub trials: u64,
    pub censored: u64,
    pub rows: Vec<BoundRow>,
    pub expectation_bound: BigRational,
    /// Mean of the hitting times, counting censored runs at their budget.
    pub mean: f64,
    pub median: u64,
}

impl BoundReport {
    pub fn all_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.consistent)
    }
}

/// Compares empirical `Pr[T <= t]` with `2t / C(n, n/2)` at each checkpoint.
pub fn bound_report(records: &[TrialRecord], n: usize, checkpoints: &[u64]) -> Result<BoundReport> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no trials".into()));
    }
    let trials = records.len() as u64;
    let mut times: Vec<u64> = records.iter().map(TrialRecord::time_or_bound).collect();
    times.sort_unstable();
    let hit_times: Vec<u64> = {
        let mut v: Vec<u64> = records.iter().filter_map(|r| r.hitting_time).collect();
        v.sort_unstable();
        v
    };
    let rows = checkpoints
        .iter()
        .map(|&t| {
            let bound = theorem1_bound(n, t)?;
            let hits = hit_times.partition_point(|&h| h <= t) as u64;
            let empirical = hits as f64 / trials as f64;
            let radius = CONFIDENCE_SE * binomial_se(empirical, trials);
            let consistent = BigRational::from_float(empirical - radius)
                .is_some_and(|lhs| lhs <= bound);
            Ok(BoundRow {
                t,
                bound,
                hits,
                empirical,
                radius,
                consistent,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport {
        n,
        trials,
        censored: records.iter().filter(|r| r.censored()).count() as u64,
        rows,
        expectation_bound: expectation_bound(n)?,
        mean: times.iter().map(|&t| t as f64).sum::<f64>() / trials as f64,
        median: times[(times.len() - 1) / 2],
    })
}
