//! Named pass/fail checks, one per verified property, shared by the CLI's
//! `verify all` runner.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitspace::{canonical_strings, BitString};
use crate::crossover::Crossover;
use crate::engine::{Init, RunConfig, Simulator};
use crate::error::Result;
use crate::oracle::{
    evolve, exact_step_with, hit_probabilities, offspring_distribution_with,
    pushforward_population, StateDistribution,
};
use crate::symmetry::{hamming_shell, random_automorphism, target_orbit, AutomorphismKind};

use super::bounds::{central_binomial, theorem1_bound};
use super::reports::{bound_report, equidist_over_orbit, uniformity_random_init};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim: String,
    pub instance: String,
    pub passed: bool,
    pub detail: String,
}

impl ClaimResult {
    fn new(claim: &str, instance: String, passed: bool, detail: String) -> Self {
        Self {
            claim: claim.to_string(),
            instance,
            passed,
            detail,
        }
    }

    /// A check that could not run counts as failed.
    pub fn from_error(claim: &str, instance: String, err: &crate::Error) -> Self {
        Self::new(claim, instance, false, format!("error: {err}"))
    }
}

const KINDS: [AutomorphismKind; 3] = [
    AutomorphismKind::Rotation,
    AutomorphismKind::Reflection,
    AutomorphismKind::Product { max_len: 4 },
];

fn random_string(n: usize, rng: &mut ChaCha8Rng) -> BitString {
    BitString::from_word(n, rng.random::<u64>() & ((1u64 << n) - 1)).expect("masked")
}

/// Target orbit equals the half-distance shell around `z` and has
/// `C(n, n/2)` members.
pub fn orbit_equals_shell(n: usize) -> Result<ClaimResult> {
    let z = canonical_strings(n)?.z;
    let orbit = target_orbit(n)?;
    let shell = hamming_shell(&z, n / 2)?;
    let c = central_binomial(n)?;
    let passed = orbit.members == shell && c == orbit.len().into();
    Ok(ClaimResult::new(
        "Lemma 2",
        format!("n={n}"),
        passed,
        format!("|orbit|={} |shell|={} C(n,n/2)={c}", orbit.len(), shell.len()),
    ))
}

/// Crossover commutes with automorphisms: exact comparison over random
/// parent pairs and random rotations, reflections and short products.
pub fn crossover_commutes(
    n: usize,
    pairs: usize,
    automorphisms: usize,
    seed: u64,
    crossover: &Crossover,
) -> Result<ClaimResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut mismatches = 0usize;
    for _ in 0..pairs {
        let x = random_string(n, &mut rng);
        let y = random_string(n, &mut rng);
        let base = crossover.distribution(&x, &y)?;
        for k in 0..automorphisms {
            let sigma = random_automorphism(n, KINDS[k % KINDS.len()], &mut rng)?;
            let left = base.pushforward(&sigma)?;
            let right = crossover.distribution(&sigma.apply(&x)?, &sigma.apply(&y)?)?;
            if left != right {
                mismatches += 1;
            }
        }
    }
    Ok(ClaimResult::new(
        "Lemma 3",
        format!("n={n} pairs={pairs} automorphisms={automorphisms}"),
        mismatches == 0,
        format!("{mismatches} of {} comparisons differ", pairs * automorphisms),
    ))
}

/// One exact iteration commutes with relabeling populations by automorphisms,
/// checked along the canonical run for `t < t_max`.
pub fn step_commutes(
    n: usize,
    mu: usize,
    t_max: usize,
    automorphisms: usize,
    seed: u64,
    crossover: &Crossover,
) -> Result<ClaimResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigmas = (0..automorphisms)
        .map(|k| random_automorphism(n, KINDS[k % KINDS.len()], &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let initial = StateDistribution::initial(&RunConfig::new(n, mu)?)?;
    let laws = evolve(&initial, t_max.saturating_sub(1), crossover)?;
    let mut mismatches = 0usize;
    for d in &laws {
        let stepped = exact_step_with(d, crossover)?;
        for s in &sigmas {
            let left = pushforward_population(s, &stepped)?;
            let right = exact_step_with(&pushforward_population(s, d)?, crossover)?;
            if left != right {
                mismatches += 1;
            }
        }
    }
    Ok(ClaimResult::new(
        "Lemma 4",
        format!("n={n} mu={mu} t<={t_max}"),
        mismatches == 0,
        format!("{mismatches} of {} comparisons differ", laws.len() * sigmas.len()),
    ))
}

fn offspring_laws(
    n: usize,
    mu: usize,
    t_max: usize,
    crossover: &Crossover,
) -> Result<Vec<crate::oracle::OffspringLaw>> {
    let initial = StateDistribution::initial(&RunConfig::new(n, mu)?)?;
    evolve(&initial, t_max.saturating_sub(1), crossover)?
        .iter()
        .map(|d| offspring_distribution_with(d, crossover))
        .collect()
}

/// Every member of the target orbit is exactly as likely as the target to be
/// generated at iterations `1..=t_max`, for both offspring.
pub fn orbit_equiprobable(n: usize, mu: usize, t_max: usize, crossover: &Crossover) -> Result<ClaimResult> {
    let orbit = target_orbit(n)?;
    let target = BitString::ones(n)?;
    let mut unequal = 0usize;
    for law in offspring_laws(n, mu, t_max, crossover)? {
        let (pf, ps) = (law.first_prob(&target), law.second_prob(&target));
        unequal += orbit
            .members
            .iter()
            .filter(|x| law.first_prob(x) != pf || law.second_prob(x) != ps)
            .count();
    }
    Ok(ClaimResult::new(
        "Corollary 5",
        format!("n={n} mu={mu} t<={t_max}"),
        unequal == 0,
        format!("{unequal} orbit members with a different probability"),
    ))
}

/// `Pr[x_t = x*] * |B| = Pr[x_t in B]` exactly, and the same for `y_t`.
pub fn target_mass_identity(n: usize, mu: usize, t_max: usize, crossover: &Crossover) -> Result<ClaimResult> {
    let orbit = target_orbit(n)?;
    let target = BitString::ones(n)?;
    let size = BigRational::from_integer(BigInt::from(orbit.len()));
    let mut failures = 0usize;
    let mut last = String::new();
    for (k, law) in offspring_laws(n, mu, t_max, crossover)?.iter().enumerate() {
        let first_ok = law.first_prob(&target) * &size == law.first_mass(&orbit.members);
        let second_ok = law.second_prob(&target) * &size == law.second_mass(&orbit.members);
        failures += (!first_ok) as usize + (!second_ok) as usize;
        last = format!(
            "t={}: Pr[x_t=x*]={} Pr[x_t in B]={}",
            k + 1,
            law.first_prob(&target),
            law.first_mass(&orbit.members)
        );
    }
    Ok(ClaimResult::new(
        "Eq. 1",
        format!("n={n} mu={mu} t<={t_max}"),
        failures == 0,
        format!("{failures} failing identities; {last}"),
    ))
}

/// Exact `Pr[T <= t] <= 2t / C(n, n/2)` for `t <= t_max`.
pub fn hit_bound_exact(n: usize, mu: usize, t_max: u64, crossover: &Crossover) -> Result<ClaimResult> {
    let config = RunConfig::new(n, mu)?;
    let probs = hit_probabilities(&config, t_max, crossover)?;
    let mut violations = 0usize;
    for (t, p) in probs.iter().enumerate() {
        if *p > theorem1_bound(n, t as u64)? {
            violations += 1;
        }
    }
    Ok(ClaimResult::new(
        "Theorem 1 (exact)",
        format!("n={n} mu={mu} t<={t_max}"),
        violations == 0,
        format!(
            "{violations} violations; Pr[T<={t_max}]={} bound={}",
            probs.last().expect("non-empty"),
            theorem1_bound(n, t_max)?
        ),
    ))
}

/// Empirical `Pr[T <= t] <= 2t / C(n, n/2) + 4 SE` for `t = 1..=t_check`.
pub fn hit_bound_monte_carlo(
    n: usize,
    mu: usize,
    trials: u64,
    t_check: u64,
    seed: u64,
    crossover: &Crossover,
) -> Result<ClaimResult> {
    let sim = Simulator::new(RunConfig::new(n, mu)?.with_seed(seed))?.with_crossover(crossover.clone());
    let records = sim.run_trials(trials);
    let checkpoints: Vec<u64> = (1..=t_check).collect();
    let report = bound_report(&records, n, &checkpoints)?;
    let worst = report
        .rows
        .iter()
        .map(|r| r.empirical - r.radius - r.bound.to_f64().unwrap_or(f64::INFINITY))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ClaimResult::new(
        "Theorem 1 (Monte Carlo)",
        format!("n={n} mu={mu} trials={trials} t<={t_check}"),
        report.all_consistent(),
        format!("max(empirical - 4SE - bound) = {worst:.5}"),
    ))
}

/// Empirical mean hitting time is at least `C(n, n/2) / 4`; with two members
/// it also lies within `rel_tol` of `2^(n-1)`.
pub fn expected_time(n: usize, mu: usize, trials: u64, seed: u64, rel_tol: f64) -> Result<ClaimResult> {
    // generous budget so censoring does not bias the mean
    let budget = crate::engine::default_t_max(n).max(64u64 << (n - 1));
    let sim = Simulator::new(RunConfig::new(n, mu)?.with_seed(seed).with_t_max(budget))?;
    let records = sim.run_trials(trials);
    let report = bound_report(&records, n, &[])?;
    let floor = report.expectation_bound.to_f64().unwrap_or(f64::INFINITY);
    let mut passed = report.mean >= floor;
    let mut detail = format!("mean T={:.3} >= {floor} ; censored={}", report.mean, report.censored);
    if mu == 2 {
        let exact = (1u64 << (n - 1)) as f64;
        let close = (report.mean - exact).abs() <= rel_tol * exact;
        passed &= close;
        detail.push_str(&format!(" ; |mean - {exact}| <= {}", rel_tol * exact));
    }
    Ok(ClaimResult::new(
        "Theorem 1 (expectation)",
        format!("n={n} mu={mu} trials={trials}"),
        passed,
        detail,
    ))
}

/// Under canonical initialization every position holds exactly `mu/2` ones
/// after every iteration.
pub fn column_conservation(n: usize, mu: usize, runs: u64, seed: u64, crossover: &Crossover) -> Result<ClaimResult> {
    let sim = Simulator::new(RunConfig::new(n, mu)?.with_seed(seed))?.with_crossover(crossover.clone());
    let mut violations = 0u64;
    let mut iterations = 0u64;
    for k in 0..runs {
        sim.run_trial_observed(k, |_, pop, _| {
            iterations += 1;
            if pop.column_counts().iter().any(|&c| c != mu / 2) {
                violations += 1;
            }
        });
    }
    Ok(ClaimResult::new(
        "Column conservation",
        format!("n={n} mu={mu} runs={runs}"),
        violations == 0,
        format!("{violations} violations over {iterations} iterations"),
    ))
}

/// Under random initialization `x_1` is uniform on `{0,1}^n`.
pub fn random_init_uniformity(n: usize, trials: u64, seed: u64, crossover: &Crossover) -> Result<ClaimResult> {
    let r = uniformity_random_init(n, 2, trials, seed, crossover)?;
    Ok(ClaimResult::new(
        "Random-init uniformity",
        format!("n={n} trials={trials}"),
        r.passed,
        format!(
            "chi2={:.3} dof={} critical(0.999)={}",
            r.chi_square.statistic,
            r.chi_square.dof,
            r.critical_999.map_or("n/a".into(), |c| c.to_string())
        ),
    ))
}

/// Monte Carlo chi-square test that `x_t` is uniform on the target orbit.
pub fn orbit_equidistribution(
    n: usize,
    mu: usize,
    t: u64,
    hits: u64,
    seed: u64,
    crossover: &Crossover,
) -> Result<ClaimResult> {
    let sim = Simulator::new(RunConfig::new(n, mu)?.with_init(Init::Canonical).with_seed(seed))?
        .with_crossover(crossover.clone());
    let r = equidist_over_orbit(&sim, t, hits)?;
    Ok(ClaimResult::new(
        "Corollary 5 (Monte Carlo)",
        format!("n={n} mu={mu} t={t} hits={}", r.observations),
        r.passed,
        format!(
            "chi2={:.3} dof={} critical(0.999)={}",
            r.chi_square.statistic,
            r.chi_square.dof,
            r.critical_999.map_or("n/a".into(), |c| c.to_string())
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_claims_pass_on_small_instances() {
        let fair = Crossover::fair();
        assert!(orbit_equals_shell(6).unwrap().passed);
        assert!(crossover_commutes(4, 10, 6, 1, &fair).unwrap().passed);
        assert!(step_commutes(2, 2, 3, 4, 1, &fair).unwrap().passed);
        assert!(orbit_equiprobable(2, 4, 3, &fair).unwrap().passed);
        assert!(target_mass_identity(4, 2, 3, &fair).unwrap().passed);
        assert!(hit_bound_exact(4, 2, 5, &fair).unwrap().passed);
        assert!(column_conservation(6, 4, 20, 1, &fair).unwrap().passed);
    }

    #[test]
    fn biased_coin_is_caught() {
        let biased = Crossover::biased("3/4".parse().unwrap()).unwrap();
        assert!(!crossover_commutes(4, 10, 6, 1, &biased).unwrap().passed);
        assert!(!step_commutes(2, 2, 2, 6, 1, &biased).unwrap().passed);
        assert!(!orbit_equiprobable(4, 2, 2, &biased).unwrap().passed);
        // conservation holds for any coin
        assert!(column_conservation(6, 4, 20, 1, &biased).unwrap().passed);
    }
}
