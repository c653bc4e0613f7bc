//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssga_core::bitspace::canonical_strings;
use ssga_core::experiments::{
    binomial_se, bound_report, central_binomial, expectation_bound, theorem1_bound,
    uniformity_random_init, CONFIDENCE_SE,
};
use ssga_core::oracle::{
    evolve, exact_step, hit_probabilities, offspring_distribution, pushforward_population,
    StateDistribution,
};
use ssga_core::symmetry::{hamming_shell, random_automorphism, target_orbit, AutomorphismKind};
use ssga_core::{BitString, Crossover, RunConfig, Simulator};

const SEED: u64 = 20_201_117;
const MC_TRIALS: u64 = 100_000;
const EXACT_INSTANCES: [(usize, usize); 3] = [(2, 2), (2, 4), (4, 2)];
const EXACT_T: usize = 6;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn kinds() -> [AutomorphismKind; 3] {
    [
        AutomorphismKind::Rotation,
        AutomorphismKind::Reflection,
        AutomorphismKind::Product { max_len: 4 },
    ]
}

fn orbit_shell() -> Outcome {
    let start = Instant::now();
    let expected = [(2, 2u32), (4, 6), (6, 20), (8, 70), (10, 252), (12, 924)];
    let mut failures = Vec::new();
    for (n, size) in expected {
        let z = canonical_strings(n).unwrap().z;
        let orbit = target_orbit(n).unwrap();
        let shell = hamming_shell(&z, n / 2).unwrap();
        let c = central_binomial(n).unwrap();
        if orbit.members != shell || orbit.len() != size as usize || c != size.into() {
            failures.push(n);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!("orbit == shell and |B| = C(n,n/2) for n in 2..=12; failures {failures:?}; {elapsed:.2?} (< 10s)"),
    )
}

fn crossover_commutation() -> Outcome {
    let start = Instant::now();
    let fair = Crossover::fair();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut comparisons = 0;
    let mut mismatches = 0;
    for n in [2usize, 4, 6] {
        for _ in 0..50 {
            let x = BitString::from_word(n, rng.random_range(0..1u64 << n)).unwrap();
            let y = BitString::from_word(n, rng.random_range(0..1u64 << n)).unwrap();
            let d = fair.distribution(&x, &y).unwrap();
            for k in 0..20 {
                let s = random_automorphism(n, kinds()[k % 3], &mut rng).unwrap();
                let left = d.pushforward(&s).unwrap();
                let right = fair
                    .distribution(&s.apply(&x).unwrap(), &s.apply(&y).unwrap())
                    .unwrap();
                comparisons += 1;
                mismatches += (left != right) as usize;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && comparisons == 3000 && elapsed < Duration::from_secs(30),
        format!("{mismatches} of {comparisons} exact comparisons differ; {elapsed:.2?} (< 30s)"),
    )
}

fn step_commutation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut unequal = 0;
    let mut noncommuting = 0;
    let mut checks = 0;
    for (n, mu) in EXACT_INSTANCES {
        let orbit = target_orbit(n).unwrap();
        let target = BitString::ones(n).unwrap();
        let sigmas: Vec<_> = (0..12)
            .map(|k| random_automorphism(n, kinds()[k % 3], &mut rng).unwrap())
            .collect();
        let initial = StateDistribution::initial(&RunConfig::new(n, mu).unwrap()).unwrap();
        for d in evolve(&initial, EXACT_T - 1, &Crossover::fair()).unwrap() {
            let law = offspring_distribution(&d).unwrap();
            for x in &orbit.members {
                unequal += (law.first_prob(x) != law.first_prob(&target)) as usize;
                unequal += (law.second_prob(x) != law.second_prob(&target)) as usize;
            }
            let stepped = exact_step(&d).unwrap();
            for s in &sigmas {
                let left = pushforward_population(s, &stepped).unwrap();
                let right = exact_step(&pushforward_population(s, &d).unwrap()).unwrap();
                noncommuting += (left != right) as usize;
                checks += 1;
            }
        }
    }
    outcome(
        unequal == 0 && noncommuting == 0,
        format!(
            "(n,mu) in {EXACT_INSTANCES:?}, t <= {EXACT_T}: {unequal} unequal orbit probabilities, \
             {noncommuting} of {checks} step/pushforward pairs differ"
        ),
    )
}

fn target_mass() -> Outcome {
    let mut failures = 0;
    let mut checks = 0;
    for (n, mu) in EXACT_INSTANCES {
        let orbit = target_orbit(n).unwrap();
        let size = BigRational::from_integer(orbit.len().into());
        let target = BitString::ones(n).unwrap();
        let initial = StateDistribution::initial(&RunConfig::new(n, mu).unwrap()).unwrap();
        for d in evolve(&initial, EXACT_T - 1, &Crossover::fair()).unwrap() {
            let law = offspring_distribution(&d).unwrap();
            failures += (law.first_prob(&target) * &size != law.first_mass(&orbit.members)) as usize;
            failures += (law.second_prob(&target) * &size != law.second_mass(&orbit.members)) as usize;
            checks += 2;
        }
    }
    outcome(failures == 0, format!("Pr[x_t = x*]|B| = Pr[x_t in B]: {failures} of {checks} identities fail"))
}

fn hit_probability() -> Outcome {
    let start = Instant::now();
    // (a) exact at (4, 2)
    let config = RunConfig::new(4, 2).unwrap();
    let exact = hit_probabilities(&config, 10, &Crossover::fair()).unwrap();
    let exact_ok = exact
        .iter()
        .enumerate()
        .all(|(t, p)| *p <= theorem1_bound(4, t as u64).unwrap());
    // (b) Monte Carlo at n = 8
    let checkpoints: Vec<u64> = (1..=50).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut mc_ok = true;
    for mu in [2, 4, 8] {
        let sim = Simulator::new(RunConfig::new(8, mu).unwrap().with_seed(SEED + mu as u64)).unwrap();
        let report = bound_report(&sim.run_trials(MC_TRIALS), 8, &checkpoints).unwrap();
        for row in &report.rows {
            let bound = row.bound.to_f64().unwrap();
            let se = binomial_se(row.empirical, MC_TRIALS);
            worst = worst.max(row.empirical - bound - CONFIDENCE_SE * se);
            mc_ok &= row.empirical <= bound + CONFIDENCE_SE * se;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        exact_ok && mc_ok && elapsed < Duration::from_secs(120),
        format!(
            "exact (4,2) t<=10: {}; Monte Carlo n=8 mu in {{2,4,8}} t<=50: max(p_hat - bound - 4SE) = {worst:.4}; {elapsed:.2?} (< 2 min)",
            if exact_ok { "within bound" } else { "VIOLATED" }
        ),
    )
}

fn expected_time() -> Outcome {
    let n = 8;
    let budget = 64 << (n - 1);
    let sim = Simulator::new(RunConfig::new(n, 2).unwrap().with_seed(SEED).with_t_max(budget)).unwrap();
    let report = bound_report(&sim.run_trials(MC_TRIALS), n, &[]).unwrap();
    let floor = expectation_bound(n).unwrap().to_f64().unwrap();
    let geometric = 128.0;
    // the geometric law behind 2^(n-1) agrees with the exact oracle at n <= 4
    let mut oracle_ok = true;
    for small in [2usize, 4] {
        let probs = hit_probabilities(&RunConfig::new(small, 2).unwrap(), 10, &Crossover::fair()).unwrap();
        let miss = BigRational::one() - BigRational::new(2.into(), (1i64 << small).into());
        for (t, p) in probs.iter().enumerate() {
            oracle_ok &= *p == BigRational::one() - num_traits::pow(miss.clone(), t);
        }
    }
    let close = (report.mean - geometric).abs() <= 0.03 * geometric;
    outcome(
        report.mean >= floor && close && oracle_ok && report.censored == 0,
        format!(
            "mean T = {:.3} >= {floor}; |mean - 128| = {:.3} <= 3.84; censored {}; geometric law matches oracle at n=2,4: {oracle_ok}",
            report.mean,
            (report.mean - geometric).abs(),
            report.censored
        ),
    )
}

fn column_conservation() -> Outcome {
    let mut violations = 0u64;
    let mut iterations = 0u64;
    for mu in [2usize, 4, 8] {
        let sim = Simulator::new(RunConfig::new(8, mu).unwrap().with_seed(SEED)).unwrap();
        for k in 0..1000 {
            sim.run_trial_observed(k, |_, pop, _| {
                iterations += 1;
                violations += pop.column_counts().iter().any(|&c| c != mu / 2) as u64;
            });
        }
    }
    outcome(violations == 0, format!("{violations} violations over {iterations} monitored iterations"))
}

fn uniformity() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let biased = Crossover::biased("3/4".parse().unwrap()).unwrap();
    for n in [2usize, 4] {
        let fair = uniformity_random_init(n, 2, 1_000_000, SEED, &Crossover::fair()).unwrap();
        let bad = uniformity_random_init(n, 2, 1_000_000, SEED, &biased).unwrap();
        ok &= fair.passed && !bad.passed;
        parts.push(format!(
            "n={n}: chi2 {:.2} < {} ({}), biased chi2 {:.0} ({})",
            fair.chi_square.statistic,
            fair.critical_999.unwrap(),
            if fair.passed { "pass" } else { "FAIL" },
            bad.chi_square.statistic,
            if bad.passed { "NOT DETECTED" } else { "rejected" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ssga"))
        .args(args)
        .env("SSGA_THREADS", "2")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate", "--n", "2", "--mu", "2", "--trials", "1000", "--seed", "7"],
        vec!["simulate", "--n", "6", "--mu", "4", "--trials", "500", "--seed", "3", "--format", "json"],
        vec!["simulate", "--n", "4", "--mu", "3", "--init", "random", "--trials", "500", "--seed", "9"],
        vec!["orbit", "--n", "8", "--dump"],
        vec!["bound", "--n", "8", "--tmax", "20"],
        vec!["oracle", "equidist", "--n", "2", "--mu", "4", "--t", "4"],
        vec!["oracle", "bound", "--n", "4", "--mu", "2", "--tmax", "8"],
        vec!["verify", "lemma3", "--n", "6", "--samples", "20", "--seed", "5"],
        vec!["verify", "equidist", "--n", "4", "--mu", "2", "--t", "3", "--hits", "2000", "--seed", "1"],
        vec!["verify", "uniformity", "--n", "2", "--trials", "5000", "--seed", "1"],
    ];
    let mut differing = Vec::new();
    for args in &commands {
        let (c1, o1) = run_cli(args);
        let (c2, o2) = run_cli(args);
        if c1 != c2 || o1 != o2 || o1.is_empty() {
            differing.push(args.join(" "));
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} commands run twice, byte-identical; differing: {differing:?}", commands.len()),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 target orbit equals Hamming shell", orbit_shell),
        ("2 crossover commutes with automorphisms", crossover_commutation),
        ("3 exact step commutation and orbit equiprobability", step_commutation),
        ("4 target mass identity", target_mass),
        ("5 hitting probability bound", hit_probability),
        ("6 expected hitting time", expected_time),
        ("7 column conservation", column_conservation),
        ("8 random-init uniformity", uniformity),
        ("9 determinism", determinism),
    ];
    let mut results = BTreeMap::new();
    for (name, check) in criteria {
        let o = check();
        println!("[{}] criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.insert(name, o.passed);
    }
    let failed: Vec<_> = results.iter().filter(|(_, ok)| !**ok).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: FAILED {failed:?}");
        std::process::exit(1);
    }
}
