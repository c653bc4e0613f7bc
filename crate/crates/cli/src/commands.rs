use num_rational::BigRational;
use serde_json::json;
use ssga_core::bitspace::canonical_strings;
use ssga_core::engine::default_t_max;
use ssga_core::experiments::claims::{self, ClaimResult};
use ssga_core::experiments::{bound_report, central_binomial, equidist_over_orbit, uniformity_random_init, EquidistReport};
use ssga_core::oracle::{evolve, hit_probabilities, offspring_distribution_with, StateDistribution};
use ssga_core::symmetry::{hamming_shell, target_orbit};
use ssga_core::{BitString, Crossover, Dyadic, Init, RunConfig, Simulator};

use crate::output::{Cell, Format, Report, Table};
use crate::{
    AllArgs, BoundArgs, CliError, Command, EquidistArgs, Lemma3Args, OracleBoundArgs, OracleCommand,
    OracleEquidistArgs, OrbitArgs, Settings, SimulateArgs, UniformityArgs, VerifyCommand,
};

type Res<T> = Result<T, CliError>;

pub(crate) fn dispatch(command: &Command, s: &Settings) -> Res<(Report, Format)> {
    match command {
        Command::Orbit(a) => orbit(a, s).map(|r| (r, Format::Csv)),
        Command::Bound(a) => bound(a, s).map(|r| (r, Format::Csv)),
        Command::Simulate(a) => simulate(a, s).map(|r| (r, Format::Csv)),
        Command::Oracle(OracleCommand::Equidist(a)) => oracle_equidist(a, s).map(|r| (r, Format::Csv)),
        Command::Oracle(OracleCommand::Bound(a)) => oracle_bound(a, s).map(|r| (r, Format::Csv)),
        Command::Verify(VerifyCommand::Lemma3(a)) => lemma3(a, s).map(|r| (r, Format::Csv)),
        Command::Verify(VerifyCommand::Equidist(a)) => equidist(a, s).map(|r| (r, Format::Json)),
        Command::Verify(VerifyCommand::Uniformity(a)) => uniformity(a, s).map(|r| (r, Format::Json)),
        Command::Verify(VerifyCommand::All(a)) => verify_all(a, s).map(|r| (r, Format::Csv)),
    }
}

fn crossover(s: &Settings, flag: &Option<String>) -> Res<(Crossover, String)> {
    match s.opt(flag.clone(), "coin-bias")? {
        None => Ok((Crossover::fair(), "1/2".into())),
        Some(text) => {
            let p: Dyadic = text.parse()?;
            Ok((Crossover::biased(p.clone())?, p.to_string()))
        }
    }
}

fn orbit(a: &OrbitArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let dump = a.dump || s.or(None, "dump", false)?;
    let mut report = Report::new("orbit", json!({ "n": n, "dump": dump }));
    let orbit = target_orbit(n)?;
    let z = canonical_strings(n)?.z;
    let shell = hamming_shell(&z, n / 2)?;
    let c = central_binomial(n)?;
    let passed = orbit.members == shell && c == orbit.len().into();
    let mut t = Table::new("orbit", vec!["n", "orbit_size", "shell_size", "central_binomial", "verdict"]);
    t.push(vec![
        Cell::int(n as i128),
        Cell::int(orbit.len() as i128),
        Cell::int(shell.len() as i128),
        Cell::Exact(c.to_string()),
        Cell::verdict(passed),
    ]);
    report.tables.push(t);
    if dump {
        let mut m = Table::new("members", vec!["member"]);
        for x in &orbit.members {
            m.push(vec![Cell::text(x.to_string())]);
        }
        report.tables.push(m);
    }
    report.passed = passed;
    Ok(report)
}

fn bound(a: &BoundArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let tmax: u64 = s.req(a.tmax, "tmax")?;
    let c = central_binomial(n)?;
    let mut report = Report::new("bound", json!({ "n": n, "tmax": tmax }));
    let mut t = Table::new("bound", vec!["t", "bound"]);
    for step in 1..=tmax {
        t.push(vec![Cell::int(step), Cell::fraction(2 * step as u128, &c)]);
    }
    report.tables.push(t);
    Ok(report)
}

fn default_checkpoints(tmax: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(10))
        .take_while(|&t| t < tmax)
        .collect();
    if tmax > 0 {
        out.push(tmax);
    }
    out
}

fn simulate(a: &SimulateArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let mu: usize = s.req(a.mu, "mu")?;
    let init: Init = s.or(a.init.clone(), "init", "canonical".to_string())?.parse()?;
    let trials: u64 = s.req(a.trials, "trials")?;
    let seed: u64 = s.or(a.seed, "seed", 0)?;
    let tmax: u64 = s.or(a.tmax, "tmax", default_t_max(n))?;
    let target: BitString = match s.opt(a.target.clone(), "target")? {
        Some(t) => t.parse()?,
        None => BitString::ones(n.max(1))?,
    };
    let checkpoints: Vec<u64> = s.or(a.checkpoints.clone(), "checkpoints", default_checkpoints(tmax))?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;

    let config = RunConfig {
        init,
        ..RunConfig::new(n, 2)?
    };
    let config = RunConfig { mu, ..config }
        .with_t_max(tmax)
        .with_seed(seed)
        .with_target(target);
    config.validate()?;
    let sim = Simulator::new(config)?.with_crossover(cross);
    let records = sim.run_trials(trials);

    let mut report = Report::new(
        "simulate",
        json!({
            "n": n, "mu": mu, "init": init.to_string(), "trials": trials, "tmax": tmax,
            "seed": seed, "target": target.to_string(), "checkpoints": checkpoints, "coin-bias": coin,
        }),
    );
    let mut rows = Table::new("trials", vec!["trial_id", "T", "censored"]);
    for r in &records {
        rows.push(vec![Cell::int(r.trial_id), Cell::int(r.time_or_bound()), Cell::Bool(r.censored())]);
    }
    report.tables.push(rows);

    let summary = bound_report(&records, n, &checkpoints)?;
    let mut st = Table::new("summary", vec!["statistic", "value"]);
    st.push(vec![Cell::text("trials"), Cell::int(trials)]);
    st.push(vec![Cell::text("censored"), Cell::int(summary.censored)]);
    st.push(vec![Cell::text("mean"), Cell::Float(summary.mean)]);
    st.push(vec![Cell::text("median"), Cell::int(summary.median)]);
    st.push(vec![Cell::text("expectation_bound"), Cell::exact(&summary.expectation_bound)]);
    report.tables.push(st);

    // the bound covers targets in the orbit of the all-ones string and every
    // target under random initialization
    let z = canonical_strings(n)?.z;
    let applies = init == Init::Random || target.hamming(&z)? as usize * 2 == n;
    let c = central_binomial(n)?;
    let mut ct = Table::new("checkpoints", vec!["t", "hits", "empirical", "bound", "radius", "verdict"]);
    for row in &summary.rows {
        ct.push(vec![
            Cell::int(row.t),
            Cell::int(row.hits),
            Cell::fraction(row.hits, trials),
            Cell::fraction(2 * row.t as u128, &c),
            Cell::Float(row.radius),
            if applies { Cell::verdict(row.consistent) } else { Cell::text("n/a") },
        ]);
    }
    report.tables.push(ct);
    report.passed = !applies || summary.all_consistent();
    Ok(report)
}

fn oracle_config(n: usize, mu: usize) -> Res<RunConfig> {
    Ok(RunConfig::new(n, mu)?)
}

fn oracle_equidist(a: &OracleEquidistArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let mu: usize = s.req(a.mu, "mu")?;
    let t_last: u64 = s.req(a.t, "t")?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;
    let config = oracle_config(n, mu)?;
    let orbit = target_orbit(n)?;
    let size = BigRational::from_integer(orbit.len().into());
    let paper_bound = size.recip();
    let laws = evolve(&StateDistribution::initial(&config)?, t_last.saturating_sub(1) as usize, &cross)?;

    let mut report = Report::new("oracle equidist", json!({ "n": n, "mu": mu, "t": t_last, "coin-bias": coin }));
    let mut table = Table::new(
        "equidist",
        vec!["t", "offspring", "value", "orbit_mass", "orbit_min", "orbit_max", "paper_bound", "verdict"],
    );
    let mut all = true;
    if t_last >= 1 {
        for (k, d) in laws.iter().enumerate() {
            let law = offspring_distribution_with(d, &cross)?;
            for (label, probs) in [("x_t", &law.first), ("y_t", &law.second)] {
                let get = |x: &BitString| probs.get(x).cloned().unwrap_or_default();
                let value = get(&config.target);
                let member_probs: Vec<BigRational> = orbit.members.iter().map(get).collect();
                let mass: BigRational = member_probs.iter().sum();
                let min = member_probs.iter().min().cloned().unwrap_or_default();
                let max = member_probs.iter().max().cloned().unwrap_or_default();
                let ok = min == max && &value * &size == mass && value <= paper_bound;
                all &= ok;
                table.push(vec![
                    Cell::int(k as i128 + 1),
                    Cell::text(label),
                    Cell::exact(&value),
                    Cell::exact(&mass),
                    Cell::exact(&min),
                    Cell::exact(&max),
                    Cell::exact(&paper_bound),
                    Cell::verdict(ok),
                ]);
            }
        }
    }
    report.tables.push(table);
    report.passed = all;
    Ok(report)
}

fn oracle_bound(a: &OracleBoundArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let mu: usize = s.req(a.mu, "mu")?;
    let tmax: u64 = s.req(a.tmax, "tmax")?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;
    let config = oracle_config(n, mu)?;
    let probs = hit_probabilities(&config, tmax, &cross)?;
    let c = central_binomial(n)?;
    let mut report = Report::new("oracle bound", json!({ "n": n, "mu": mu, "tmax": tmax, "coin-bias": coin }));
    let mut table = Table::new("bound", vec!["t", "value", "paper_bound", "verdict"]);
    let mut all = true;
    for (t, p) in probs.iter().enumerate().skip(1) {
        let bound = ssga_core::experiments::theorem1_bound(n, t as u64)?;
        let ok = *p <= bound;
        all &= ok;
        table.push(vec![
            Cell::int(t as i128),
            Cell::exact(p),
            Cell::fraction(2 * t as u128, &c),
            Cell::verdict(ok),
        ]);
    }
    report.tables.push(table);
    report.passed = all;
    Ok(report)
}

fn claims_table(results: &[ClaimResult]) -> Table {
    let mut t = Table::new("claims", vec!["claim", "instance", "verdict", "detail"]);
    for r in results {
        t.push(vec![
            Cell::text(r.claim.clone()),
            Cell::text(r.instance.clone()),
            Cell::verdict(r.passed),
            Cell::text(r.detail.clone()),
        ]);
    }
    t
}

fn lemma3(a: &Lemma3Args, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let samples: usize = s.or(a.samples, "samples", 50)?;
    let autos: usize = s.or(a.automorphisms, "automorphisms", 20)?;
    let seed: u64 = s.or(a.seed, "seed", 0)?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;
    let result = claims::crossover_commutes(n, samples, autos, seed, &cross)?;
    let mut report = Report::new(
        "verify lemma3",
        json!({ "n": n, "samples": samples, "automorphisms": autos, "seed": seed, "coin-bias": coin }),
    );
    report.passed = result.passed;
    report.tables.push(claims_table(&[result]));
    Ok(report)
}

fn equidist_tables(report: &mut Report, r: &EquidistReport) {
    let mut summary = Table::new("summary", vec!["cells", "iteration", "trials", "observations", "chi_square", "dof", "critical_999", "verdict"]);
    summary.push(vec![
        Cell::text(r.cells_label.clone()),
        Cell::int(r.iteration),
        Cell::int(r.trials),
        Cell::int(r.observations),
        Cell::Float(r.chi_square.statistic),
        Cell::int(r.chi_square.dof as i128),
        r.critical_999.map_or(Cell::text("n/a"), Cell::Float),
        Cell::verdict(r.passed),
    ]);
    report.tables.push(summary);
    let mut counts = Table::new("counts", vec!["cell", "count"]);
    for (x, c) in r.cells.iter().zip(&r.counts) {
        counts.push(vec![Cell::text(x.to_string()), Cell::int(*c)]);
    }
    report.tables.push(counts);
    report.passed = r.passed;
}

fn equidist(a: &EquidistArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let mu: usize = s.req(a.mu, "mu")?;
    let t: u64 = s.req(a.t, "t")?;
    let hits: u64 = s.or(a.hits, "hits", 100_000)?;
    let seed: u64 = s.or(a.seed, "seed", 0)?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;
    let sim = Simulator::new(RunConfig::new(n, mu)?.with_seed(seed))?.with_crossover(cross);
    let r = equidist_over_orbit(&sim, t, hits)?;
    let mut report = Report::new(
        "verify equidist",
        json!({ "n": n, "mu": mu, "t": t, "hits": hits, "seed": seed, "coin-bias": coin }),
    );
    equidist_tables(&mut report, &r);
    Ok(report)
}

fn uniformity(a: &UniformityArgs, s: &Settings) -> Res<Report> {
    let n: usize = s.req(a.n, "n")?;
    let trials: u64 = s.or(a.trials, "trials", 1_000_000)?;
    let seed: u64 = s.or(a.seed, "seed", 0)?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;
    let r = uniformity_random_init(n, 2, trials, seed, &cross)?;
    let mut report = Report::new(
        "verify uniformity",
        json!({ "n": n, "mu": 2, "trials": trials, "seed": seed, "coin-bias": coin }),
    );
    equidist_tables(&mut report, &r);
    Ok(report)
}

/// Runs one check, turning a refused instance into a failed row.
fn attempt(claim: &str, instance: String, f: impl FnOnce() -> ssga_core::Result<ClaimResult>) -> ClaimResult {
    f().unwrap_or_else(|e| ClaimResult::from_error(claim, instance, &e))
}

/// Length used for the Monte Carlo hitting-time checks.
const MC_N: usize = 8;
const EXACT_T: usize = 6;
const EXACT_BOUND_T: u64 = 10;
const MC_T_CHECK: u64 = 50;
const CONSERVATION_RUNS: u64 = 1000;
const MEAN_REL_TOL: f64 = 0.03;
const EQUIDIST_ITERATIONS: [u64; 3] = [1, 3, 10];

fn verify_all(a: &AllArgs, s: &Settings) -> Res<Report> {
    let n_list: Vec<usize> = s.or(a.n_list.clone(), "n-list", vec![2, 4, 6, 8, 10, 12])?;
    let mu_list: Vec<usize> = s.or(a.mu_list.clone(), "mu-list", vec![2, 4, 8])?;
    let seed: u64 = s.or(a.seed, "seed", 0)?;
    let trials: u64 = s.or(a.trials, "trials", 100_000)?;
    let uniformity_trials: u64 = s.or(a.uniformity_trials, "uniformity-trials", 1_000_000)?;
    let hits: u64 = s.or(a.hits, "hits", 100_000)?;
    let (cross, coin) = crossover(s, &a.coin_bias)?;
    if n_list.is_empty() {
        return Err(CliError::Usage("--n-list must not be empty".into()));
    }
    if mu_list.is_empty() {
        return Err(CliError::Usage("--mu-list must not be empty".into()));
    }

    let mut results = Vec::new();
    for &n in &n_list {
        results.push(attempt("Lemma 2", format!("n={n}"), || claims::orbit_equals_shell(n)));
    }
    for &n in &n_list {
        results.push(attempt("Lemma 3", format!("n={n}"), || {
            claims::crossover_commutes(n, 50, 20, seed, &cross)
        }));
    }
    let exact: Vec<(usize, usize)> = n_list
        .iter()
        .flat_map(|&n| mu_list.iter().map(move |&mu| (n, mu)))
        .filter(|&(n, mu)| n * mu <= 8)
        .collect();
    for &(n, mu) in &exact {
        let inst = format!("n={n} mu={mu}");
        results.push(attempt("Lemma 4", inst.clone(), || {
            claims::step_commutes(n, mu, EXACT_T, 12, seed, &cross)
        }));
        results.push(attempt("Corollary 5", inst.clone(), || {
            claims::orbit_equiprobable(n, mu, EXACT_T, &cross)
        }));
        results.push(attempt("Eq. 1", inst.clone(), || {
            claims::target_mass_identity(n, mu, EXACT_T, &cross)
        }));
        results.push(attempt("Theorem 1 (exact)", inst, || {
            claims::hit_bound_exact(n, mu, EXACT_BOUND_T, &cross)
        }));
    }
    for &mu in &mu_list {
        let inst = format!("n={MC_N} mu={mu}");
        results.push(attempt("Theorem 1 (Monte Carlo)", inst.clone(), || {
            claims::hit_bound_monte_carlo(MC_N, mu, trials, MC_T_CHECK, seed, &cross)
        }));
        results.push(attempt("Theorem 1 (expectation)", inst.clone(), || {
            claims::expected_time(MC_N, mu, trials, seed, MEAN_REL_TOL)
        }));
        results.push(attempt("Column conservation", inst, || {
            claims::column_conservation(MC_N, mu, CONSERVATION_RUNS, seed, &cross)
        }));
    }
    for &n in n_list.iter().filter(|&&n| n == 4 || n == 6) {
        for &mu in mu_list.iter().filter(|&&mu| mu <= 4) {
            for t in EQUIDIST_ITERATIONS {
                results.push(attempt("Corollary 5 (Monte Carlo)", format!("n={n} mu={mu} t={t}"), || {
                    claims::orbit_equidistribution(n, mu, t, hits, seed, &cross)
                }));
            }
        }
    }
    for &n in n_list.iter().filter(|&&n| n <= 4) {
        results.push(attempt("Random-init uniformity", format!("n={n}"), || {
            claims::random_init_uniformity(n, uniformity_trials, seed, &cross)
        }));
    }

    let mut report = Report::new(
        "verify all",
        json!({
            "n-list": n_list, "mu-list": mu_list, "seed": seed, "trials": trials,
            "uniformity-trials": uniformity_trials, "hits": hits, "coin-bias": coin,
        }),
    );
    report.passed = results.iter().all(|r| r.passed);
    report.tables.push(claims_table(&results));
    Ok(report)
}
