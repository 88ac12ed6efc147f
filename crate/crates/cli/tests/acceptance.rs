//! Acceptance run. Prints one `criterion k: PASS|FAIL` line per criterion
//! and exits non-zero if any criterion fails.
//!
//! `CFPR_CRITERIA=2,5` restricts the run to the listed criteria.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use cfpr::analytics::{dyad_chain_stationary, expected_dyad_census, slow_mixing_mean_degree};
use cfpr::ergm::{dyad_marginals, reference_model, sample_ergm, Parameterization};
use cfpr::exec::map_indexed;
use cfpr::graph::suff_stats;
use cfpr::process::{coresidence_time, simulate, simulate_events};
use cfpr::rng::{derive_seed, replicate_seed, rng_from_seed, stable_hash};
use cfpr::stats::{hotelling_t2, mean_ci, powerlaw_fit};
use cfpr::sweep::{run_condition, Condition, ConditionResult, Preset, SweepConfig};
use cfpr::{MigrationKernel, ProcessParams, Variant};
use rand::Rng;

const MASTER_SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Sweep conditions computed once and shared between criteria.
struct Cache {
    results: HashMap<(u64, String), ConditionResult>,
}

impl Cache {
    fn get(&mut self, seed: u64, replicates: usize, uman_draws: usize, cond: Condition) -> &ConditionResult {
        let key = (seed, format!("{}_{replicates}_{uman_draws}", cond.label()));
        self.results.entry(key).or_insert_with(|| {
            let mut cfg = SweepConfig::preset(Preset::Paper);
            cfg.master_seed = seed;
            cfg.replicates = replicates;
            cfg.uman_draws = uman_draws;
            cfg.t_end = 100.0;
            cfg.r_f = 1.0;
            cfg.r_l = 5.0;
            run_condition(&cfg, &cond).expect("condition run")
        })
    }
}

fn cond(n: usize, p: usize, log5_rm: i32, variant: Variant) -> Condition {
    Condition { n, p, log5_rm, variant }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn criterion_1(_: &mut Cache) -> Outcome {
    let mut rng = rng_from_seed(derive_seed(&[MASTER_SEED, 1]));
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let sets = 1000;
    for _ in 0..sets {
        let n = log_uniform(&mut rng, 2.0, 1e6).round() as usize;
        let m = (log_uniform(&mut rng, 1.0, 1e5).round() as usize).max(1);
        let rho = log_uniform(&mut rng, 1e-3, 1e3);
        let r_l = log_uniform(&mut rng, 1e-2, 1e2);
        let r_m = log_uniform(&mut rng, 1e-3, 1e3);
        for variant in [Variant::Cfpr, Variant::CfpDirected] {
            let params = ProcessParams::new(n, m, rho * r_l, r_l, r_m, variant).unwrap();
            let closed = expected_dyad_census(&params).unwrap();
            let chain = dyad_chain_stationary(&params, variant).unwrap();
            let d = params.n as f64 * (params.n as f64 - 1.0) / 2.0;
            for (a, b) in [(closed.d_m, d * chain.p_m), (closed.d_a, d * chain.p_a), (closed.d_n, d * chain.p_n)] {
                let e = rel(a, b);
                if e > worst {
                    worst = e;
                    worst_at = format!("N={n} M={m} rho={rho:.3e} {}", variant.label());
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{sets} parameter sets x 2 variants, max relative error {worst:.2e} (tol 1e-10) at {worst_at}"),
    )
}

fn criterion_2(cache: &mut Cache) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [5, 10] {
        let fast = cache.get(MASTER_SEED, 200, 0, cond(100, p, 4, Variant::Cfpr));
        let target = p as f64 * 0.2 * 1.2;
        let ci = fast.aggregates.mean_degree;
        let ok = ci.contains(target);
        pass &= ok;
        parts.push(format!("P={p} r_m=625 CI [{:.4}, {:.4}] vs {target} {}", ci.lo, ci.hi, mark(ok)));

        let slow = cache.get(MASTER_SEED, 200, 0, cond(100, p, -4, Variant::Cfpr));
        let reference = slow_mixing_mean_degree(&slow.params).unwrap();
        let mean = slow.aggregates.mean_degree.mean;
        let ok = rel(mean, reference) <= 0.05;
        pass &= ok;
        parts.push(format!(
            "P={p} r_m=5^-4 mean {mean:.4} vs slow {reference:.4} ({:+.1}%) {}",
            100.0 * (mean / reference - 1.0),
            mark(ok)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_3(cache: &mut Cache) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for log5 in [-2, 0, 2, 4] {
        let r = cache.get(MASTER_SEED, 200, 0, cond(100, 5, log5, Variant::Cfpr));
        let ci = r.aggregates.reciprocity.expect("edges present");
        let ok = ci.contains(1.0 / 6.0);
        pass &= ok;
        parts.push(format!("r_m=5^{log5} [{:.4}, {:.4}] {}", ci.lo, ci.hi, mark(ok)));
    }
    let cfp = cache.get(MASTER_SEED, 200, 0, cond(100, 5, 4, Variant::CfpDirected));
    let recip = cfp.aggregates.reciprocity.map(|ci| ci.mean).unwrap_or(0.0);
    let ok = recip < 0.08;
    pass &= ok;
    parts.push(format!("CFP_DIRECTED r_m=5^4 {recip:.4} < 0.08 {}", mark(ok)));
    outcome(pass, format!("CFPR vs 1/6: {}", parts.join("; ")))
}

fn criterion_4(cache: &mut Cache) -> Outcome {
    let mut fast_ok = 0;
    let mut slow_ok = 0;
    let mut fast_p = Vec::new();
    let mut slow_p = Vec::new();
    for seed in 1..=10u64 {
        let p = cache.get(seed, 500, 5000, cond(50, 5, 4, Variant::Cfpr)).uman.as_ref().unwrap().test.p;
        fast_ok += usize::from(p > 0.05);
        fast_p.push(format!("{p:.1e}"));
        let p = cache.get(seed, 500, 5000, cond(50, 5, -2, Variant::Cfpr)).uman.as_ref().unwrap().test.p;
        slow_ok += usize::from(p < 0.001);
        slow_p.push(format!("{p:.1e}"));
    }
    outcome(
        fast_ok >= 8 && slow_ok >= 8,
        format!(
            "r_m=625 p>0.05 in {fast_ok}/10 seeds (need 8) p=[{}]; r_m=5^-2 p<0.001 in {slow_ok}/10 (need 8) p=[{}]",
            fast_p.join(" "),
            slow_p.join(" ")
        ),
    )
}

fn criterion_5(cache: &mut Cache) -> Outcome {
    let process = cache.get(MASTER_SEED, 500, 5000, cond(50, 5, 4, Variant::Cfpr));
    let sim: Vec<Vec<f64>> = process.rows.iter().map(|r| vec![r.t_e as f64, r.t_m as f64]).collect();
    let model = reference_model(5.0, 1.0, 5.0, Parameterization::N(50)).unwrap();
    let ergm: Vec<Vec<f64>> = map_indexed(5000, |k| {
        let mut rng = rng_from_seed(derive_seed(&[MASTER_SEED, 5, k as u64]));
        let s = suff_stats(&sample_ergm(&model, 50, 10, &mut rng).unwrap());
        vec![s.t_e as f64, s.t_m as f64]
    });
    let t = hotelling_t2(&sim, &ergm).unwrap();
    let means_ok = t.p > 0.01;

    let mut worst = 0.0f64;
    for (n, m) in [(50, 10), (100, 20), (1000, 7), (10, 10), (250_000, 50_000)] {
        for (r_f, r_l) in [(1.0, 5.0), (3.0, 0.5), (1e-2, 10.0)] {
            let census = expected_dyad_census(&ProcessParams::new(n, m, r_f, r_l, 1.0, Variant::Cfpr).unwrap())
                .unwrap();
            let d = census.total();
            let pp = n as f64 / m as f64;
            for form in [Parameterization::N(n), Parameterization::M(m)] {
                let dist = dyad_marginals(&reference_model(pp, r_f, r_l, form).unwrap(), n, m).unwrap();
                worst = worst
                    .max((dist.p_mutual - census.d_m / d).abs())
                    .max((dist.p_asym_each - census.d_a / (2.0 * d)).abs())
                    .max((dist.p_null - census.d_n / d).abs());
            }
        }
    }
    let marg_ok = worst <= 1e-12;
    outcome(
        means_ok && marg_ok,
        format!(
            "(t_e, t_m) 500 process vs 5000 ERGM: T2={:.3} p={:.3} (alpha 0.01) {}; marginals max abs error {worst:.1e} (tol 1e-12) {}",
            t.t2,
            t.p,
            mark(means_ok),
            mark(marg_ok)
        ),
    )
}

fn criterion_6(cache: &mut Cache) -> Outcome {
    let mut density = Vec::new();
    let mut recip = Vec::new();
    for n in [50, 100, 200, 400] {
        let r = cache.get(MASTER_SEED, 200, 0, cond(n, 5, 4, Variant::Cfpr));
        density.push((n as f64, r.aggregates.density.mean));
        recip.push((n as f64, r.aggregates.reciprocity.expect("edges present").mean));
    }
    let d = powerlaw_fit(&density).unwrap();
    let r = powerlaw_fit(&recip).unwrap();
    let d_ok = d.ci_low <= -1.0 && -1.0 <= d.ci_high;
    let r_ok = r.ci_low <= 0.0 && 0.0 <= r.ci_high;
    outcome(
        d_ok && r_ok,
        format!(
            "density exponent {:.4} CI ({:.4}, {:.4}) contains -1 {}; reciprocity exponent {:.4} CI ({:.4}, {:.4}) contains 0 {}",
            d.exponent,
            d.ci_low,
            d.ci_high,
            mark(d_ok),
            r.exponent,
            r.ci_low,
            r.ci_high,
            mark(r_ok)
        ),
    )
}

fn criterion_7(_: &mut Cache) -> Outcome {
    let grid: Vec<(Variant, i32)> = [Variant::Cfpr, Variant::CfpDirected]
        .into_iter()
        .flat_map(|v| [-1, 1, 3].map(|l| (v, l)))
        .collect();
    let alpha = 0.01 / grid.len() as f64;
    let reps = 300;
    let mut pass = true;
    let mut parts = Vec::new();
    for (variant, log5) in grid {
        let params = ProcessParams::with_persons_per_focus(30, 5.0, 1.0, 5.0, 5f64.powi(log5), variant).unwrap();
        let label = cond(30, 5, log5, variant).label();
        let rows = |engine: &str| -> Vec<Vec<f64>> {
            let id = stable_hash(format!("{label}_{engine}").as_bytes());
            map_indexed(reps, |k| {
                let seed = replicate_seed(MASTER_SEED, id, k as u64);
                let state = if engine == "events" {
                    simulate_events(&params, 100.0, seed)
                } else {
                    simulate(&params, 100.0, seed)
                }
                .unwrap();
                let s = suff_stats(&state.graph);
                vec![s.t_e as f64, s.t_m as f64]
            })
        };
        let t = hotelling_t2(&rows("gillespie"), &rows("events")).unwrap();
        let ok = t.p > alpha;
        pass &= ok;
        parts.push(format!("{}@5^{log5} p={:.3}", variant.label(), t.p));
    }
    outcome(
        pass,
        format!("N=30 P=5, {reps} runs per engine, Bonferroni alpha {alpha:.4}: {}", parts.join(" ")),
    )
}

fn criterion_8(_: &mut Cache) -> Outcome {
    let (m, r_m, t, runs) = (10usize, 100.0, 1.0, 10_000usize);
    let params = ProcessParams::new(2, m, 1.0, 1.0, r_m, Variant::Cfpr).unwrap().with_kernel(MigrationKernel::AnyFocus);
    let xs = coresidence_time(&params, t, runs, derive_seed(&[MASTER_SEED, 8])).unwrap();
    let ci = mean_ci(&xs, 0.95).unwrap();
    let n = xs.len() as f64;
    let var = xs.iter().map(|x| (x - ci.mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let mean_target = t / m as f64;
    let var_target = t / (r_m * m as f64);
    let mean_ok = (ci.mean - mean_target).abs() <= 3.0 * se;
    let var_ok = (var / var_target - 1.0).abs() <= 0.2;
    outcome(
        mean_ok && var_ok,
        format!(
            "mean {:.5} vs t/M {mean_target} ({:.2} sigma) {}; variance {var:.6} vs t/(r_m M) {var_target} ({:+.1}%) {}",
            ci.mean,
            (ci.mean - mean_target) / se,
            mark(mean_ok),
            100.0 * (var / var_target - 1.0),
            mark(var_ok)
        ),
    )
}

fn cfpr(args: &[&str], dir: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_cfpr"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn cfpr");
    assert!(out.status.success(), "cfpr {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

/// Every subcommand run three times: serial, serial again, parallel.
fn cli_run(jobs: &str) -> Vec<(String, Vec<u8>)> {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path();
    fs::write(
        dir.join("sweep.toml"),
        "n_list = [20]\np_list = [5]\nlog5_rm_list = [0, 2]\nreplicates = 8\numan_draws = 40\nt_end = 20.0\n",
    )
    .unwrap();
    fs::write(dir.join("fit.csv"), "n,value\n50,0.02\n100,0.011\n200,0.0049\n400,0.0026\n").unwrap();
    let j = ["--jobs", jobs];
    let mut stdout = Vec::new();
    cfpr(&[&["sweep", "--config", "sweep.toml", "--seed", "4", "--out", "sweep"], &j[..]].concat(), dir);
    cfpr(&[&["simulate", "--n", "30", "--p", "5", "--seed", "4", "--out", "sim.txt"], &j[..]].concat(), dir);
    cfpr(
        &[
            &["simulate", "--n", "12", "--m", "3", "--t-end", "2", "--engine", "gillespie", "--seed", "4"],
            &["--trajectory", "traj.txt", "--out", "sim_g.txt"][..],
            &j[..],
        ]
        .concat(),
        dir,
    );
    cfpr(&[&["sample", "--n", "30", "--p", "5", "--count", "3", "--seed", "4", "--out", "ergm"], &j[..]].concat(), dir);
    cfpr(
        &[&["sample", "--n", "10", "--census", "5,10,30", "--count", "2", "--seed", "4", "--out", "uman"], &j[..]].concat(),
        dir,
    );
    stdout.extend(cfpr(&[&["analytics", "--n", "100", "--p", "5"], &j[..]].concat(), dir));
    stdout.extend(cfpr(&[&["ergm", "--n", "100", "--p", "5"], &j[..]].concat(), dir));
    stdout.extend(cfpr(&[&["census", "sim.txt"], &j[..]].concat(), dir));
    stdout.extend(cfpr(&[&["fit", "fit.csv"], &j[..]].concat(), dir));
    fs::write(dir.join("stdout.txt"), stdout).unwrap();
    snapshot(dir)
}

fn criterion_9(_: &mut Cache) -> Outcome {
    let a = cli_run("1");
    let b = cli_run("1");
    let c = cli_run("4");
    let differing: Vec<&str> = a
        .iter()
        .zip(&b)
        .chain(a.iter().zip(&c))
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let pass = a.len() == b.len() && a.len() == c.len() && differing.is_empty();
    outcome(
        pass,
        format!(
            "{} output files across simulate, sweep, analytics, ergm, sample, census, fit; repeated and --jobs 1 vs 4 {}",
            a.len(),
            if differing.is_empty() { "byte-identical".to_string() } else { format!("differ in {differing:?}") }
        ),
    )
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISS"
    }
}

fn main() -> ExitCode {
    let criteria: [(usize, fn(&mut Cache) -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let selected: Option<Vec<usize>> = std::env::var("CFPR_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut cache = Cache { results: HashMap::new() };
    let mut failed = Vec::new();
    for (k, run) in criteria {
        if selected.as_ref().is_some_and(|s| !s.contains(&k)) {
            continue;
        }
        let start = Instant::now();
        let o = run(&mut cache);
        println!(
            "criterion {k}: {} ({:.0} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(k);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
