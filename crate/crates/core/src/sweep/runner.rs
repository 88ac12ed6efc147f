//! Runs the factorial design condition by condition. Replicates and u|man
//! draws fan out through `exec::map_indexed`; every draw owns a seed derived
//! from the master seed, the condition label and its index, so results do not
//! depend on the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Condition, Engine, SweepConfig};
use crate::analytics;
use crate::ergm::{round_census, sample_uman};
use crate::exec::map_indexed;
use crate::graph::{dyad_census, density, mean_degree, suff_stats, triad_census, DiGraph, TRIAD_NAMES};
use crate::process::{simulate, simulate_events, ProcessParams, Variant};
use crate::rng::{derive_seed, replicate_seed, rng_from_seed, stable_hash};
use crate::stats::{hotelling_t2, mean_ci, quantiles, ratio_ci, Hotelling, Interval};
use crate::{Error, Result};

const UMAN_STREAM: u64 = 0x756d_616e;
pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.json";

/// Statistics of one equilibrium draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub seed: u64,
    pub t_e: u64,
    pub t_m: u64,
    pub mutual: u64,
    pub asym: u64,
    pub null: u64,
    pub mean_degree: f64,
    pub density: f64,
    /// Undefined for an edgeless draw.
    pub reciprocity: Option<f64>,
    pub triads: Vec<u64>,
}

impl ReplicateRow {
    pub fn from_graph(replicate: usize, seed: u64, g: &DiGraph) -> Result<Self> {
        let s = suff_stats(g);
        let c = dyad_census(g);
        Ok(ReplicateRow {
            replicate,
            seed,
            t_e: s.t_e,
            t_m: s.t_m,
            mutual: c.mutual,
            asym: c.asym,
            null: c.null,
            mean_degree: mean_degree(g),
            density: density(g),
            reciprocity: crate::graph::edgewise_reciprocity(g),
            triads: triad_census(g)?.counts.to_vec(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean_degree: Interval,
    /// 2.5% and 97.5% quantiles of the per-draw mean degree.
    pub mean_degree_quantiles: [f64; 2],
    pub density: Interval,
    /// Pooled edgewise reciprocity `2 Σ t_m / Σ t_e` with a delta-method interval.
    pub reciprocity: Option<Interval>,
    /// Mean of the per-draw reciprocities over draws with edges.
    pub reciprocity_per_draw: Option<Interval>,
    pub reciprocity_quantiles: Option<[f64; 2]>,
    pub t_e: Interval,
    pub t_m: Interval,
    pub dyad_census: [f64; 3],
    pub triad_census: Vec<f64>,
}

impl Aggregates {
    pub fn from_rows(rows: &[ReplicateRow]) -> Result<Self> {
        let col = |f: &dyn Fn(&ReplicateRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        let md = col(&|r| r.mean_degree);
        let te = col(&|r| r.t_e as f64);
        let tm2 = col(&|r| 2.0 * r.t_m as f64);
        let per_draw: Vec<f64> = rows.iter().filter_map(|r| r.reciprocity).collect();
        let n = rows.len() as f64;
        let mut dyads = [0.0; 3];
        let mut triads = vec![0.0; TRIAD_NAMES.len()];
        for r in rows {
            for (acc, x) in dyads.iter_mut().zip([r.mutual, r.asym, r.null]) {
                *acc += x as f64;
            }
            for (acc, &x) in triads.iter_mut().zip(&r.triads) {
                *acc += x as f64;
            }
        }
        dyads.iter_mut().for_each(|x| *x /= n);
        triads.iter_mut().for_each(|x| *x /= n);
        let q = quantiles(&md, &[0.025, 0.975])?;
        let te_sum: f64 = te.iter().sum();
        Ok(Aggregates {
            mean_degree: mean_ci(&md, 0.95)?,
            mean_degree_quantiles: [q[0], q[1]],
            density: mean_ci(&col(&|r| r.density), 0.95)?,
            reciprocity: if te_sum > 0.0 { Some(ratio_ci(&tm2, &te, 0.95)?) } else { None },
            reciprocity_per_draw: if per_draw.len() >= 2 { Some(mean_ci(&per_draw, 0.95)?) } else { None },
            reciprocity_quantiles: if per_draw.is_empty() {
                None
            } else {
                let q = quantiles(&per_draw, &[0.025, 0.975])?;
                Some([q[0], q[1]])
            },
            t_e: mean_ci(&te, 0.95)?,
            t_m: mean_ci(&col(&|r| r.t_m as f64), 0.95)?,
            dyad_census: dyads,
            triad_census: triads,
        })
    }
}

/// Closed-form references for a condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct References {
    /// Finite-N fast-mixing mean degree.
    pub fast_mean_degree: f64,
    /// N → ∞ limit `P x (x + 1)` (CFPR) or `P x` (directed CFP).
    pub limiting_mean_degree: f64,
    /// Frozen uniformly assigned foci.
    pub slow_mean_degree: f64,
    /// Frozen foci of exactly P members.
    pub slow_mean_degree_equal_foci: f64,
    pub fast_reciprocity: f64,
    pub limiting_density: f64,
}

impl References {
    pub fn for_params(params: &ProcessParams) -> Result<Self> {
        let r = analytics::report(params)?;
        Ok(References {
            fast_mean_degree: r.expected_mean_degree,
            limiting_mean_degree: r.limiting_mean_degree,
            slow_mean_degree: r.slow_mixing_mean_degree,
            slow_mean_degree_equal_foci: r.slow_mixing_mean_degree_equal_foci,
            fast_reciprocity: r.expected_reciprocity,
            limiting_density: r.limiting_density,
        })
    }
}

/// u|man comparison of the triad census.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UmanComparison {
    pub census: [u64; 3],
    pub draws: usize,
    pub test: Hotelling,
    pub critical_value_05: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub label: String,
    pub condition: Condition,
    pub params: ProcessParams,
    pub t_end: f64,
    pub engine: Engine,
    pub rows: Vec<ReplicateRow>,
    pub aggregates: Aggregates,
    pub uman: Option<UmanComparison>,
    pub references: References,
}

/// Equilibrium draw for one replicate.
pub fn run_replicate(params: &ProcessParams, t_end: f64, engine: Engine, seed: u64) -> Result<DiGraph> {
    let state = match engine {
        Engine::Events => simulate_events(params, t_end, seed)?,
        Engine::Gillespie => simulate(params, t_end, seed)?,
    };
    Ok(state.graph)
}

/// Runs every replicate of one condition and the u|man comparison.
pub fn run_condition(cfg: &SweepConfig, condition: &Condition) -> Result<ConditionResult> {
    let params = condition.params(cfg)?;
    let label = condition.label();
    let cond_id = stable_hash(label.as_bytes());
    let rows = map_indexed(cfg.replicates, |k| {
        let seed = replicate_seed(cfg.master_seed, cond_id, k as u64);
        let g = run_replicate(&params, cfg.t_end, cfg.engine, seed)?;
        ReplicateRow::from_graph(k, seed, &g)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let aggregates = Aggregates::from_rows(&rows)?;
    let uman = if cfg.uman_draws > 0 {
        Some(uman_comparison(&rows, &aggregates, params.n, cfg.uman_draws, cfg.master_seed, cond_id)?)
    } else {
        None
    };
    Ok(ConditionResult {
        label,
        condition: *condition,
        params,
        t_end: cfg.t_end,
        engine: cfg.engine,
        rows,
        aggregates,
        uman,
        references: References::for_params(&params)?,
    })
}

/// Two-sample T² between replicate triad censuses and u|man draws at the
/// rounded mean dyad census.
pub fn uman_comparison(
    rows: &[ReplicateRow],
    aggregates: &Aggregates,
    n: usize,
    draws: usize,
    master_seed: u64,
    cond_id: u64,
) -> Result<UmanComparison> {
    let census = round_census(aggregates.dyad_census, n)?;
    let uman_rows = map_indexed(draws, |k| {
        let mut rng = rng_from_seed(derive_seed(&[master_seed, cond_id, UMAN_STREAM, k as u64]));
        let g = sample_uman(&census, n, &mut rng)?;
        Ok(triad_census(&g)?.as_f64())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let sim_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.triads.iter().map(|&x| x as f64).collect())
        .collect();
    let test = hotelling_t2(&sim_rows, &uman_rows)?;
    Ok(UmanComparison {
        census: [census.mutual, census.asym, census.null],
        draws,
        critical_value_05: test.critical_value(0.05)?,
        test,
    })
}

/// Record of completed conditions, used to resume an interrupted sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: u64,
    pub completed: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub label: String,
    pub error: String,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub results: Vec<ConditionResult>,
    pub failures: Vec<Failure>,
    /// Labels loaded from a previous run instead of recomputed.
    pub resumed: Vec<String>,
}

impl SweepOutcome {
    pub fn all_completed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Short summary row per condition for the sweep-level JSON.
#[derive(Clone, Debug, Serialize)]
struct ConditionSummary<'a> {
    label: &'a str,
    condition: &'a Condition,
    m: usize,
    r_m: f64,
    aggregates: &'a Aggregates,
    uman: &'a Option<UmanComparison>,
    references: &'a References,
}

#[derive(Serialize)]
struct Summary<'a> {
    /// Output location omitted so that reruns elsewhere are byte-identical.
    config: SweepConfig,
    conditions: Vec<ConditionSummary<'a>>,
    failures: &'a [Failure],
}

fn config_hash(cfg: &SweepConfig) -> Result<u64> {
    // output_dir does not affect results
    let mut c = cfg.clone();
    c.output_dir = PathBuf::new();
    Ok(stable_hash(serde_json::to_string(&c)?.as_bytes()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn condition_dir(out: &Path) -> PathBuf {
    out.join("conditions")
}

/// Per-replicate CSV for one condition.
pub fn condition_csv(result: &ConditionResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "replicate", "seed", "t_e", "t_m", "mutual", "asym", "null", "mean_degree", "density", "reciprocity",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(TRIAD_NAMES.iter().map(|t| format!("triad_{t}")));
    w.write_record(&header)?;
    for r in &result.rows {
        let mut rec = vec![
            r.replicate.to_string(),
            r.seed.to_string(),
            r.t_e.to_string(),
            r.t_m.to_string(),
            r.mutual.to_string(),
            r.asym.to_string(),
            r.null.to_string(),
            r.mean_degree.to_string(),
            r.density.to_string(),
            r.reciprocity.map_or(String::new(), |x| x.to_string()),
        ];
        rec.extend(r.triads.iter().map(u64::to_string));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn load_manifest(out: &Path) -> Option<Manifest> {
    let text = fs::read_to_string(out.join(MANIFEST)).ok()?;
    serde_json::from_str(&text).ok()
}

fn load_result(out: &Path, label: &str) -> Option<ConditionResult> {
    let text = fs::read_to_string(condition_dir(out).join(format!("{label}.json"))).ok()?;
    serde_json::from_str(&text).ok()
}

/// Runs the sweep, writing one CSV and one JSON per condition under
/// `<output_dir>/conditions`, the manifest after every condition, and
/// `summary.json` at the end. Conditions listed in a manifest written for
/// the same configuration are loaded, not recomputed. A failing condition is
/// recorded and the sweep continues.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    fs::create_dir_all(condition_dir(out)).map_err(|e| Error::io(out, e))?;
    let hash = config_hash(cfg)?;
    let previous = load_manifest(out).filter(|m| m.config_hash == hash).unwrap_or_default();
    let mut manifest = Manifest { config_hash: hash, completed: Vec::new() };
    let mut outcome = SweepOutcome::default();

    for condition in cfg.conditions() {
        let label = condition.label();
        if previous.completed.contains(&label) {
            if let Some(r) = load_result(out, &label) {
                manifest.completed.push(label.clone());
                outcome.resumed.push(label);
                outcome.results.push(r);
                continue;
            }
        }
        match run_condition(cfg, &condition) {
            Ok(result) => {
                let dir = condition_dir(out);
                write_file(&dir.join(format!("{label}.csv")), condition_csv(&result)?.as_bytes())?;
                write_file(
                    &dir.join(format!("{label}.json")),
                    serde_json::to_string_pretty(&result)?.as_bytes(),
                )?;
                manifest.completed.push(label);
                write_file(&out.join(MANIFEST), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
                outcome.results.push(result);
            }
            Err(e) => outcome.failures.push(Failure { label, error: e.to_string() }),
        }
    }
    write_file(&out.join(MANIFEST), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    let summary = Summary {
        config: SweepConfig {
            output_dir: PathBuf::new(),
            ..cfg.clone()
        },
        conditions: outcome
            .results
            .iter()
            .map(|r| ConditionSummary {
                label: &r.label,
                condition: &r.condition,
                m: r.params.m,
                r_m: r.params.r_m,
                aggregates: &r.aggregates,
                uman: &r.uman,
                references: &r.references,
            })
            .collect(),
        failures: &outcome.failures,
    };
    write_file(&out.join(SUMMARY), serde_json::to_string_pretty(&summary)?.as_bytes())?;
    Ok(outcome)
}

/// Variant-aware fast-mixing reciprocity reference.
pub fn reference_reciprocity(variant: Variant, params: &ProcessParams) -> f64 {
    match variant {
        Variant::Cfpr => analytics::limiting_reciprocity(params.r_f, params.r_l),
        Variant::CfpDirected => analytics::cfp_limiting_reciprocity(params.m, params.r_f, params.r_l),
    }
}
