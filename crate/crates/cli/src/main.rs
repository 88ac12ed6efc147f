//! `cfpr` command-line front end.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cfpr::analytics;
use cfpr::ergm::{self, dyad_marginals, reference_model, sample_dyads, sample_uman, Parameterization};
use cfpr::graph::{
    density, dyad_census, edgewise_reciprocity, mean_degree, read_edge_list, suff_stats, triad_census,
    write_edge_list, DyadCensus, SuffStats, TRIAD_NAMES,
};
use cfpr::process::{simulate_events, simulate_with_observer, MigrationKernel, ProcessParams, Variant};
use cfpr::rng::{derive_seed, rng_from_seed};
use cfpr::stats::powerlaw_fit;
use cfpr::sweep::{emit_figure_data, run_sweep, Figure, Preset, SweepConfig};

#[derive(Parser, Debug)]
#[command(name = "cfpr", version, about = "Contact formation process with reciprocity: simulation and exact analytics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML configuration (sweep overrides)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Base preset for sweep configuration
    #[arg(long, global = true, value_enum, default_value_t = PresetArg::Paper)]
    preset: PresetArg,
    /// Output file (or directory for `sweep` and multi-draw `sample`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Paper,
    Desk,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Paper => Preset::Paper,
            PresetArg::Desk => Preset::Desk,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Cfpr,
    CfpDirected,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Cfpr => Variant::Cfpr,
            VariantArg::CfpDirected => Variant::CfpDirected,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KernelArg {
    OtherFoci,
    AnyFocus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Events,
    Gillespie,
}

#[derive(Args, Debug, Clone)]
struct Size {
    /// Number of vertices
    #[arg(long)]
    n: usize,
    /// Number of foci
    #[arg(long, conflicts_with = "p")]
    m: Option<usize>,
    /// Persons per focus; M = round(N / P)
    #[arg(long)]
    p: Option<f64>,
}

impl Size {
    fn foci(&self) -> Result<usize> {
        match (self.m, self.p) {
            (Some(m), _) => Ok(m),
            (None, Some(p)) => {
                let params = ProcessParams::with_persons_per_focus(self.n, p, 1.0, 1.0, 0.0, Variant::Cfpr)?;
                Ok(params.m)
            }
            (None, None) => bail!("one of --m or --p is required"),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Model {
    #[command(flatten)]
    size: Size,
    #[arg(long, default_value_t = 1.0)]
    r_f: f64,
    #[arg(long, default_value_t = 5.0)]
    r_l: f64,
    #[arg(long, default_value_t = 625.0)]
    r_m: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Cfpr)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = KernelArg::OtherFoci)]
    kernel: KernelArg,
}

impl Model {
    fn params(&self) -> Result<ProcessParams> {
        let kernel = match self.kernel {
            KernelArg::OtherFoci => MigrationKernel::OtherFoci,
            KernelArg::AnyFocus => MigrationKernel::AnyFocus,
        };
        Ok(ProcessParams::new(
            self.size.n,
            self.size.foci()?,
            self.r_f,
            self.r_l,
            self.r_m,
            self.variant.into(),
        )?
        .with_kernel(kernel))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One run; writes the final graph with its foci as an edge list
    Simulate {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, value_enum, default_value_t = EngineArg::Events)]
        engine: EngineArg,
        /// Write every event as `time kind payload` (Gillespie engine)
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Factorial sweep; writes per-condition CSVs, summary, manifest and figure tables
    Sweep,
    /// Closed-form equilibrium quantities as JSON
    Analytics {
        #[command(flatten)]
        model: Model,
    },
    /// Exponential-family parameters and reference measures as JSON
    Ergm {
        #[command(flatten)]
        size: Size,
        #[arg(long, default_value_t = 1.0)]
        r_f: f64,
        #[arg(long, default_value_t = 5.0)]
        r_l: f64,
    },
    /// Exact draws from the reference model or from u|man
    Sample {
        #[command(flatten)]
        size: Size,
        #[arg(long, default_value_t = 1.0)]
        r_f: f64,
        #[arg(long, default_value_t = 5.0)]
        r_l: f64,
        /// Draw from u|man at this dyad census `mutual,asym,null` instead
        #[arg(long, value_delimiter = ',')]
        census: Option<Vec<u64>>,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Dyad and triad censuses of an edge-list file
    Census {
        file: PathBuf,
    },
    /// Log-log power-law fit of a CSV of `N,value` rows
    Fit {
        file: PathBuf,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn cmd_simulate(g: &Global, model: &Model, t_end: f64, engine: EngineArg, trajectory: Option<&Path>) -> Result<()> {
    let params = model.params()?;
    let seed = g.seed.unwrap_or(1);
    let state = match (engine, trajectory) {
        (EngineArg::Events, Some(_)) => bail!("--trajectory needs --engine gillespie"),
        (EngineArg::Events, None) => simulate_events(&params, t_end, seed)?,
        (EngineArg::Gillespie, None) => simulate_with_observer(&params, t_end, seed, |_, _| {})?,
        (EngineArg::Gillespie, Some(path)) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = std::io::BufWriter::new(file);
            let mut failed = None;
            let state = simulate_with_observer(&params, t_end, seed, |_, ev| {
                if failed.is_none() {
                    if let Err(e) = writeln!(w, "{ev}") {
                        failed = Some(e);
                    }
                }
            })?;
            if let Some(e) = failed {
                return Err(e).context("writing trajectory");
            }
            w.flush()?;
            state
        }
    };
    emit(g.out.as_deref(), &write_edge_list(&state.graph, Some(&state.foci)))
}

fn sweep_config(g: &Global) -> Result<SweepConfig> {
    let preset = g.preset.into();
    let mut cfg = match &g.config {
        Some(path) => SweepConfig::from_file(path, preset)?,
        None => SweepConfig::preset(preset),
    };
    if let Some(seed) = g.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Returns whether every condition completed.
fn cmd_sweep(g: &Global) -> Result<bool> {
    let cfg = sweep_config(g)?;
    let outcome = run_sweep(&cfg)?;
    for f in &outcome.failures {
        eprintln!("condition {} failed: {}", f.label, f.error);
    }
    if !outcome.results.is_empty() {
        for fig in Figure::ALL {
            let path = cfg.output_dir.join(format!("{}.csv", fig.name()));
            fs::write(&path, emit_figure_data(&outcome.results, fig)?)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    eprintln!(
        "{} conditions completed ({} resumed), {} failed; output in {}",
        outcome.results.len(),
        outcome.resumed.len(),
        outcome.failures.len(),
        cfg.output_dir.display()
    );
    Ok(outcome.all_completed())
}

fn cmd_sample(g: &Global, size: &Size, r_f: f64, r_l: f64, census: Option<&[u64]>, count: usize) -> Result<()> {
    if count == 0 {
        bail!("--count must be at least 1");
    }
    let n = size.n;
    let seed = g.seed.unwrap_or(1);
    let draw = |k: usize| -> Result<String> {
        let mut rng = rng_from_seed(derive_seed(&[seed, k as u64]));
        let graph = match census {
            Some(c) => {
                if c.len() != 3 {
                    bail!("--census takes three counts, mutual,asym,null");
                }
                let c = DyadCensus { mutual: c[0], asym: c[1], null: c[2] };
                sample_uman(&c, n, &mut rng)?
            }
            None => {
                let m = size.foci()?;
                let model = reference_model(n as f64 / m as f64, r_f, r_l, Parameterization::M(m))?;
                sample_dyads(&dyad_marginals(&model, n, m)?, n, &mut rng)
            }
        };
        Ok(write_edge_list(&graph, None))
    };
    match (&g.out, count) {
        (out, 1) => emit(out.as_deref(), &draw(0)?),
        (Some(dir), _) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let width = (count - 1).to_string().len();
            for k in 0..count {
                let path = dir.join(format!("sample_{k:0width$}.txt"));
                fs::write(&path, draw(k)?).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        (None, _) => bail!("--count > 1 needs --out <dir>"),
    }
}

#[derive(Serialize)]
struct TriadCount {
    triad: &'static str,
    count: u64,
}

#[derive(Serialize)]
struct CensusReport {
    n: usize,
    suff_stats: SuffStats,
    dyad_census: DyadCensus,
    triad_census: Option<Vec<TriadCount>>,
    mean_degree: f64,
    density: f64,
    reciprocity: Option<f64>,
}

fn cmd_census(g: &Global, file: &Path) -> Result<()> {
    let parsed = read_edge_list(file)?;
    let graph = &parsed.graph;
    let triads = if graph.n_vertices() >= 3 {
        let t = triad_census(graph)?;
        Some(
            TRIAD_NAMES
                .iter()
                .zip(t.counts)
                .map(|(&triad, count)| TriadCount { triad, count })
                .collect(),
        )
    } else {
        None
    };
    let report = CensusReport {
        n: graph.n_vertices(),
        suff_stats: suff_stats(graph),
        dyad_census: dyad_census(graph),
        triad_census: triads,
        mean_degree: mean_degree(graph),
        density: density(graph),
        reciprocity: edgewise_reciprocity(graph),
    };
    emit(g.out.as_deref(), &json(&report)?)
}

fn read_points(file: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(file)
        .with_context(|| format!("reading {}", file.display()))?;
    let mut points = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            bail!("{}: row {} needs two columns", file.display(), k + 1);
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push((x, y)),
            // header row
            _ if k == 0 => continue,
            _ => bail!("{}: row {} is not numeric", file.display(), k + 1),
        }
    }
    Ok(points)
}

fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate { model, t_end, engine, trajectory } => {
            cmd_simulate(g, model, *t_end, *engine, trajectory.as_deref())?
        }
        Command::Sweep => return cmd_sweep(g),
        Command::Analytics { model } => emit(g.out.as_deref(), &json(&analytics::report(&model.params()?)?)?)?,
        Command::Ergm { size, r_f, r_l } => {
            emit(g.out.as_deref(), &json(&ergm::report(size.n, size.foci()?, *r_f, *r_l)?)?)?
        }
        Command::Sample { size, r_f, r_l, census, count } => {
            cmd_sample(g, size, *r_f, *r_l, census.as_deref(), *count)?
        }
        Command::Census { file } => cmd_census(g, file)?,
        Command::Fit { file } => emit(g.out.as_deref(), &json(&powerlaw_fit(&read_points(file)?)?)?)?,
    }
    Ok(true)
}

#[cfg(feature = "parallel")]
fn run_with_jobs(cli: &Cli) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build()?;
    pool.install(|| run(cli))
}

#[cfg(not(feature = "parallel"))]
fn run_with_jobs(cli: &Cli) -> Result<bool> {
    if cli.global.jobs > 1 {
        eprintln!("built without the `parallel` feature; --jobs {} ignored", cli.global.jobs);
    }
    run(cli)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_with_jobs(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn size_from_persons_per_focus() {
        let s = Size { n: 52, m: None, p: Some(5.0) };
        assert_eq!(s.foci().unwrap(), 10);
        let s = Size { n: 52, m: None, p: None };
        assert!(s.foci().is_err());
    }
}
