//! The contact formation process with reciprocity and its directed CFP
//! counterpart.
//!
//! Two exact engines are provided:
//!
//! * [`Simulator`] / [`simulate`]: competing-clocks (Gillespie direct method)
//!   over formation, dissolution and migration, with incremental risk-set
//!   bookkeeping so each event costs O(degree + log M).
//! * [`simulate_events`]: the Poisson event representation. Foci are
//!   resolved lazily from each vertex's migration stream and formation
//!   opportunities are thinned by co-location, so the cost does not grow with
//!   the migration rate.

mod coresidence;
mod events;
mod fenwick;
mod gillespie;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics;
use crate::graph::DiGraph;
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

pub use coresidence::{coresidence_time, coresidence_variance_exact};
pub use events::{simulate_events, simulate_events_with_rng};
pub use gillespie::{simulate, simulate_with_observer, Simulator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Reciprocating ties may form regardless of location.
    Cfpr,
    /// Every tie requires co-location.
    CfpDirected,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Cfpr => "cfpr",
            Variant::CfpDirected => "cfp_directed",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "cfpr" => Ok(Variant::Cfpr),
            "cfp_directed" | "cfp" => Ok(Variant::CfpDirected),
            other => Err(Error::param(format!("unknown variant `{other}`"))),
        }
    }
}

/// Destination law of a migration event.
///
/// Both kernels give every vertex a total migration-event hazard of `r_m`.
/// Under `OtherFoci` the destination is uniform over the `M - 1` other foci
/// (hazard `r_m / (M - 1)` per destination). Under `AnyFocus` it is uniform
/// over all `M` foci, so with probability `1/M` the vertex stays put (hazard
/// `r_m / M` per vertex/focus pair).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MigrationKernel {
    #[default]
    OtherFoci,
    AnyFocus,
}

impl MigrationKernel {
    /// Rate at which a vertex's focus is redrawn uniformly from all `M` foci;
    /// the kernel is equivalent in law to such a resampling clock.
    pub fn resample_rate(self, r_m: f64, m: usize) -> f64 {
        if m <= 1 {
            return 0.0;
        }
        match self {
            MigrationKernel::OtherFoci => r_m * m as f64 / (m as f64 - 1.0),
            MigrationKernel::AnyFocus => r_m,
        }
    }
}

impl std::str::FromStr for MigrationKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "other_foci" | "other" => Ok(MigrationKernel::OtherFoci),
            "any_focus" | "any" => Ok(MigrationKernel::AnyFocus),
            other => Err(Error::param(format!("unknown migration kernel `{other}`"))),
        }
    }
}

/// Process parameters. Rates are events per unit time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    /// Number of vertices N.
    pub n: usize,
    /// Number of foci M.
    pub m: usize,
    /// Formation hazard per at-risk ordered pair.
    pub r_f: f64,
    /// Dissolution hazard per edge.
    pub r_l: f64,
    /// Total migration hazard per vertex.
    pub r_m: f64,
    pub variant: Variant,
    #[serde(default)]
    pub kernel: MigrationKernel,
}

impl ProcessParams {
    pub fn new(n: usize, m: usize, r_f: f64, r_l: f64, r_m: f64, variant: Variant) -> Result<Self> {
        let p = ProcessParams {
            n,
            m,
            r_f,
            r_l,
            r_m,
            variant,
            kernel: MigrationKernel::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `M = round(N / P)` (half up, at least 1).
    pub fn with_persons_per_focus(
        n: usize,
        p: f64,
        r_f: f64,
        r_l: f64,
        r_m: f64,
        variant: Variant,
    ) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::param(format!("P must be positive, got {p}")));
        }
        ProcessParams::new(n, round_count(n as f64 / p), r_f, r_l, r_m, variant)
    }

    pub fn with_kernel(mut self, kernel: MigrationKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_migration_rate(mut self, r_m: f64) -> Self {
        self.r_m = r_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param(format!("N must be at least 2, got {}", self.n)));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::param("N exceeds 32-bit vertex ids"));
        }
        if self.m < 1 {
            return Err(Error::param("M must be at least 1"));
        }
        if !(self.r_f.is_finite() && self.r_f > 0.0) {
            return Err(Error::param(format!("r_f must be positive, got {}", self.r_f)));
        }
        if !(self.r_l.is_finite() && self.r_l > 0.0) {
            return Err(Error::param(format!("r_l must be positive, got {}", self.r_l)));
        }
        if !(self.r_m.is_finite() && self.r_m >= 0.0) {
            return Err(Error::param(format!("r_m must be non-negative, got {}", self.r_m)));
        }
        Ok(())
    }

    /// Mean persons per focus, P = N / M.
    pub fn persons_per_focus(&self) -> f64 {
        self.n as f64 / self.m as f64
    }

    /// ρ = r_l / r_f.
    pub fn rate_ratio(&self) -> f64 {
        self.r_l / self.r_f
    }
}

/// Round half up with a floor of 1.
pub(crate) fn round_count(x: f64) -> usize {
    ((x + 0.5).floor() as usize).max(1)
}

/// The process state: graph, focus of each vertex, and clock.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub graph: DiGraph,
    pub foci: Vec<u32>,
    pub time: f64,
}

impl SystemState {
    pub fn validate(&self, params: &ProcessParams) -> Result<()> {
        if self.graph.n_vertices() != params.n || self.foci.len() != params.n {
            return Err(Error::param("state size does not match N"));
        }
        if let Some(&f) = self.foci.iter().find(|&&f| f as usize >= params.m) {
            return Err(Error::param(format!("focus {f} out of range for M = {}", params.m)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Formation { from: u32, to: u32 },
    Dissolution { from: u32, to: u32 },
    Migration { vertex: u32, focus: u32 },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Formation { .. } => "formation",
            EventKind::Dissolution { .. } => "dissolution",
            EventKind::Migration { .. } => "migration",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
}

/// Trajectory dump line: `time kind payload`.
impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = match self.kind {
            EventKind::Formation { from, to } | EventKind::Dissolution { from, to } => (from, to),
            EventKind::Migration { vertex, focus } => (vertex, focus),
        };
        write!(f, "{} {} {} {}", self.time, self.kind.name(), a, b)
    }
}

/// Total formation, dissolution and migration rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    pub formation: f64,
    pub dissolution: f64,
    pub migration: f64,
}

impl Rates {
    pub fn total(&self) -> f64 {
        self.formation + self.dissolution + self.migration
    }
}

/// Initial state: a Bernoulli digraph at the variant's limiting fast-mixing
/// density and independent uniform focus assignments.
pub fn init_state(params: &ProcessParams, seed: u64) -> Result<SystemState> {
    let mut rng = rng_from_seed(seed);
    init_state_with_rng(params, &mut rng)
}

pub fn init_state_with_rng(params: &ProcessParams, rng: &mut SimRng) -> Result<SystemState> {
    params.validate()?;
    let p = analytics::limiting_density(params)?;
    let n = params.n;
    let mut graph = DiGraph::new(n);
    if p > 0.0 {
        for i in 0..n as u32 {
            for j in 0..n as u32 {
                if i != j && rng.random::<f64>() < p {
                    graph.insert(i, j);
                }
            }
        }
    }
    let foci = (0..n)
        .map(|_| {
            if params.m == 1 {
                0
            } else {
                rng.random_range(0..params.m as u32)
            }
        })
        .collect();
    Ok(SystemState {
        graph,
        foci,
        time: 0.0,
    })
}

/// Rates recomputed from scratch in O(N + M + t_e), independently of the
/// incremental bookkeeping in [`Simulator`].
pub fn total_rates(state: &SystemState, params: &ProcessParams) -> Rates {
    let g = &state.graph;
    let mut occupancy = vec![0u64; params.m];
    for &f in &state.foci {
        occupancy[f as usize] += 1;
    }
    let colocated_pairs: u64 = occupancy.iter().map(|&k| k * k.saturating_sub(1)).sum();
    let same = |i: usize, j: usize| state.foci[i] == state.foci[j];

    let mut colocated_edges = 0u64;
    let mut asym = 0u64;
    let mut colocated_nonnull_dyads = 0u64;
    for (i, j) in g.edges() {
        let recip = g.has_edge(j, i);
        if !recip {
            asym += 1;
        }
        if same(i, j) {
            colocated_edges += 1;
            // count each non-null dyad once
            if !recip || i < j {
                colocated_nonnull_dyads += 1;
            }
        }
    }
    let at_risk = match params.variant {
        Variant::Cfpr => asym + colocated_pairs - 2 * colocated_nonnull_dyads,
        Variant::CfpDirected => colocated_pairs - colocated_edges,
    };
    Rates {
        formation: params.r_f * at_risk as f64,
        dissolution: params.r_l * g.n_edges() as f64,
        migration: if params.m > 1 {
            params.r_m * params.n as f64
        } else {
            0.0
        },
    }
}

/// The formation risk set by exhaustive enumeration of ordered pairs.
pub fn risk_set(state: &SystemState, variant: Variant) -> Vec<(usize, usize)> {
    let g = &state.graph;
    let n = g.n_vertices();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || g.has_edge(i, j) {
                continue;
            }
            let colocated = state.foci[i] == state.foci[j];
            let reciprocating = variant == Variant::Cfpr && g.has_edge(j, i);
            if colocated || reciprocating {
                out.push((i, j));
            }
        }
    }
    out
}
