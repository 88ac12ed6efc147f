//! Event-representation engine.
//!
//! Every ordered pair carries a formation stream and a dissolution stream and
//! every vertex a migration stream; the state at time `t` is whatever the most
//! recent events left behind. Only streams that can change the state are
//! realized:
//!
//! * dissolution of present edges at rate `r_l` each;
//! * (CFPR) formation of the missing direction of each asymmetric dyad at
//!   rate `r_f`, always active because the reciprocal edge is present;
//! * formation opportunities for the remaining non-adjacent ordered pairs at
//!   rate `r_f` each, effective only if the pair is co-located at that
//!   instant.
//!
//! Migration streams are never materialized. A vertex's focus is a
//! uniform-resampling clock, so the focus at a query time follows from the
//! focus at the previous query: unchanged with probability `exp(-λ Δt)`,
//! otherwise uniform over the `M` foci. Querying only when a formation
//! opportunity arrives thins the inhomogeneous formation process exactly, and
//! the work per unit time no longer depends on `r_m`.

use indexmap::IndexSet;
use rand::Rng;
use rustc_hash::FxBuildHasher;

use super::{init_state_with_rng, ProcessParams, SystemState, Variant};
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

pub fn simulate_events(params: &ProcessParams, t_end: f64, seed: u64) -> Result<SystemState> {
    let mut rng = rng_from_seed(seed);
    simulate_events_with_rng(params, t_end, &mut rng)
}

pub fn simulate_events_with_rng(
    params: &ProcessParams,
    t_end: f64,
    rng: &mut SimRng,
) -> Result<SystemState> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::param(format!("t_end must be positive, got {t_end}")));
    }
    let state = init_state_with_rng(params, rng)?;
    let mut engine = EventEngine::new(*params, state);
    engine.run(t_end, rng);
    Ok(engine.state)
}

struct EventEngine {
    params: ProcessParams,
    state: SystemState,
    resample_rate: f64,
    last_seen: Vec<f64>,
    asym: IndexSet<(u32, u32), FxBuildHasher>,
}

impl EventEngine {
    fn new(params: ProcessParams, state: SystemState) -> Self {
        let g = &state.graph;
        let asym = g
            .edges()
            .filter(|&(i, j)| !g.has_edge(j, i))
            .map(|(i, j)| key(i as u32, j as u32))
            .collect();
        EventEngine {
            resample_rate: params.kernel.resample_rate(params.r_m, params.m),
            last_seen: vec![state.time; params.n],
            asym,
            params,
            state,
        }
    }

    fn run(&mut self, t_end: f64, rng: &mut SimRng) {
        let p = self.params;
        let n = p.n as u64;
        let dyads = n * (n - 1) / 2;
        loop {
            let t_e = self.state.graph.n_edges() as u64;
            let asym = self.asym.len() as u64;
            let (reciprocation, candidates) = match p.variant {
                Variant::Cfpr => {
                    let nonnull = (t_e - asym) / 2 + asym;
                    (asym, 2 * (dyads - nonnull))
                }
                Variant::CfpDirected => (0, n * (n - 1) - t_e),
            };
            let r_diss = p.r_l * t_e as f64;
            let r_recip = p.r_f * reciprocation as f64;
            let r_opp = p.r_f * candidates as f64;
            // at least one of t_e and candidates is positive whenever N >= 2
            let total = r_diss + r_recip + r_opp;

            let u = 1.0 - rng.random::<f64>();
            let t = self.state.time + (-u.ln() / total);
            if t > t_end {
                break;
            }
            self.state.time = t;

            let x = rng.random::<f64>() * total;
            if x < r_diss {
                let k = ((x / p.r_l) as usize).min(t_e as usize - 1);
                let (i, j) = self.state.graph.edge_at(k).expect("index below edge count");
                self.dissolve(i as u32, j as u32);
            } else if x < r_diss + r_recip {
                let k = (((x - r_diss) / p.r_f) as usize).min(asym as usize - 1);
                let (a, b) = *self.asym.get_index(k).expect("index below set size");
                if self.state.graph.has_edge(a as usize, b as usize) {
                    self.form(b, a);
                } else {
                    self.form(a, b);
                }
            } else {
                let (i, j) = self.candidate_pair(rng);
                let fi = self.focus_at(i, t, rng);
                let fj = self.focus_at(j, t, rng);
                if fi == fj {
                    self.form(i, j);
                }
            }
        }
        self.state.time = t_end;
        for v in 0..p.n as u32 {
            self.focus_at(v, t_end, rng);
        }
    }

    /// Uniform ordered pair among the formation candidates that need
    /// co-location: null dyads for the CFPR, non-adjacent pairs for the CFP.
    fn candidate_pair(&self, rng: &mut SimRng) -> (u32, u32) {
        let n = self.params.n as u32;
        let g = &self.state.graph;
        loop {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let ok = match self.params.variant {
                Variant::Cfpr => !g.has_edge(i as usize, j as usize) && !g.has_edge(j as usize, i as usize),
                Variant::CfpDirected => !g.has_edge(i as usize, j as usize),
            };
            if ok {
                return (i, j);
            }
        }
    }

    fn focus_at(&mut self, v: u32, t: f64, rng: &mut SimRng) -> u32 {
        let vi = v as usize;
        if self.resample_rate > 0.0 {
            let stay = (-(self.resample_rate * (t - self.last_seen[vi]))).exp();
            if rng.random::<f64>() >= stay {
                self.state.foci[vi] = rng.random_range(0..self.params.m as u32);
            }
            self.last_seen[vi] = t;
        }
        self.state.foci[vi]
    }

    fn form(&mut self, i: u32, j: u32) {
        let g = &mut self.state.graph;
        let recip = g.has_edge(j as usize, i as usize);
        g.insert(i, j);
        if recip {
            self.asym.swap_remove(&key(i, j));
        } else {
            self.asym.insert(key(i, j));
        }
    }

    fn dissolve(&mut self, i: u32, j: u32) {
        let g = &mut self.state.graph;
        g.delete(i, j);
        if g.has_edge(j as usize, i as usize) {
            self.asym.insert(key(i, j));
        } else {
            self.asym.swap_remove(&key(i, j));
        }
    }
}

#[inline]
fn key(i: u32, j: u32) -> (u32, u32) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}
