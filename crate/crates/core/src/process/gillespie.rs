use indexmap::IndexSet;
use rand::Rng;
use rustc_hash::FxBuildHasher;

use super::fenwick::Fenwick;
use super::{
    init_state_with_rng, risk_set, total_rates, EventKind, EventRecord, MigrationKernel,
    ProcessParams, Rates, SystemState, Variant,
};
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

#[inline]
fn dyad_key(i: u32, j: u32) -> (u32, u32) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Direct-method simulator with incremental rate bookkeeping.
///
/// Maintained alongside the state:
/// * per-focus member lists and a Fenwick tree over `n_f (n_f - 1)`, whose
///   total is the number of co-located ordered pairs;
/// * the set of asymmetric dyads (the reciprocation channel);
/// * the number of co-located non-null dyads and of co-located edges.
///
/// The CFPR risk set splits into the asymmetric dyads' missing directions plus
/// the co-located ordered pairs inside null dyads; the directed CFP risk set
/// is the co-located non-adjacent ordered pairs.
pub struct Simulator {
    params: ProcessParams,
    state: SystemState,
    rng: SimRng,
    members: Vec<Vec<u32>>,
    slot: Vec<u32>,
    pair_weights: Fenwick,
    asym: IndexSet<(u32, u32), FxBuildHasher>,
    colocated_nonnull: u64,
    colocated_edges: u64,
}

impl Simulator {
    pub fn new(params: ProcessParams, state: SystemState, rng: SimRng) -> Result<Self> {
        params.validate()?;
        state.validate(&params)?;
        let mut sim = Simulator {
            params,
            members: vec![Vec::new(); params.m],
            slot: vec![0; params.n],
            pair_weights: Fenwick::new(params.m),
            asym: IndexSet::default(),
            colocated_nonnull: 0,
            colocated_edges: 0,
            state,
            rng,
        };
        sim.rebuild();
        Ok(sim)
    }

    /// Seeds the generator, draws the initial state, and keeps the same
    /// stream for the dynamics.
    pub fn from_seed(params: ProcessParams, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let state = init_state_with_rng(&params, &mut rng)?;
        Simulator::new(params, state, rng)
    }

    fn rebuild(&mut self) {
        for m in &mut self.members {
            m.clear();
        }
        for (v, &f) in self.state.foci.iter().enumerate() {
            let list = &mut self.members[f as usize];
            self.slot[v] = list.len() as u32;
            list.push(v as u32);
        }
        for f in 0..self.params.m {
            self.refresh_focus_weight(f);
        }
        self.asym.clear();
        self.colocated_nonnull = 0;
        self.colocated_edges = 0;
        let g = &self.state.graph;
        for (i, j) in g.edges() {
            let recip = g.has_edge(j, i);
            let co = self.state.foci[i] == self.state.foci[j];
            if !recip {
                self.asym.insert(dyad_key(i as u32, j as u32));
            }
            if co {
                self.colocated_edges += 1;
                if !recip || i < j {
                    self.colocated_nonnull += 1;
                }
            }
        }
    }

    fn refresh_focus_weight(&mut self, f: usize) {
        let k = self.members[f].len() as u64;
        self.pair_weights.set(f, k * k.saturating_sub(1));
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn into_state(self) -> SystemState {
        self.state
    }

    pub fn params(&self) -> &ProcessParams {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    /// Size of the formation risk set.
    pub fn at_risk(&self) -> u64 {
        let colocated_pairs = self.pair_weights.total();
        match self.params.variant {
            Variant::Cfpr => {
                self.asym.len() as u64 + colocated_pairs - 2 * self.colocated_nonnull
            }
            Variant::CfpDirected => colocated_pairs - self.colocated_edges,
        }
    }

    pub fn rates(&self) -> Rates {
        let p = &self.params;
        Rates {
            formation: p.r_f * self.at_risk() as f64,
            dissolution: p.r_l * self.state.graph.n_edges() as f64,
            migration: if p.m > 1 { p.r_m * p.n as f64 } else { 0.0 },
        }
    }

    /// Fires the next event.
    pub fn step(&mut self) -> Result<EventRecord> {
        Ok(self
            .advance(f64::INFINITY)?
            .expect("an infinite horizon is never reached"))
    }

    /// Draws the next event time; if it falls beyond `horizon` the clock is
    /// set to `horizon` and nothing else changes (memorylessness makes this
    /// exact), otherwise the event is applied and returned.
    pub fn advance(&mut self, horizon: f64) -> Result<Option<EventRecord>> {
        let rates = self.rates();
        let total = rates.total();
        if !(total > 0.0) {
            return Err(Error::Absorbing {
                time: self.state.time,
            });
        }
        let u = 1.0 - self.rng.random::<f64>();
        let t = self.state.time + (-u.ln() / total);
        if t > horizon {
            self.state.time = horizon;
            return Ok(None);
        }
        // The clock must move even if dt underflows relative to the current time.
        self.state.time = if t > self.state.time {
            t
        } else {
            next_up(self.state.time)
        };

        let x = self.rng.random::<f64>() * total;
        let kind = if x < rates.formation {
            let (i, j) = self.pick_formation(x / self.params.r_f);
            self.form(i, j);
            EventKind::Formation { from: i, to: j }
        } else if x < rates.formation + rates.dissolution {
            let t_e = self.state.graph.n_edges();
            let k = (((x - rates.formation) / self.params.r_l) as usize).min(t_e - 1);
            let (i, j) = self.state.graph.edge_at(k).expect("index below edge count");
            let (i, j) = (i as u32, j as u32);
            self.dissolve(i, j);
            EventKind::Dissolution { from: i, to: j }
        } else {
            let n = self.params.n;
            let offset = x - rates.formation - rates.dissolution;
            let v = ((offset / self.params.r_m) as usize).min(n - 1) as u32;
            let dest = self.pick_destination(v);
            self.migrate(v, dest);
            EventKind::Migration {
                vertex: v,
                focus: dest,
            }
        };
        Ok(Some(EventRecord {
            time: self.state.time,
            kind,
        }))
    }

    /// Runs until the clock reaches `t_end`.
    pub fn run_until(&mut self, t_end: f64) -> Result<()> {
        while self.advance(t_end)?.is_some() {}
        Ok(())
    }

    /// `x` is uniform on `[0, at_risk)`.
    fn pick_formation(&mut self, x: f64) -> (u32, u32) {
        match self.params.variant {
            Variant::Cfpr => {
                let a = self.asym.len();
                if x < a as f64 {
                    let (p, q) = *self
                        .asym
                        .get_index((x as usize).min(a - 1))
                        .expect("index below set size");
                    if self.state.graph.has_edge(p as usize, q as usize) {
                        (q, p)
                    } else {
                        (p, q)
                    }
                } else {
                    loop {
                        let (i, j) = self.colocated_pair();
                        let g = &self.state.graph;
                        if !g.has_edge(i as usize, j as usize) && !g.has_edge(j as usize, i as usize)
                        {
                            break (i, j);
                        }
                    }
                }
            }
            Variant::CfpDirected => loop {
                let (i, j) = self.colocated_pair();
                if !self.state.graph.has_edge(i as usize, j as usize) {
                    break (i, j);
                }
            },
        }
    }

    /// Uniform co-located ordered pair of distinct vertices.
    fn colocated_pair(&mut self) -> (u32, u32) {
        let target = self.rng.random_range(0..self.pair_weights.total());
        let members = &self.members[self.pair_weights.find(target)];
        let k = members.len();
        let a = self.rng.random_range(0..k);
        let mut b = self.rng.random_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        (members[a], members[b])
    }

    fn pick_destination(&mut self, v: u32) -> u32 {
        let m = self.params.m as u32;
        match self.params.kernel {
            MigrationKernel::AnyFocus => self.rng.random_range(0..m),
            MigrationKernel::OtherFoci => {
                let cur = self.state.foci[v as usize];
                let k = self.rng.random_range(0..m - 1);
                if k >= cur {
                    k + 1
                } else {
                    k
                }
            }
        }
    }

    fn form(&mut self, i: u32, j: u32) {
        let g = &mut self.state.graph;
        let recip = g.has_edge(j as usize, i as usize);
        let inserted = g.insert(i, j);
        debug_assert!(inserted, "formation target already adjacent");
        let co = self.state.foci[i as usize] == self.state.foci[j as usize];
        if recip {
            self.asym.swap_remove(&dyad_key(i, j));
        } else {
            self.asym.insert(dyad_key(i, j));
            if co {
                self.colocated_nonnull += 1;
            }
        }
        if co {
            self.colocated_edges += 1;
        }
    }

    fn dissolve(&mut self, i: u32, j: u32) {
        let g = &mut self.state.graph;
        let removed = g.delete(i, j);
        debug_assert!(removed);
        let recip = g.has_edge(j as usize, i as usize);
        let co = self.state.foci[i as usize] == self.state.foci[j as usize];
        if recip {
            self.asym.insert(dyad_key(i, j));
        } else {
            self.asym.swap_remove(&dyad_key(i, j));
            if co {
                self.colocated_nonnull -= 1;
            }
        }
        if co {
            self.colocated_edges -= 1;
        }
    }

    fn migrate(&mut self, v: u32, dest: u32) {
        let vi = v as usize;
        let from = self.state.foci[vi];
        if from == dest {
            return;
        }
        let g = &self.state.graph;
        let foci = &self.state.foci;
        let (mut nonnull_delta, mut edge_delta) = (0i64, 0i64);
        let mut tally = |u: u32, edges: i64| {
            let fu = foci[u as usize];
            if fu == from {
                nonnull_delta -= 1;
                edge_delta -= edges;
            } else if fu == dest {
                nonnull_delta += 1;
                edge_delta += edges;
            }
        };
        for &u in g.out_neighbors(vi) {
            tally(u, 1 + i64::from(g.has_edge(u as usize, vi)));
        }
        for &u in g.in_neighbors(vi) {
            if !g.has_edge(vi, u as usize) {
                tally(u, 1);
            }
        }
        self.colocated_nonnull = (self.colocated_nonnull as i64 + nonnull_delta) as u64;
        self.colocated_edges = (self.colocated_edges as i64 + edge_delta) as u64;

        // move v between member lists
        let pos = self.slot[vi] as usize;
        let old = &mut self.members[from as usize];
        old.swap_remove(pos);
        if let Some(&moved) = old.get(pos) {
            self.slot[moved as usize] = pos as u32;
        }
        let new = &mut self.members[dest as usize];
        self.slot[vi] = new.len() as u32;
        new.push(v);
        self.state.foci[vi] = dest;
        self.refresh_focus_weight(from as usize);
        self.refresh_focus_weight(dest as usize);
    }

    /// Recomputes every maintained quantity from scratch and compares it with
    /// the incremental values and with the brute-force risk set.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let s = &self.state;
        for (f, list) in self.members.iter().enumerate() {
            for (k, &v) in list.iter().enumerate() {
                if s.foci[v as usize] as usize != f || self.slot[v as usize] as usize != k {
                    return Err(format!("member list of focus {f} out of sync at vertex {v}"));
                }
            }
        }
        if self.members.iter().map(Vec::len).sum::<usize>() != self.params.n {
            return Err("member lists do not cover all vertices".into());
        }
        let brute = risk_set(s, self.params.variant).len() as u64;
        if brute != self.at_risk() {
            return Err(format!(
                "risk set size {} (incremental) vs {brute} (enumerated)",
                self.at_risk()
            ));
        }
        let fresh = total_rates(s, &self.params);
        if fresh != self.rates() {
            return Err(format!("rates {:?} vs recomputed {fresh:?}", self.rates()));
        }
        let g = &s.graph;
        let mut asym: Vec<(u32, u32)> = g
            .edges()
            .filter(|&(i, j)| !g.has_edge(j, i))
            .map(|(i, j)| dyad_key(i as u32, j as u32))
            .collect();
        asym.sort_unstable();
        let mut tracked: Vec<(u32, u32)> = self.asym.iter().copied().collect();
        tracked.sort_unstable();
        if asym != tracked {
            return Err("asymmetric dyad set out of sync".into());
        }
        Ok(())
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

/// Final state at `t_end` of a run started from [`super::init_state`].
/// Deterministic in `(params, t_end, seed)`.
pub fn simulate(params: &ProcessParams, t_end: f64, seed: u64) -> Result<SystemState> {
    simulate_with_observer(params, t_end, seed, |_, _| {})
}

/// As [`simulate`], calling `observe` after every applied event.
pub fn simulate_with_observer<F>(
    params: &ProcessParams,
    t_end: f64,
    seed: u64,
    mut observe: F,
) -> Result<SystemState>
where
    F: FnMut(&SystemState, &EventRecord),
{
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::param(format!("t_end must be positive, got {t_end}")));
    }
    let mut sim = Simulator::from_seed(*params, seed)?;
    while let Some(ev) = sim.advance(t_end)? {
        observe(sim.state(), &ev);
    }
    Ok(sim.into_state())
}
