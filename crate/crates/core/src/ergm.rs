//! Exponential-family form of the equilibrium: parameter maps, reference
//! measures, exact dyad-independent sampling and the u|man sampler.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{dyad_count, suff_stats, DiGraph, DyadCensus};
use crate::{Error, Result};

/// Large-N free parameters `(θ_e, θ_m)`.
///
/// `θ_e = ln(P r_f / r_l) - ln N`, `θ_m = -ln P + ln N`.
pub fn theta_params(p: f64, n: f64, r_f: f64, r_l: f64) -> Result<(f64, f64)> {
    for (name, v) in [("P", p), ("N", n), ("r_f", r_f), ("r_l", r_l)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(format!("{name} must be positive, got {v}")));
        }
    }
    if p < 1.0 || n <= p {
        return Err(Error::param(format!("need N > P >= 1, got N = {n}, P = {p}")));
    }
    Ok(((p * r_f / r_l).ln() - n.ln(), -p.ln() + n.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Counting,
    NPower,
    MPower,
}

/// Which size is moved into the reference measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parameterization {
    /// Vertex count N, with P persons per focus.
    N(usize),
    /// Focus count M alone.
    M(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    pub psi_e: f64,
    pub psi_m: f64,
    pub measure: Measure,
    /// N or M; 1 under the counting measure.
    pub base: f64,
}

impl ReferenceModel {
    pub fn counting(psi_e: f64, psi_m: f64) -> Self {
        ReferenceModel {
            psi_e,
            psi_m,
            measure: Measure::Counting,
            base: 1.0,
        }
    }

    fn ln_base(&self) -> f64 {
        match self.measure {
            Measure::Counting => 0.0,
            Measure::NPower | Measure::MPower => self.base.ln(),
        }
    }
}

/// N-form: `ψ_e = ln(P r_f / r_l)`, `ψ_m = -ln P`, `h = N^(t_m - t_e)`.
/// M-form: `ψ_e = ln(r_f / r_l)`, `ψ_m = 0`, `h = M^(t_m - t_e)`.
pub fn reference_model(p: f64, r_f: f64, r_l: f64, form: Parameterization) -> Result<ReferenceModel> {
    for (name, v) in [("P", p), ("r_f", r_f), ("r_l", r_l)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(match form {
        Parameterization::N(n) => ReferenceModel {
            psi_e: (p * r_f / r_l).ln(),
            psi_m: -p.ln(),
            measure: Measure::NPower,
            base: n as f64,
        },
        Parameterization::M(m) => ReferenceModel {
            psi_e: (r_f / r_l).ln(),
            psi_m: 0.0,
            measure: Measure::MPower,
            base: m as f64,
        },
    })
}

/// `ln h = (t_m - t_e) ln(base)`, zero under the counting measure.
pub fn log_reference_measure(t_e: u64, t_m: u64, model: &ReferenceModel) -> Result<f64> {
    if t_e < 2 * t_m {
        return Err(Error::ImpossibleStatistics { t_e, t_m });
    }
    Ok((t_m as f64 - t_e as f64) * model.ln_base())
}

/// `ψ·t + θ'·t + ln h` for the graph's `(t_e, t_m)`.
pub fn log_unnormalized_pmf(g: &DiGraph, model: &ReferenceModel, extra_theta: Option<(f64, f64)>) -> f64 {
    let s = suff_stats(g);
    let (te, tm) = (s.t_e as f64, s.t_m as f64);
    let (th_e, th_m) = extra_theta.unwrap_or((0.0, 0.0));
    (model.psi_e + th_e) * te + (model.psi_m + th_m) * tm + (tm - te) * model.ln_base()
}

/// Law of one unordered pair; `p_asym_each` is per orientation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadDistribution {
    pub p_null: f64,
    pub p_asym_each: f64,
    pub p_mutual: f64,
}

impl DyadDistribution {
    /// Expected census over `D` independent dyads.
    pub fn expected_census(&self, n: usize) -> [f64; 3] {
        let d = dyad_count(n) as f64;
        [d * self.p_mutual, d * 2.0 * self.p_asym_each, d * self.p_null]
    }
}

/// Per-dyad law implied by the model, `w_n = 1`, `w_a = e^ψ_e / base`,
/// `w_m = e^(2ψ_e + ψ_m) / base`, normalized over the four states.
///
/// `(n, m)` must agree with the model's base.
pub fn dyad_marginals(model: &ReferenceModel, n: usize, m: usize) -> Result<DyadDistribution> {
    let expected = match model.measure {
        Measure::Counting => None,
        Measure::NPower => Some(n as f64),
        Measure::MPower => Some(m as f64),
    };
    if let Some(b) = expected {
        if b != model.base {
            return Err(Error::param(format!(
                "model base {} does not match N = {n}, M = {m}",
                model.base
            )));
        }
    }
    // log weights, shifted by the largest before exponentiating
    let lb = model.ln_base();
    let la = model.psi_e - lb;
    let lm = 2.0 * model.psi_e + model.psi_m - lb;
    let hi = la.max(lm).max(0.0);
    let (wn, wa, wm) = ((-hi).exp(), (la - hi).exp(), (lm - hi).exp());
    let z = wn + 2.0 * wa + wm;
    Ok(DyadDistribution {
        p_null: wn / z,
        p_asym_each: wa / z,
        p_mutual: wm / z,
    })
}

fn for_each_dyad(n: usize, mut f: impl FnMut(usize, usize)) {
    for i in 0..n {
        for j in i + 1..n {
            f(i, j);
        }
    }
}

/// Independent draw of every dyad from `dist`.
pub fn sample_dyads<R: Rng + ?Sized>(dist: &DyadDistribution, n: usize, rng: &mut R) -> DiGraph {
    let mut g = DiGraph::new(n);
    let c1 = dist.p_mutual;
    let c2 = c1 + dist.p_asym_each;
    let c3 = c2 + dist.p_asym_each;
    for_each_dyad(n, |i, j| {
        let u: f64 = rng.random();
        if u < c1 {
            g.insert(i as u32, j as u32);
            g.insert(j as u32, i as u32);
        } else if u < c2 {
            g.insert(i as u32, j as u32);
        } else if u < c3 {
            g.insert(j as u32, i as u32);
        }
    });
    g
}

/// Exact sample from the reference model.
pub fn sample_ergm<R: Rng + ?Sized>(model: &ReferenceModel, n: usize, m: usize, rng: &mut R) -> Result<DiGraph> {
    let dist = dyad_marginals(model, n, m)?;
    Ok(sample_dyads(&dist, n, rng))
}

/// Uniform draw among digraphs with exactly the given dyad census.
///
/// Dyad types are dealt to the pairs by a uniform shuffle; each asymmetric
/// pair then gets a fair-coin orientation.
pub fn sample_uman<R: Rng + ?Sized>(census: &DyadCensus, n: usize, rng: &mut R) -> Result<DiGraph> {
    census.validate(n)?;
    let mut types = Vec::with_capacity(dyad_count(n) as usize);
    types.extend(std::iter::repeat_n(2u8, census.mutual as usize));
    types.extend(std::iter::repeat_n(1u8, census.asym as usize));
    types.extend(std::iter::repeat_n(0u8, census.null as usize));
    types.shuffle(rng);
    let mut g = DiGraph::new(n);
    let mut k = 0;
    for_each_dyad(n, |i, j| {
        let (i, j) = (i as u32, j as u32);
        match types[k] {
            2 => {
                g.insert(i, j);
                g.insert(j, i);
            }
            1 => {
                if rng.random::<bool>() {
                    g.insert(i, j);
                } else {
                    g.insert(j, i);
                }
            }
            _ => {}
        }
        k += 1;
    });
    Ok(g)
}

/// Integer census nearest a mean census: mutual and asymmetric counts rounded
/// half up, null taking the remainder.
pub fn round_census(mean: [f64; 3], n: usize) -> Result<DyadCensus> {
    let d = dyad_count(n);
    if mean.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::param(format!("invalid mean census {mean:?}")));
    }
    let mutual = ((mean[0] + 0.5).floor() as u64).min(d);
    let asym = ((mean[1] + 0.5).floor() as u64).min(d - mutual);
    let c = DyadCensus {
        mutual,
        asym,
        null: d - mutual - asym,
    };
    c.validate(n)?;
    Ok(c)
}

/// Parameter diagnostics printed by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct ErgmReport {
    pub n: usize,
    pub m: usize,
    pub persons_per_focus: f64,
    pub theta_e: f64,
    pub theta_m: f64,
    pub n_form: ReferenceModel,
    pub m_form: ReferenceModel,
    pub marginals: DyadDistribution,
    pub expected_census: [f64; 3],
    /// `ln h` at the expected census, N-form.
    pub log_h_expected: f64,
}

pub fn report(n: usize, m: usize, r_f: f64, r_l: f64) -> Result<ErgmReport> {
    if m < 1 || n < 2 {
        return Err(Error::param(format!("need N >= 2 and M >= 1, got N = {n}, M = {m}")));
    }
    let p = n as f64 / m as f64;
    let (theta_e, theta_m) = if n as f64 > p {
        theta_params(p, n as f64, r_f, r_l)?
    } else {
        (f64::NAN, f64::NAN)
    };
    let n_form = reference_model(p, r_f, r_l, Parameterization::N(n))?;
    let m_form = reference_model(p, r_f, r_l, Parameterization::M(m))?;
    let marginals = dyad_marginals(&n_form, n, m)?;
    let expected_census = marginals.expected_census(n);
    let t_e = 2.0 * expected_census[0] + expected_census[1];
    Ok(ErgmReport {
        n,
        m,
        persons_per_focus: p,
        theta_e,
        theta_m,
        n_form,
        m_form,
        marginals,
        expected_census,
        log_h_expected: (expected_census[0] - t_e) * n_form.ln_base(),
    })
}
