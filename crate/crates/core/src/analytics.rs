//! Closed-form equilibrium quantities in the fast-mixing regime, the
//! dyad-chain oracle, and focus-count scalings.

use serde::{Deserialize, Serialize};

use crate::graph::dyad_count;
use crate::process::{round_count, ProcessParams, Variant};
use crate::{Error, Result};

/// ρ = r_l / r_f.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RateRatio(f64);

impl RateRatio {
    pub fn new(r_f: f64, r_l: f64) -> Result<Self> {
        RateRatio::from_value(r_l / r_f)
    }

    pub fn from_value(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho > 0.0 {
            Ok(RateRatio(rho))
        } else {
            Err(Error::param(format!("rate ratio must be positive and finite, got {rho}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Expected mutual, asymmetric and null dyad counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedDyadCensus {
    pub d_m: f64,
    pub d_a: f64,
    pub d_n: f64,
}

impl ExpectedDyadCensus {
    pub fn total(&self) -> f64 {
        self.d_m + self.d_a + self.d_n
    }

    /// Expected edge count `2 d_m + d_a`.
    pub fn edges(&self) -> f64 {
        2.0 * self.d_m + self.d_a
    }
}

/// Per-dyad stationary probabilities; `p_a` covers both orientations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadProbabilities {
    pub p_n: f64,
    pub p_a: f64,
    pub p_m: f64,
}

/// Expected dyad census at equilibrium in the fast-mixing limit.
///
/// CFPR: `d_m = D / (1 + 2ρ + Mρ²)`, `d_a = 2ρ d_m`, `d_n = Mρ² d_m`.
/// Directed CFP: every ordered pair is an independent edge with probability
/// `1 / (1 + Mρ)`.
pub fn expected_dyad_census(params: &ProcessParams) -> Result<ExpectedDyadCensus> {
    params.validate()?;
    let d = dyad_count(params.n) as f64;
    let rho = params.rate_ratio();
    let m = params.m as f64;
    Ok(match params.variant {
        Variant::Cfpr => {
            let d_m = d / (1.0 + 2.0 * rho + m * rho * rho);
            ExpectedDyadCensus {
                d_m,
                d_a: 2.0 * rho * d_m,
                d_n: m * rho * rho * d_m,
            }
        }
        Variant::CfpDirected => {
            let q = m * rho; // odds against an edge
            let p = 1.0 / (1.0 + q);
            ExpectedDyadCensus {
                d_m: d * p * p,
                d_a: d * 2.0 * p * (q * p),
                d_n: d * (q * p) * (q * p),
            }
        }
    })
}

/// Natural logs of the expected CFPR census, stable for extreme ρ and M.
pub fn log_expected_dyad_census(params: &ProcessParams) -> Result<ExpectedDyadCensus> {
    params.validate()?;
    let ln_d = (dyad_count(params.n) as f64).ln();
    let ln_rho = params.rate_ratio().ln();
    let ln_m = (params.m as f64).ln();
    let ln_terms = [0.0, std::f64::consts::LN_2 + ln_rho, ln_m + 2.0 * ln_rho];
    let ln_denom = log_sum_exp(&ln_terms);
    let ln_dm = ln_d - ln_denom;
    Ok(ExpectedDyadCensus {
        d_m: ln_dm,
        d_a: ln_dm + ln_terms[1],
        d_n: ln_dm + ln_terms[2],
    })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi + xs.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
}

/// Stationary law of a single dyad under the fast-mixing effective rates,
/// by Gaussian elimination of `π Q = 0` in the subtraction-free GTH
/// (state reduction) form, which keeps tiny probabilities to full relative
/// precision.
///
/// States are `(Y_ij, Y_ji)` in order `00, 01, 10, 11`. Each edge is lost at
/// rate `r_l`. A null dyad gains each orientation at `r_f / M`. An asymmetric
/// dyad is completed at `r_f` (CFPR) or `r_f / M` (directed CFP).
pub fn dyad_chain_stationary(params: &ProcessParams, variant: Variant) -> Result<DyadProbabilities> {
    params.validate()?;
    let m = params.m as f64;
    let (r_f, r_l) = (params.r_f, params.r_l);
    let open = r_f / m;
    let close = match variant {
        Variant::Cfpr => r_f,
        Variant::CfpDirected => r_f / m,
    };
    let mut q = [[0.0f64; 4]; 4];
    q[0][1] = open;
    q[0][2] = open;
    q[1][3] = close;
    q[2][3] = close;
    q[1][0] = r_l;
    q[2][0] = r_l;
    q[3][1] = r_l;
    q[3][2] = r_l;
    let pi = gth_stationary(q).ok_or_else(|| Error::Singular("dyad chain generator".into()))?;
    Ok(DyadProbabilities {
        p_n: pi[0],
        p_a: pi[1] + pi[2],
        p_m: pi[3],
    })
}

/// Stationary vector of an irreducible generator given by its off-diagonal
/// rates. `None` if some state cannot be left towards lower indices.
fn gth_stationary<const S: usize>(mut q: [[f64; S]; S]) -> Option<[f64; S]> {
    let mut exit = [0.0; S];
    for k in (1..S).rev() {
        let s: f64 = q[k][..k].iter().sum();
        if !(s > 0.0 && s.is_finite()) {
            return None;
        }
        exit[k] = s;
        for i in 0..k {
            let w = q[i][k] / s;
            for j in 0..k {
                if i != j {
                    q[i][j] += w * q[k][j];
                }
            }
        }
    }
    let mut pi = [0.0; S];
    pi[0] = 1.0;
    for k in 1..S {
        pi[k] = (0..k).map(|i| pi[i] * q[i][k]).sum::<f64>() / exit[k];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    Some(pi)
}

/// Mean degree as N → ∞ at fixed P: `P (r_f/r_l) (r_f/r_l + 1)`.
pub fn limiting_mean_degree(p: f64, r_f: f64, r_l: f64) -> f64 {
    let x = r_f / r_l;
    p * x * (x + 1.0)
}

/// Edgewise reciprocity as N → ∞: `1 / (1 + r_l / r_f)`.
pub fn limiting_reciprocity(r_f: f64, r_l: f64) -> f64 {
    1.0 / (1.0 + r_l / r_f)
}

/// Fast-mixing edgewise reciprocity of the directed CFP, `1 / (1 + M r_l / r_f)`.
pub fn cfp_limiting_reciprocity(m: usize, r_f: f64, r_l: f64) -> f64 {
    1.0 / (1.0 + m as f64 * r_l / r_f)
}

/// Expected density `(2 d_m + d_a) / (N (N - 1))` for the variant's
/// fast-mixing census.
pub fn limiting_density(params: &ProcessParams) -> Result<f64> {
    let c = expected_dyad_census(params)?;
    let n = params.n as f64;
    Ok(c.edges() / (n * (n - 1.0)))
}

/// Finite-N fast-mixing mean degree `(2 d_m + d_a) / N`.
pub fn expected_mean_degree(params: &ProcessParams) -> Result<f64> {
    Ok(expected_dyad_census(params)?.edges() / params.n as f64)
}

/// Finite-N fast-mixing edgewise reciprocity `d_m / (d_m + d_a / 2)`.
pub fn expected_reciprocity(params: &ProcessParams) -> Result<f64> {
    let c = expected_dyad_census(params)?;
    Ok(c.d_m / (c.d_m + c.d_a / 2.0))
}

/// Slow-mixing mean degree reference, with foci treated as frozen.
///
/// A co-located dyad runs the M = 1 dyad chain, whose edge expectation is
/// `2 p_m + p_a`; a dyad split across foci decays to null. Under independent
/// uniform focus assignment a dyad is co-located with probability `1/M`, so
/// the mean degree is `(N - 1) / (2M) · (2 p_m + p_a)`.
pub fn slow_mixing_mean_degree(params: &ProcessParams) -> Result<f64> {
    slow_mixing_with_fraction(params, 1.0 / params.m as f64)
}

/// As [`slow_mixing_mean_degree`] with foci of exactly P members, where the
/// co-located fraction is `(P - 1) / (N - 1)`.
pub fn slow_mixing_mean_degree_equal_foci(params: &ProcessParams) -> Result<f64> {
    let within = (params.persons_per_focus() - 1.0) / (params.n as f64 - 1.0);
    slow_mixing_with_fraction(params, within)
}

fn slow_mixing_with_fraction(params: &ProcessParams, within: f64) -> Result<f64> {
    let single = ProcessParams { m: 1, ..*params };
    let p = dyad_chain_stationary(&single, Variant::Cfpr)?;
    Ok((params.n as f64 - 1.0) / 2.0 * within * (2.0 * p.p_m + p.p_a))
}

/// `M = round(N^(1-γ))`, at least 1. γ must lie in `[0, 1]`; negative γ
/// (more foci than vertices) is accepted only with `allow_super_sparse`.
pub fn foci_from_gamma(n: usize, gamma: f64, allow_super_sparse: bool) -> Result<usize> {
    if n < 1 {
        return Err(Error::param("N must be at least 1"));
    }
    let in_range = (0.0..=1.0).contains(&gamma);
    let super_sparse = allow_super_sparse && gamma.is_finite() && gamma < 0.0;
    if !(in_range || super_sparse) {
        return Err(Error::param(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    Ok(round_count((n as f64).powf(1.0 - gamma)))
}

// Absorbs representation error in ratios such as 0.3 / 0.1.
const FLOOR_SLACK: f64 = 1e-9;

/// Foci in a region of volume `volume` cut into elements of volume `element`.
pub fn foci_spatial(volume: f64, element: f64) -> Result<usize> {
    if !(element.is_finite() && element > 0.0 && volume.is_finite() && volume >= element) {
        return Err(Error::param(format!(
            "need volume >= element > 0, got V = {volume}, v = {element}"
        )));
    }
    Ok(((volume / element + FLOOR_SLACK).floor() as usize).max(1))
}

/// Foci in a `d`-dimensional hypercube of side `side` with element side `cell`.
pub fn foci_hypercube(side: f64, cell: f64, d: u32) -> Result<usize> {
    if d < 1 {
        return Err(Error::param("dimension must be at least 1"));
    }
    if !(cell.is_finite() && cell > 0.0 && side.is_finite() && side >= cell) {
        return Err(Error::param(format!(
            "need L >= l > 0, got L = {side}, l = {cell}"
        )));
    }
    let per_axis = side / cell;
    Ok(((per_axis.powi(d as i32) + FLOOR_SLACK).floor() as usize).max(1))
}

/// Every closed-form quantity for one parameter set; printed by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticsReport {
    pub params: ProcessParams,
    pub persons_per_focus: f64,
    pub rate_ratio: f64,
    pub expected_dyad_census: ExpectedDyadCensus,
    pub log_expected_dyad_census: Option<ExpectedDyadCensus>,
    pub dyad_chain: DyadProbabilities,
    pub limiting_density: f64,
    pub expected_mean_degree: f64,
    pub expected_reciprocity: f64,
    pub limiting_mean_degree: f64,
    pub limiting_reciprocity: f64,
    pub slow_mixing_mean_degree: f64,
    pub slow_mixing_mean_degree_equal_foci: f64,
    pub limiting_mutuals_per_vertex: f64,
    pub limiting_asymmetrics_per_vertex: f64,
}

pub fn report(params: &ProcessParams) -> Result<AnalyticsReport> {
    let p = params.persons_per_focus();
    let x = params.r_f / params.r_l;
    Ok(AnalyticsReport {
        params: *params,
        persons_per_focus: p,
        rate_ratio: params.rate_ratio(),
        expected_dyad_census: expected_dyad_census(params)?,
        log_expected_dyad_census: match params.variant {
            Variant::Cfpr => Some(log_expected_dyad_census(params)?),
            Variant::CfpDirected => None,
        },
        dyad_chain: dyad_chain_stationary(params, params.variant)?,
        limiting_density: limiting_density(params)?,
        expected_mean_degree: expected_mean_degree(params)?,
        expected_reciprocity: expected_reciprocity(params)?,
        limiting_mean_degree: match params.variant {
            Variant::Cfpr => limiting_mean_degree(p, params.r_f, params.r_l),
            Variant::CfpDirected => p * x,
        },
        limiting_reciprocity: match params.variant {
            Variant::Cfpr => limiting_reciprocity(params.r_f, params.r_l),
            Variant::CfpDirected => cfp_limiting_reciprocity(params.m, params.r_f, params.r_l),
        },
        slow_mixing_mean_degree: slow_mixing_mean_degree(params)?,
        slow_mixing_mean_degree_equal_foci: slow_mixing_mean_degree_equal_foci(params)?,
        limiting_mutuals_per_vertex: 0.5 * p * x * x,
        limiting_asymmetrics_per_vertex: p * x,
    })
}
