//! Co-residence time of a vertex pair under pure migration dynamics.

use rand::Rng;

use super::{MigrationKernel, ProcessParams};
use crate::exec::map_indexed;
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// `n_runs` independent samples of the total time two vertices share a focus
/// over a window of length `window`, starting from independent uniform foci
/// (the stationary law). Only migration acts; graph rates are ignored.
pub fn coresidence_time(
    params: &ProcessParams,
    window: f64,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    params.validate()?;
    if params.m < 2 {
        return Err(Error::param("co-residence needs at least two foci"));
    }
    if !(params.r_m > 0.0) {
        return Err(Error::param("co-residence needs a positive migration rate"));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::param(format!("window must be positive, got {window}")));
    }
    let m = params.m as u32;
    let r_m = params.r_m;
    let kernel = params.kernel;
    Ok(map_indexed(n_runs, |k| {
        let mut rng = rng_from_seed(derive_seed(&[seed, k as u64]));
        let mut foci = [rng.random_range(0..m), rng.random_range(0..m)];
        let mut t = 0.0;
        let mut shared = 0.0;
        loop {
            let dt = -(1.0 - rng.random::<f64>()).ln() / (2.0 * r_m);
            let next = (t + dt).min(window);
            if foci[0] == foci[1] {
                shared += next - t;
            }
            if t + dt >= window {
                break shared;
            }
            t += dt;
            let who = usize::from(rng.random::<bool>());
            foci[who] = match kernel {
                MigrationKernel::AnyFocus => rng.random_range(0..m),
                MigrationKernel::OtherFoci => {
                    let d = rng.random_range(0..m - 1);
                    if d >= foci[who] {
                        d + 1
                    } else {
                        d
                    }
                }
            };
        }
    }))
}

/// Exact variance of the co-residence time over `[0, window]` from the
/// stationary start.
///
/// With each vertex redrawing its focus uniformly at rate `λ`, the
/// co-location indicator has covariance `(1/M)(1 - 1/M) exp(-2 λ s)` at lag
/// `s`; integrating twice over the window gives the expression below.
pub fn coresidence_variance_exact(m: usize, r_m: f64, kernel: MigrationKernel, window: f64) -> f64 {
    let lambda = kernel.resample_rate(r_m, m);
    let mf = m as f64;
    let c = (1.0 / mf) * (1.0 - 1.0 / mf);
    let k = 2.0 * lambda;
    2.0 * c * (window / k - (-(-k * window).exp_m1()) / (k * k))
}
