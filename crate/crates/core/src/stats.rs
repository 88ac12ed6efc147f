//! Two-sample Hotelling T², confidence intervals and log-log power-law fits.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal, StudentsT};

use crate::{Error, Result};

/// Relative cutoff for singular values of the pooled covariance.
pub const PINV_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hotelling {
    pub t2: f64,
    pub p: f64,
    /// Effective dimension after dropping constant components and
    /// truncating the pseudo-inverse.
    pub dim: usize,
    pub n1: usize,
    pub n2: usize,
}

impl Hotelling {
    /// T² threshold at level `alpha` for this test's dimension and sizes.
    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        t2_critical(self.dim, self.n1, self.n2, alpha)
    }
}

fn check_rows(rows: &[Vec<f64>], dim: usize, which: &str) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::Degenerate(format!("sample {which} needs at least 2 rows")));
    }
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Degenerate(format!("sample {which} has ragged rows")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate(format!("sample {which} has non-finite values")));
    }
    Ok(())
}

fn column_means(rows: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    for r in rows {
        for (acc, x) in m.iter_mut().zip(r) {
            *acc += x;
        }
    }
    let n = rows.len() as f64;
    m.iter_mut().for_each(|x| *x /= n);
    m
}

/// Two-sample Hotelling T² with pooled covariance.
///
/// Components that are constant within both samples are dropped; if such a
/// component differs between the samples the means are separated without
/// noise and `T² = ∞`, `p = 0`. The pooled covariance is inverted by
/// pseudo-inverse with singular values below `PINV_TOLERANCE` times the
/// largest discarded; its rank r sets the F transform
/// `F = (n1 + n2 - r - 1) / (r (n1 + n2 - 2)) T²` on `(r, n1 + n2 - r - 1)`
/// degrees of freedom.
pub fn hotelling_t2(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Hotelling> {
    let dim = a.first().map_or(0, Vec::len);
    check_rows(a, dim, "a")?;
    check_rows(b, dim, "b")?;
    let (n1, n2) = (a.len(), b.len());
    let (ma, mb) = (column_means(a, dim), column_means(b, dim));

    let constant = |rows: &[Vec<f64>], k: usize| rows.iter().all(|r| r[k] == rows[0][k]);
    let mut keep = Vec::new();
    for k in 0..dim {
        if constant(a, k) && constant(b, k) {
            if a[0][k] != b[0][k] {
                return Ok(Hotelling { t2: f64::INFINITY, p: 0.0, dim: 1, n1, n2 });
            }
        } else {
            keep.push(k);
        }
    }
    if keep.is_empty() {
        return Err(Error::Degenerate("every component is constant".into()));
    }
    let q = keep.len();
    let mut s = DMatrix::<f64>::zeros(q, q);
    for (rows, mean) in [(a, &ma), (b, &mb)] {
        for r in rows {
            let d = DVector::from_iterator(q, keep.iter().map(|&k| r[k] - mean[k]));
            s.ger(1.0, &d, &d, 1.0);
        }
    }
    s /= (n1 + n2 - 2) as f64;
    let diff = DVector::from_iterator(q, keep.iter().map(|&k| ma[k] - mb[k]));

    let svd = s.svd(true, true);
    let smax = svd.singular_values.max();
    let cut = smax * PINV_TOLERANCE;
    let u = svd.u.as_ref().expect("u computed");
    let mut quad = 0.0;
    let mut rank = 0;
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > cut {
            rank += 1;
            let proj = u.column(i).dot(&diff);
            quad += proj * proj / sv;
        }
    }
    let scale = (n1 * n2) as f64 / (n1 + n2) as f64;
    let t2 = scale * quad;
    let df2 = n1 as f64 + n2 as f64 - rank as f64 - 1.0;
    if df2 < 1.0 {
        return Err(Error::Degenerate(format!(
            "dimension {rank} too large for sample sizes {n1} and {n2}"
        )));
    }
    let f = df2 / (rank as f64 * (n1 + n2 - 2) as f64) * t2;
    let dist = FisherSnedecor::new(rank as f64, df2).map_err(|e| Error::Degenerate(e.to_string()))?;
    let p = if t2 <= 0.0 { 1.0 } else { dist.sf(f) };
    Ok(Hotelling { t2, p, dim: rank, n1, n2 })
}

/// T² value at which the two-sample test rejects at level `alpha`.
pub fn t2_critical(dim: usize, n1: usize, n2: usize, alpha: f64) -> Result<f64> {
    let df2 = n1 as f64 + n2 as f64 - dim as f64 - 1.0;
    if dim == 0 || df2 < 1.0 || !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Degenerate(format!(
            "no critical value for dim {dim}, sizes {n1} and {n2}, alpha {alpha}"
        )));
    }
    let dist = FisherSnedecor::new(dim as f64, df2).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(dist.inverse_cdf(1.0 - alpha) * dim as f64 * (n1 + n2 - 2) as f64 / df2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn z_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param(format!("confidence level must lie in (0, 1), got {level}")));
    }
    Ok(Normal::standard().inverse_cdf(0.5 + level / 2.0))
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Normal-approximation interval `mean ± z s / √n`.
pub fn mean_ci(samples: &[f64], level: f64) -> Result<Interval> {
    if samples.len() < 2 {
        return Err(Error::Degenerate(format!("need at least 2 samples, got {}", samples.len())));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("non-finite sample".into()));
    }
    let z = z_quantile(level)?;
    let (mean, var) = mean_var(samples);
    let half = z * (var / samples.len() as f64).sqrt();
    Ok(Interval { mean, lo: mean - half, hi: mean + half })
}

/// Interval for `Σ num / Σ den` by the delta method over paired draws.
pub fn ratio_ci(num: &[f64], den: &[f64], level: f64) -> Result<Interval> {
    if num.len() != den.len() || num.len() < 2 {
        return Err(Error::Degenerate("ratio needs at least 2 paired samples".into()));
    }
    let z = z_quantile(level)?;
    let n = num.len() as f64;
    let (mx, _) = mean_var(num);
    let (my, _) = mean_var(den);
    if !(my > 0.0) {
        return Err(Error::Degenerate("ratio denominator has zero mean".into()));
    }
    let r = mx / my;
    let resid = num.iter().zip(den).map(|(x, y)| (x - r * y).powi(2)).sum::<f64>() / (n - 1.0);
    let half = z * (resid / n).sqrt() / my;
    Ok(Interval { mean: r, lo: r - half, hi: r + half })
}

/// Sample quantiles with linear interpolation between order statistics.
pub fn quantiles(samples: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() || samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Degenerate("quantiles need non-empty, NaN-free input".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    probs
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("probability {p} outside [0, 1]")));
            }
            let h = p * (xs.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(xs.len() - 1);
            Ok(xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo]))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// OLS of `ln y` on `ln N`; 95% interval for the slope from Student t with
/// `n - 2` degrees of freedom.
pub fn powerlaw_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::param(format!("power-law fit needs positive values, got ({x}, {y})")));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all N values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0)
        .map_err(|e| Error::Degenerate(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(PowerLawFit {
        exponent: slope,
        intercept,
        ci_low: slope - t * se,
        ci_high: slope + t * se,
    })
}
