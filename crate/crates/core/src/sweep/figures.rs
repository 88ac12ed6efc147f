//! Figure tables: mean degree, reciprocity and triad-census T² by condition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::runner::{reference_reciprocity, ConditionResult};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    MeanDeg,
    Recip,
    Triad,
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::MeanDeg, Figure::Recip, Figure::Triad];

    pub fn name(self) -> &'static str {
        match self {
            Figure::MeanDeg => "meandeg",
            Figure::Recip => "recip",
            Figure::Triad => "triad",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanDegRow {
    pub variant: String,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub log5_rm: i32,
    pub r_m: f64,
    pub mean_degree: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub q025: f64,
    pub q975: f64,
    pub fast_limit: f64,
    pub slow_limit: f64,
    pub slow_limit_equal_foci: f64,
    pub limiting_mean_degree: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecipRow {
    pub variant: String,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub log5_rm: i32,
    pub r_m: f64,
    pub reciprocity: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub per_draw_mean: Option<f64>,
    pub q025: Option<f64>,
    pub q975: Option<f64>,
    pub limit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriadRow {
    pub variant: String,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub log5_rm: i32,
    pub r_m: f64,
    pub t2: Option<f64>,
    pub p_value: Option<f64>,
    pub dim: Option<usize>,
    pub critical_value: Option<f64>,
}

fn serialize_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// CSV table for one figure, one row per condition.
pub fn emit_figure_data(results: &[ConditionResult], figure: Figure) -> Result<String> {
    if results.is_empty() {
        return Err(Error::Degenerate(format!("no conditions to emit for figure {figure}")));
    }
    match figure {
        Figure::MeanDeg => serialize_rows(results.iter().map(|r| {
            let a = &r.aggregates;
            MeanDegRow {
                variant: r.condition.variant.label().into(),
                n: r.condition.n,
                p: r.condition.p,
                m: r.params.m,
                log5_rm: r.condition.log5_rm,
                r_m: r.params.r_m,
                mean_degree: a.mean_degree.mean,
                ci_lo: a.mean_degree.lo,
                ci_hi: a.mean_degree.hi,
                q025: a.mean_degree_quantiles[0],
                q975: a.mean_degree_quantiles[1],
                fast_limit: r.references.fast_mean_degree,
                slow_limit: r.references.slow_mean_degree,
                slow_limit_equal_foci: r.references.slow_mean_degree_equal_foci,
                limiting_mean_degree: r.references.limiting_mean_degree,
            }
        })),
        Figure::Recip => serialize_rows(results.iter().map(|r| {
            let a = &r.aggregates;
            RecipRow {
                variant: r.condition.variant.label().into(),
                n: r.condition.n,
                p: r.condition.p,
                m: r.params.m,
                log5_rm: r.condition.log5_rm,
                r_m: r.params.r_m,
                reciprocity: a.reciprocity.map(|c| c.mean),
                ci_lo: a.reciprocity.map(|c| c.lo),
                ci_hi: a.reciprocity.map(|c| c.hi),
                per_draw_mean: a.reciprocity_per_draw.map(|c| c.mean),
                q025: a.reciprocity_quantiles.map(|q| q[0]),
                q975: a.reciprocity_quantiles.map(|q| q[1]),
                limit: reference_reciprocity(r.condition.variant, &r.params),
            }
        })),
        Figure::Triad => serialize_rows(results.iter().map(|r| TriadRow {
            variant: r.condition.variant.label().into(),
            n: r.condition.n,
            p: r.condition.p,
            m: r.params.m,
            log5_rm: r.condition.log5_rm,
            r_m: r.params.r_m,
            t2: r.uman.as_ref().map(|u| u.test.t2),
            p_value: r.uman.as_ref().map(|u| u.test.p),
            dim: r.uman.as_ref().map(|u| u.test.dim),
            critical_value: r.uman.as_ref().map(|u| u.critical_value_05),
        })),
    }
}
