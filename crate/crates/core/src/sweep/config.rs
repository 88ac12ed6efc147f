//! Sweep configuration: a TOML key/value file layered over a preset.
//!
//! ```toml
//! n_list = [50, 100]
//! p_list = [5, 10]
//! log5_rm_list = [-2, 0, 2, 4]
//! replicates = 100
//! r_f = 1.0
//! r_l = 5.0
//! t_end = 100.0
//! variants = ["cfpr", "cfp_directed"]
//! master_seed = 1
//! uman_draws = 1000
//! output_dir = "out"
//! engine = "events"        # or "gillespie"
//! kernel = "other_foci"    # or "any_focus"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::process::{MigrationKernel, ProcessParams, Variant};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Paper,
    Desk,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Paper => "paper",
            Preset::Desk => "desk",
        })
    }
}

/// Simulation engine used for replicates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Event representation with lazily resolved foci.
    #[default]
    Events,
    /// Gillespie direct method on the full state.
    Gillespie,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "events" => Ok(Engine::Events),
            "gillespie" => Ok(Engine::Gillespie),
            other => Err(Error::Config(format!("unknown engine `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    /// Persons per focus; M = round(N / P).
    pub p_list: Vec<usize>,
    /// Migration rates as powers of 5.
    pub log5_rm_list: Vec<i32>,
    pub replicates: usize,
    pub r_f: f64,
    pub r_l: f64,
    pub t_end: f64,
    pub variants: Vec<Variant>,
    pub master_seed: u64,
    /// u|man comparison draws per condition; 0 skips the T² test.
    pub uman_draws: usize,
    pub output_dir: PathBuf,
    pub engine: Engine,
    pub kernel: MigrationKernel,
}

impl SweepConfig {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Paper => SweepConfig {
                n_list: vec![50, 100, 200, 400],
                p_list: vec![5, 10, 25],
                log5_rm_list: (-4..=4).collect(),
                replicates: 500,
                r_f: 1.0,
                r_l: 5.0,
                t_end: 100.0,
                variants: vec![Variant::Cfpr, Variant::CfpDirected],
                master_seed: 1,
                uman_draws: 5000,
                output_dir: PathBuf::from("out"),
                engine: Engine::Events,
                kernel: MigrationKernel::OtherFoci,
            },
            Preset::Desk => SweepConfig {
                n_list: vec![50, 100],
                p_list: vec![5, 10],
                log5_rm_list: vec![-2, 0, 2, 4],
                replicates: 100,
                uman_draws: 1000,
                ..SweepConfig::preset(Preset::Paper)
            },
        }
    }

    /// Parses `text` as overrides on top of `base`. Unknown keys are errors.
    pub fn from_toml_str(text: &str, base: Preset) -> Result<Self> {
        let overrides: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut table = toml::Table::try_from(SweepConfig::preset(base)).map_err(|e| Error::Config(e.to_string()))?;
        for (k, v) in overrides {
            table.insert(k, v);
        }
        let cfg: SweepConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>, base: Preset) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SweepConfig::from_toml_str(&text, base)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_list.is_empty() || self.p_list.is_empty() || self.log5_rm_list.is_empty() || self.variants.is_empty() {
            return bad("every grid must be non-empty".into());
        }
        if self.replicates < 2 {
            return bad(format!("replicates must be at least 2, got {}", self.replicates));
        }
        if self.uman_draws == 1 {
            return bad("uman_draws must be 0 or at least 2".into());
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 3) {
            return bad(format!("N must be at least 3, got {n}"));
        }
        if self.p_list.contains(&0) {
            return bad("P must be at least 1".into());
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        for c in self.conditions() {
            c.params(self)?;
        }
        Ok(())
    }

    /// The full factorial grid, in a fixed order.
    pub fn conditions(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        for &variant in &self.variants {
            for &n in &self.n_list {
                for &p in &self.p_list {
                    for &log5_rm in &self.log5_rm_list {
                        out.push(Condition { n, p, log5_rm, variant });
                    }
                }
            }
        }
        out
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::preset(Preset::Paper)
    }
}

/// One cell of the factorial design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub n: usize,
    pub p: usize,
    pub log5_rm: i32,
    pub variant: Variant,
}

impl Condition {
    pub fn label(&self) -> String {
        format!("{}_n{}_p{}_rm{:+}", self.variant.label(), self.n, self.p, self.log5_rm)
    }

    pub fn r_m(&self) -> f64 {
        5f64.powi(self.log5_rm)
    }

    pub fn params(&self, cfg: &SweepConfig) -> Result<ProcessParams> {
        Ok(
            ProcessParams::with_persons_per_focus(self.n, self.p as f64, cfg.r_f, cfg.r_l, self.r_m(), self.variant)?
                .with_kernel(cfg.kernel),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let p = SweepConfig::preset(Preset::Paper);
        assert_eq!(p.conditions().len(), 2 * 4 * 3 * 9);
        assert_eq!((p.replicates, p.uman_draws, p.r_f, p.r_l, p.t_end), (500, 5000, 1.0, 5.0, 100.0));
        let d = SweepConfig::preset(Preset::Desk);
        assert_eq!(d.conditions().len(), 2 * 2 * 2 * 4);
        d.validate().unwrap();
        p.validate().unwrap();
    }

    #[test]
    fn empty_override_is_the_preset() {
        assert_eq!(SweepConfig::from_toml_str("", Preset::Paper).unwrap(), SweepConfig::default());
        assert_eq!(
            SweepConfig::from_toml_str("# nothing\n", Preset::Desk).unwrap(),
            SweepConfig::preset(Preset::Desk)
        );
    }

    #[test]
    fn overrides_apply() {
        let c = SweepConfig::from_toml_str(
            "n_list = [60]\nvariants = [\"cfpr\"]\nengine = \"gillespie\"\nmaster_seed = 9\nkernel = \"any_focus\"\n",
            Preset::Desk,
        )
        .unwrap();
        assert_eq!(c.n_list, vec![60]);
        assert_eq!(c.variants, vec![Variant::Cfpr]);
        assert_eq!(c.engine, Engine::Gillespie);
        assert_eq!(c.kernel, MigrationKernel::AnyFocus);
        assert_eq!(c.master_seed, 9);
        assert_eq!(c.replicates, 100);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "n_list = []",
            "replicates = 1",
            "uman_draws = 1",
            "n_list = [2]",
            "p_list = [0]",
            "t_end = -1.0",
            "r_l = 0.0",
            "bogus = 3",
            "variants = [\"undirected\"]",
            "n_list = [",
        ] {
            assert!(
                matches!(SweepConfig::from_toml_str(text, Preset::Desk), Err(Error::Config(_)) | Err(Error::InvalidParameter(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let c = SweepConfig::preset(Preset::Desk);
        let text = c.to_toml_string().unwrap();
        assert_eq!(SweepConfig::from_toml_str(&text, Preset::Paper).unwrap(), c);
    }

    #[test]
    fn condition_labels() {
        let c = Condition { n: 50, p: 5, log5_rm: -2, variant: Variant::Cfpr };
        assert_eq!(c.label(), "cfpr_n50_p5_rm-2");
        assert_eq!(c.r_m(), 0.04);
        let c = Condition { n: 50, p: 5, log5_rm: 4, variant: Variant::CfpDirected };
        assert_eq!(c.r_m(), 625.0);
        let params = c.params(&SweepConfig::default()).unwrap();
        assert_eq!(params.m, 10);
    }
}
