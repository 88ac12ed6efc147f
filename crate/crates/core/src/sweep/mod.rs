//! Factorial sweeps over (N, P, r_m, variant) and their figure tables.

mod config;
mod figures;
mod runner;

pub use config::{Condition, Engine, Preset, SweepConfig};
pub use figures::{emit_figure_data, Figure, MeanDegRow, RecipRow, TriadRow};
pub use runner::{
    condition_csv, reference_reciprocity, run_condition, run_replicate, run_sweep, uman_comparison, Aggregates,
    ConditionResult, Failure, Manifest, References, ReplicateRow, SweepOutcome, UmanComparison, MANIFEST, SUMMARY,
};
