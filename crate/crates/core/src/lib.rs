//! Simulation and exact equilibrium analytics for the contact formation
//! process with reciprocity (CFPR).
//!
//! The CFPR is a continuous-time Markov process on pairs (digraph, focus
//! assignment). Vertices migrate among `M` foci; a directed tie `(i, j)` can
//! form when `i` and `j` share a focus or when it would reciprocate an
//! existing `(j, i)` tie, and every tie dissolves at a constant hazard. In the
//! fast-migration regime the equilibrium graph is dyad-independent and has an
//! exponential-family representation with a sparse reference measure.
//!
//! Crate layout:
//!
//! * [`graph`]: digraphs, dyad and triad censuses, edge-list I/O.
//! * [`process`]: the two exact simulation engines and co-residence sampling.
//! * [`analytics`]: closed-form equilibrium quantities and the dyad-chain oracle.
//! * [`ergm`]: reference-model parameterizations and exact samplers.
//! * [`stats`]: Hotelling's T², confidence intervals, power-law fits.
//! * [`sweep`]: the factorial timescale-separation study and figure tables.

pub mod analytics;
pub mod ergm;
mod error;
pub mod exec;
pub mod graph;
pub mod process;
pub mod rng;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use graph::{DiGraph, DyadCensus, TriadCensus};
pub use process::{MigrationKernel, ProcessParams, SystemState, Variant};
