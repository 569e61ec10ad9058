//! Variation-aware sizing of parameterized designs across PVT corners.
//!
//! A sizing task asks for one parameter vector (transistor widths, a
//! compensation capacitor, ...) that satisfies every performance constraint
//! on every process/voltage/temperature corner of a corner set. This crate
//! treats each corner as a task and trains a single-step multi-task
//! deterministic-policy agent on a small, automatically pruned subset of
//! corners, re-pruning whenever the subset is solved but the full set is not.
//!
//! The pieces compose bottom-up:
//!
//! - [`nn`]: dense MLPs with manual backprop, flat gradients, Adam.
//! - [`env`]: corners, design spaces, constraint rewards, and two closed-form
//!   surrogate benchmarks (a two-stage OTA and a synthetic family).
//! - [`agent`]: per-task replay, stratified batches, PCGrad gradient surgery,
//!   actor/critic updates.
//! - [`pruner`]: k-means over standardized per-corner metrics, silhouette
//!   model selection, worst-corner representatives.
//! - [`orchestrator`]: the outer train/check/re-prune loop, tracing,
//!   checkpoints.
//! - [`baselines`]: evolution strategy and single-task DDPG references.
//! - [`cli`]: config files, experiment commands, reports.
//!
//! ```
//! use robustanalog::env::ota2_benchmark;
//!
//! let bench = ota2_benchmark().unwrap();
//! assert_eq!(bench.corners.len(), 30);
//! assert_eq!(bench.space.dimension(), 7);
//! ```

pub mod agent;
pub mod baselines;
pub mod cli;
pub mod env;
pub mod nn;
pub mod orchestrator;
pub mod pruner;

mod error;
pub(crate) mod kv;
pub mod seeding;

pub use error::{Error, Result};
