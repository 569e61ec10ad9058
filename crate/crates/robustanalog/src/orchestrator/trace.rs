//! Run traces: one JSON object per line, append-only.
//!
//! Traces are the audit trail for simulation accounting, so they carry no
//! wall-clock timestamps; two runs with the same seed and configuration
//! must produce byte-identical files, even when one of them was stopped at
//! a checkpoint and resumed in a fresh process.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const TRACE_SCHEMA: u32 = 1;

/// Simulation counts split by what bought them. The fields must add up to
/// the simulator's final counter; the acceptance suite checks exactly that.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSims {
    /// Episodes played with uniform random actions.
    pub warmup: u64,
    /// Episodes played by the (noisy) policy.
    pub rollout: u64,
    /// Periodic greedy evaluations on the training subset.
    pub subset_eval: u64,
    /// Greedy evaluations across the full corner set.
    pub full_check: u64,
}

impl PhaseSims {
    pub fn total(&self) -> u64 {
        self.warmup + self.rollout + self.subset_eval + self.full_check
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// One played action, simulated on every current training task.
    Episode {
        episode: u64,
        simulations: u64,
        task_count: usize,
        /// Worst banded reward across the tasks this episode touched.
        min_reward: f64,
    },
    /// Periodic greedy evaluation on the training subset.
    Eval {
        episode: u64,
        simulations: u64,
        min_reward: f64,
        passed: bool,
    },
    /// Greedy evaluation on the full corner set.
    FullCheck {
        episode: u64,
        simulations: u64,
        min_reward: f64,
        passed: bool,
        failing_corners: Vec<usize>,
    },
    /// Training task set replaced after a failed full check.
    Retask {
        episode: u64,
        simulations: u64,
        iteration: u32,
        tasks: Vec<usize>,
        clusters: usize,
        silhouette: Option<f64>,
    },
    /// Terminal record; exactly one per completed run.
    Summary {
        episodes: u64,
        simulations: u64,
        iterations: u32,
        solved: bool,
        phase_sims: PhaseSims,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub schema: u32,
    pub method: String,
    pub benchmark: String,
    pub seed: u64,
    #[serde(flatten)]
    pub event: TraceEvent,
}

impl TraceRecord {
    pub fn new(method: &str, benchmark: &str, seed: u64, event: TraceEvent) -> Self {
        TraceRecord {
            schema: TRACE_SCHEMA,
            method: method.to_string(),
            benchmark: benchmark.to_string(),
            seed,
            event,
        }
    }
}

pub fn write_trace_line(out: &mut impl Write, record: &TraceRecord) -> Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Parse a full trace back; rejects unknown schemas and malformed lines.
pub fn read_trace(input: &str) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord = serde_json::from_str(line)
            .map_err(|e| Error::config(format!("trace line {}: {e}", i + 1)))?;
        if record.schema != TRACE_SCHEMA {
            return Err(Error::config(format!(
                "trace line {}: schema {} not supported",
                i + 1,
                record.schema
            )));
        }
        records.push(record);
    }
    Ok(records)
}
