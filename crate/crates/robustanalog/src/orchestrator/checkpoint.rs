//! Mid-run snapshots.
//!
//! A checkpoint is one JSON document holding the whole orchestrator:
//! benchmark, agent networks and optimizer moments, replay buffers, phase
//! accounting, and the exact position of every random stream. Loading one
//! therefore needs no other input, and a resumed run continues the trace
//! byte for byte where the original left off.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::orchestrator::Orchestrator;
use crate::{Error, Result};

pub const CHECKPOINT_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema: u32,
    pub orchestrator: Orchestrator,
}

/// Write via a sibling temp file and rename, so a crash mid-write cannot
/// leave a truncated checkpoint under the real name.
pub fn save_checkpoint(path: &Path, orchestrator: &Orchestrator) -> Result<()> {
    let checkpoint = Checkpoint {
        schema: CHECKPOINT_SCHEMA,
        orchestrator: orchestrator.clone(),
    };
    let json = serde_json::to_string(&checkpoint)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, json)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Load and validate a checkpoint. `expected_benchmark` guards against
/// resuming a run under a different benchmark definition.
pub fn load_checkpoint(path: &Path, expected_benchmark: Option<&str>) -> Result<Orchestrator> {
    let text = fs::read_to_string(path)?;
    let checkpoint: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Checkpoint {
        message: format!("{}: {e}", path.display()),
    })?;
    if checkpoint.schema != CHECKPOINT_SCHEMA {
        return Err(Error::Checkpoint {
            message: format!(
                "schema {} not supported (expected {CHECKPOINT_SCHEMA})",
                checkpoint.schema
            ),
        });
    }
    if let Some(expected) = expected_benchmark {
        let found = &checkpoint.orchestrator.benchmark().id;
        if found != expected {
            return Err(Error::Checkpoint {
                message: format!("benchmark '{found}' does not match expected '{expected}'"),
            });
        }
    }
    Ok(checkpoint.orchestrator)
}
