//! Run manifests and failure diagnostics.
//!
//! The manifest holds the only non-reproducible fields of a run (wall time,
//! thread count); every other artifact depends on config and seed alone.

use std::path::Path;
use std::time::Duration;

use serde_json::{json, Value};

use crate::error::{LabError, Result};
use crate::io::{write_json, SCHEMA_VERSION};

#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub artifacts: Vec<String>,
    pub wall_time: Duration,
}

impl Manifest {
    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "tool": "spdelab",
            "versions": {
                "spdelab": env!("CARGO_PKG_VERSION"),
            },
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "threads": self.threads,
            "artifacts": self.artifacts,
            "wall_time_s": self.wall_time.as_secs_f64(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("manifest.json"), &self.to_json())
    }
}

pub fn diagnostic(command: &str, err: &LabError) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "kind": err.kind(),
        "exit_code": err.exit_code(),
        "message": err.to_string(),
    })
}
