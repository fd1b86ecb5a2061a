//! Versioned JSON run reports. Every number in `counters` comes from a
//! module counter, never recomputed here; `bounds` names each inequality a
//! run instruments and whether it held.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// The inequality in plain terms, with the numbers substituted.
    pub bound: String,
    pub holds: bool,
}

#[derive(Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub palette_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proper: Option<bool>,
    /// Exact degeneracy, only when the model computes it offline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_exact: Option<usize>,
    pub counters: serde_json::Value,
    pub bounds: Vec<BoundCheck>,
    /// "conforming" / "nonconforming" when the model has a resource cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub wall_ms: u128,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, n: usize) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            model: None,
            seed,
            parameters: serde_json::Value::Null,
            n,
            edge_count: None,
            palette_size: None,
            proper: None,
            kappa_exact: None,
            counters: serde_json::Value::Null,
            bounds: Vec::new(),
            verdict: None,
            wall_ms: 0,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Exit statuses promised by the interface: proper and within resource
/// bounds, proper but out of bounds, failed or improper, usage error.
pub const EXIT_PROPER: i32 = 0;
pub const EXIT_NONCONFORMING: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// Argument-validation failure distinct from runtime failure, so main can
/// map it to the usage exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}
