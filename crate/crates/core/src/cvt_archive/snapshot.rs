use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One occupied cell as written to `archive_*.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotRecord {
    pub cell_index: usize,
    pub centroid: Vec<f64>,
    pub fitness: f64,
    pub descriptor: Vec<f64>,
    pub genotype: Vec<f64>,
}

/// Parses a JSON-lines archive snapshot. Blank lines are skipped.
pub fn read_snapshot(text: &str) -> Result<Vec<SnapshotRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse(format!("snapshot line {}: {e}", i + 1)))
        })
        .collect()
}
