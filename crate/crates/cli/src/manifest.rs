//! Run manifests written next to the outputs of each command.

use std::fs;
use std::path::{Path, PathBuf};

use actisim_core::library::Params;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const ESTIMATE_MANIFEST: &str = "manifest.json";
pub const EE_MANIFEST: &str = "ee_manifest.json";

/// Outcome of one application of an estimate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicationEntry {
    pub id: String,
    pub label: String,
    pub parameters: Params,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ApplicationResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicationResult {
    pub fft_size: usize,
    pub bandwidth_mhz: f64,
    pub clock_mhz: f64,
    pub t_sim_cycles: u64,
    pub simulated_time_s: f64,
    pub activity_weighted_mw: f64,
    pub cumulative_mw: f64,
    /// Paths relative to the manifest directory.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateManifest {
    pub command: String,
    pub scenario: String,
    pub scenario_name: String,
    pub library: String,
    pub out_dir: String,
    pub seed: u64,
    pub applications: Vec<ApplicationEntry>,
    /// Every file written by the run, relative to `out_dir`, sorted.
    pub files: Vec<String>,
    /// Wall-clock sidecar, relative to `out_dir` when it lives there.
    pub timings: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeManifest {
    pub command: String,
    pub estimate_manifest: String,
    pub params: String,
    pub pt_dbm: String,
    pub out_dir: String,
    pub seed: u64,
    pub n_samples: usize,
    pub applications: Vec<actisim_core::ee::EeApplication>,
    pub skipped: Vec<String>,
    pub files: Vec<String>,
    pub timings: String,
}

/// Per-phase wall-clock times, kept out of the manifest so the manifest
/// itself is reproducible byte for byte.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub total_s: f64,
    pub phases: Vec<PhaseTiming>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseTiming {
    pub application: String,
    pub phase: String,
    pub seconds: f64,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Directory holding a manifest, used to resolve its relative file entries.
pub fn manifest_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
