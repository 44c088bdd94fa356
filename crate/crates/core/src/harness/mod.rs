//! Sweeps, result stores, analysis reports and plots.

pub mod oracle_check;
pub mod report;
pub mod store;
pub mod svg;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::HarnessError;

pub use oracle_check::{run_oracle_check, OracleCheckConfig, OracleCheckReport};
pub use report::{analyze, Mode, Report};
pub use store::{load_store, run_sweep, PointData, RunSummary};
pub use sweep::{SweepPoint, SweepSpec};

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Reads a spec file, applies overrides and runs it. The output directory is
/// `out`, else the spec's `out`.
pub fn cmd_run(spec_path: &Path, out: Option<&Path>, workers: Option<usize>, seed: Option<u64>) -> Result<(PathBuf, RunSummary), HarnessError> {
    let text = fs::read_to_string(spec_path).map_err(|e| HarnessError::io(spec_path, e))?;
    let mut spec = SweepSpec::from_json(&text)?;
    if let Some(seed) = seed {
        spec.base.master_seed = seed;
    }
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| spec.out.clone())
        .ok_or_else(|| HarnessError::Spec("no output directory: pass --out or set \"out\"".into()))?;
    let summary = run_sweep(&spec, &dir, workers)?;
    Ok((dir, summary))
}

pub fn write_svgs(dir: &Path, report: &Report) -> Result<Vec<PathBuf>, HarnessError> {
    svg::report_svgs(report)
        .into_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

pub fn report_path(dir: &Path, mode: Mode) -> PathBuf {
    dir.join(format!("report_{}.json", mode.name()))
}

/// Analyzes a store and writes `report_<mode>.json`, plus SVGs unless
/// `svg` is false.
pub fn cmd_analyze(dir: &Path, mode: Mode, svg: bool) -> Result<Report, HarnessError> {
    let points = load_store(dir)?;
    let report = analyze(&points, mode)?;
    let path = report_path(dir, mode);
    let text = serde_json::to_string_pretty(&report)?;
    fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;
    if svg {
        write_svgs(dir, &report)?;
    }
    Ok(report)
}

/// Renders SVGs from an existing report, running the analysis if the
/// report is missing.
pub fn cmd_plot(dir: &Path, mode: Mode) -> Result<Vec<PathBuf>, HarnessError> {
    let path = report_path(dir, mode);
    let report: Report = if path.exists() {
        let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        serde_json::from_str(&text)?
    } else {
        analyze(&load_store(dir)?, mode)?
    };
    write_svgs(dir, &report)
}
