//! On-disk results: one CSV per sweep point plus `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{run_ensemble, ExperimentConfig, Sample, TrajectoryRecord};
use crate::error::HarnessError;
use crate::harness::sweep::{SweepPoint, SweepSpec};

pub const MANIFEST: &str = "manifest.json";
pub const SOFTWARE_VERSION: &str = env!("CARGO_PKG_VERSION");

const COLUMNS: [&str; 8] = ["stream_id", "t", "I_AB_R", "I_A_B", "S_A", "S_B", "S_AB", "S_R"];
const PROBE_COLUMN: &str = "I_P_R";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub file: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    #[serde(default)]
    pub beta: Option<f64>,
    pub completed: bool,
    pub csv_sha256: String,
    pub wall_clock_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software_version: String,
    pub master_seed: u64,
    pub points: Vec<ManifestEntry>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub computed: usize,
    pub skipped: usize,
}

/// A completed point read back from a store.
#[derive(Clone, Debug, PartialEq)]
pub struct PointData {
    pub config: ExperimentConfig,
    pub beta: Option<f64>,
    pub records: Vec<TrajectoryRecord>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::io(path, e)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn read_manifest(dir: &Path) -> Result<Option<Manifest>, HarnessError> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map(Some).map_err(|e| HarnessError::Manifest {
        path,
        reason: e.to_string(),
    })
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), HarnessError> {
    let bytes = serde_json::to_vec_pretty(manifest)?;
    write_atomic(&dir.join(MANIFEST), &bytes)
}

/// CSV bytes for one point, rows ordered by `(stream_id, t)`.
pub fn encode_csv(records: &[TrajectoryRecord], probe: bool) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Csv {
        path: PathBuf::from("<memory>"),
        reason: e.to_string(),
    };
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if probe {
        header.push(PROBE_COLUMN);
    }
    w.write_record(&header).map_err(csv_err)?;
    let mut sorted: Vec<&TrajectoryRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.stream_id);
    for r in sorted {
        for s in &r.samples {
            let mut row = vec![
                r.stream_id.to_string(),
                s.t.to_string(),
                s.i_ab_r.to_string(),
                s.i_a_b.to_string(),
                s.s_a.to_string(),
                s.s_b.to_string(),
                s.s_ab.to_string(),
                s.s_r.to_string(),
            ];
            if probe {
                row.push(s.i_p_r.unwrap_or(0).to_string());
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(|e| HarnessError::Csv {
        path: PathBuf::from("<memory>"),
        reason: e.to_string(),
    })
}

pub fn read_csv(path: &Path, config_hash: &str) -> Result<Vec<TrajectoryRecord>, HarnessError> {
    let bad = |reason: String| HarnessError::Csv {
        path: path.to_path_buf(),
        reason,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    let probe = match header.len() {
        8 => false,
        9 if header[8] == PROBE_COLUMN => true,
        _ => return Err(bad(format!("unexpected header {header:?}"))),
    };
    if header[..8] != COLUMNS {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut records: Vec<TrajectoryRecord> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let v: Vec<i64> = row
            .iter()
            .map(|f| f.parse::<i64>().map_err(|e| bad(format!("field {f:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let stream_id = u64::try_from(v[0]).map_err(|e| bad(e.to_string()))?;
        let sample = Sample {
            t: v[1],
            i_ab_r: v[2],
            i_a_b: v[3],
            s_a: v[4],
            s_b: v[5],
            s_ab: v[6],
            s_r: v[7],
            i_p_r: probe.then(|| v[8]),
        };
        match records.last_mut() {
            Some(r) if r.stream_id == stream_id => r.samples.push(sample),
            _ => records.push(TrajectoryRecord {
                config_hash: config_hash.to_string(),
                stream_id,
                samples: vec![sample],
            }),
        }
    }
    Ok(records)
}

fn point_file(index: usize) -> String {
    format!("point_{index:04}.csv")
}

fn already_done(dir: &Path, old: Option<&Manifest>, point: &SweepPoint) -> Result<Option<ManifestEntry>, HarnessError> {
    let hash = point.config.hash();
    let Some(entry) = old
        .into_iter()
        .flat_map(|m| m.points.iter())
        .find(|e| e.completed && e.config_hash == hash)
    else {
        return Ok(None);
    };
    let path = dir.join(&entry.file);
    let bytes = fs::read(&path).map_err(|_| HarnessError::Manifest {
        path: dir.join(MANIFEST),
        reason: format!("completed point file {} is missing", entry.file),
    })?;
    if sha256_hex(&bytes) != entry.csv_sha256 {
        return Err(HarnessError::Manifest {
            path: dir.join(MANIFEST),
            reason: format!("checksum mismatch for {}", entry.file),
        });
    }
    if entry.config.hash() != entry.config_hash {
        return Err(HarnessError::Manifest {
            path: dir.join(MANIFEST),
            reason: format!("config hash mismatch for {}", entry.file),
        });
    }
    Ok(Some(entry.clone()))
}

/// Runs every point not already completed in `dir`. Trajectories of a point
/// run on a pool of `workers` threads (all cores when `None`).
pub fn run_sweep(spec: &SweepSpec, dir: &Path, workers: Option<usize>) -> Result<RunSummary, HarnessError> {
    let points = spec.points()?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let old = read_manifest(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Spec(format!("worker pool: {e}")))?;
    let mut manifest = Manifest {
        software_version: SOFTWARE_VERSION.to_string(),
        master_seed: spec.base.master_seed,
        points: Vec::with_capacity(points.len()),
    };
    let mut summary = RunSummary::default();
    for point in &points {
        let file = point_file(point.index);
        if let Some(mut entry) = already_done(dir, old.as_ref(), point)? {
            if entry.file != file {
                fs::rename(dir.join(&entry.file), dir.join(&file)).map_err(io_err(dir))?;
                entry.file = file;
            }
            entry.index = point.index;
            manifest.points.push(entry);
            summary.skipped += 1;
            continue;
        }
        let start = Instant::now();
        let records = pool.install(|| run_ensemble(&point.config))?;
        let bytes = encode_csv(&records, point.config.probe.is_some())?;
        write_atomic(&dir.join(&file), &bytes)?;
        manifest.points.push(ManifestEntry {
            index: point.index,
            file,
            config_hash: point.config.hash(),
            config: point.config.clone(),
            beta: point.beta,
            completed: true,
            csv_sha256: sha256_hex(&bytes),
            wall_clock_secs: start.elapsed().as_secs_f64(),
        });
        summary.computed += 1;
        write_manifest(dir, &manifest)?;
    }
    write_manifest(dir, &manifest)?;
    Ok(summary)
}

/// Reads every completed point of a store.
pub fn load_store(dir: &Path) -> Result<Vec<PointData>, HarnessError> {
    let manifest = read_manifest(dir)?.ok_or_else(|| HarnessError::Manifest {
        path: dir.join(MANIFEST),
        reason: "no manifest; run the sweep first".into(),
    })?;
    manifest
        .points
        .iter()
        .filter(|e| e.completed)
        .map(|e| {
            Ok(PointData {
                config: e.config.clone(),
                beta: e.beta,
                records: read_csv(&dir.join(&e.file), &e.config_hash)?,
            })
        })
        .collect()
}

/// Writes a store from already-computed records, for synthetic data and
/// tests of the analysis path.
pub fn write_store(dir: &Path, points: &[PointData]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut manifest = Manifest {
        software_version: SOFTWARE_VERSION.to_string(),
        master_seed: points.first().map_or(0, |p| p.config.master_seed),
        points: Vec::new(),
    };
    for (index, p) in points.iter().enumerate() {
        let file = point_file(index);
        let bytes = encode_csv(&p.records, p.config.probe.is_some())?;
        write_atomic(&dir.join(&file), &bytes)?;
        manifest.points.push(ManifestEntry {
            index,
            file,
            config_hash: p.config.hash(),
            config: p.config.clone(),
            beta: p.beta,
            completed: true,
            csv_sha256: sha256_hex(&bytes),
            wall_clock_secs: 0.0,
        });
    }
    write_manifest(dir, &manifest)
}
