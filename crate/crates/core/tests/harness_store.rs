//! Sweep runner, result store, resume and report generation.

use std::fs;
use std::path::Path;

use mixstab::circuit::Sample;
use mixstab::harness::report::{analyze, Mode, Report};
use mixstab::harness::store::{read_manifest, write_store, MANIFEST};
use mixstab::harness::{cmd_analyze, load_store, run_sweep, PointData, SweepSpec};
use mixstab::{derive_stream, ExperimentConfig, HarnessError, NoiseChannel, NoiseKind, SeedSpec, TrajectoryRecord};
use rand::Rng;
use tempfile::tempdir;

fn small_spec() -> SweepSpec {
    SweepSpec::from_json(
        r#"{
            "base": {"L": 8, "p_m": 0.2, "q": 0.1, "noise_kind": "iid", "noise_channel": "reset",
                     "t_max": 5, "t_steady": 4, "master_seed": 11},
            "axes": {"q": [0.05, 0.1, 0.2]},
            "trajectories": 4
        }"#,
    )
    .unwrap()
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn sweep_writes_one_row_per_trajectory_and_time() {
    let dir = tempdir().unwrap();
    let summary = run_sweep(&small_spec(), dir.path(), Some(2)).unwrap();
    assert_eq!((summary.computed, summary.skipped), (3, 0));
    let points = load_store(dir.path()).unwrap();
    assert_eq!(points.len(), 3);
    for p in &points {
        assert_eq!(p.records.len(), 4);
        for r in &p.records {
            let ts: Vec<i64> = r.samples.iter().map(|s| s.t).collect();
            assert_eq!(ts, (0..=5).collect::<Vec<_>>());
            assert_eq!(r.samples[0].i_ab_r, 2);
        }
    }
    for (_, bytes) in read_dir_bytes(dir.path()) {
        let lines = String::from_utf8(bytes).unwrap().lines().count();
        assert_eq!(lines, 1 + 4 * 6);
    }
    let m = read_manifest(dir.path()).unwrap().unwrap();
    assert_eq!(m.master_seed, 11);
    assert!(m.points.iter().all(|e| e.completed && e.csv_sha256.len() == 64));
}

#[test]
fn rerun_skips_completed_points_and_keeps_bytes() {
    let dir = tempdir().unwrap();
    run_sweep(&small_spec(), dir.path(), Some(1)).unwrap();
    let before = read_dir_bytes(dir.path());
    let again = run_sweep(&small_spec(), dir.path(), Some(1)).unwrap();
    assert_eq!((again.computed, again.skipped), (0, 3));
    assert_eq!(read_dir_bytes(dir.path()), before);

    // Extending an axis only computes the new point.
    let mut bigger = small_spec();
    bigger.axes.q = Some(vec![0.05, 0.1, 0.2, 0.3]);
    let s = run_sweep(&bigger, dir.path(), Some(1)).unwrap();
    assert_eq!((s.computed, s.skipped), (1, 3));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let a = tempdir().unwrap();
    let b = tempdir().unwrap();
    run_sweep(&small_spec(), a.path(), Some(1)).unwrap();
    run_sweep(&small_spec(), b.path(), Some(3)).unwrap();
    assert_eq!(read_dir_bytes(a.path()), read_dir_bytes(b.path()));
}

#[test]
fn corrupted_store_is_reported() {
    let dir = tempdir().unwrap();
    run_sweep(&small_spec(), dir.path(), Some(1)).unwrap();
    let csv = dir.path().join("point_0001.csv");
    let mut text = fs::read_to_string(&csv).unwrap();
    text.push_str("0,6,2,0,0,0,0,0\n");
    fs::write(&csv, text).unwrap();
    assert!(matches!(
        run_sweep(&small_spec(), dir.path(), Some(1)),
        Err(HarnessError::Manifest { .. })
    ));

    fs::remove_file(&csv).unwrap();
    assert!(matches!(
        run_sweep(&small_spec(), dir.path(), Some(1)),
        Err(HarnessError::Manifest { .. })
    ));

    fs::write(dir.path().join(MANIFEST), "{ not json").unwrap();
    assert!(matches!(load_store(dir.path()), Err(HarnessError::Manifest { .. })));
    assert!(matches!(
        run_sweep(&small_spec(), dir.path(), Some(1)),
        Err(HarnessError::Manifest { .. })
    ));
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = small_spec();
    s.trajectories = 0;
    assert!(matches!(s.points(), Err(HarnessError::Spec(_))));
    let mut s = small_spec();
    s.axes.q = Some(vec![]);
    assert!(s.points().is_err());
    let mut s = small_spec();
    s.axes.t_corr = Some(vec![1.0]);
    s.axes.beta = Some(vec![0.5]);
    assert!(s.points().is_err());
    assert!(SweepSpec::from_json(r#"{"base": {}, "trajectories": 1}"#).is_err());
    let mut s = small_spec();
    s.base.l = 7;
    assert!(s.points().is_err());
}

/// Trajectories whose hits arrive as a Poisson process of intensity
/// `2 q t`, with `I(AB:R) = max(0, 2 - hits)`. The ensemble mean is
/// `(2 + t0^2) exp(-t0^2)` with `t0 = t q^(1/2)`.
fn poisson_hit_point(q: f64, trajectories: u64, t_max: i64, seed: u64) -> PointData {
    let mut config = ExperimentConfig::new(8, 0.0, q, NoiseKind::Iid, NoiseChannel::Reset, t_max as u64);
    config.trajectories = trajectories;
    let hash = config.hash();
    let mut rng = derive_stream(SeedSpec::new(seed, q.to_bits()));
    let records = (0..trajectories)
        .map(|stream_id| {
            let e1 = -(1.0 - rng.random::<f64>()).ln();
            let e2 = e1 - (1.0 - rng.random::<f64>()).ln();
            let (t1, t2) = ((e1 / q).sqrt(), (e2 / q).sqrt());
            let samples = (0..=t_max)
                .map(|t| {
                    let hits = (t as f64 >= t1) as i64 + (t as f64 >= t2) as i64;
                    Sample {
                        t,
                        i_ab_r: 2 - hits,
                        i_a_b: 0,
                        s_a: 0,
                        s_b: 0,
                        s_ab: 0,
                        s_r: 1,
                        i_p_r: None,
                    }
                })
                .collect();
            TrajectoryRecord {
                config_hash: hash.clone(),
                stream_id,
                samples,
            }
        })
        .collect();
    PointData {
        config,
        beta: None,
        records,
    }
}

#[test]
fn synthetic_poisson_store_collapses_at_one_half() {
    let dir = tempdir().unwrap();
    let points: Vec<PointData> = [0.01, 0.02, 0.04, 0.08]
        .into_iter()
        .map(|q| poisson_hit_point(q, 2000, 60, 5))
        .collect();
    write_store(dir.path(), &points).unwrap();
    let loaded = load_store(dir.path()).unwrap();
    assert_eq!(loaded, points);
    let Report::Collapse(c) = analyze(&loaded, Mode::Collapse).unwrap() else {
        panic!("collapse report expected")
    };
    assert!((c.estimate.gamma_star - 0.5).abs() <= 0.02, "{:?}", c.estimate.gamma_star);
    assert!(c.estimate.gamma_err > 0.0 && c.estimate.gamma_err < 0.05);
}

#[test]
fn crossover_needs_two_correlation_values() {
    let points: Vec<PointData> = [0.01, 0.02, 0.04]
        .into_iter()
        .map(|q| {
            let mut p = poisson_hit_point(q, 50, 40, 6);
            p.config.noise_kind = NoiseKind::Markov;
            p.config.t_corr = 16.0;
            p
        })
        .collect();
    assert!(matches!(analyze(&points, Mode::Crossover), Err(HarnessError::Mode { .. })));
    assert!(matches!(analyze(&points[..2], Mode::Collapse), Err(HarnessError::Mode { .. })));
}

#[test]
fn svg_output_does_not_change_reports() {
    let with = tempdir().unwrap();
    let without = tempdir().unwrap();
    let points: Vec<PointData> = [0.02, 0.04, 0.08].into_iter().map(|q| poisson_hit_point(q, 100, 40, 8)).collect();
    write_store(with.path(), &points).unwrap();
    write_store(without.path(), &points).unwrap();
    let a = cmd_analyze(with.path(), Mode::Collapse, true).unwrap();
    let b = cmd_analyze(without.path(), Mode::Collapse, false).unwrap();
    assert_eq!(a, b);
    let name = "report_collapse.json";
    assert_eq!(
        fs::read(with.path().join(name)).unwrap(),
        fs::read(without.path().join(name)).unwrap()
    );
    assert!(with.path().join("collapse_rescaled.svg").exists());
    assert!(!without.path().join("collapse_rescaled.svg").exists());
}

#[test]
fn shipped_specs_expand() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let spec = SweepSpec::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(!spec.points().unwrap().is_empty(), "{}", path.display());
        n += 1;
    }
    assert_eq!(n, 6);
}
