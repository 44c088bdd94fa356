//! A small sweep through the harness: run, resume, analyze and plot into a
//! directory (default `target/example_sweep`).
//!
//! cargo run --release --example sweep_and_report [out_dir]

use std::path::PathBuf;

use mixstab::harness::{cmd_analyze, run_sweep, Mode, Report, SweepSpec};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example_sweep"));
    let spec = SweepSpec::from_json(
        r#"{
            "base": {"L": 32, "p_m": 0.2, "q": 0.02, "noise_kind": "iid", "noise_channel": "reset",
                     "t_max": 120, "master_seed": 5},
            "axes": {"q": [0.01, 0.02, 0.04, 0.08]},
            "trajectories": 100
        }"#,
    )
    .unwrap();
    let first = run_sweep(&spec, &dir, None).unwrap();
    let second = run_sweep(&spec, &dir, None).unwrap();
    println!("first run computed {}, rerun skipped {}", first.computed, second.skipped);
    match cmd_analyze(&dir, Mode::Collapse, true).unwrap() {
        Report::Collapse(c) => println!(
            "collapse of I(AB:R): gamma* = {:.2} +- {:.2}; report and SVGs in {}",
            c.estimate.gamma_star,
            c.estimate.gamma_err,
            dir.display()
        ),
        _ => unreachable!(),
    }
}
