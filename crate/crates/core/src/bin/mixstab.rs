use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixstab::harness::{self, Mode, OracleCheckConfig};

#[derive(Parser)]
#[command(name = "mixstab", version, about = "Noisy hybrid Clifford circuit sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) a sweep described by a JSON spec.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; all cores by default.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the spec's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Analyze a completed store into report_<mode>.json.
    Analyze {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        no_svg: bool,
    },
    /// Compare the stabilizer engine against the dense oracle.
    OracleCheck {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render SVGs for a store's report.
    Plot {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        mode: Mode,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        Command::Run { spec, out, workers, seed } => {
            let (dir, s) = harness::cmd_run(&spec, out.as_deref(), workers, seed)?;
            println!("{}: {} points computed, {} already complete", dir.display(), s.computed, s.skipped);
        }
        Command::Analyze { out, mode, no_svg } => {
            let report = harness::cmd_analyze(&out, mode, !no_svg)?;
            println!("{}", serde_json::to_string_pretty(&summary(&report))?);
        }
        Command::OracleCheck { n, steps, seeds, seed } => {
            let mut config = OracleCheckConfig::new(n, steps, seeds);
            config.master_seed = seed;
            let r = harness::run_oracle_check(&config)?;
            println!(
                "{} n={} steps={} seeds={} max_deviation={:e} entropy_checks={} probability_checks={}",
                if r.passed() { "PASS" } else { "FAIL" },
                r.n,
                r.steps,
                r.seeds,
                r.max_deviation,
                r.entropy_checks,
                r.probability_checks
            );
            if let Some(f) = &r.failure {
                println!("first failure: seed {} step {}: {}", f.seed, f.step, f.detail);
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Plot { out, mode } => {
            for p in harness::cmd_plot(&out, mode)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// The headline numbers of a report, without the curve data.
fn summary(report: &harness::Report) -> serde_json::Value {
    use harness::Report::*;
    match report {
        PowerLaw(p) => serde_json::json!({"mode": "power_law", "a": p.fit.a, "b": p.fit.b, "b_err": p.b_err}),
        Collapse(c) => serde_json::json!({
            "mode": "collapse", "gamma_star": c.estimate.gamma_star, "gamma_err": c.estimate.gamma_err
        }),
        Crossover(x) => serde_json::json!({"mode": "crossover", "control": x.control_name, "rows": x.rows}),
    }
}
