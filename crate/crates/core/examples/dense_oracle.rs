//! Cross-checks the stabilizer engine against the dense density-matrix
//! oracle on a short recorded circuit, then runs the seeded batch check.
//!
//! cargo run --release --example dense_oracle

use mixstab::circuit::{Cadence, DynamicsParams, HybridDynamics, NoiseChannel};
use mixstab::harness::oracle_check::{run_oracle_check, OracleCheckConfig};
use mixstab::{derive_stream, DenseState, MixedStabilizerState, NoiseKind, NoiseSchedule, Region, SeedSpec};

fn main() {
    let n = 5;
    let mut rng = derive_stream(SeedSpec::new(11, 0));
    let params = DynamicsParams {
        l: n,
        p_m: 0.3,
        channel: NoiseChannel::Dephase,
        cadence: Cadence::PerPeriod,
    };
    let mut dynamics = HybridDynamics::new(params, NoiseSchedule::new(NoiseKind::Iid, 0.2, 0.0, n).unwrap());
    let mut stab = MixedStabilizerState::new_product_state(n).unwrap();
    let mut dense = DenseState::new_product(n).unwrap();
    for period in 1..=4 {
        let mut ops = Vec::new();
        dynamics.period(&mut stab, &mut rng, Some(&mut ops)).unwrap();
        for op in &ops {
            dense.apply(op).unwrap();
        }
        let cuts: Vec<String> = (1..=n)
            .map(|c| {
                let r = Region::range(0..c);
                format!("{}/{:.3}", stab.entropy(&r), dense.von_neumann_entropy(&r).max(0.0))
            })
            .collect();
        println!("period {period}: {} ops, S[0,c) stabilizer/dense: {}", ops.len(), cuts.join(" "));
    }

    let report = run_oracle_check(&OracleCheckConfig::new(4, 20, 50)).unwrap();
    println!(
        "batch check n=4: {} entropy and {} probability checks, max deviation {:.1e}, passed {}",
        report.entropy_checks,
        report.probability_checks,
        report.max_deviation,
        report.passed()
    );
}
