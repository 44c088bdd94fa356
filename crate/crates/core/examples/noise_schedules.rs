//! The three noise schedules and the lagged covariance of the markov one.
//!
//! cargo run --release --example noise_schedules

use mixstab::noise::correlation_check;
use mixstab::{derive_stream, NoiseKind, NoiseSchedule, SeedSpec};

fn main() {
    let mut rng = derive_stream(SeedSpec::new(3, 0));
    for (kind, t_corr) in [(NoiseKind::Iid, 0.0), (NoiseKind::Stripe, 0.0), (NoiseKind::Markov, 8.0)] {
        let mut s = NoiseSchedule::new(kind, 0.2, t_corr, 40).unwrap();
        println!("{kind:?}:");
        for t in 0..6 {
            let hit = s.sample_step(t, &mut rng).unwrap();
            let row: String = (0..40).map(|i| if hit.contains(&i) { '#' } else { '.' }).collect();
            println!("  t={t} {row}");
        }
    }

    let mut m = NoiseSchedule::new(NoiseKind::Markov, 0.05, 16.0, 1000).unwrap();
    println!("markov q = 0.05, t_corr = 16, 1000 sites x 1000 steps");
    println!("{:>4} {:>10} {:>10} {:>9}", "lag", "empirical", "target", "stderr");
    for r in correlation_check(&mut m, 1000, 32, &mut rng).unwrap().iter().step_by(4) {
        println!("{:>4} {:>10.5} {:>10.5} {:>9.5}", r.lag, r.empirical, r.target, r.stderr);
    }
}
