//! One trajectory of the noisy hybrid circuit: steady state, encoding of the
//! reference qubit, then the decay of I(AB:R).
//!
//! cargo run --release --example single_trajectory

use mixstab::{run_trajectory, ExperimentConfig, NoiseChannel, NoiseKind};

fn main() {
    let mut c = ExperimentConfig::new(64, 0.2, 0.005, NoiseKind::Iid, NoiseChannel::Reset, 80);
    c.steady_window = 4;
    c.record_every = 5;
    let r = run_trajectory(&c, 0).unwrap();
    println!("config hash {}", &r.config_hash[..16]);
    println!("{:>4} {:>7} {:>6} {:>4} {:>4} {:>5} {:>4}", "t", "I_AB_R", "I_A_B", "S_A", "S_B", "S_AB", "S_R");
    for s in &r.samples {
        println!(
            "{:>4} {:>7} {:>6} {:>4} {:>4} {:>5} {:>4}",
            s.t, s.i_ab_r, s.i_a_b, s.s_a, s.s_b, s.s_ab, s.s_r
        );
    }
}
