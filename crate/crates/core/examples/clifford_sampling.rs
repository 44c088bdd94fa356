//! Uniform two-qubit Clifford sampling: one gate's Pauli images, and a
//! frequency check of the sampler over the 11520 group elements.
//!
//! cargo run --release --example clifford_sampling

use mixstab::clifford::CLIFFORD2_ORDER;
use mixstab::{derive_stream, random_two_qubit_clifford, SeedSpec, TwoQubitClifford};

fn main() {
    let mut rng = derive_stream(SeedSpec::new(7, 0));
    let g = random_two_qubit_clifford(&mut rng);
    for (name, img) in ["X_a", "Z_a", "X_b", "Z_b"].iter().zip(g.images()) {
        println!("{name} -> {}", img.to_pauli_string());
    }
    println!("inverse undoes it: {}", g.then(&g.inverse()).is_identity());

    let index: std::collections::HashMap<TwoQubitClifford, usize> =
        (0..CLIFFORD2_ORDER).map(|i| (TwoQubitClifford::from_index(i), i)).collect();
    println!("distinct group elements: {}", index.len());
    let draws = 50 * CLIFFORD2_ORDER;
    let mut counts = vec![0u32; CLIFFORD2_ORDER];
    for _ in 0..draws {
        counts[index[&random_two_qubit_clifford(&mut rng)]] += 1;
    }
    let expected = draws as f64 / CLIFFORD2_ORDER as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    println!("chi^2 = {chi2:.0} over {} degrees of freedom", CLIFFORD2_ORDER - 1);
}
