//! Closed-form predictions: I(AB:R)(t, q), its collapse onto the master
//! curve, and the entropy and boundary mutual-information models.
//!
//! cargo run --example analytic_predictions

use mixstab::analytics::{analytic_collapse_master, analytic_iabr, boundary_mi_model, free_energy_model};

fn main() {
    println!("I(AB:R) at fixed t0 = t q^(1/2) = 1 approaches the master value {:.4}:", analytic_collapse_master(1.0));
    for q in [1e-2f64, 1e-3, 1e-4] {
        let t = (1.0 / q.sqrt()).round() as u64;
        println!("  q = {q:.0e}: t = {t:>3}, I = {:.4}", analytic_iabr(t, q));
    }
    println!("mean S of 128 sites, s0 = 0.3, s1 = 0.5:");
    for q in [0.01, 0.02, 0.05, 0.1] {
        println!("  q = {q:<5} S = {:.3}", free_energy_model(128.0, q, 0.3, 0.5));
    }
    println!("boundary I(A:B), s1 = 1:");
    for q in [0.01, 0.03, 0.1] {
        println!("  q = {q:<5} I = {:.4}", boundary_mi_model(q, 1.0));
    }
}
