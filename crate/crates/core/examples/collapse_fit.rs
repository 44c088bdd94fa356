//! Power-law fit and data-collapse estimation on synthetic curves with known
//! exponents.
//!
//! cargo run --release --example collapse_fit

use mixstab::analysis::{estimate_collapse, fit_power_law, CollapseOptions, Series};
use mixstab::analytics::{analytic_collapse_master, boundary_mi_model};

fn main() {
    let pts: Vec<(f64, f64)> = [0.02, 0.03, 0.045, 0.07, 0.1, 0.15]
        .into_iter()
        .map(|q| (q, boundary_mi_model(q, 1.0)))
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    println!("boundary model: I = {:.3} q^{:.4} (+- {:.4})", fit.a, fit.b, fit.b_err());

    for gamma in [0.5, 2.0 / 3.0, 1.0] {
        let curves: Vec<Series> = [0.01, 0.02, 0.04, 0.08]
            .into_iter()
            .map(|q| Series::from_fn(q, (0..400).map(f64::from), |t| analytic_collapse_master(t * q.powf(gamma))))
            .collect();
        let est = estimate_collapse(&curves, &CollapseOptions::default()).unwrap();
        let worst = est.cost_curve.iter().map(|c| c.1).fold(0.0, f64::max);
        println!(
            "planted gamma {gamma:.3}: gamma* = {:.2}, cost at optimum {:.1e} (worst on grid {worst:.1e})",
            est.gamma_star,
            est.cost_at(est.gamma_star).unwrap()
        );
    }
}
