//! Closed-form large-d predictions used as comparison curves and as exact
//! inputs for synthetic tests of the analysis code.

use serde::{Deserialize, Serialize};

/// Gamma(1/3).
pub const GAMMA_1_3: f64 = 2.678_938_534_707_747_6;
/// Gamma(4/3).
pub const GAMMA_4_3: f64 = 0.892_979_511_569_249_2;
/// zeta(2/3), by analytic continuation.
pub const ZETA_2_3: f64 = -2.447_580_736_233_658_2;
/// zeta(-1/3), by analytic continuation.
pub const ZETA_M1_3: f64 = -0.277_343_047_840_129_5;

/// Mutual information between system and reference after `t` steps of
/// uncorrelated noise: the light cone of area `t(t+1)` survives with zero or
/// one hit.
pub fn analytic_iabr(t: u64, q: f64) -> f64 {
    let area = (t as f64) * (t as f64 + 1.0);
    let survive = 1.0 - q;
    2.0 * survive.powf(area) + area * q * survive.powf(area - 1.0)
}

/// Scaling limit of [`analytic_iabr`] at `t0 = t q^{1/2}`.
pub fn analytic_collapse_master(t0: f64) -> f64 {
    let s = t0 * t0;
    (2.0 + s) * (-s).exp()
}

/// Mean free energy (entanglement entropy) of a region of `l_sub` sites.
pub fn free_energy_model(l_sub: f64, q: f64, s0: f64, s1: f64) -> f64 {
    s0 * l_sub + s1 * l_sub * (q.powf(2.0 / 3.0) * GAMMA_1_3 + q * ZETA_2_3)
}

/// Boundary contribution to the mutual information between two halves.
pub fn boundary_mi_model(q: f64, s1: f64) -> f64 {
    0.5 * s1 * (GAMMA_4_3 * q.powf(-1.0 / 3.0) + GAMMA_4_3 / 3.0 * q.powf(2.0 / 3.0) + ZETA_M1_3 * q)
}

/// A curve after rescaling time to `t0 = t * scale^gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseCurve {
    pub gamma: f64,
    pub scale: f64,
    pub points: Vec<(f64, f64)>,
}

impl CollapseCurve {
    pub fn rescale(gamma: f64, scale: f64, series: &[(f64, f64)]) -> Self {
        let f = scale.powf(gamma);
        Self {
            gamma,
            scale,
            points: series.iter().map(|&(t, v)| (t * f, v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iabr_values() {
        assert_eq!(analytic_iabr(0, 0.3), 2.0);
        assert!((analytic_iabr(5, 0.01) - 1.703_552_375_076_04).abs() < 1e-12);
        assert!((analytic_iabr(7, 1e-12) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn iabr_non_increasing() {
        for q in [0.001, 0.01, 0.1, 0.5] {
            for t in 0..200 {
                assert!(analytic_iabr(t + 1, q) <= analytic_iabr(t, q) + 1e-15);
            }
        }
    }

    #[test]
    fn master_curve_values() {
        assert_eq!(analytic_collapse_master(0.0), 2.0);
        assert!((analytic_collapse_master(1.0) - 3.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(analytic_collapse_master(40.0) < 1e-300);
    }

    #[test]
    fn collapse_limit_sharpens_as_q_shrinks() {
        let dev = |q: f64| {
            (0..=30)
                .map(|k| {
                    let t0 = k as f64 * 0.1;
                    let t = (t0 / q.sqrt()).round();
                    (analytic_iabr(t as u64, q) - analytic_collapse_master(t * q.sqrt())).abs()
                })
                .fold(0.0, f64::max)
        };
        let d: Vec<f64> = [1e-2, 1e-3, 1e-4].into_iter().map(dev).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }

    #[test]
    fn free_energy_examples() {
        assert_eq!(free_energy_model(256.0, 0.04, 0.3, 0.0), 0.3 * 256.0);
        // Independent 30-digit evaluation.
        assert!((free_energy_model(256.0, 0.04, 0.3, 0.5) - 104.374_697_261_228_95).abs() < 1e-9);
        let f = |q: f64| free_energy_model(1.0, q, 0.0, 1.0);
        assert!(f(0.011) > f(0.010));
    }

    #[test]
    fn boundary_examples() {
        assert!((boundary_mi_model(0.01, 1.0) - 2.077_943_222_415_783_7).abs() < 1e-12);
        let lead = boundary_mi_model(1e-12, 1.0) * 1e-4;
        assert!((lead - GAMMA_4_3 / 2.0).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for k in 1..300 {
            let v = boundary_mi_model(k as f64 * 1e-3, 1.0);
            assert!(v < prev);
            prev = v;
        }
    }
}
