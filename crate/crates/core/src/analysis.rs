//! Power-law fits, data-collapse exponents and bootstrap errors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{CollapseCurve, GAMMA_1_3, ZETA_2_3};
use crate::error::AnalysisError;
use crate::rng::{derive_stream, SeedSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    /// Covariance of `(a, b)`.
    pub covariance: [[f64; 2]; 2],
    /// Largest absolute residual in log space.
    pub max_log_residual: f64,
}

impl PowerLawFit {
    pub fn b_err(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.a * q.powf(self.b)
    }
}

/// Least squares of `ln y = ln a + b ln q`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some(&(q, y)) = points.iter().find(|(q, y)| !(*q > 0.0 && *y > 0.0)) {
        return Err(AnalysisError::NonPositive(q, y));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 * n {
        return Err(AnalysisError::Degenerate);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let c = my - b * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - c - b * x).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let s2 = rss / (n - 2.0);
    let var_b = s2 / sxx;
    let var_c = s2 * (1.0 / n + mx * mx / sxx);
    let cov_cb = -s2 * mx / sxx;
    let a = c.exp();
    Ok(PowerLawFit {
        a,
        b,
        covariance: [[a * a * var_c, a * cov_cb], [a * cov_cb, var_b]],
        max_log_residual: residuals.iter().fold(0.0, |m, r| f64::max(m, r.abs())),
    })
}

/// Coefficients of `S(q) = c0 + c1 q^{2/3} + c2 q`, each free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub stderr: [f64; 3],
    /// `c0 / L` and `c1 / (L Gamma(1/3))`.
    pub s0: f64,
    pub s1: f64,
}

pub fn fit_free_energy(points: &[(f64, f64)], l_sub: f64) -> Result<FreeEnergyFit, AnalysisError> {
    if points.len() < 4 {
        return Err(AnalysisError::TooFewPoints {
            needed: 4,
            got: points.len(),
        });
    }
    let n = points.len();
    let x = DMatrix::from_fn(n, 3, |r, c| match c {
        0 => 1.0,
        1 => points[r].0.powf(2.0 / 3.0),
        _ => points[r].0,
    });
    let y = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let xtx = x.transpose() * &x;
    let inv = xtx.try_inverse().ok_or(AnalysisError::Degenerate)?;
    let beta = &inv * x.transpose() * &y;
    let resid = &y - &x * &beta;
    let s2 = resid.norm_squared() / (n as f64 - 3.0);
    let se = |k: usize| (s2 * inv[(k, k)]).sqrt();
    Ok(FreeEnergyFit {
        c0: beta[0],
        c1: beta[1],
        c2: beta[2],
        stderr: [se(0), se(1), se(2)],
        s0: beta[0] / l_sub,
        s1: beta[1] / (l_sub * GAMMA_1_3),
    })
}

/// `q`-linear coefficient the model predicts for a given `c1`.
pub fn free_energy_linear_term(c1: f64) -> f64 {
    c1 / GAMMA_1_3 * ZETA_2_3
}

/// A sampled curve: `values[i]` observed at `times[i]`, labelled by the
/// control value used for rescaling (`q`, or `1/L_A`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub scale: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(scale: f64, times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len());
        Self { scale, times, values }
    }

    pub fn from_fn(scale: f64, times: impl IntoIterator<Item = f64>, f: impl Fn(f64) -> f64) -> Self {
        let times: Vec<f64> = times.into_iter().collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self { scale, times, values }
    }

    fn check(&self) -> Result<(), AnalysisError> {
        if self.times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(AnalysisError::Unsorted(self.scale));
        }
        Ok(())
    }

    pub fn rescaled(&self, gamma: f64) -> CollapseCurve {
        let pts: Vec<(f64, f64)> = self.times.iter().copied().zip(self.values.iter().copied()).collect();
        CollapseCurve::rescale(gamma, self.scale, &pts)
    }
}

/// Per-trajectory samples of one curve on a shared time axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub scale: f64,
    pub times: Vec<f64>,
    /// `trajectories[k][i]` is trajectory `k` at `times[i]`.
    pub trajectories: Vec<Vec<f64>>,
}

impl Ensemble {
    pub fn mean_series(&self) -> Series {
        let idx: Vec<usize> = (0..self.trajectories.len()).collect();
        self.mean_of(&idx)
    }

    fn mean_of(&self, idx: &[usize]) -> Series {
        let n = idx.len() as f64;
        let values = (0..self.times.len())
            .map(|i| idx.iter().map(|&k| self.trajectories[k][i]).sum::<f64>() / n)
            .collect();
        Series::new(self.scale, self.times.clone(), values)
    }

    pub fn stderr(&self) -> Vec<f64> {
        let n = self.trajectories.len() as f64;
        let mean = self.mean_series().values;
        (0..self.times.len())
            .map(|i| {
                let var = self.trajectories.iter().map(|t| (t[i] - mean[i]).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                (var / n).sqrt()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    pub gamma_grid: Vec<f64>,
    pub window: (f64, f64),
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self {
            gamma_grid: (30..=120).map(|k| k as f64 / 100.0).collect(),
            window: (0.1, 1.9),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseEstimate {
    pub gamma_star: f64,
    /// `(gamma, cost)` for every grid value with a usable overlap.
    pub cost_curve: Vec<(f64, f64)>,
    pub gamma_err: f64,
}

impl CollapseEstimate {
    pub fn cost_at(&self, gamma: f64) -> Option<f64> {
        self.cost_curve.iter().find(|(g, _)| (g - gamma).abs() < 1e-9).map(|c| c.1)
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let k = points.partition_point(|p| p.0 < x);
    if k == 0 {
        return points[0].1;
    }
    if k == points.len() {
        return points[k - 1].1;
    }
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    if x1 == x0 {
        y1
    } else {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Mean over the common rescaled grid of the variance across curves, or
/// `None` when fewer than two curves share a windowed range.
pub fn collapse_cost(curves: &[Series], gamma: f64, window: (f64, f64)) -> Option<f64> {
    let mut order: Vec<&Series> = curves.iter().collect();
    order.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    let rescaled: Vec<CollapseCurve> = order.iter().map(|c| c.rescaled(gamma)).collect();
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut used = Vec::new();
    for c in &rescaled {
        let inside = c.points.iter().filter(|p| p.1 >= window.0 && p.1 <= window.1);
        let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in inside {
            a = a.min(p.0);
            b = b.max(p.0);
        }
        if a <= b {
            lo = lo.max(a);
            hi = hi.min(b);
            used.push(c);
        }
    }
    if used.len() < 2 || lo > hi {
        return None;
    }
    let mut grid: Vec<f64> = used
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .filter(|&t| t >= lo && t <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        return None;
    }
    let m = used.len() as f64;
    let total: f64 = grid
        .iter()
        .map(|&t| {
            let vals: Vec<f64> = used.iter().map(|c| interpolate(&c.points, t)).collect();
            let mean = vals.iter().sum::<f64>() / m;
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m
        })
        .sum();
    Some(total / grid.len() as f64)
}

fn argmin_collapse(curves: &[Series], options: &CollapseOptions) -> Result<(f64, Vec<(f64, f64)>), AnalysisError> {
    let cost_curve: Vec<(f64, f64)> = options
        .gamma_grid
        .iter()
        .filter_map(|&g| collapse_cost(curves, g, options.window).map(|c| (g, c)))
        .collect();
    let best = cost_curve
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(AnalysisError::NoOverlap)?;
    Ok((best.0, cost_curve))
}

fn check_curves(n: usize) -> Result<(), AnalysisError> {
    if n < 3 {
        return Err(AnalysisError::TooFewPoints { needed: 3, got: n });
    }
    Ok(())
}

/// Optimal collapse exponent of noiseless curves (`gamma_err = 0`).
pub fn estimate_collapse(curves: &[Series], options: &CollapseOptions) -> Result<CollapseEstimate, AnalysisError> {
    check_curves(curves.len())?;
    for c in curves {
        c.check()?;
    }
    let (gamma_star, cost_curve) = argmin_collapse(curves, options)?;
    Ok(CollapseEstimate {
        gamma_star,
        cost_curve,
        gamma_err: 0.0,
    })
}

/// Collapse of ensemble means, with `gamma_err` from resampling the
/// trajectories of every curve.
pub fn estimate_collapse_ensemble(
    ensembles: &[Ensemble],
    options: &CollapseOptions,
    resamples: usize,
    seed: u64,
) -> Result<CollapseEstimate, AnalysisError> {
    let means: Vec<Series> = ensembles.iter().map(Ensemble::mean_series).collect();
    let mut est = estimate_collapse(&means, options)?;
    if resamples < 2 {
        return Ok(est);
    }
    if let Some(e) = ensembles.iter().find(|e| e.trajectories.len() < 2) {
        return Err(AnalysisError::Invalid(format!(
            "curve {} needs at least 2 trajectories for a bootstrap",
            e.scale
        )));
    }
    let stars: Vec<f64> = (0..resamples)
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = derive_stream(SeedSpec::new(seed, r as u64));
            let curves: Vec<Series> = ensembles
                .iter()
                .map(|e| {
                    let n = e.trajectories.len();
                    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                    e.mean_of(&idx)
                })
                .collect();
            argmin_collapse(&curves, options).ok().map(|(g, _)| g)
        })
        .collect();
    est.gamma_err = std_dev(&stars);
    Ok(est)
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Nonparametric bootstrap standard error of `statistic` over `samples`.
pub fn bootstrap_error<T: Sync>(
    samples: &[T],
    statistic: impl Fn(&[&T]) -> f64 + Sync,
    resamples: usize,
    seed: u64,
) -> Result<f64, AnalysisError> {
    if samples.len() < 10 {
        return Err(AnalysisError::TooFewPoints {
            needed: 10,
            got: samples.len(),
        });
    }
    let n = samples.len();
    let stats: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = derive_stream(SeedSpec::new(seed, r as u64));
            let pick: Vec<&T> = (0..n).map(|_| &samples[rng.random_range(0..n)]).collect();
            statistic(&pick)
        })
        .collect();
    Ok(std_dev(&stats))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    (mean(xs), std_dev(xs) / (xs.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{analytic_collapse_master, boundary_mi_model, free_energy_model};

    fn qs() -> Vec<f64> {
        (1..=10).map(|k| 0.01 * k as f64).collect()
    }

    #[test]
    fn power_law_exact() {
        let pts: Vec<(f64, f64)> = qs().into_iter().map(|q| (q, 3.0 * q.powf(-1.0 / 3.0))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.a - 3.0).abs() < 1e-10 && (f.b + 1.0 / 3.0).abs() < 1e-10);
        assert!(f.max_log_residual < 1e-9);
    }

    #[test]
    fn power_law_constant_and_errors() {
        let pts: Vec<(f64, f64)> = qs().into_iter().map(|q| (q, 5.0)).collect();
        assert!(fit_power_law(&pts).unwrap().b.abs() < 1e-12);
        assert!(matches!(fit_power_law(&pts[..2]), Err(AnalysisError::TooFewPoints { .. })));
        assert!(matches!(fit_power_law(&[(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]), Err(AnalysisError::Degenerate)));
        assert!(matches!(fit_power_law(&[(0.1, 1.0), (0.2, -2.0), (0.3, 3.0)]), Err(AnalysisError::NonPositive(..))));
    }

    #[test]
    fn power_law_on_boundary_model() {
        let pts: Vec<(f64, f64)> = (0..8).map(|k| 0.01 + 0.01 * k as f64).map(|q| (q, boundary_mi_model(q, 1.0))).collect();
        let b = fit_power_law(&pts).unwrap().b;
        assert!((-0.36..=-0.30).contains(&b), "{b}");
    }

    #[test]
    fn free_energy_fit_recovers_coefficients() {
        let pts: Vec<(f64, f64)> = qs().into_iter().map(|q| (q, free_energy_model(128.0, q, 0.4, 0.7))).collect();
        let f = fit_free_energy(&pts, 128.0).unwrap();
        assert!((f.s0 - 0.4).abs() < 1e-8 && (f.s1 - 0.7).abs() < 1e-8);
        assert!((f.c2 - free_energy_linear_term(f.c1)).abs() < 1e-6);
    }

    fn synthetic(gamma: f64) -> Vec<Series> {
        [0.01, 0.02, 0.04, 0.08]
            .into_iter()
            .map(|q| Series::from_fn(q, (0..400).map(|t| t as f64), |t| analytic_collapse_master(t * q.powf(gamma))))
            .collect()
    }

    #[test]
    fn collapse_recovers_planted_exponent() {
        for gamma in [0.5, 2.0 / 3.0, 1.0] {
            let est = estimate_collapse(&synthetic(gamma), &CollapseOptions::default()).unwrap();
            assert!((est.gamma_star - gamma).abs() <= 0.02, "{gamma}: {}", est.gamma_star);
            let c = |g: f64| collapse_cost(&synthetic(gamma), g, (0.1, 1.9)).unwrap_or(f64::INFINITY);
            assert!(c(gamma) < c(gamma + 0.2) && c(gamma) < c(gamma - 0.2));
        }
    }

    #[test]
    fn collapse_ignores_curve_order() {
        let mut curves = synthetic(0.5);
        let a = estimate_collapse(&curves, &CollapseOptions::default()).unwrap();
        curves.reverse();
        curves.swap(0, 2);
        assert_eq!(a, estimate_collapse(&curves, &CollapseOptions::default()).unwrap());
    }

    #[test]
    fn collapse_errors() {
        let curves = synthetic(0.5);
        assert!(matches!(
            estimate_collapse(&curves[..2], &CollapseOptions::default()),
            Err(AnalysisError::TooFewPoints { .. })
        ));
        let flat: Vec<Series> = (0..3).map(|k| Series::from_fn(k as f64 + 1.0, [0.0, 1.0], |_| 2.0)).collect();
        assert_eq!(estimate_collapse(&flat, &CollapseOptions::default()), Err(AnalysisError::NoOverlap));
        let unsorted = vec![Series::new(0.1, vec![1.0, 0.0], vec![1.0, 1.0]); 3];
        assert!(matches!(estimate_collapse(&unsorted, &CollapseOptions::default()), Err(AnalysisError::Unsorted(_))));
    }

    #[test]
    fn bootstrap_examples() {
        let ones = vec![1.0; 50];
        let stat = |xs: &[&f64]| xs.iter().copied().sum::<f64>() / xs.len() as f64;
        assert_eq!(bootstrap_error(&ones, stat, 200, 1).unwrap(), 0.0);
        assert!(bootstrap_error(&ones[..5], stat, 10, 1).is_err());
    }
}
