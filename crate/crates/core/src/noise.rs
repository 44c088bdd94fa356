//! Space-time occupancy patterns for noise events.
//!
//! Three temporal classes share one interface: `iid` redraws every site at
//! every step, `stripe` draws each site once and keeps it forever, and
//! `markov` runs an independent two-state chain per site whose occupancy has
//! stationary probability `q` and autocovariance `q(1-q) exp(-dt/t_corr)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::NoiseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Iid,
    Stripe,
    Markov,
}

#[derive(Clone, Debug)]
pub struct NoiseSchedule {
    kind: NoiseKind,
    q: f64,
    t_corr: f64,
    occupied: Vec<bool>,
    started: bool,
    next_step: u64,
}

impl NoiseSchedule {
    /// `t_corr` is only read for the markov kind; `f64::INFINITY` is allowed
    /// and freezes the chain.
    pub fn new(kind: NoiseKind, q: f64, t_corr: f64, n_sites: usize) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&q) {
            return Err(NoiseError::BadProbability(q));
        }
        if kind == NoiseKind::Markov && (t_corr.is_nan() || t_corr < 0.0) {
            return Err(NoiseError::BadCorrelationTime(t_corr));
        }
        Ok(Self {
            kind,
            q,
            t_corr,
            occupied: vec![false; n_sites],
            started: false,
            next_step: 0,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_sites(&self) -> usize {
        self.occupied.len()
    }

    /// One-step correlation `exp(-1/t_corr)` of the markov chain.
    pub fn lambda(&self) -> f64 {
        match self.kind {
            NoiseKind::Iid => 0.0,
            NoiseKind::Stripe => 1.0,
            NoiseKind::Markov => (-1.0 / self.t_corr).exp(),
        }
    }

    /// `(p(1 -> 1), p(0 -> 1))` for one step of the per-site chain.
    pub fn transition_probabilities(&self) -> (f64, f64) {
        let (q, l) = (self.q, self.lambda());
        ((q + (1.0 - q) * l).min(1.0), (q * (1.0 - l)).max(0.0))
    }

    /// Covariance `<o_t o_{t+dt}> - q^2` implied by the schedule.
    pub fn target_covariance(&self, dt: u64) -> f64 {
        let var = self.q * (1.0 - self.q);
        match self.kind {
            NoiseKind::Iid if dt > 0 => 0.0,
            NoiseKind::Iid => var,
            NoiseKind::Stripe => var,
            NoiseKind::Markov => var * (-(dt as f64) / self.t_corr).exp(),
        }
    }

    /// Occupied sites at step `t`. Steps must be requested as 0, 1, 2, ...
    /// for the markov kind; the other kinds accept any order.
    pub fn sample_step<R: Rng + ?Sized>(&mut self, t: u64, rng: &mut R) -> Result<Vec<usize>, NoiseError> {
        match self.kind {
            NoiseKind::Iid => {
                for o in self.occupied.iter_mut() {
                    *o = rng.random_bool(self.q);
                }
            }
            NoiseKind::Stripe => {
                if !self.started {
                    for o in self.occupied.iter_mut() {
                        *o = rng.random_bool(self.q);
                    }
                }
            }
            NoiseKind::Markov => {
                if t != self.next_step {
                    return Err(NoiseError::OutOfOrder {
                        expected: self.next_step,
                        got: t,
                    });
                }
                if self.started {
                    let (p11, p01) = self.transition_probabilities();
                    for o in self.occupied.iter_mut() {
                        *o = rng.random_bool(if *o { p11 } else { p01 });
                    }
                } else {
                    for o in self.occupied.iter_mut() {
                        *o = rng.random_bool(self.q);
                    }
                }
                self.next_step += 1;
            }
        }
        self.started = true;
        Ok(self
            .occupied
            .iter()
            .enumerate()
            .filter_map(|(i, &o)| o.then_some(i))
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub lag: u64,
    pub empirical: f64,
    pub target: f64,
    /// Standard error of `empirical`, from the spread across sites.
    pub stderr: f64,
}

impl CorrelationRow {
    pub fn within_sigma(&self, k: f64) -> bool {
        (self.empirical - self.target).abs() <= k * self.stderr
    }
}

/// Runs a fresh schedule for `steps` steps and tabulates the lagged
/// covariance for `0..=max_lag`.
pub fn correlation_check<R: Rng + ?Sized>(
    schedule: &mut NoiseSchedule,
    steps: usize,
    max_lag: u64,
    rng: &mut R,
) -> Result<Vec<CorrelationRow>, NoiseError> {
    if schedule.kind == NoiseKind::Stripe {
        return Err(NoiseError::StripeCovarianceConstant {
            covariance: schedule.target_covariance(0),
        });
    }
    let n = schedule.n_sites();
    let mut grid = vec![vec![0.0f64; steps]; n];
    for t in 0..steps {
        for i in schedule.sample_step(t as u64, rng)? {
            grid[i][t] = 1.0;
        }
    }
    let total: f64 = grid.iter().flatten().sum();
    let mean = total / (n * steps) as f64;
    let mut rows = Vec::new();
    for lag in 0..=max_lag {
        let lag_us = lag as usize;
        if lag_us >= steps {
            break;
        }
        let pairs = (steps - lag_us) as f64;
        let per_site: Vec<f64> = grid
            .iter()
            .map(|o| {
                o.iter()
                    .zip(&o[lag_us..])
                    .map(|(a, b)| (a - mean) * (b - mean))
                    .sum::<f64>()
                    / pairs
            })
            .collect();
        let m = per_site.iter().sum::<f64>() / n as f64;
        let var = per_site.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
        rows.push(CorrelationRow {
            lag,
            empirical: m,
            target: schedule.target_covariance(lag),
            stderr: (var / n as f64).sqrt(),
        });
    }
    Ok(rows)
}
