//! Analysis of a closed store into JSON reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    estimate_collapse_ensemble, fit_power_law, mean_stderr, CollapseEstimate, CollapseOptions, Ensemble, PowerLawFit,
};
use crate::circuit::{Sample, TrajectoryRecord};
use crate::error::HarnessError;
use crate::harness::store::PointData;
use crate::noise::NoiseKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PowerLaw,
    Collapse,
    Crossover,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::PowerLaw => "power_law",
            Mode::Collapse => "collapse",
            Mode::Crossover => "crossover",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "power_law" => Ok(Mode::PowerLaw),
            "collapse" => Ok(Mode::Collapse),
            "crossover" => Ok(Mode::Crossover),
            other => Err(format!("unknown mode {other:?}; expected power_law, collapse or crossover")),
        }
    }
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const BOOTSTRAP_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawPoint {
    pub q: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawReport {
    pub observable: String,
    pub points: Vec<PowerLawPoint>,
    pub fit: PowerLawFit,
    pub b_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub q: f64,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub noise_kind: NoiseKind,
    pub control: Option<f64>,
    pub estimate: CollapseEstimate,
    pub curves: Vec<CurveSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    /// `t_corr`, or `beta` when the sweep used a beta axis.
    pub control: f64,
    pub gamma_star: f64,
    pub gamma_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    pub control_name: String,
    pub rows: Vec<CrossoverRow>,
    pub collapses: Vec<CollapseReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Report {
    PowerLaw(PowerLawReport),
    Collapse(CollapseReport),
    Crossover(CrossoverReport),
}

fn mode_err(mode: Mode, reason: impl Into<String>) -> HarnessError {
    HarnessError::Mode {
        mode: mode.name().into(),
        reason: reason.into(),
    }
}

/// Steady-state samples: the pre-encoding window if recorded, else `t = 0`.
pub fn steady_samples(r: &TrajectoryRecord) -> Vec<&Sample> {
    let pre: Vec<&Sample> = r.samples.iter().filter(|s| s.t < 0).collect();
    if pre.is_empty() {
        r.samples.iter().filter(|s| s.t == 0).collect()
    } else {
        pre
    }
}

/// Per-trajectory time average of a steady-state observable.
pub fn steady_means(point: &PointData, f: impl Fn(&Sample) -> f64) -> Vec<f64> {
    point
        .records
        .iter()
        .map(|r| {
            let s = steady_samples(r);
            s.iter().map(|x| f(x)).sum::<f64>() / s.len() as f64
        })
        .collect()
}

/// Trajectories of `f` on the post-encoding time axis (`t >= 0`).
pub fn ensemble(point: &PointData, scale: f64, f: impl Fn(&Sample) -> f64) -> Result<Ensemble, HarnessError> {
    let first = point
        .records
        .first()
        .ok_or_else(|| HarnessError::Spec("point has no trajectories".into()))?;
    let times: Vec<f64> = first.samples.iter().filter(|s| s.t >= 0).map(|s| s.t as f64).collect();
    let trajectories = point
        .records
        .iter()
        .map(|r| r.samples.iter().filter(|s| s.t >= 0).map(&f).collect::<Vec<f64>>())
        .collect::<Vec<_>>();
    if trajectories.iter().any(|t| t.len() != times.len()) {
        return Err(HarnessError::Spec("trajectories have different time axes".into()));
    }
    Ok(Ensemble {
        scale,
        times,
        trajectories,
    })
}

fn sorted_by_q(points: &[&PointData]) -> Vec<PointData> {
    let mut v: Vec<PointData> = points.iter().map(|p| (*p).clone()).collect();
    v.sort_by(|a, b| a.config.q.total_cmp(&b.config.q));
    v
}

fn check_distinct_q(mode: Mode, points: &[PointData]) -> Result<(), HarnessError> {
    if points.len() < 3 {
        return Err(mode_err(mode, format!("needs at least 3 q values, got {}", points.len())));
    }
    if points.windows(2).any(|w| w[0].config.q == w[1].config.q) {
        return Err(mode_err(mode, "several points share a q value; split the store"));
    }
    Ok(())
}

pub fn power_law(points: &[PointData]) -> Result<PowerLawReport, HarnessError> {
    let points = sorted_by_q(&points.iter().collect::<Vec<_>>());
    check_distinct_q(Mode::PowerLaw, &points)?;
    let rows: Vec<PowerLawPoint> = points
        .iter()
        .map(|p| {
            let (mean, stderr) = mean_stderr(&steady_means(p, |s| s.i_a_b as f64));
            PowerLawPoint { q: p.config.q, mean, stderr }
        })
        .collect();
    let fit = fit_power_law(&rows.iter().map(|r| (r.q, r.mean)).collect::<Vec<_>>())?;
    Ok(PowerLawReport {
        observable: "I_A_B".into(),
        b_err: fit.b_err(),
        points: rows,
        fit,
    })
}

fn collapse_group(points: &[&PointData], control: Option<f64>, options: &CollapseOptions) -> Result<CollapseReport, HarnessError> {
    let points = sorted_by_q(points);
    check_distinct_q(Mode::Collapse, &points)?;
    let ensembles: Vec<Ensemble> = points
        .iter()
        .map(|p| ensemble(p, p.config.q, |s| s.i_ab_r as f64))
        .collect::<Result<_, _>>()?;
    let estimate = estimate_collapse_ensemble(&ensembles, options, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED)?;
    let curves = ensembles
        .iter()
        .map(|e| CurveSummary {
            q: e.scale,
            times: e.times.clone(),
            mean: e.mean_series().values,
            stderr: e.stderr(),
        })
        .collect();
    Ok(CollapseReport {
        noise_kind: points[0].config.noise_kind,
        control,
        estimate,
        curves,
    })
}

pub fn collapse(points: &[PointData], options: &CollapseOptions) -> Result<CollapseReport, HarnessError> {
    collapse_group(&points.iter().collect::<Vec<_>>(), None, options)
}

pub fn crossover(points: &[PointData], options: &CollapseOptions) -> Result<CrossoverReport, HarnessError> {
    let use_beta = points.iter().any(|p| p.beta.is_some());
    let mut groups: BTreeMap<u64, Vec<&PointData>> = BTreeMap::new();
    for p in points {
        let c = if use_beta { p.beta.unwrap_or(f64::NAN) } else { p.config.t_corr };
        groups.entry(c.to_bits()).or_default().push(p);
    }
    if groups.len() < 2 {
        return Err(mode_err(
            Mode::Crossover,
            format!("needs at least 2 correlation values, got {}", groups.len()),
        ));
    }
    let mut collapses = Vec::new();
    for (bits, group) in &groups {
        collapses.push(collapse_group(group, Some(f64::from_bits(*bits)), options)?);
    }
    collapses.sort_by(|a, b| a.control.unwrap().total_cmp(&b.control.unwrap()));
    Ok(CrossoverReport {
        control_name: if use_beta { "beta" } else { "t_corr" }.into(),
        rows: collapses
            .iter()
            .map(|c| CrossoverRow {
                control: c.control.unwrap(),
                gamma_star: c.estimate.gamma_star,
                gamma_err: c.estimate.gamma_err,
            })
            .collect(),
        collapses,
    })
}

pub fn analyze(points: &[PointData], mode: Mode) -> Result<Report, HarnessError> {
    let options = CollapseOptions::default();
    Ok(match mode {
        Mode::PowerLaw => Report::PowerLaw(power_law(points)?),
        Mode::Collapse => Report::Collapse(collapse(points, &options)?),
        Mode::Crossover => Report::Crossover(crossover(points, &options)?),
    })
}
