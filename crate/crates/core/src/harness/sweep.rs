//! Sweep specifications: a base config and the axes varied around it.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::circuit::ExperimentConfig;
use crate::error::HarnessError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    #[serde(default)]
    pub q: Option<Vec<f64>>,
    #[serde(default, rename = "L")]
    pub l: Option<Vec<usize>>,
    #[serde(default)]
    pub t_corr: Option<Vec<f64>>,
    /// Sets `t_corr = q^(-beta)` for each point.
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
    #[serde(default)]
    pub p_m: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    #[serde(default)]
    pub axes: Axes,
    pub trajectories: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// One expanded parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub config: ExperimentConfig,
    #[serde(default)]
    pub beta: Option<f64>,
}

fn axis<T: Clone>(name: &str, values: &Option<Vec<T>>, base: T) -> Result<Vec<T>, HarnessError> {
    match values {
        Some(v) if v.is_empty() => Err(HarnessError::Spec(format!("axis {name} is empty"))),
        Some(v) => Ok(v.clone()),
        None => Ok(vec![base]),
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Spec(e.to_string()))
    }

    /// Cartesian product in the order `L`, `p_m`, `t_corr`/`beta`, `q`
    /// (`q` varies fastest). Every point is validated.
    pub fn points(&self) -> Result<Vec<SweepPoint>, HarnessError> {
        if self.trajectories == 0 {
            return Err(HarnessError::Spec("trajectories must be positive".into()));
        }
        if self.axes.t_corr.is_some() && self.axes.beta.is_some() {
            return Err(HarnessError::Spec("give either a t_corr or a beta axis, not both".into()));
        }
        let b = &self.base;
        let ls = axis("L", &self.axes.l, b.l)?;
        let pms = axis("p_m", &self.axes.p_m, b.p_m)?;
        let qs = axis("q", &self.axes.q, b.q)?;
        let corr: Vec<(f64, Option<f64>)> = match (&self.axes.t_corr, &self.axes.beta) {
            (_, Some(_)) => axis("beta", &self.axes.beta, 0.0)?.into_iter().map(|v| (f64::NAN, Some(v))).collect(),
            _ => axis("t_corr", &self.axes.t_corr, b.t_corr)?.into_iter().map(|v| (v, None)).collect(),
        };
        let mut out = Vec::new();
        for &l in &ls {
            for &p_m in &pms {
                for &(t_corr, beta) in &corr {
                    for &q in &qs {
                        let mut config = b.clone();
                        config.l = l;
                        config.p_m = p_m;
                        config.q = q;
                        config.t_corr = match beta {
                            Some(beta) => q.powf(-beta),
                            None => t_corr,
                        };
                        config.trajectories = self.trajectories;
                        config.validate()?;
                        out.push(SweepPoint {
                            index: out.len(),
                            config,
                            beta,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}
