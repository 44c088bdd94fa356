//! Hybrid brick-wall dynamics with noise, measurements and a reference qubit.
//!
//! One step is one full brick-wall period: an even layer on bonds
//! `(0,1), (2,3), ...` followed by an odd layer on `(1,2), (3,4), ...` with
//! open boundaries. Within a cadence unit the order is always
//! unitaries, then noise, then measurements.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clifford::random_two_qubit_clifford;
use crate::error::{CircuitError, StabError};
use crate::noise::{NoiseKind, NoiseSchedule};
use crate::ops::Op;
use crate::rng::{derive_stream, SeedSpec};
use crate::tableau::{MixedStabilizerState, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChannel {
    Reset,
    Dephase,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cadence {
    PerLayer,
    #[default]
    PerPeriod,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    ProductZero,
    MaximallyMixed,
}

fn default_record_every() -> u64 {
    1
}

fn default_trajectories() -> u64 {
    1
}

/// Everything needed to run trajectories at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub p_m: f64,
    pub q: f64,
    pub noise_kind: NoiseKind,
    pub noise_channel: NoiseChannel,
    #[serde(default)]
    pub t_corr: f64,
    #[serde(default)]
    pub cadence: Cadence,
    #[serde(default)]
    pub initial_state: InitialState,
    /// Periods before encoding; `2L` when absent.
    #[serde(default)]
    pub t_steady: Option<u64>,
    pub t_max: u64,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    /// Number of final pre-encoding periods to record, at times `-W..=-1`.
    #[serde(default)]
    pub steady_window: u64,
    /// Optional extra region, as fractions `[lo, hi)` of the chain, whose
    /// mutual information with the reference is recorded.
    #[serde(default)]
    pub probe: Option<[f64; 2]>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_trajectories")]
    pub trajectories: u64,
}

impl ExperimentConfig {
    /// A config with the defaults used throughout the examples.
    pub fn new(l: usize, p_m: f64, q: f64, noise_kind: NoiseKind, noise_channel: NoiseChannel, t_max: u64) -> Self {
        Self {
            l,
            p_m,
            q,
            noise_kind,
            noise_channel,
            t_corr: 0.0,
            cadence: Cadence::PerPeriod,
            initial_state: InitialState::ProductZero,
            t_steady: None,
            t_max,
            record_every: 1,
            steady_window: 0,
            probe: None,
            master_seed: 0,
            trajectories: 1,
        }
    }

    pub fn t_steady(&self) -> u64 {
        self.t_steady.unwrap_or(2 * self.l as u64)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let bad = |m: String| Err(CircuitError::Config(m));
        if self.l < 8 || self.l % 2 != 0 {
            return bad(format!("L must be even and at least 8, got {}", self.l));
        }
        if !(0.0..1.0).contains(&self.p_m) {
            return bad(format!("p_m must lie in [0, 1), got {}", self.p_m));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return bad(format!("q must lie in [0, 1], got {}", self.q));
        }
        if self.t_corr.is_nan() || self.t_corr < 0.0 {
            return bad(format!("t_corr must be non-negative, got {}", self.t_corr));
        }
        if self.record_every == 0 {
            return bad("record_every must be positive".into());
        }
        if self.steady_window > self.t_steady() {
            return bad("steady_window exceeds t_steady".into());
        }
        if let Some([lo, hi]) = self.probe {
            if !(0.0 <= lo && lo < hi && hi <= 1.0) || self.probe_region().is_empty() {
                return bad(format!("probe [{lo}, {hi}) is not a non-empty sub-interval of [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn probe_region(&self) -> Region {
        match self.probe {
            Some([lo, hi]) => {
                let a = (lo * self.l as f64).floor() as usize;
                let b = ((hi * self.l as f64).floor() as usize).min(self.l);
                Region::range(a..b)
            }
            None => Region::empty(),
        }
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn dynamics(&self) -> DynamicsParams {
        DynamicsParams {
            l: self.l,
            p_m: self.p_m,
            channel: self.noise_channel,
            cadence: self.cadence,
        }
    }
}

/// The parts of a config that drive a single period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsParams {
    pub l: usize,
    pub p_m: f64,
    pub channel: NoiseChannel,
    pub cadence: Cadence,
}

/// Noise schedule plus its step counter.
#[derive(Clone, Debug)]
pub struct HybridDynamics {
    pub params: DynamicsParams,
    noise: NoiseSchedule,
    noise_step: u64,
}

impl HybridDynamics {
    pub fn new(params: DynamicsParams, noise: NoiseSchedule) -> Self {
        Self {
            params,
            noise,
            noise_step: 0,
        }
    }

    fn record(log: &mut Option<&mut Vec<Op>>, op: Op) {
        if let Some(l) = log.as_deref_mut() {
            l.push(op);
        }
    }

    fn layer<R: Rng + ?Sized>(
        &self,
        state: &mut MixedStabilizerState,
        offset: usize,
        rng: &mut R,
        log: &mut Option<&mut Vec<Op>>,
    ) -> Result<(), StabError> {
        let mut a = offset;
        while a + 1 < self.params.l {
            let gate = random_two_qubit_clifford(rng);
            state.apply_clifford2(&gate, a, a + 1)?;
            Self::record(log, Op::Clifford2 { gate, a, b: a + 1 });
            a += 2;
        }
        Ok(())
    }

    fn noise_and_measure<R: Rng + ?Sized>(
        &mut self,
        state: &mut MixedStabilizerState,
        rng: &mut R,
        log: &mut Option<&mut Vec<Op>>,
    ) -> Result<(), CircuitError> {
        let sites = self.noise.sample_step(self.noise_step, rng)?;
        self.noise_step += 1;
        for q in sites {
            let op = match self.params.channel {
                NoiseChannel::Reset => Op::Reset(q),
                NoiseChannel::Dephase => Op::Dephase(q),
            };
            op.apply_to(state)?;
            Self::record(log, op);
        }
        for q in 0..self.params.l {
            if rng.random_bool(self.params.p_m) {
                let m = state.measure_z(q, rng)?;
                Self::record(
                    log,
                    Op::Measure {
                        qubit: q,
                        outcome: m.outcome,
                        deterministic: m.deterministic,
                    },
                );
            }
        }
        Ok(())
    }

    /// One brick-wall period on system qubits `0..L`. Every applied
    /// operation is appended to `log` when one is given.
    pub fn period<R: Rng + ?Sized>(
        &mut self,
        state: &mut MixedStabilizerState,
        rng: &mut R,
        mut log: Option<&mut Vec<Op>>,
    ) -> Result<(), CircuitError> {
        if state.num_qubits() < self.params.l {
            return Err(CircuitError::Config(format!(
                "state has {} qubits, dynamics needs {}",
                state.num_qubits(),
                self.params.l
            )));
        }
        self.layer(state, 0, rng, &mut log)?;
        if self.params.cadence == Cadence::PerLayer {
            self.noise_and_measure(state, rng, &mut log)?;
        }
        self.layer(state, 1, rng, &mut log)?;
        self.noise_and_measure(state, rng, &mut log)
    }
}

/// Appends the reference qubit and entangles it with `middle` in a Bell pair.
/// Returns the reference index.
pub fn encode_reference(
    state: &mut MixedStabilizerState,
    l: usize,
    middle: usize,
    mut log: Option<&mut Vec<Op>>,
) -> Result<usize, CircuitError> {
    if state.num_qubits() != l {
        return Err(CircuitError::AlreadyEncoded);
    }
    let ops = [
        Op::AppendQubit,
        Op::Reset(middle),
        Op::H(middle),
        Op::Cnot {
            control: middle,
            target: l,
        },
    ];
    for op in ops {
        op.apply_to(state)?;
        if let Some(l) = log.as_deref_mut() {
            l.push(op);
        }
    }
    Ok(l)
}

/// Observables at one recorded time, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub t: i64,
    pub i_ab_r: i64,
    pub i_a_b: i64,
    pub s_a: i64,
    pub s_b: i64,
    pub s_ab: i64,
    pub s_r: i64,
    /// `I(P:R)` for the configured probe region.
    pub i_p_r: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub config_hash: String,
    pub stream_id: u64,
    pub samples: Vec<Sample>,
}

/// Measures every recorded observable. `R` is qubit `L` if present.
pub fn observe(state: &MixedStabilizerState, l: usize, probe: &Region, t: i64) -> Sample {
    let a = Region::range(0..l / 2);
    let b = Region::range(l / 2..l);
    let ab = Region::range(0..l);
    let s_a = state.entropy(&a) as i64;
    let s_b = state.entropy(&b) as i64;
    let s_ab = state.entropy(&ab) as i64;
    let has_r = state.num_qubits() > l;
    let (s_r, s_abr) = if has_r {
        (state.entropy(&Region::new([l])) as i64, state.total_entropy() as i64)
    } else {
        (0, s_ab)
    };
    let i_p_r = (!probe.is_empty()).then(|| {
        if has_r {
            let s_p = state.entropy(probe) as i64;
            let s_pr = state.entropy(&probe.union(&Region::new([l]))) as i64;
            s_p + s_r - s_pr
        } else {
            0
        }
    });
    Sample {
        t,
        i_ab_r: s_ab + s_r - s_abr,
        i_a_b: s_a + s_b - s_ab,
        s_a,
        s_b,
        s_ab,
        s_r,
        i_p_r,
    }
}

pub fn initial_state(config: &ExperimentConfig) -> Result<MixedStabilizerState, CircuitError> {
    Ok(match config.initial_state {
        InitialState::ProductZero => MixedStabilizerState::new_product_state(config.l)?,
        InitialState::MaximallyMixed => MixedStabilizerState::new_maximally_mixed(config.l)?,
    })
}

/// Runs one trajectory: steady-state preparation, encoding, then `t_max`
/// recorded periods. The result depends only on `(config, stream_id)`.
pub fn run_trajectory(config: &ExperimentConfig, stream_id: u64) -> Result<TrajectoryRecord, CircuitError> {
    config.validate()?;
    let mut rng = derive_stream(SeedSpec::new(config.master_seed, stream_id));
    let mut state = initial_state(config)?;
    let noise = NoiseSchedule::new(config.noise_kind, config.q, config.t_corr, config.l)?;
    let mut dynamics = HybridDynamics::new(config.dynamics(), noise);
    let probe = config.probe_region();
    let t_steady = config.t_steady();
    let mut samples = Vec::new();

    for p in 1..=t_steady {
        dynamics.period(&mut state, &mut rng, None)?;
        if p + config.steady_window > t_steady {
            samples.push(observe(&state, config.l, &probe, p as i64 - t_steady as i64 - 1));
        }
    }
    encode_reference(&mut state, config.l, config.l / 2, None)?;
    samples.push(observe(&state, config.l, &probe, 0));
    for t in 1..=config.t_max {
        dynamics.period(&mut state, &mut rng, None)?;
        if t % config.record_every == 0 {
            samples.push(observe(&state, config.l, &probe, t as i64));
        }
    }
    Ok(TrajectoryRecord {
        config_hash: config.hash(),
        stream_id,
        samples,
    })
}

/// Runs `config.trajectories` trajectories on the current rayon pool,
/// returned in stream-id order.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<Vec<TrajectoryRecord>, CircuitError> {
    config.validate()?;
    (0..config.trajectories)
        .into_par_iter()
        .map(|s| run_trajectory(config, s))
        .collect()
}
