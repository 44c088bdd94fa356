//! Lockstep comparison of the stabilizer engine against the dense oracle on
//! seeded hybrid circuits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Cadence, DynamicsParams, HybridDynamics, NoiseChannel};
use crate::error::HarnessError;
use crate::noise::{NoiseKind, NoiseSchedule};
use crate::ops::Op;
use crate::oracle::DenseState;
use crate::rng::{derive_stream, SeedSpec};
use crate::tableau::{MixedStabilizerState, Region};

pub const TOLERANCE: f64 = 1e-9;
pub const MAX_QUBITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheckConfig {
    pub n: usize,
    pub steps: usize,
    pub seeds: u64,
    pub master_seed: u64,
    pub p_m: f64,
    pub q: f64,
    /// Drops one stabilizer generator after this `(seed, step)`; a negative
    /// control for the checker itself.
    pub corrupt_at: Option<(u64, usize)>,
}

impl OracleCheckConfig {
    pub fn new(n: usize, steps: usize, seeds: u64) -> Self {
        Self {
            n,
            steps,
            seeds,
            master_seed: 0,
            p_m: 0.3,
            q: 0.2,
            corrupt_at: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleFailure {
    pub seed: u64,
    pub step: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheckReport {
    pub n: usize,
    pub steps: usize,
    pub seeds: u64,
    /// Largest `|S_stab - S_dense|` over every compared region.
    pub max_deviation: f64,
    pub entropy_checks: u64,
    pub probability_checks: u64,
    pub failure: Option<OracleFailure>,
}

impl OracleCheckReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.max_deviation < TOLERANCE
    }
}

struct Lockstep {
    stab: MixedStabilizerState,
    dense: DenseState,
    max_deviation: f64,
    entropy_checks: u64,
    probability_checks: u64,
}

impl Lockstep {
    fn replay(&mut self, ops: &[Op]) -> Result<(), String> {
        for op in ops {
            let p = self.dense.apply(op).map_err(|e| format!("{op:?}: {e}"))?;
            if let (Some(p), Op::Measure { deterministic, .. }) = (p, op) {
                let want = if *deterministic { 1.0 } else { 0.5 };
                self.probability_checks += 1;
                if (p - want).abs() > TOLERANCE {
                    return Err(format!("{op:?}: oracle probability {p}, expected {want}"));
                }
            }
        }
        Ok(())
    }

    /// Every prefix cut `[0, c)` for `c = 1..=n`, which includes the half
    /// cut and the whole system.
    fn compare(&mut self) -> Result<(), String> {
        let n = self.stab.num_qubits();
        for c in 1..=n {
            let region = Region::range(0..c);
            let s = self.stab.entropy(&region) as f64;
            let d = self.dense.von_neumann_entropy(&region);
            self.entropy_checks += 1;
            let dev = (s - d).abs();
            self.max_deviation = self.max_deviation.max(dev);
            if dev > TOLERANCE {
                return Err(format!("cut [0, {c}): stabilizer {s}, oracle {d}"));
            }
        }
        self.dense.check_invariants()
    }
}

fn extra_gates<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Op> {
    let q = rng.random_range(0..n);
    let mut ops = vec![if rng.random_bool(0.5) { Op::H(q) } else { Op::S(q) }];
    if n >= 2 {
        let c = rng.random_range(0..n);
        let t = (c + rng.random_range(1..n)) % n;
        ops.push(Op::Cnot { control: c, target: t });
    }
    ops.push(Op::X(rng.random_range(0..n)));
    ops
}

fn run_seed(config: &OracleCheckConfig, seed: u64, lock: &mut Lockstep) -> Result<(), (usize, String)> {
    let n = config.n;
    let mut rng = derive_stream(SeedSpec::new(config.master_seed, seed));
    let params = |channel| DynamicsParams {
        l: n,
        p_m: config.p_m,
        channel,
        cadence: Cadence::PerPeriod,
    };
    let schedule = || NoiseSchedule::new(NoiseKind::Iid, config.q, 0.0, n).expect("valid probability");
    let mut reset = HybridDynamics::new(params(NoiseChannel::Reset), schedule());
    let mut dephase = HybridDynamics::new(params(NoiseChannel::Dephase), schedule());
    lock.compare().map_err(|e| (0, e))?;
    for step in 1..=config.steps {
        let mut ops = Vec::new();
        let dynamics = if rng.random_bool(0.5) { &mut reset } else { &mut dephase };
        dynamics
            .period(&mut lock.stab, &mut rng, Some(&mut ops))
            .map_err(|e| (step, e.to_string()))?;
        for op in extra_gates(n, &mut rng) {
            op.apply_to(&mut lock.stab).map_err(|e| (step, e.to_string()))?;
            ops.push(op);
        }
        lock.replay(&ops).map_err(|e| (step, e))?;
        if config.corrupt_at == Some((seed, step)) {
            lock.stab.corrupt_drop_generator();
        }
        lock.compare().map_err(|e| (step, e))?;
    }
    Ok(())
}

/// Runs `seeds` circuits of `steps` periods each. Odd seeds start from the
/// maximally mixed state, even seeds from `|0...0>`.
pub fn run_oracle_check(config: &OracleCheckConfig) -> Result<OracleCheckReport, HarnessError> {
    if config.n == 0 || config.n > MAX_QUBITS {
        return Err(HarnessError::Spec(format!(
            "oracle check supports 1..={MAX_QUBITS} qubits, got {}",
            config.n
        )));
    }
    let mut report = OracleCheckReport {
        n: config.n,
        steps: config.steps,
        seeds: config.seeds,
        max_deviation: 0.0,
        entropy_checks: 0,
        probability_checks: 0,
        failure: None,
    };
    for seed in 0..config.seeds {
        let mixed = seed % 2 == 1;
        let mut lock = Lockstep {
            stab: if mixed {
                MixedStabilizerState::new_maximally_mixed(config.n)
            } else {
                MixedStabilizerState::new_product_state(config.n)
            }
            .map_err(|e| HarnessError::Spec(e.to_string()))?,
            dense: if mixed {
                DenseState::new_maximally_mixed(config.n)
            } else {
                DenseState::new_product(config.n)
            }
            .map_err(|e| HarnessError::Spec(e.to_string()))?,
            max_deviation: 0.0,
            entropy_checks: 0,
            probability_checks: 0,
        };
        let outcome = run_seed(config, seed, &mut lock);
        report.max_deviation = report.max_deviation.max(lock.max_deviation);
        report.entropy_checks += lock.entropy_checks;
        report.probability_checks += lock.probability_checks;
        if let Err((step, detail)) = outcome {
            report.failure = Some(OracleFailure { seed, step, detail });
            break;
        }
    }
    Ok(report)
}

/// Replays `ops` on both engines from `|0...0>` and compares every prefix
/// cut after each operation.
pub fn check_sequence(n: usize, ops: &[Op]) -> Result<f64, String> {
    let mut lock = Lockstep {
        stab: MixedStabilizerState::new_product_state(n).map_err(|e| e.to_string())?,
        dense: DenseState::new_product(n).map_err(|e| e.to_string())?,
        max_deviation: 0.0,
        entropy_checks: 0,
        probability_checks: 0,
    };
    for (i, op) in ops.iter().enumerate() {
        op.apply_to(&mut lock.stab).map_err(|e| format!("op {i}: {e}"))?;
        lock.replay(std::slice::from_ref(op)).map_err(|e| format!("op {i}: {e}"))?;
        lock.compare().map_err(|e| format!("op {i}: {e}"))?;
    }
    Ok(lock.max_deviation)
}
