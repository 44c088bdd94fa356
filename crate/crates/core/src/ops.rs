//! Circuit operations shared by the stabilizer engine and the dense oracle.

use crate::clifford::TwoQubitClifford;
use crate::error::StabError;
use crate::tableau::{MixedStabilizerState, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Clifford2 { gate: TwoQubitClifford, a: usize, b: usize },
    H(usize),
    S(usize),
    X(usize),
    Cnot { control: usize, target: usize },
    Dephase(usize),
    Reset(usize),
    /// A Z measurement together with the outcome the stabilizer engine drew.
    Measure { qubit: usize, outcome: Outcome, deterministic: bool },
    AppendQubit,
}

impl Op {
    /// Replays the operation on a stabilizer state. Measurements are forced
    /// to the recorded outcome when it is not determined by the state.
    pub fn apply_to(&self, state: &mut MixedStabilizerState) -> Result<(), StabError> {
        match *self {
            Op::Clifford2 { gate, a, b } => state.apply_clifford2(&gate, a, b),
            Op::H(q) => state.apply_h(q),
            Op::S(q) => state.apply_s(q),
            Op::X(q) => state.apply_x(q),
            Op::Cnot { control, target } => state.apply_cnot(control, target),
            Op::Dephase(q) => state.dephase(q),
            Op::Reset(q) => state.reset(q),
            Op::Measure { qubit, outcome, .. } => {
                let m = state.measure_z_with(qubit, outcome.is_minus())?;
                if m.outcome != outcome {
                    return Err(StabError::Invariant(format!(
                        "replayed measurement of qubit {qubit} gave {:?}, recorded {:?}",
                        m.outcome, outcome
                    )));
                }
                Ok(())
            }
            Op::AppendQubit => {
                state.append_qubit();
                Ok(())
            }
        }
    }
}
