//! Mixed-state stabilizer simulation of noisy hybrid Clifford circuits.

pub mod analysis;
pub mod analytics;
pub mod bits;
pub mod circuit;
pub mod clifford;
pub mod error;
pub mod harness;
pub mod noise;
pub mod ops;
pub mod oracle;
pub mod pauli;
pub mod rng;
pub mod tableau;

pub use bits::{rank_gf2, BitMatrix};
pub use circuit::{run_ensemble, run_trajectory, ExperimentConfig, NoiseChannel, Sample, TrajectoryRecord};
pub use clifford::{random_two_qubit_clifford, SignedPauli2, TwoQubitClifford};
pub use noise::{NoiseKind, NoiseSchedule};
pub use ops::Op;
pub use oracle::DenseState;
pub use error::{AnalysisError, CircuitError, HarnessError, NoiseError, OracleError, StabError};
pub use pauli::{Pauli, PauliString};
pub use rng::{derive_stream, SeedSpec, StreamRng};
pub use tableau::{Measurement, MixedStabilizerState, Outcome, Region};
