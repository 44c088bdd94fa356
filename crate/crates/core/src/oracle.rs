//! Brute-force density-matrix simulation for at most eight qubits.
//!
//! Basis index bit `q` is the computational-basis value of qubit `q`. This
//! module exists to cross-check the stabilizer engine; it favours plain loops
//! over speed.

use nalgebra::{Complex, DMatrix};

use crate::clifford::{SignedPauli2, TwoQubitClifford};
use crate::error::OracleError;
use crate::ops::Op;
use crate::tableau::{Outcome, Region};

pub type C64 = Complex<f64>;

pub const MAX_QUBITS: usize = 8;

const EIGEN_CUTOFF: f64 = 1e-12;
const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// Spectrum of a positive semidefinite matrix, ascending, as its singular
/// values. nalgebra's Hermitian eigensolver returns NaN or infinite values on
/// some sparse, highly degenerate density matrices; its SVD does not.
pub fn psd_spectrum(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn pauli_matrix(x: bool, z: bool) -> [[C64; 2]; 2] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match (x, z) {
        (false, false) => [[l, o], [o, l]],
        (true, false) => [[o, l], [l, o]],
        (true, true) => [[o, -i], [i, o]],
        (false, true) => [[l, o], [o, -l]],
    }
}

/// 4x4 matrix of a signed two-qubit Pauli; basis bit 0 is the first qubit.
fn pauli2_matrix(p: SignedPauli2) -> DMatrix<C64> {
    let b = |k: u8| p.bits & (1 << k) != 0;
    let pa = pauli_matrix(b(0), b(1));
    let pb = pauli_matrix(b(2), b(3));
    let s = if p.negative { -1.0 } else { 1.0 };
    DMatrix::from_fn(4, 4, |r, col| pa[r & 1][col & 1] * pb[r >> 1][col >> 1] * s)
}

/// A unitary (defined up to global phase) realising the given Clifford.
pub fn clifford_unitary(gate: &TwoQubitClifford) -> DMatrix<C64> {
    let img = gate.images();
    let id = DMatrix::<C64>::identity(4, 4);
    let proj = (&id + pauli2_matrix(img[1])) * (&id + pauli2_matrix(img[3])) * c(0.25, 0.0);
    let (best, _) = (0..4)
        .map(|j| (j, proj.column(j).norm()))
        .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let v0 = proj.column(best).into_owned();
    let v0 = &v0 / c(v0.norm(), 0.0);
    let xa = pauli2_matrix(img[0]);
    let xb = pauli2_matrix(img[2]);
    let mut u = DMatrix::<C64>::zeros(4, 4);
    for basis in 0..4 {
        let mut v = v0.clone();
        if basis & 1 != 0 {
            v = &xa * v;
        }
        if basis & 2 != 0 {
            v = &xb * v;
        }
        u.set_column(basis, &v);
    }
    u
}

fn hadamard() -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

fn phase_s() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    rho: DMatrix<C64>,
}

impl DenseState {
    fn check_n(n: usize) -> Result<(), OracleError> {
        if n == 0 || n > MAX_QUBITS {
            Err(OracleError::TooManyQubits(n))
        } else {
            Ok(())
        }
    }

    pub fn new_product(n: usize) -> Result<Self, OracleError> {
        Self::check_n(n)?;
        let dim = 1 << n;
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(0, 0)] = c(1.0, 0.0);
        Ok(Self { n, rho })
    }

    pub fn new_maximally_mixed(n: usize) -> Result<Self, OracleError> {
        Self::check_n(n)?;
        let dim = 1 << n;
        Ok(Self {
            n,
            rho: DMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        })
    }

    pub fn from_matrix(n: usize, rho: DMatrix<C64>) -> Result<Self, OracleError> {
        Self::check_n(n)?;
        assert_eq!(rho.nrows(), 1 << n);
        Ok(Self { n, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    fn check_qubit(&self, q: usize) -> Result<(), OracleError> {
        if q < self.n {
            Ok(())
        } else {
            Err(OracleError::QubitOutOfRange(q))
        }
    }

    /// `rho -> U rho` for a `2^m x 2^m` matrix acting on `qubits`.
    fn left_apply(rho: &mut DMatrix<C64>, u: &DMatrix<C64>, qubits: &[usize]) {
        let dim = rho.nrows();
        let sub = 1usize << qubits.len();
        let mask: usize = qubits.iter().map(|q| 1 << q).sum();
        let offsets: Vec<usize> = (0..sub)
            .map(|s| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| s & (1 << k) != 0)
                    .map(|(_, q)| 1 << q)
                    .sum()
            })
            .collect();
        let mut buf = vec![c(0.0, 0.0); sub];
        for col in 0..dim {
            for base in (0..dim).filter(|i| i & mask == 0) {
                for (s, off) in offsets.iter().enumerate() {
                    buf[s] = rho[(base | off, col)];
                }
                for (r, off) in offsets.iter().enumerate() {
                    let mut acc = c(0.0, 0.0);
                    for (s, v) in buf.iter().enumerate() {
                        acc += u[(r, s)] * v;
                    }
                    rho[(base | off, col)] = acc;
                }
            }
        }
    }

    /// `rho -> U rho U^dagger`.
    pub fn apply_unitary(&mut self, u: &DMatrix<C64>, qubits: &[usize]) -> Result<(), OracleError> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        Self::left_apply(&mut self.rho, u, qubits);
        self.rho = self.rho.adjoint();
        Self::left_apply(&mut self.rho, u, qubits);
        Ok(())
    }

    pub fn dephase(&mut self, q: usize) -> Result<(), OracleError> {
        self.check_qubit(q)?;
        let dim = self.rho.nrows();
        for i in 0..dim {
            for j in 0..dim {
                if (i ^ j) & (1 << q) != 0 {
                    self.rho[(i, j)] = c(0.0, 0.0);
                }
            }
        }
        Ok(())
    }

    /// `rho -> tr_q(rho) (x) |0><0|_q`.
    pub fn reset(&mut self, q: usize) -> Result<(), OracleError> {
        self.check_qubit(q)?;
        let dim = self.rho.nrows();
        let bit = 1 << q;
        let mut out = DMatrix::zeros(dim, dim);
        for i in (0..dim).filter(|i| i & bit == 0) {
            for j in (0..dim).filter(|j| j & bit == 0) {
                out[(i, j)] = self.rho[(i, j)] + self.rho[(i | bit, j | bit)];
            }
        }
        self.rho = out;
        Ok(())
    }

    /// Probability of observing `outcome` in a Z measurement of `q`.
    pub fn outcome_probability(&self, q: usize, outcome: Outcome) -> Result<f64, OracleError> {
        self.check_qubit(q)?;
        let want = outcome.is_minus();
        Ok((0..self.rho.nrows())
            .filter(|i| (i >> q) & 1 == want as usize)
            .map(|i| self.rho[(i, i)].re)
            .sum())
    }

    /// Projects onto `outcome` and renormalises; returns the outcome's
    /// probability before projection.
    pub fn measure_z_forced(&mut self, q: usize, outcome: Outcome) -> Result<f64, OracleError> {
        let p = self.outcome_probability(q, outcome)?;
        if p <= EIGEN_CUTOFF {
            return Err(OracleError::ZeroProbability(p));
        }
        let want = outcome.is_minus() as usize;
        let dim = self.rho.nrows();
        for i in 0..dim {
            for j in 0..dim {
                if (i >> q) & 1 != want || (j >> q) & 1 != want {
                    self.rho[(i, j)] = c(0.0, 0.0);
                } else {
                    self.rho[(i, j)] /= c(p, 0.0);
                }
            }
        }
        Ok(p)
    }

    /// Tensors on a fresh qubit in `|0>` as the new highest index.
    pub fn append_qubit(&mut self) -> Result<usize, OracleError> {
        Self::check_n(self.n + 1)?;
        let dim = self.rho.nrows();
        let mut out = DMatrix::zeros(2 * dim, 2 * dim);
        out.view_mut((0, 0), (dim, dim)).copy_from(&self.rho);
        self.rho = out;
        self.n += 1;
        Ok(self.n - 1)
    }

    /// Applies an operation; for measurements returns the probability of the
    /// recorded outcome.
    pub fn apply(&mut self, op: &Op) -> Result<Option<f64>, OracleError> {
        match *op {
            Op::Clifford2 { gate, a, b } => self.apply_unitary(&clifford_unitary(&gate), &[a, b])?,
            Op::H(q) => self.apply_unitary(&hadamard(), &[q])?,
            Op::S(q) => self.apply_unitary(&phase_s(), &[q])?,
            Op::X(q) => self.apply_unitary(&pauli_x(), &[q])?,
            Op::Cnot { control, target } => {
                self.apply_unitary(&clifford_unitary(&TwoQubitClifford::cnot()), &[control, target])?
            }
            Op::Dephase(q) => self.dephase(q)?,
            Op::Reset(q) => self.reset(q)?,
            Op::Measure { qubit, outcome, .. } => return self.measure_z_forced(qubit, outcome).map(Some),
            Op::AppendQubit => {
                self.append_qubit()?;
            }
        }
        Ok(None)
    }

    pub fn reduced(&self, region: &Region) -> DMatrix<C64> {
        let sites = region.sites();
        let rest: Vec<usize> = (0..self.n).filter(|q| !region.contains(*q)).collect();
        let scatter = |bits: usize, qs: &[usize]| -> usize {
            qs.iter()
                .enumerate()
                .filter(|(k, _)| bits & (1 << k) != 0)
                .map(|(_, q)| 1 << q)
                .sum()
        };
        let da = 1usize << sites.len();
        let db = 1usize << rest.len();
        let mut out = DMatrix::zeros(da, da);
        for a in 0..da {
            let ia = scatter(a, sites);
            for a2 in 0..da {
                let ia2 = scatter(a2, sites);
                let mut acc = c(0.0, 0.0);
                for b in 0..db {
                    let ib = scatter(b, &rest);
                    acc += self.rho[(ia | ib, ia2 | ib)];
                }
                out[(a, a2)] = acc;
            }
        }
        out
    }

    /// Von Neumann entropy in bits of the reduced state on `region`.
    pub fn von_neumann_entropy(&self, region: &Region) -> f64 {
        if region.is_empty() {
            return 0.0;
        }
        psd_spectrum(&self.reduced(region))
            .iter()
            .filter(|&&l| l > EIGEN_CUTOFF)
            .map(|&l| -l * l.log2())
            .sum()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Hermiticity, unit trace and positivity, with the given tolerances.
    pub fn check_invariants(&self) -> Result<(), String> {
        let herm = (&self.rho - self.rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(format!("not Hermitian: deviation {herm:e}"));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(format!("trace {tr} != 1"));
        }
        // Positivity via a real Cholesky factorization of the symmetric
        // embedding [[Re, -Im], [Im, Re]], shifted by the tolerance.
        let n = self.rho.nrows();
        let embed = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
            let v = self.rho[(i % n, j % n)];
            let shift = if i == j { NEGATIVITY_TOLERANCE } else { 0.0 };
            shift
                + match (i < n, j < n) {
                    (true, true) | (false, false) => v.re,
                    (true, false) => -v.im,
                    (false, true) => v.im,
                }
        });
        if embed.cholesky().is_none() {
            return Err(format!("eigenvalue below -{NEGATIVITY_TOLERANCE:e}"));
        }
        Ok(())
    }
}
