//! Mixed stabilizer states.
//!
//! A state on `n` qubits is described by a stabilizer group of rank `k <= n`.
//! Internally the group is embedded in a full symplectic frame of `2n` Pauli
//! rows, split into `n` slots. Slot `j` owns rows `j` and `n + j`:
//!
//! * a *stabilizer slot* holds a generator `S_j` (row `j`, signed) and its
//!   destabilizer `D_j` (row `n + j`);
//! * a *logical slot* holds an anticommuting pair of operators that commute
//!   with the whole group (rows `j` and `n + j`, signs unused).
//!
//! Rows from different slots commute, and the two rows of a slot anticommute.
//! The frame is what makes deterministic measurements cheap: the expansion of
//! an operator in the group can be read off from its commutation with the
//! destabilizers, without solving a linear system.
//!
//! Storage is column-major: for each qubit `q` there is an x column and a z
//! column, each a bit vector over the `2n` rows. Gates touch only the columns
//! of the qubits they act on and process 64 rows per word operation.

use std::ops::Range;

use rand::Rng;

use crate::bits::{
    exclusive_prefix_parity, first_set, flip_bit, get_bit, iter_ones, rank_of_rows, set_bit,
    words_for, WORD_BITS,
};
use crate::clifford::TwoQubitClifford;
use crate::error::StabError;
use crate::pauli::{Pauli, PauliString};

/// A sorted set of distinct qubit indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Region {
    sites: Vec<usize>,
}

impl Region {
    pub fn new(sites: impl IntoIterator<Item = usize>) -> Self {
        let mut sites: Vec<usize> = sites.into_iter().collect();
        sites.sort_unstable();
        sites.dedup();
        Self { sites }
    }

    pub fn range(range: Range<usize>) -> Self {
        Self {
            sites: range.collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.sites.binary_search(&q).is_ok()
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::new(self.sites.iter().chain(&other.sites).copied())
    }

    /// Sites of `0..n` not in the region.
    pub fn complement(&self, n: usize) -> Region {
        Region {
            sites: (0..n).filter(|&q| !self.contains(q)).collect(),
        }
    }
}

impl From<Range<usize>> for Region {
    fn from(r: Range<usize>) -> Self {
        Region::range(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    fn from_bit(minus: bool) -> Self {
        if minus {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Outcome::Minus
    }

    /// Eigenvalue as ±1.
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: Outcome,
    /// True when the outcome was fixed by the state (probability one).
    pub deterministic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedStabilizerState {
    n: usize,
    /// Words per column; columns hold `2n` row bits.
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    signs: Vec<u64>,
    /// Bit `j` set iff slot `j` is a stabilizer slot.
    stab: Vec<u64>,
    k: usize,
}

impl MixedStabilizerState {
    fn blank(n: usize) -> Self {
        let words = words_for(2 * n);
        Self {
            n,
            words,
            x: vec![0; n * words],
            z: vec![0; n * words],
            signs: vec![0; words],
            stab: vec![0; words],
            k: 0,
        }
    }

    /// The pure product state `|0...0>`.
    pub fn new_product_state(n: usize) -> Result<Self, StabError> {
        if n == 0 {
            return Err(StabError::Empty);
        }
        let mut s = Self::blank(n);
        let w = s.words;
        for q in 0..n {
            set_bit(&mut s.z[q * w..(q + 1) * w], q, true);
            set_bit(&mut s.x[q * w..(q + 1) * w], n + q, true);
            set_bit(&mut s.stab, q, true);
        }
        s.k = n;
        Ok(s)
    }

    /// The maximally mixed state `I / 2^n`.
    pub fn new_maximally_mixed(n: usize) -> Result<Self, StabError> {
        if n == 0 {
            return Err(StabError::Empty);
        }
        let mut s = Self::blank(n);
        let w = s.words;
        for q in 0..n {
            set_bit(&mut s.z[q * w..(q + 1) * w], q, true);
            set_bit(&mut s.x[q * w..(q + 1) * w], n + q, true);
        }
        Ok(s)
    }

    /// Builds the state stabilized by the given commuting, independent
    /// generators (rank-deficient sets describe mixed states).
    pub fn from_generators(n: usize, generators: &[PauliString]) -> Result<Self, StabError> {
        if n == 0 {
            return Err(StabError::Empty);
        }
        for g in generators {
            if g.num_qubits() != n {
                return Err(StabError::Invariant(format!(
                    "generator {g} does not act on {n} qubits"
                )));
            }
        }
        for (a, ga) in generators.iter().enumerate() {
            for gb in &generators[a + 1..] {
                if !ga.commutes_with(gb) {
                    return Err(StabError::Invariant(format!("{ga} and {gb} anticommute")));
                }
            }
        }

        let unsigned_mul = |a: &PauliString, b: &PauliString| {
            let mut out = PauliString::identity(n);
            for q in 0..n {
                let (x1, z1) = a.get(q).bits();
                let (x2, z2) = b.get(q).bits();
                out.set(q, Pauli::from_bits(x1 ^ x2, z1 ^ z2));
            }
            out
        };

        let mut stabs: Vec<PauliString> = generators.to_vec();
        let mut pool: Vec<PauliString> = (0..n)
            .flat_map(|q| [PauliString::single(n, q, Pauli::X), PauliString::single(n, q, Pauli::Z)])
            .collect();
        let mut pairs: Vec<(PauliString, PauliString)> = Vec::new();

        for a in 0..stabs.len() {
            let s = stabs[a].clone();
            if s.is_identity() {
                return Err(StabError::Invariant("generators are not independent".into()));
            }
            let Some(pos) = pool.iter().position(|u| !u.commutes_with(&s)) else {
                return Err(StabError::Invariant("generators are not independent".into()));
            };
            let d = pool.swap_remove(pos);
            for later in stabs.iter_mut().skip(a + 1) {
                if !later.commutes_with(&d) {
                    *later = later.mul(&s)?;
                }
            }
            for u in pool.iter_mut() {
                if !u.commutes_with(&d) {
                    *u = unsigned_mul(u, &s);
                }
                if !u.commutes_with(&s) {
                    *u = unsigned_mul(u, &d);
                }
            }
            pairs.push((s, d));
        }
        let mut logicals: Vec<(PauliString, PauliString)> = Vec::new();
        loop {
            pool.retain(|u| !u.is_identity());
            let Some(u) = pool.pop() else { break };
            let Some(pos) = pool.iter().position(|v| !v.commutes_with(&u)) else {
                continue;
            };
            let v = pool.swap_remove(pos);
            for w in pool.iter_mut() {
                if !w.commutes_with(&v) {
                    *w = unsigned_mul(w, &u);
                }
                if !w.commutes_with(&u) {
                    *w = unsigned_mul(w, &v);
                }
            }
            logicals.push((u, v));
        }
        if pairs.len() + logicals.len() != n {
            return Err(StabError::Invariant("failed to complete a symplectic frame".into()));
        }

        let mut s = Self::blank(n);
        for (j, (stab, destab)) in pairs.iter().enumerate() {
            s.write_row(j, stab);
            s.write_row(n + j, destab);
            set_bit(&mut s.signs, j, stab.is_negative());
            set_bit(&mut s.stab, j, true);
        }
        for (i, (a, b)) in logicals.iter().enumerate() {
            let j = pairs.len() + i;
            s.write_row(j, a);
            s.write_row(n + j, b);
        }
        s.k = pairs.len();
        Ok(s)
    }

    fn write_row(&mut self, r: usize, p: &PauliString) {
        let w = self.words;
        for q in 0..self.n {
            let (xb, zb) = p.get(q).bits();
            set_bit(&mut self.x[q * w..(q + 1) * w], r, xb);
            set_bit(&mut self.z[q * w..(q + 1) * w], r, zb);
        }
    }

    fn read_row(&self, r: usize) -> PauliString {
        let w = self.words;
        let mut p = PauliString::identity(self.n);
        for q in 0..self.n {
            let xb = get_bit(&self.x[q * w..(q + 1) * w], r);
            let zb = get_bit(&self.z[q * w..(q + 1) * w], r);
            p.set(q, Pauli::from_bits(xb, zb));
        }
        p.set_negative(get_bit(&self.signs, r));
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Rank of the stabilizer group.
    pub fn rank(&self) -> usize {
        self.k
    }

    /// Von Neumann entropy of the full state in bits, `n - k`.
    pub fn total_entropy(&self) -> usize {
        self.n - self.k
    }

    pub fn is_pure(&self) -> bool {
        self.k == self.n
    }

    /// Stabilizer generators, one per stabilizer slot.
    pub fn generators(&self) -> Vec<PauliString> {
        iter_ones(&self.stab).map(|j| self.read_row(j)).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<(), StabError> {
        if q < self.n {
            Ok(())
        } else {
            Err(StabError::QubitOutOfRange { qubit: q, n: self.n })
        }
    }

    #[inline]
    fn col(&self, axis: Axis, q: usize) -> &[u64] {
        let w = self.words;
        match axis {
            Axis::X => &self.x[q * w..(q + 1) * w],
            Axis::Z => &self.z[q * w..(q + 1) * w],
        }
    }

    /// Rows anticommuting with the single-qubit Pauli `axis` on `q`.
    fn anticommuting_rows(&self, axis: Axis, q: usize) -> Vec<u64> {
        match axis {
            Axis::Z => self.col(Axis::X, q).to_vec(),
            Axis::X => self.col(Axis::Z, q).to_vec(),
        }
    }

    /// Both rows of every logical slot.
    fn logical_rows(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.words];
        for j in 0..self.n {
            if !get_bit(&self.stab, j) {
                set_bit(&mut out, j, true);
                set_bit(&mut out, self.n + j, true);
            }
        }
        out
    }

    fn partner(&self, r: usize) -> usize {
        if r < self.n {
            r + self.n
        } else {
            r - self.n
        }
    }

    /// Replaces every row `r` in `targets` by `row_r * row_p`.
    ///
    /// Signs are updated for all targets; a stabilizer row that would pick up
    /// an imaginary phase is an invariant violation.
    fn multiply_rows_by(&mut self, targets: &[u64], p: usize) -> Result<(), StabError> {
        let w = self.words;
        let mut lo = vec![0u64; w];
        let mut hi = vec![0u64; w];
        let active: Vec<usize> = (0..w).filter(|&k| targets[k] != 0).collect();
        if active.is_empty() {
            return Ok(());
        }
        for q in 0..self.n {
            let base = q * w;
            let xp = get_bit(&self.x[base..base + w], p);
            let zp = get_bit(&self.z[base..base + w], p);
            if !xp && !zp {
                continue;
            }
            for &k in &active {
                let t = targets[k];
                let xr = self.x[base + k] & t;
                let zr = self.z[base + k] & t;
                let (plus, minus) = match (xp, zp) {
                    (true, false) => (!xr & zr, xr & zr),
                    (false, true) => (xr & zr, xr & !zr),
                    _ => (xr & !zr, !xr & zr),
                };
                hi[k] ^= lo[k] & plus;
                lo[k] ^= plus;
                hi[k] ^= !lo[k] & minus;
                lo[k] ^= minus;
                if xp {
                    self.x[base + k] ^= t;
                }
                if zp {
                    self.z[base + k] ^= t;
                }
            }
        }
        let sp = if get_bit(&self.signs, p) { u64::MAX } else { 0 };
        for &k in &active {
            let t = targets[k];
            if lo[k] & t & self.stab[k] != 0 {
                return Err(StabError::ImaginaryPhase);
            }
            self.signs[k] ^= t & (hi[k] ^ sp);
        }
        Ok(())
    }

    /// Copies row `src` onto row `dst` (sign included).
    fn copy_row(&mut self, src: usize, dst: usize) {
        let w = self.words;
        for q in 0..self.n {
            let xs = &mut self.x[q * w..(q + 1) * w];
            let b = get_bit(xs, src);
            set_bit(xs, dst, b);
            let zs = &mut self.z[q * w..(q + 1) * w];
            let b = get_bit(zs, src);
            set_bit(zs, dst, b);
        }
        let b = get_bit(&self.signs, src);
        set_bit(&mut self.signs, dst, b);
    }

    /// Overwrites row `r` with the single-qubit Pauli `axis` on `q`, sign `+`.
    fn set_row_local(&mut self, r: usize, axis: Axis, q: usize) {
        let w = self.words;
        for c in 0..self.n {
            set_bit(&mut self.x[c * w..(c + 1) * w], r, false);
            set_bit(&mut self.z[c * w..(c + 1) * w], r, false);
        }
        match axis {
            Axis::X => set_bit(&mut self.x[q * w..(q + 1) * w], r, true),
            Axis::Z => set_bit(&mut self.z[q * w..(q + 1) * w], r, true),
        }
        set_bit(&mut self.signs, r, false);
    }

    /// Pivot step shared by measurement and dephasing: every row other than
    /// `p` and its partner that anticommutes with `axis_q` is multiplied by
    /// row `p`; row `p` then moves to its partner position and `axis_q`
    /// takes its place.
    fn pivot_replace(&mut self, axis: Axis, q: usize, p: usize, anti: &[u64]) -> Result<(), StabError> {
        let mut targets = anti.to_vec();
        set_bit(&mut targets, p, false);
        set_bit(&mut targets, self.partner(p), false);
        self.multiply_rows_by(&targets, p)?;
        self.copy_row(p, self.partner(p));
        self.set_row_local(p, axis, q);
        Ok(())
    }

    /// Sign of the product (in row order) of the stabilizer rows in `mask`,
    /// together with the product's x and z bits per qubit.
    fn product_of_rows(&self, mask: &[u64]) -> Result<(bool, Vec<(bool, bool)>), StabError> {
        let w = self.words;
        let mut phase: u32 = 0;
        let mut support = Vec::with_capacity(self.n);
        let mut zm = vec![0u64; w];
        let mut prefix = vec![0u64; w];
        for q in 0..self.n {
            let xs = &self.x[q * w..(q + 1) * w];
            let zs = &self.z[q * w..(q + 1) * w];
            let mut xz = 0u32;
            let mut xpar = 0u32;
            let mut zpar = 0u32;
            for k in 0..w {
                let xm = xs[k] & mask[k];
                zm[k] = zs[k] & mask[k];
                xz += (xm & zm[k]).count_ones();
                xpar += xm.count_ones();
                zpar += zm[k].count_ones();
            }
            exclusive_prefix_parity(&zm, &mut prefix);
            let mut cross = 0u32;
            for k in 0..w {
                cross += (prefix[k] & xs[k] & mask[k]).count_ones();
            }
            let (xb, zb) = (xpar % 2 == 1, zpar % 2 == 1);
            phase = phase.wrapping_add(xz + 2 * (cross % 2)).wrapping_sub((xb && zb) as u32);
            support.push((xb, zb));
        }
        let phase = phase % 4;
        if phase % 2 == 1 {
            return Err(StabError::ImaginaryPhase);
        }
        let sign_parity = self
            .signs
            .iter()
            .zip(mask)
            .map(|(s, m)| (s & m).count_ones())
            .sum::<u32>()
            % 2;
        Ok((((phase / 2) ^ sign_parity) == 1, support))
    }

    /// Measures `axis_q`; `random_minus` supplies the outcome when it is not
    /// fixed by the state.
    fn measure_axis(&mut self, axis: Axis, q: usize, random_minus: bool) -> Result<Measurement, StabError> {
        let anti = self.anticommuting_rows(axis, q);
        let anti_stab: Vec<u64> = anti.iter().zip(&self.stab).map(|(a, s)| a & s).collect();
        if let Some(p) = first_set(&anti_stab) {
            self.pivot_replace(axis, q, p, &anti)?;
            set_bit(&mut self.signs, p, random_minus);
            return Ok(Measurement {
                outcome: Outcome::from_bit(random_minus),
                deterministic: false,
            });
        }

        let logical = self.logical_rows();
        let anti_log: Vec<u64> = anti.iter().zip(&logical).map(|(a, l)| a & l).collect();
        if let Some(a) = first_set(&anti_log) {
            let slot = a % self.n;
            let b = self.partner(a);
            let mut targets = anti.clone();
            set_bit(&mut targets, a, false);
            set_bit(&mut targets, b, false);
            self.multiply_rows_by(&targets, a)?;
            if a != self.n + slot {
                self.copy_row(a, self.n + slot);
            }
            self.set_row_local(slot, axis, q);
            set_bit(&mut self.signs, slot, random_minus);
            set_bit(&mut self.stab, slot, true);
            self.k += 1;
            return Ok(Measurement {
                outcome: Outcome::from_bit(random_minus),
                deterministic: false,
            });
        }

        // The operator lies in the group: it is the product of the
        // stabilizers whose destabilizers anticommute with it.
        let mut members = vec![0u64; self.words];
        for r in iter_ones(&anti) {
            debug_assert!(r >= self.n);
            set_bit(&mut members, r - self.n, true);
        }
        let (minus, support) = self.product_of_rows(&members)?;
        if cfg!(debug_assertions) {
            for (c, &(xb, zb)) in support.iter().enumerate() {
                let expect = if c == q {
                    (axis == Axis::X, axis == Axis::Z)
                } else {
                    (false, false)
                };
                if (xb, zb) != expect {
                    return Err(StabError::Invariant(format!(
                        "deterministic measurement product does not reduce to a local Pauli on qubit {q}"
                    )));
                }
            }
        }
        Ok(Measurement {
            outcome: Outcome::from_bit(minus),
            deterministic: true,
        })
    }

    /// Projective Z measurement of qubit `q`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Measurement, StabError> {
        self.check_qubit(q)?;
        let bit = rng.random::<bool>();
        self.measure_axis(Axis::Z, q, bit)
    }

    /// Z measurement where `minus_if_random` decides the outcome whenever the
    /// state does not.
    pub fn measure_z_with(&mut self, q: usize, minus_if_random: bool) -> Result<Measurement, StabError> {
        self.check_qubit(q)?;
        self.measure_axis(Axis::Z, q, minus_if_random)
    }

    /// Outcome of a Z measurement if it is deterministic, without changing
    /// the state.
    pub fn peek_z(&self, q: usize) -> Result<Option<Outcome>, StabError> {
        self.check_qubit(q)?;
        let anti = self.anticommuting_rows(Axis::Z, q);
        let stab_or_log: Vec<u64> = anti
            .iter()
            .zip(self.stab.iter().zip(self.logical_rows()))
            .map(|(a, (s, l))| a & (s | l))
            .collect();
        if first_set(&stab_or_log).is_some() {
            return Ok(None);
        }
        let mut members = vec![0u64; self.words];
        for r in iter_ones(&anti) {
            set_bit(&mut members, r - self.n, true);
        }
        let (minus, _) = self.product_of_rows(&members)?;
        Ok(Some(Outcome::from_bit(minus)))
    }

    fn dephase_axis(&mut self, axis: Axis, q: usize) -> Result<(), StabError> {
        let anti = self.anticommuting_rows(axis, q);
        let anti_stab: Vec<u64> = anti.iter().zip(&self.stab).map(|(a, s)| a & s).collect();
        if let Some(p) = first_set(&anti_stab) {
            self.pivot_replace(axis, q, p, &anti)?;
            set_bit(&mut self.stab, p, false);
            set_bit(&mut self.signs, p, false);
            self.k -= 1;
        }
        Ok(())
    }

    /// Dephasing channel `rho -> sum_j P_j rho P_j` in the Z basis of `q`.
    pub fn dephase(&mut self, q: usize) -> Result<(), StabError> {
        self.check_qubit(q)?;
        self.dephase_axis(Axis::Z, q)
    }

    /// Reset channel `rho -> tr_q(rho) (x) |0><0|_q`.
    pub fn reset(&mut self, q: usize) -> Result<(), StabError> {
        self.check_qubit(q)?;
        // Dephasing along Z and X leaves exactly the group elements acting
        // trivially on q, i.e. the group of tr_q(rho).
        self.dephase_axis(Axis::Z, q)?;
        self.dephase_axis(Axis::X, q)?;
        let m = self.measure_axis(Axis::Z, q, false)?;
        if m.deterministic || m.outcome != Outcome::Plus {
            return Err(StabError::Invariant(format!("reset of qubit {q} did not purify it")));
        }
        Ok(())
    }

    pub fn apply_clifford2(&mut self, gate: &TwoQubitClifford, a: usize, b: usize) -> Result<(), StabError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(StabError::SameQubit(a));
        }
        let kernel = gate.kernel();
        let w = self.words;
        let (ba, bb) = (a * w, b * w);
        let anf = kernel.sign_anf;
        for k in 0..w {
            let input = [self.x[ba + k], self.z[ba + k], self.x[bb + k], self.z[bb + k]];
            let mut out = [0u64; 4];
            for (o, mask) in kernel.out_masks.iter().enumerate() {
                let mut v = 0u64;
                for (i, word) in input.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        v ^= word;
                    }
                }
                out[o] = v;
            }
            let mut flip = 0u64;
            let mut monomials = anf;
            while monomials != 0 {
                let m = monomials.trailing_zeros();
                monomials &= monomials - 1;
                let mut prod = u64::MAX;
                for (i, word) in input.iter().enumerate() {
                    if m & (1 << i) != 0 {
                        prod &= word;
                    }
                }
                flip ^= prod;
            }
            self.x[ba + k] = out[0];
            self.z[ba + k] = out[1];
            self.x[bb + k] = out[2];
            self.z[bb + k] = out[3];
            self.signs[k] ^= flip;
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<(), StabError> {
        self.check_qubit(q)?;
        let w = self.words;
        for k in 0..w {
            let (xv, zv) = (self.x[q * w + k], self.z[q * w + k]);
            self.x[q * w + k] = zv;
            self.z[q * w + k] = xv;
            self.signs[k] ^= xv & zv;
        }
        Ok(())
    }

    pub fn apply_s(&mut self, q: usize) -> Result<(), StabError> {
        self.check_qubit(q)?;
        let w = self.words;
        for k in 0..w {
            let (xv, zv) = (self.x[q * w + k], self.z[q * w + k]);
            self.signs[k] ^= xv & zv;
            self.z[q * w + k] = zv ^ xv;
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<(), StabError> {
        self.check_qubit(q)?;
        let w = self.words;
        for k in 0..w {
            self.signs[k] ^= self.z[q * w + k];
        }
        Ok(())
    }

    pub fn apply_z(&mut self, q: usize) -> Result<(), StabError> {
        self.check_qubit(q)?;
        let w = self.words;
        for k in 0..w {
            self.signs[k] ^= self.x[q * w + k];
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), StabError> {
        self.apply_clifford2(&TwoQubitClifford::cnot(), control, target)
    }

    /// Appends a fresh qubit in `|0>`; returns its index.
    pub fn append_qubit(&mut self) -> usize {
        let (n, w) = (self.n, self.words);
        let n2 = n + 1;
        let w2 = words_for(2 * n2);
        let remap = |src: &[u64], dst: &mut [u64]| {
            for r in iter_ones(src) {
                let r2 = if r < n { r } else { r + 1 };
                set_bit(dst, r2, true);
            }
        };
        let mut x = vec![0u64; n2 * w2];
        let mut z = vec![0u64; n2 * w2];
        for q in 0..n {
            remap(&self.x[q * w..(q + 1) * w], &mut x[q * w2..(q + 1) * w2]);
            remap(&self.z[q * w..(q + 1) * w], &mut z[q * w2..(q + 1) * w2]);
        }
        let mut signs = vec![0u64; w2];
        remap(&self.signs, &mut signs);
        let mut stab = vec![0u64; w2];
        remap(&self.stab, &mut stab);
        set_bit(&mut z[n * w2..(n + 1) * w2], n, true);
        set_bit(&mut x[n * w2..(n + 1) * w2], 2 * n + 1, true);
        set_bit(&mut stab, n, true);
        *self = Self {
            n: n2,
            words: w2,
            x,
            z,
            signs,
            stab,
            k: self.k + 1,
        };
        n
    }

    /// Entanglement entropy of `region` in bits:
    /// `|A| - k + rank(generators restricted to the complement of A)`.
    ///
    /// Panics if the region contains a site outside `0..n`.
    pub fn entropy(&self, region: &Region) -> usize {
        if let Some(&last) = region.sites().last() {
            assert!(last < self.n, "region site {last} outside a {}-qubit state", self.n);
        }
        if region.is_empty() {
            return 0;
        }
        let size = region.len();
        if size == self.n {
            return self.total_entropy();
        }
        let stride = words_for(self.n);
        let w = self.words;
        let mut data = Vec::with_capacity(2 * (self.n - size) * stride);
        let mut rows = 0;
        for q in (0..self.n).filter(|&q| !region.contains(q)) {
            for col in [&self.x[q * w..(q + 1) * w], &self.z[q * w..(q + 1) * w]] {
                let start = data.len();
                data.extend(col[..stride].iter().zip(&self.stab).map(|(c, s)| c & s));
                if data[start..].iter().all(|&v| v == 0) {
                    data.truncate(start);
                } else {
                    rows += 1;
                }
            }
        }
        let r = rank_of_rows(data, rows, stride);
        size + r - self.k
    }

    /// Checks the symplectic-frame invariants. `O(n^2 * n / 64)`.
    pub fn validate(&self) -> Result<(), StabError> {
        let (n, w) = (self.n, self.words);
        if self.k != self.stab.iter().map(|s| s.count_ones() as usize).sum::<usize>() {
            return Err(StabError::Invariant("rank does not match stabilizer slot count".into()));
        }
        if iter_ones(&self.stab).any(|j| j >= n) {
            return Err(StabError::Invariant("stabilizer flag outside primary rows".into()));
        }
        let rows = 2 * n;
        let tail = rows % WORD_BITS;
        if tail != 0 {
            for q in 0..n {
                let last = (q + 1) * w - 1;
                if (self.x[last] | self.z[last]) >> tail != 0 {
                    return Err(StabError::Invariant("bits set beyond the last row".into()));
                }
            }
        }
        let mut acc = vec![0u64; w];
        for r in 0..rows {
            acc.iter_mut().for_each(|v| *v = 0);
            for q in 0..n {
                let xs = &self.x[q * w..(q + 1) * w];
                let zs = &self.z[q * w..(q + 1) * w];
                let (xr, zr) = (get_bit(xs, r), get_bit(zs, r));
                if xr {
                    acc.iter_mut().zip(zs).for_each(|(a, v)| *a ^= v);
                }
                if zr {
                    acc.iter_mut().zip(xs).for_each(|(a, v)| *a ^= v);
                }
            }
            let mut expect = vec![0u64; w];
            set_bit(&mut expect, self.partner(r), true);
            if acc != expect {
                return Err(StabError::Invariant(format!(
                    "row {r} has wrong commutation relations with the frame"
                )));
            }
        }
        Ok(())
    }

    /// Stabilizer generators in reduced row-echelon form. Two states are
    /// equal iff their canonical generators are equal.
    pub fn canonical_generators(&self) -> Vec<PauliString> {
        let n = self.n;
        let mut gens = self.generators();
        let bit = |p: &PauliString, col: usize| {
            let (xb, zb) = p.get(col / 2).bits();
            if col % 2 == 0 {
                xb
            } else {
                zb
            }
        };
        let mut rank = 0;
        for col in 0..2 * n {
            let Some(pivot) = (rank..gens.len()).find(|&r| bit(&gens[r], col)) else {
                continue;
            };
            gens.swap(rank, pivot);
            let pivot_row = gens[rank].clone();
            for r in 0..gens.len() {
                if r != rank && bit(&gens[r], col) {
                    gens[r] = gens[r].mul(&pivot_row).expect("stabilizers commute");
                }
            }
            rank += 1;
        }
        gens
    }

    /// Test hook: silently drops the first stabilizer generator, producing a
    /// state that no longer matches the circuit that built it.
    #[doc(hidden)]
    pub fn corrupt_drop_generator(&mut self) -> bool {
        match first_set(&self.stab) {
            Some(j) => {
                flip_bit(&mut self.stab, j);
                self.k -= 1;
                true
            }
            None => false,
        }
    }
}
