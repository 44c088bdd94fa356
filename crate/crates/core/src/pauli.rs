//! Signed Pauli strings in symplectic (x, z) form.

use std::fmt;
use std::str::FromStr;

use crate::bits::{get_bit, set_bit, words_for};
use crate::error::StabError;

/// A single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// Exponent `g` such that `P(x1, z1) P(x2, z2) = i^g P(x1 ^ x2, z1 ^ z2)`,
/// with `P(1, 1) = Y`.
#[inline]
pub(crate) fn product_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// An n-qubit Pauli operator with a real sign.
///
/// Products of anticommuting strings would carry a phase of ±i; those are
/// rejected with [`StabError::ImaginaryPhase`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            negative: false,
        }
    }

    /// `+P` acting on qubit `q` only.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    pub fn from_paulis(paulis: &[Pauli], negative: bool) -> Self {
        let mut s = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            s.set(q, p);
        }
        s.negative = negative;
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Sign as ±1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(get_bit(&self.x, q), get_bit(&self.z, q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (x, z) = p.bits();
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    pub fn x_bits(&self) -> &[u64] {
        &self.x
    }

    pub fn z_bits(&self) -> &[u64] {
        &self.z
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let odd = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum::<u32>();
        odd % 2 == 0
    }

    /// `self * other`, which must carry a real sign.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString, StabError> {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let mut phase = 2 * (self.negative as i32) + 2 * (other.negative as i32);
        for q in 0..self.n {
            phase += product_phase(
                get_bit(&self.x, q),
                get_bit(&self.z, q),
                get_bit(&other.x, q),
                get_bit(&other.z, q),
            );
        }
        let phase = phase.rem_euclid(4);
        if phase % 2 == 1 {
            return Err(StabError::ImaginaryPhase);
        }
        Ok(PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            negative: phase == 2,
        })
    }

    /// Same operator up to sign.
    pub fn same_support(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        for q in 0..self.n {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = StabError;

    /// Parses strings such as `"+XZI"`, `"-YY"` or `"ZZ"` (qubit 0 first).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let paulis = body
            .chars()
            .map(|c| match c {
                'I' | '_' | '.' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(StabError::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if paulis.is_empty() {
            return Err(StabError::Parse("empty Pauli string".into()));
        }
        Ok(Self::from_paulis(&paulis, negative))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        // XZ = -iY is imaginary, XX = I, ZY = -iX is imaginary.
        assert!(matches!(p("X").mul(&p("Z")), Err(StabError::ImaginaryPhase)));
        assert_eq!(p("X").mul(&p("X")).unwrap(), p("+I"));
        assert_eq!(product_phase(true, false, false, true), -1);
        assert_eq!(product_phase(false, true, true, false), 1);
        assert_eq!(product_phase(true, true, true, false), -1);
    }

    #[test]
    fn two_qubit_products_carry_sign() {
        // (X⊗X)(Z⊗Z) = (XZ)⊗(XZ) = (-iY)(-iY) = -YY
        assert_eq!(p("XX").mul(&p("ZZ")).unwrap(), p("-YY"));
        assert_eq!(p("-XX").mul(&p("ZZ")).unwrap(), p("+YY"));
        assert_eq!(p("YY").mul(&p("XX")).unwrap(), p("-ZZ"));
    }

    #[test]
    fn commutation() {
        assert!(p("XX").commutes_with(&p("ZZ")));
        assert!(!p("XI").commutes_with(&p("ZI")));
        assert!(p("XI").commutes_with(&p("IZ")));
        assert!(p("XYZ").commutes_with(&p("ZZZ")));
        assert!(!p("XIZ").commutes_with(&p("ZZZ")));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["+XYZI", "-ZZ", "+I"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("+XQ".parse::<PauliString>().is_err());
        assert_eq!(p("IXIY").weight(), 2);
    }
}
