//! Two-qubit Clifford gates stored as Pauli images, and uniform sampling of
//! the two-qubit Clifford group modulo global phase.
//!
//! A two-qubit Pauli is packed into four bits `(x_a, z_a, x_b, z_b)` at bit
//! positions `0..4`, where `a` is the gate's first qubit and `b` its second.
//! A gate is fixed (up to phase) by the signed images of `X_a, Z_a, X_b, Z_b`.
//!
//! Alongside the images each gate carries a compiled kernel: the linear map on
//! the four input bits, plus the sign flip written in algebraic normal form so
//! it can be evaluated on 64 tableau rows at once with `AND`/`XOR`.

use std::sync::OnceLock;

use rand::Rng;

use crate::error::StabError;
use crate::pauli::{product_phase, Pauli, PauliString};

/// Number of two-qubit Cliffords modulo global phase: |Sp(4,2)| * 2^4.
pub const CLIFFORD2_ORDER: usize = 11520;

/// A signed two-qubit Pauli in packed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli2 {
    pub bits: u8,
    pub negative: bool,
}

impl SignedPauli2 {
    pub const fn new(bits: u8, negative: bool) -> Self {
        Self { bits, negative }
    }

    pub fn to_pauli_string(self) -> PauliString {
        let p = |x: u8, z: u8| Pauli::from_bits(self.bits & x != 0, self.bits & z != 0);
        PauliString::from_paulis(&[p(1, 2), p(4, 8)], self.negative)
    }
}

/// Symplectic product of two packed two-qubit Paulis.
#[inline]
pub(crate) fn anticommute2(u: u8, v: u8) -> bool {
    let cross = |u: u8, v: u8| ((u & 0b0101) & ((v & 0b1010) >> 1)).count_ones();
    (cross(u, v) + cross(v, u)) % 2 == 1
}

/// Phase exponent of `C(u) C(v) = i^g C(u ^ v)` for packed two-qubit Paulis.
fn product_phase2(u: u8, v: u8) -> i32 {
    let b = |w: u8, k: u8| w & (1 << k) != 0;
    product_phase(b(u, 0), b(u, 1), b(v, 0), b(v, 1))
        + product_phase(b(u, 2), b(u, 3), b(v, 2), b(v, 3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Kernel {
    /// `out_masks[o]` lists the input bits XORed into output bit `o`.
    pub out_masks: [u8; 4],
    /// Algebraic normal form of the sign flip; bit `m` is the monomial
    /// `prod_{k in m} input_k`.
    pub sign_anf: u16,
}

/// A two-qubit Clifford element, given by its action on `X_a, Z_a, X_b, Z_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoQubitClifford {
    images: [SignedPauli2; 4],
    kernel: Kernel,
}

impl TwoQubitClifford {
    /// Builds a gate from the images of `X_a, Z_a, X_b, Z_b`.
    pub fn from_images(images: [SignedPauli2; 4]) -> Result<Self, StabError> {
        for (k, img) in images.iter().enumerate() {
            if img.bits == 0 || img.bits > 0xF {
                return Err(StabError::Invariant(format!("image {k} is not a valid non-identity Pauli")));
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let partners = (i == 0 && j == 1) || (i == 2 && j == 3);
                if anticommute2(images[i].bits, images[j].bits) != partners {
                    return Err(StabError::Invariant(format!(
                        "images {i} and {j} violate the symplectic condition"
                    )));
                }
            }
        }
        Ok(Self::from_images_unchecked(images))
    }

    fn from_images_unchecked(images: [SignedPauli2; 4]) -> Self {
        let mut out_masks = [0u8; 4];
        for (o, mask) in out_masks.iter_mut().enumerate() {
            for (k, img) in images.iter().enumerate() {
                if img.bits & (1 << o) != 0 {
                    *mask |= 1 << k;
                }
            }
        }
        let mut gate = Self {
            images,
            kernel: Kernel {
                out_masks,
                sign_anf: 0,
            },
        };
        let mut anf = [0u8; 16];
        for (v, a) in anf.iter_mut().enumerate() {
            *a = gate.conjugate(SignedPauli2::new(v as u8, false)).negative as u8;
        }
        for i in 0..4 {
            for v in 0..16 {
                if v & (1 << i) != 0 {
                    anf[v] ^= anf[v ^ (1 << i)];
                }
            }
        }
        gate.kernel.sign_anf = anf
            .iter()
            .enumerate()
            .fold(0u16, |acc, (m, &a)| acc | ((a as u16) << m));
        debug_assert_eq!(gate.kernel.sign_anf & 1, 0);
        gate
    }

    pub fn images(&self) -> [SignedPauli2; 4] {
        self.images
    }

    pub(crate) fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Conjugates a signed two-qubit Pauli: returns `U P U^dagger`.
    pub fn conjugate(&self, p: SignedPauli2) -> SignedPauli2 {
        let v = p.bits;
        let mut phase: i32 = 2 * p.negative as i32;
        // C(v) = i^{x_a z_a + x_b z_b} X_a^x Z_a^z X_b^x Z_b^z
        phase += ((v & 1) & ((v >> 1) & 1)) as i32 + (((v >> 2) & 1) & ((v >> 3) & 1)) as i32;
        let mut acc = 0u8;
        for (k, img) in self.images.iter().enumerate() {
            if v & (1 << k) != 0 {
                phase += 2 * img.negative as i32 + product_phase2(acc, img.bits);
                acc ^= img.bits;
            }
        }
        let phase = phase.rem_euclid(4);
        debug_assert_eq!(phase % 2, 0, "Clifford image picked up an imaginary phase");
        SignedPauli2::new(acc, phase == 2)
    }

    pub fn identity() -> Self {
        Self::from_images_unchecked([
            SignedPauli2::new(0b0001, false),
            SignedPauli2::new(0b0010, false),
            SignedPauli2::new(0b0100, false),
            SignedPauli2::new(0b1000, false),
        ])
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Self {
        Self::from_images_unchecked([
            SignedPauli2::new(0b0101, false),
            SignedPauli2::new(0b0010, false),
            SignedPauli2::new(0b0100, false),
            SignedPauli2::new(0b1010, false),
        ])
    }

    pub fn cz() -> Self {
        Self::from_images_unchecked([
            SignedPauli2::new(0b1001, false),
            SignedPauli2::new(0b0010, false),
            SignedPauli2::new(0b0110, false),
            SignedPauli2::new(0b1000, false),
        ])
    }

    pub fn swap() -> Self {
        Self::from_images_unchecked([
            SignedPauli2::new(0b0100, false),
            SignedPauli2::new(0b1000, false),
            SignedPauli2::new(0b0001, false),
            SignedPauli2::new(0b0010, false),
        ])
    }

    /// Hadamard on the first qubit, identity on the second.
    pub fn hadamard_first() -> Self {
        Self::from_images_unchecked([
            SignedPauli2::new(0b0010, false),
            SignedPauli2::new(0b0001, false),
            SignedPauli2::new(0b0100, false),
            SignedPauli2::new(0b1000, false),
        ])
    }

    /// Gate applying `self` first and then `next`.
    pub fn then(&self, next: &TwoQubitClifford) -> Self {
        Self::from_images_unchecked(self.images.map(|img| next.conjugate(img)))
    }

    pub fn inverse(&self) -> Self {
        let mut images = [SignedPauli2::new(0, false); 4];
        for (k, slot) in images.iter_mut().enumerate() {
            let target = 1u8 << k;
            let v = (1u8..16)
                .find(|&v| self.conjugate(SignedPauli2::new(v, false)).bits == target)
                .expect("Clifford images span the Pauli group");
            let img = self.conjugate(SignedPauli2::new(v, false));
            *slot = SignedPauli2::new(v, img.negative);
        }
        Self::from_images_unchecked(images)
    }

    pub fn is_identity(&self) -> bool {
        self.images == Self::identity().images
    }

    /// Decodes a mixed-radix choice index in `0..CLIFFORD2_ORDER`.
    ///
    /// The digits pick, in order: the image of `X_a` among the 15 non-identity
    /// Paulis; the image of `Z_a` among the 8 Paulis anticommuting with it; the
    /// image of `X_b` among the 3 non-identity Paulis commuting with both; the
    /// image of `Z_b` among the 2 of those anticommuting with it; and 4 sign
    /// bits. Distinct indices give distinct gates, so a uniform index is a
    /// uniform group element.
    pub fn from_index(index: usize) -> Self {
        assert!(index < CLIFFORD2_ORDER, "Clifford index {index} out of range");
        let signs = index % 16;
        let mut rest = index / 16;
        let d_choice = rest % 2;
        rest /= 2;
        let c_choice = rest % 3;
        rest /= 3;
        let b_choice = rest % 8;
        let a = (rest / 8 + 1) as u8;

        let b = (1u8..16)
            .filter(|&v| anticommute2(a, v))
            .nth(b_choice)
            .expect("8 anticommuting partners");
        let c = (1u8..16)
            .filter(|&v| !anticommute2(a, v) && !anticommute2(b, v))
            .nth(c_choice)
            .expect("3 commuting complements");
        let d = (1u8..16)
            .filter(|&v| !anticommute2(a, v) && !anticommute2(b, v) && anticommute2(c, v))
            .nth(d_choice)
            .expect("2 partners in the complement");
        let s = |k: usize| signs & (1 << k) != 0;
        Self::from_images_unchecked([
            SignedPauli2::new(a, s(0)),
            SignedPauli2::new(b, s(1)),
            SignedPauli2::new(c, s(2)),
            SignedPauli2::new(d, s(3)),
        ])
    }
}

fn clifford_table() -> &'static [TwoQubitClifford] {
    static TABLE: OnceLock<Vec<TwoQubitClifford>> = OnceLock::new();
    TABLE.get_or_init(|| (0..CLIFFORD2_ORDER).map(TwoQubitClifford::from_index).collect())
}

/// Samples a uniformly random two-qubit Clifford (modulo global phase).
pub fn random_two_qubit_clifford<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitClifford {
    clifford_table()[rng.random_range(0..CLIFFORD2_ORDER)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};
    use std::collections::HashSet;

    fn valid(g: &TwoQubitClifford) -> bool {
        TwoQubitClifford::from_images(g.images()).is_ok()
    }

    #[test]
    fn named_gates_are_symplectic() {
        for g in [
            TwoQubitClifford::identity(),
            TwoQubitClifford::cnot(),
            TwoQubitClifford::cz(),
            TwoQubitClifford::swap(),
            TwoQubitClifford::hadamard_first(),
        ] {
            assert!(valid(&g));
        }
    }

    #[test]
    fn cnot_maps_y_correctly() {
        // CNOT: Y_a -> Y_a X_b, Y_b -> Z_a Y_b
        let g = TwoQubitClifford::cnot();
        assert_eq!(g.conjugate(SignedPauli2::new(0b0011, false)), SignedPauli2::new(0b0111, false));
        assert_eq!(g.conjugate(SignedPauli2::new(0b1100, false)), SignedPauli2::new(0b1110, false));
        // H maps Y to -Y
        let h = TwoQubitClifford::hadamard_first();
        assert_eq!(h.conjugate(SignedPauli2::new(0b0011, false)), SignedPauli2::new(0b0011, true));
    }

    #[test]
    fn all_indices_distinct_and_valid() {
        let table = clifford_table();
        let distinct: HashSet<_> = table.iter().map(|g| g.images()).collect();
        assert_eq!(distinct.len(), CLIFFORD2_ORDER);
        assert!(table.iter().all(valid));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = derive_stream(SeedSpec::new(11, 0));
        for _ in 0..1000 {
            let g = random_two_qubit_clifford(&mut rng);
            assert!(g.then(&g.inverse()).is_identity());
            assert!(g.inverse().then(&g).is_identity());
        }
    }

    #[test]
    fn composition_matches_sequential_conjugation() {
        let mut rng = derive_stream(SeedSpec::new(12, 0));
        for _ in 0..200 {
            let g = random_two_qubit_clifford(&mut rng);
            let h = random_two_qubit_clifford(&mut rng);
            let gh = g.then(&h);
            for v in 1u8..16 {
                for neg in [false, true] {
                    let p = SignedPauli2::new(v, neg);
                    assert_eq!(gh.conjugate(p), h.conjugate(g.conjugate(p)));
                }
            }
        }
    }

    #[test]
    fn kernel_reproduces_conjugation_table() {
        for g in clifford_table().iter().step_by(37) {
            let k = g.kernel();
            for v in 0u8..16 {
                let bit = |k: u8| (v >> k) & 1;
                let mut out = 0u8;
                for (o, mask) in k.out_masks.iter().enumerate() {
                    let b = (0..4).filter(|&i| mask & (1 << i) != 0).fold(0, |acc, i| acc ^ bit(i));
                    out |= b << o;
                }
                let sign = (0..16u8)
                    .filter(|&m| k.sign_anf & (1 << m) != 0)
                    .map(|m| (0..4).all(|i| m & (1 << i) == 0 || bit(i) == 1) as u8)
                    .fold(0, |a, b| a ^ b);
                let expect = g.conjugate(SignedPauli2::new(v, false));
                assert_eq!(out, expect.bits);
                assert_eq!(sign == 1, expect.negative);
            }
        }
    }

    #[test]
    fn rejects_non_symplectic_images() {
        let bad = [
            SignedPauli2::new(0b0001, false),
            SignedPauli2::new(0b0001, false),
            SignedPauli2::new(0b0100, false),
            SignedPauli2::new(0b1000, false),
        ];
        assert!(TwoQubitClifford::from_images(bad).is_err());
    }
}
