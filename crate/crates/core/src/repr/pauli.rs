//! Exact monomial operators of the form `i^e · X(a) · Z(c)`.
//!
//! On the index space of `q` bits, `X(a)` XORs the basis index with the mask
//! `a` and `Z(c)` multiplies basis vector `b` by `(-1)^{|b ∧ c|}`. Every
//! generator built in this crate is of this shape, products and adjoints
//! stay in it, and relation checks, traces and norms of differences reduce to
//! integer mask arithmetic — no floating-point error, and no dense
//! materialization for state-level checks at large dimension.

use super::operator::Operator;
use crate::word::Phase;
use num_complex::Complex64;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PauliOp {
    qubits: u32,
    phase: Phase,
    x: u64,
    z: u64,
}

impl PauliOp {
    pub fn new(qubits: u32, phase: Phase, x: u64, z: u64) -> Self {
        assert!(qubits <= 63, "mask operators support at most 63 bits");
        let mask = if qubits == 0 { 0 } else { (1u64 << qubits) - 1 };
        assert_eq!(x & !mask, 0, "x mask exceeds the qubit count");
        assert_eq!(z & !mask, 0, "z mask exceeds the qubit count");
        Self { qubits, phase, x, z }
    }

    pub fn identity(qubits: u32) -> Self {
        Self::new(qubits, Phase::ONE, 0, 0)
    }

    pub fn flip_at(qubits: u32, q: u32) -> Self {
        Self::new(qubits, Phase::ONE, 1 << q, 0)
    }

    pub fn sign_at(qubits: u32, q: u32) -> Self {
        Self::new(qubits, Phase::ONE, 0, 1 << q)
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[must_use]
    pub fn scaled(&self, p: Phase) -> Self {
        Self {
            phase: self.phase.mul(p),
            ..*self
        }
    }

    /// Matrix product. `Z(c)·X(a) = (-1)^{|c ∧ a|} X(a)·Z(c)` reorders the
    /// inner factors.
    #[must_use]
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.qubits, other.qubits, "qubit count mismatch");
        let mut phase = self.phase.mul(other.phase);
        if (self.z & other.x).count_ones() % 2 == 1 {
            phase = phase.negate();
        }
        Self {
            qubits: self.qubits,
            phase,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    #[must_use]
    pub fn adjoint(&self) -> Self {
        let mut phase = self.phase.conj();
        if (self.x & self.z).count_ones() % 2 == 1 {
            phase = phase.negate();
        }
        Self {
            phase,
            ..*self
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Column `b` of the matrix: the row index and the amplitude.
    #[inline]
    pub fn column(&self, b: u64) -> (u64, Phase) {
        let mut p = self.phase;
        if (b & self.z).count_ones() % 2 == 1 {
            p = p.negate();
        }
        (b ^ self.x, p)
    }

    pub fn trace(&self) -> Complex64 {
        if self.x == 0 && self.z == 0 {
            self.phase.to_complex() * self.dim() as f64
        } else {
            Complex64::ZERO
        }
    }

    /// `‖self − other‖`, exactly.
    ///
    /// With `Q = self† · other = i^g · X(a)Z(c)`, the difference satisfies
    /// `D†D = 2 − (Q + Q†)`, and the spectrum of `X(a)Z(c)` is `{±1}` or
    /// `{±i}` according to the parity of `|a ∧ c|`, so the top eigenvalue is
    /// `2 + 2|Re i^g|` or `2 + 2|Im i^g|`. When the masks agree the operators
    /// differ by a scalar and the norm is that scalar distance.
    pub fn sub_norm(&self, other: &Self) -> f64 {
        assert_eq!(self.qubits, other.qubits, "qubit count mismatch");
        if self.x == other.x && self.z == other.z {
            return (self.phase.to_complex() - other.phase.to_complex()).norm();
        }
        let q = self.adjoint().mul(other);
        let g = q.phase.to_complex();
        let spread = if (q.x & q.z).count_ones() % 2 == 0 {
            g.re.abs()
        } else {
            g.im.abs()
        };
        (2.0 + 2.0 * spread).sqrt()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "state dimension mismatch");
        let mut out = vec![Complex64::ZERO; v.len()];
        for (b, &amp) in v.iter().enumerate() {
            let (row, p) = self.column(b as u64);
            out[row as usize] = p.to_complex() * amp;
        }
        out
    }

    pub fn to_dense(&self) -> Operator {
        let mut m = Operator::zeros(self.dim());
        for b in 0..self.dim() as u64 {
            let (row, p) = self.column(b);
            m.set(row as usize, b as usize, p.to_complex());
        }
        m
    }

    /// An orthonormal eigenbasis of a self-adjoint mask operator.
    ///
    /// Diagonal operators (`x = 0`) have the standard basis; otherwise the
    /// index pairs `{b, b ⊕ x}` carry the eigenvectors
    /// `(e_b ± α e_{b⊕x})/√2` where `α` is the amplitude of `e_b ↦ e_{b⊕x}`.
    /// Each returned vector has at most two entries.
    pub fn eigenbasis(&self) -> Vec<EigenVector> {
        assert!(self.is_self_adjoint(), "eigenbasis requires a self-adjoint operator");
        let dim = self.dim() as u64;
        let mut basis = Vec::with_capacity(dim as usize);
        if self.x == 0 {
            for b in 0..dim {
                let (_, p) = self.column(b);
                basis.push(EigenVector {
                    value: p.to_complex().re,
                    entries: vec![(b, Complex64::ONE)],
                });
            }
        } else {
            let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            for b in 0..dim {
                let partner = b ^ self.x;
                if b > partner {
                    continue;
                }
                let (_, p) = self.column(b);
                let alpha = p.to_complex();
                for value in [1.0, -1.0] {
                    basis.push(EigenVector {
                        value,
                        entries: vec![(b, inv_sqrt2), (partner, alpha * value * inv_sqrt2)],
                    });
                }
            }
        }
        basis
    }
}

/// A sparse unit eigenvector (at most two nonzero amplitudes).
#[derive(Clone, Debug)]
pub struct EigenVector {
    pub value: f64,
    pub entries: Vec<(u64, Complex64)>,
}

impl EigenVector {
    /// `⟨ξ, op·ξ⟩` for this sparse vector.
    pub fn expectation(&self, op: &PauliOp) -> Complex64 {
        let mut total = Complex64::ZERO;
        for &(idx, amp) in &self.entries {
            let (row, p) = op.column(idx);
            // Find the conjugate amplitude of ξ at the image index.
            for &(jdx, jamp) in &self.entries {
                if jdx == row {
                    total += jamp.conj() * p.to_complex() * amp;
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn z1() -> PauliOp {
        PauliOp::sign_at(1, 0)
    }

    fn x1() -> PauliOp {
        PauliOp::flip_at(1, 0)
    }

    #[test]
    fn products_match_dense() {
        let ops = [
            PauliOp::identity(2),
            PauliOp::new(2, Phase::I, 0b01, 0b10),
            PauliOp::new(2, Phase::MINUS_ONE, 0b11, 0b01),
            PauliOp::new(2, Phase::ONE, 0b10, 0b10),
        ];
        for a in &ops {
            for b in &ops {
                let exact = a.mul(b).to_dense();
                let dense = a.to_dense().mul(&b.to_dense());
                assert!(exact.sub(&dense).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn adjoints_match_dense() {
        let ops = [
            PauliOp::new(3, Phase::I, 0b101, 0b011),
            PauliOp::new(3, Phase::MINUS_I, 0b010, 0b010),
            PauliOp::new(3, Phase::ONE, 0b111, 0b111),
        ];
        for a in &ops {
            let exact = a.adjoint().to_dense();
            let dense = a.to_dense().adjoint();
            assert!(exact.sub(&dense).max_abs() < 1e-15);
        }
    }

    #[test]
    fn anticommutation_of_flip_and_sign() {
        assert!(!z1().commutes_with(&x1()));
        assert!(z1().commutes_with(&z1()));
        let zx = z1().mul(&x1());
        let xz = x1().mul(&z1());
        assert_eq!(zx, xz.scaled(crate::word::Phase::MINUS_ONE));
    }

    #[test]
    fn sub_norm_matches_dense_norm() {
        let ops = [
            PauliOp::identity(2),
            PauliOp::new(2, Phase::I, 0b01, 0b10),
            PauliOp::new(2, Phase::MINUS_ONE, 0b11, 0b01),
            PauliOp::new(2, Phase::MINUS_I, 0b10, 0b11),
            PauliOp::new(2, Phase::ONE, 0b00, 0b01),
        ];
        for a in &ops {
            for b in &ops {
                let exact = a.sub_norm(b);
                let dense = a.to_dense().sub(&b.to_dense()).operator_norm().unwrap();
                assert_abs_diff_eq!(exact, dense, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sign_minus_flip_has_norm_sqrt2() {
        assert_abs_diff_eq!(z1().sub_norm(&x1()), 2.0f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn traces() {
        assert_eq!(PauliOp::identity(3).trace().re, 8.0);
        assert_eq!(PauliOp::sign_at(3, 1).trace(), Complex64::ZERO);
        assert_eq!(PauliOp::flip_at(3, 0).trace(), Complex64::ZERO);
        let scaled = PauliOp::identity(2).scaled(Phase::MINUS_I);
        assert_eq!(scaled.trace(), Complex64::new(0.0, -4.0));
    }

    #[test]
    fn eigenbasis_is_orthonormal_and_diagonalizes() {
        let ops = [
            z1(),
            x1(),
            PauliOp::new(2, Phase::ONE, 0b11, 0b10),
            PauliOp::new(3, Phase::I, 0b101, 0b100),
        ];
        for op in &ops {
            if !op.is_self_adjoint() {
                continue;
            }
            let basis = op.eigenbasis();
            assert_eq!(basis.len(), op.dim());
            let dense = |v: &EigenVector| {
                let mut out = vec![Complex64::ZERO; op.dim()];
                for &(i, a) in &v.entries {
                    out[i as usize] = a;
                }
                out
            };
            for (i, vi) in basis.iter().enumerate() {
                let di = dense(vi);
                // Eigenvector equation.
                let image = op.apply(&di);
                for (a, b) in image.iter().zip(&di) {
                    assert_abs_diff_eq!((a - b * vi.value).norm(), 0.0, epsilon = 1e-12);
                }
                for (j, vj) in basis.iter().enumerate() {
                    let dj = dense(vj);
                    let inner: Complex64 =
                        di.iter().zip(&dj).map(|(a, b)| a.conj() * b).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(inner.norm(), expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn self_adjoint_iff_square_is_one() {
        for qubits in [1u32, 2] {
            for x in 0..1u64 << qubits {
                for z in 0..1u64 << qubits {
                    for e in 0..4 {
                        let p = PauliOp::new(qubits, Phase::from_exponent(e), x, z);
                        let square_is_one = p.mul(&p) == PauliOp::identity(qubits);
                        assert_eq!(p.is_self_adjoint(), square_is_one);
                    }
                }
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_op(qubits: u32) -> impl Strategy<Value = PauliOp> {
            let mask = (1u64 << qubits) - 1;
            (0..4i64, any::<u64>(), any::<u64>()).prop_map(move |(e, x, z)| {
                PauliOp::new(qubits, Phase::from_exponent(e), x & mask, z & mask)
            })
        }

        proptest! {
            #[test]
            fn mask_algebra_matches_dense(a in arb_op(3), b in arb_op(3)) {
                let (da, db) = (a.to_dense(), b.to_dense());
                prop_assert!(a.mul(&b).to_dense().sub(&da.mul(&db)).max_abs() < 1e-15);
                prop_assert!(a.adjoint().to_dense().sub(&da.adjoint()).max_abs() < 1e-15);
                prop_assert!((a.trace() - da.trace()).norm() < 1e-15);
                prop_assert_eq!(
                    a.commutes_with(&b),
                    da.mul(&db).sub(&db.mul(&da)).max_abs() < 1e-12
                );
                let dense_norm = da.sub(&db).operator_norm().unwrap();
                prop_assert!((a.sub_norm(&b) - dense_norm).abs() < 1e-9);
            }

            #[test]
            fn apply_matches_dense(a in arb_op(3), seed in any::<u64>()) {
                let dim = a.dim();
                let mut state = 0x2545f4914f6cdd1du64 ^ seed;
                let mut next = || {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                };
                let v: Vec<Complex64> =
                    (0..dim).map(|_| Complex64::new(next(), next())).collect();
                let exact = a.apply(&v);
                let dense = a.to_dense().apply(&v);
                for (x, y) in exact.iter().zip(&dense) {
                    prop_assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }
}
