//! The phase-tracked algebra of generator words.
//!
//! A word is a scalar multiple of an increasing product of generators,
//! `phase · ∏_{i ∈ support} u_i`. Since the generators are self-adjoint
//! unitaries that commute or anticommute pairwise, every product of words
//! normalizes to this shape, and squares of words are `±1`, so the fourth
//! roots of unity suffice for the phases.

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::graph::Graph;
use num_complex::Complex64;
use std::fmt;

/// A fourth root of unity `i^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: i64) -> Self {
        Phase(e.rem_euclid(4) as u8)
    }

    /// Exponent of `i`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    #[must_use]
    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    #[must_use]
    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    #[must_use]
    pub fn negate(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// `phase · ∏_{i ∈ support, ascending} u_i`; the empty support with phase
/// `+1` is the unit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorWord {
    pub phase: Phase,
    pub support: BitVec,
}

impl GeneratorWord {
    pub fn new(phase: Phase, support: BitVec) -> Self {
        Self { phase, support }
    }

    pub fn unit(n: usize) -> Self {
        Self {
            phase: Phase::ONE,
            support: BitVec::zeros(n),
        }
    }

    /// The word of a single generator.
    pub fn generator(n: usize, i: usize) -> Self {
        Self {
            phase: Phase::ONE,
            support: BitVec::from_indices(n, &[i]),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.phase == Phase::ONE && self.support.is_zero()
    }
}

/// Multiplies two words into normal form.
///
/// The support is the symmetric difference. Merging the two increasing
/// products into one transposes each generator of the right word past the
/// larger-index generators of the left word, so the sign picked up is
/// `(-1)^c` with `c = |{(i, j) : i ∈ s₁, j ∈ s₂, i > j, i ~ j}|`; repeated
/// generators then cancel via `u_i² = 1` without further sign.
pub fn word_mul(g: &Graph, w1: &GeneratorWord, w2: &GeneratorWord) -> GeneratorWord {
    let n = g.n();
    assert_eq!(w1.support.len(), n, "word support width mismatch");
    assert_eq!(w2.support.len(), n, "word support width mismatch");
    let mut transpositions = 0usize;
    for j in w2.support.ones() {
        transpositions += g.neighbors(j).count_and_above(&w1.support, j);
    }
    let mut phase = w1.phase.mul(w2.phase);
    if transpositions % 2 == 1 {
        phase = phase.negate();
    }
    let mut support = w1.support.clone();
    support.xor_assign(&w2.support);
    GeneratorWord { phase, support }
}

/// The adjoint of a word in normal form.
pub fn word_adjoint(g: &Graph, w: &GeneratorWord) -> GeneratorWord {
    // Reversing the product of m generators costs m(m-1)/2 transpositions,
    // of which the adjacent ones contribute a sign each.
    let sign_flips = g.edges_inside(&w.support);
    let mut phase = w.phase.conj();
    if sign_flips % 2 == 1 {
        phase = phase.negate();
    }
    GeneratorWord {
        phase,
        support: w.support.clone(),
    }
}

/// The phase making the word over `s` self-adjoint: `+1` when the number of
/// edges inside `s` is even, `+i` when it is odd.
pub fn self_adjoint_phase(g: &Graph, s: &BitVec) -> Phase {
    if g.edges_inside(s) % 2 == 0 {
        Phase::ONE
    } else {
        Phase::I
    }
}

/// Repairs a near-matching commutation pattern.
///
/// Input: vertices `us` and `vs` of equal length `n` and a split point `l`,
/// where the graph restricted to `us ∪ vs` has no edges inside `us` or
/// inside `vs`, and `u_i ~ v_j ⇔ i = j` holds whenever `j < l` or `i >= l`
/// (edges between `v_j, j >= l` and `u_i, i < l` are unconstrained).
///
/// Output: words `w_j` with `w_j = v_j` for `j < l` and
/// `w_j = v_j · ∏_{i ∈ K(j)} v_i` otherwise, where
/// `K(j) = {i < l : v_j ~ u_i}`; the result anticommutes with `u_m` exactly
/// when `m = j`, which is re-checked through the cocycle.
pub fn normalize_pairing(
    g: &Graph,
    us: &[usize],
    vs: &[usize],
    l: usize,
) -> Result<Vec<GeneratorWord>> {
    let n = us.len();
    if vs.len() != n {
        return Err(Error::PatternViolation(format!(
            "need equally many u and v vertices, got {} and {}",
            n,
            vs.len()
        )));
    }
    if l > n {
        return Err(Error::PatternViolation(format!(
            "split point {l} exceeds the pair count {n}"
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for &x in us.iter().chain(vs) {
        if x >= g.n() {
            return Err(Error::PatternViolation(format!(
                "vertex {x} out of range for n={}",
                g.n()
            )));
        }
        if !seen.insert(x) {
            return Err(Error::PatternViolation(format!(
                "vertex {x} listed twice"
            )));
        }
    }
    for (a, &x) in us.iter().enumerate() {
        for (b, &y) in us.iter().enumerate() {
            if a < b && g.has_edge(x, y) {
                return Err(Error::PatternViolation(format!(
                    "u-vertices {x} and {y} are adjacent"
                )));
            }
        }
        let _ = a;
    }
    for (a, &x) in vs.iter().enumerate() {
        for (b, &y) in vs.iter().enumerate() {
            if a < b && g.has_edge(x, y) {
                return Err(Error::PatternViolation(format!(
                    "v-vertices {x} and {y} are adjacent"
                )));
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            let constrained = j < l || i >= l;
            if constrained && g.has_edge(us[i], vs[j]) != (i == j) {
                return Err(Error::PatternViolation(format!(
                    "adjacency between u_{i} and v_{j} violates the split pattern"
                )));
            }
        }
    }

    let words: Vec<GeneratorWord> = (0..n)
        .map(|j| {
            let mut support = BitVec::from_indices(g.n(), &[vs[j]]);
            if j >= l {
                for i in 0..l {
                    if g.has_edge(us[i], vs[j]) {
                        support.set(vs[i], true);
                    }
                }
            }
            GeneratorWord::new(Phase::ONE, support)
        })
        .collect();

    for (j, w) in words.iter().enumerate() {
        for (m, &u) in us.iter().enumerate() {
            let u_set = BitVec::from_indices(g.n(), &[u]);
            let anticommutes = g.cocycle(&w.support, &u_set) == -1;
            assert_eq!(
                anticommutes,
                m == j,
                "pairing normalization failed to produce the matched pattern"
            );
        }
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn phase_arithmetic() {
        assert_eq!(Phase::I.mul(Phase::I), Phase::MINUS_ONE);
        assert_eq!(Phase::MINUS_I.mul(Phase::I), Phase::ONE);
        assert_eq!(Phase::I.conj(), Phase::MINUS_I);
        assert_eq!(Phase::from_exponent(-1), Phase::MINUS_I);
        assert_eq!(Phase::MINUS_ONE.to_complex().re, -1.0);
        assert_eq!(format!("{}", Phase::I), "+i");
    }

    #[test]
    fn unit_is_neutral() {
        let g = Graph::random(6, &mut rand_chacha::ChaCha8Rng::seed_from_u64(2));
        let w = GeneratorWord::new(Phase::MINUS_I, BitVec::from_indices(6, &[1, 4]));
        assert_eq!(word_mul(&g, &w, &GeneratorWord::unit(6)), w);
        assert_eq!(word_mul(&g, &GeneratorWord::unit(6), &w), w);
    }

    #[test]
    fn anticommuting_generators_on_an_edge() {
        let g = Graph::canonical(2, 1);
        let a = GeneratorWord::generator(2, 0);
        let b = GeneratorWord::generator(2, 1);
        let ab = word_mul(&g, &a, &b);
        assert_eq!(ab.phase, Phase::ONE);
        assert_eq!(ab.support, BitVec::from_indices(2, &[0, 1]));
        let ba = word_mul(&g, &b, &a);
        assert_eq!(ba.phase, Phase::MINUS_ONE);
        assert_eq!(ba.support, ab.support);
    }

    #[test]
    fn generators_square_to_one() {
        let g = Graph::random(5, &mut rand_chacha::ChaCha8Rng::seed_from_u64(4));
        for i in 0..5 {
            let w = GeneratorWord::generator(5, i);
            assert!(word_mul(&g, &w, &w).is_unit());
        }
    }

    #[test]
    fn word_times_adjoint_is_unit() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let n = 1 + (rng.random::<u32>() % 7) as usize;
            let g = Graph::random(n, &mut rng);
            let mut support = BitVec::zeros(n);
            for i in 0..n {
                support.set(i, rng.random());
            }
            let w = GeneratorWord::new(Phase::from_exponent(rng.random::<i64>() % 4), support);
            let prod = word_mul(&g, &w, &word_adjoint(&g, &w));
            assert!(prod.is_unit(), "w · w† must be the unit");
        }
    }

    #[test]
    fn multiplication_is_associative() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let n = 1 + (rng.random::<u32>() % 7) as usize;
            let g = Graph::random(n, &mut rng);
            let mut rand_word = || {
                let mut s = BitVec::zeros(n);
                for i in 0..n {
                    s.set(i, rng.random());
                }
                GeneratorWord::new(Phase::from_exponent(rng.random::<i64>() % 4), s)
            };
            let (a, b, c) = (rand_word(), rand_word(), rand_word());
            let left = word_mul(&g, &word_mul(&g, &a, &b), &c);
            let right = word_mul(&g, &a, &word_mul(&g, &b, &c));
            assert_eq!(left, right);
        }
    }

    #[test]
    fn self_adjoint_phase_examples() {
        let edge = Graph::canonical(2, 1);
        assert_eq!(
            self_adjoint_phase(&edge, &BitVec::from_indices(2, &[0])),
            Phase::ONE
        );
        assert_eq!(
            self_adjoint_phase(&edge, &BitVec::from_indices(2, &[0, 1])),
            Phase::I
        );
        let null = Graph::null(4);
        assert_eq!(
            self_adjoint_phase(&null, &BitVec::from_indices(4, &[0, 2, 3])),
            Phase::ONE
        );
    }

    #[test]
    fn self_adjoint_words_are_fixed_by_adjoint() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let n = 1 + (rng.random::<u32>() % 7) as usize;
            let g = Graph::random(n, &mut rng);
            let mut s = BitVec::zeros(n);
            for i in 0..n {
                s.set(i, rng.random());
            }
            let w = GeneratorWord::new(self_adjoint_phase(&g, &s), s);
            assert_eq!(word_adjoint(&g, &w), w);
        }
    }

    #[test]
    fn pairing_already_matched() {
        // Two disjoint edges (u_j, v_j): the matched pattern with l = 2.
        let g = Graph::from_edges(4, &[(0, 2), (1, 3)]).unwrap();
        let words = normalize_pairing(&g, &[0, 1], &[2, 3], 2).unwrap();
        assert_eq!(words[0], GeneratorWord::generator(4, 2));
        assert_eq!(words[1], GeneratorWord::generator(4, 3));
    }

    #[test]
    fn pairing_with_one_extra_edge() {
        // u_0=0, u_1=1, v_0=2, v_1=3; matched edges plus the dashed v_1–u_0.
        let g = Graph::from_edges(4, &[(0, 2), (1, 3), (0, 3)]).unwrap();
        let words = normalize_pairing(&g, &[0, 1], &[2, 3], 1).unwrap();
        assert_eq!(words[0].support, BitVec::from_indices(4, &[2]));
        assert_eq!(words[1].support, BitVec::from_indices(4, &[2, 3]));
    }

    #[test]
    fn pairing_rejects_bad_patterns() {
        // v_0 adjacent to u_1 violates the constrained part for l = 2.
        let g = Graph::from_edges(4, &[(0, 2), (1, 3), (1, 2)]).unwrap();
        assert!(normalize_pairing(&g, &[0, 1], &[2, 3], 2).is_err());
        // Adjacent u-vertices.
        let g = Graph::from_edges(4, &[(0, 2), (1, 3), (0, 1)]).unwrap();
        assert!(normalize_pairing(&g, &[0, 1], &[2, 3], 2).is_err());
    }

    #[test]
    fn pairing_on_canonical_pairs_is_identity() {
        let g = Graph::canonical(6, 3);
        let us = vec![0, 2, 4];
        let vs = vec![1, 3, 5];
        let words = normalize_pairing(&g, &us, &vs, 3).unwrap();
        for (j, w) in words.iter().enumerate() {
            assert_eq!(*w, GeneratorWord::generator(6, vs[j]));
        }
    }
}
