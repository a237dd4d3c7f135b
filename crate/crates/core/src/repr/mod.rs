//! Explicit finite-dimensional representations of the graph algebras and
//! their numeric verification.
//!
//! Three constructions are provided: the pairwise tensor representation
//! (one qubit per adjacent vertex pair — realizes the relations but is NOT
//! faithful on graphs with isolated parts: an isolated vertex maps to the
//! identity), the bipartite representation of an incidence graph (flip
//! generators for universe elements, sign masks for members), and the
//! canonical representation (faithful: the graph is reduced to canonical
//! form, the canonical graph is represented on `(C²)^{⊗k} ⊗ C^{2^l}`, and
//! the original generators are pulled back through the basis change).
//! Faithfulness claims are always routed to the canonical construction.
//!
//! All constructed generators are monomial mask operators ([`PauliOp`]), so
//! relation checks, traces and pair distances are integer-exact; dense
//! [`Operator`] materialization is available below a dimension cap, and
//! custom dense representations can be wrapped for the same checks.

mod operator;
mod pauli;

pub use operator::{hermitian_eigenvalues, Operator, JACOBI_DIM_LIMIT, POWER_ITERATION_TOLERANCE};
pub use pauli::{EigenVector, PauliOp};

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::graph::{canonicalize, Graph};
use crate::setfam::SetFamily;
use crate::word::{self_adjoint_phase, GeneratorWord, Phase};
use num_complex::Complex64;
use serde::Serialize;

/// Dense materialization cap for [`Operator`]s.
pub const DENSE_DIM_CAP: usize = 4096;
/// Mask-level (lazy) representations are allowed up to this qubit count
/// (dimension `2^15 = 32768`): norm and state checks run without dense
/// matrices there.
pub const MASK_QUBIT_CAP: u32 = 15;
/// `span_dimension` handles up to `2^SPAN_VERTEX_LIMIT` words.
pub const SPAN_VERTEX_LIMIT: usize = 10;
/// Dimension cap of the exact entry-orbit commutant computation.
pub const COMMUTANT_ORBIT_DIM_CAP: usize = 1024;
/// Dimension cap of the dense nullspace commutant computation.
pub const COMMUTANT_DENSE_DIM_CAP: usize = 16;
/// Singular values below this fraction of the largest are treated as zero
/// in Gram-rank computations.
pub const GRAM_RANK_THRESHOLD: f64 = 1e-8;
/// Default construction tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Unitarity tolerance for the tensor gap bound inputs.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Pairs,
    Bipartite,
    Canonical,
    Custom,
}

enum GenStore {
    Mask(Vec<PauliOp>),
    Dense(Vec<Operator>),
}

/// A unit vector in the representation space.
#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes, requiring unit norm within `1e-9`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnitary((norm - 1.0).abs()));
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Maximum deviations found by a relation check.
#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub self_adjoint_dev: f64,
    pub involution_dev: f64,
    pub commutation_dev: f64,
    /// The generator pair with the worst commutation deviation, if any failed.
    pub worst_pair: Option<(usize, usize)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// The structured verification report shared with the command line front end.
#[derive(Clone, Debug, Serialize)]
pub struct ReprReport {
    pub kind: RepKind,
    pub dim: usize,
    pub tolerance: f64,
    pub max_deviation_per_check: DeviationSummary,
    pub span_dim: Option<usize>,
    pub center_dim: Option<usize>,
    pub commutant_dim: Option<usize>,
    pub min_pair_distance: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeviationSummary {
    pub self_adjoint: f64,
    pub involution: f64,
    pub commutation: f64,
}

/// A concrete representation: one generator per vertex of `graph`.
pub struct Representation {
    graph: Graph,
    dim: usize,
    kind: RepKind,
    tolerance: f64,
    gens: GenStore,
}

fn check_qubit_cap(qubits: u32, what: &'static str) -> Result<()> {
    if qubits > MASK_QUBIT_CAP {
        return Err(Error::LimitExceeded {
            what,
            requested: 1usize << qubits.min(40),
            limit: 1usize << MASK_QUBIT_CAP,
        });
    }
    Ok(())
}

impl Representation {
    /// The pairwise tensor representation: one qubit per unordered vertex
    /// pair `(i, j)`, `i < j`, in lexicographic order. For an adjacent pair,
    /// generator `i` carries the sign factor and generator `j` the flip
    /// factor on that qubit; all other factors are the identity.
    ///
    /// Degenerates on graphs with isolated parts: a vertex with no neighbour
    /// is represented by the identity, so this construction realizes the
    /// relations but is not faithful there.
    pub fn rep_pairs(g: &Graph) -> Result<Self> {
        let n = g.n();
        let qubits = (n * n.saturating_sub(1) / 2) as u32;
        check_qubit_cap(qubits, "pair representation dimension")?;
        let pair_qubit = |i: usize, j: usize| -> u32 {
            debug_assert!(i < j);
            (i * n - i * (i + 1) / 2 + (j - i - 1)) as u32
        };
        let gens: Vec<PauliOp> = (0..n)
            .map(|k| {
                let mut x = 0u64;
                let mut z = 0u64;
                for i in 0..n {
                    for j in (i + 1)..n {
                        if g.has_edge(i, j) {
                            if k == i {
                                z |= 1 << pair_qubit(i, j);
                            } else if k == j {
                                x |= 1 << pair_qubit(i, j);
                            }
                        }
                    }
                }
                PauliOp::new(qubits, Phase::ONE, x, z)
            })
            .collect();
        let rep = Self {
            graph: g.clone(),
            dim: 1 << qubits,
            kind: RepKind::Pairs,
            tolerance: DEFAULT_TOLERANCE,
            gens: GenStore::Mask(gens),
        };
        assert!(rep.verify_relations().pass, "pair construction must satisfy the relations");
        Ok(rep)
    }

    /// The bipartite representation of an incidence graph on `(C²)^{⊗m}`:
    /// universe element `i` becomes the flip at site `i`, member `x` the
    /// sign mask over its elements. Generators are listed universe-first,
    /// matching the vertex order of [`SetFamily::bipartite_graph`].
    pub fn rep_bipartite(fam: &SetFamily) -> Result<Self> {
        let m = fam.universe_size() as u32;
        check_qubit_cap(m, "bipartite representation dimension")?;
        let mut gens: Vec<PauliOp> =
            (0..m).map(|i| PauliOp::flip_at(m, i)).collect();
        for member in fam.members() {
            let z = member.ones().fold(0u64, |acc, i| acc | 1 << i);
            gens.push(PauliOp::new(m, Phase::ONE, 0, z));
        }
        let rep = Self {
            graph: fam.bipartite_graph(),
            dim: 1 << m,
            kind: RepKind::Bipartite,
            tolerance: DEFAULT_TOLERANCE,
            gens: GenStore::Mask(gens),
        };
        assert!(rep.verify_relations().pass, "bipartite construction must satisfy the relations");
        Ok(rep)
    }

    /// The faithful canonical representation on `(C²)^{⊗k} ⊗ C^{2^l}`.
    ///
    /// The graph is reduced to canonical form; pair `j` is represented by
    /// the sign/flip factors at qubit `j` and unmatched vertex `r` by the
    /// sign mask reading bit `r - 2k` of the second register. Each original
    /// vertex is then the word over canonical generators given by the
    /// inverse basis change, taken with its self-adjoint phase (the positive
    /// choice, for determinism). The span of the words has full dimension
    /// `2^n`.
    pub fn rep_canonical(g: &Graph) -> Result<Self> {
        let n = g.n();
        let form = canonicalize(g);
        let (k, l) = (form.k, form.l);
        let qubits = (k + l) as u32;
        check_qubit_cap(qubits, "canonical representation dimension")?;
        let canon_graph = Graph::canonical(n, k);
        let canon_gen = |v: usize| -> PauliOp {
            if v < 2 * k {
                let q = (v / 2) as u32;
                if v % 2 == 0 {
                    PauliOp::sign_at(qubits, q)
                } else {
                    PauliOp::flip_at(qubits, q)
                }
            } else {
                PauliOp::sign_at(qubits, (k + v - 2 * k) as u32)
            }
        };
        let gens: Vec<PauliOp> = (0..n)
            .map(|v| {
                // Column v of the inverse basis change is the support of the
                // original generator as a word over the canonical ones.
                let mut support = BitVec::zeros(n);
                for c in 0..n {
                    if form.basis.inverse.get(c, v) {
                        support.set(c, true);
                    }
                }
                let mut op = PauliOp::identity(qubits);
                for c in support.ones().collect::<Vec<_>>().into_iter().rev() {
                    op = canon_gen(c).mul(&op);
                }
                op.scaled(self_adjoint_phase(&canon_graph, &support))
            })
            .collect();
        let rep = Self {
            graph: g.clone(),
            dim: 1 << qubits,
            kind: RepKind::Canonical,
            tolerance: DEFAULT_TOLERANCE,
            gens: GenStore::Mask(gens),
        };
        assert!(rep.verify_relations().pass, "canonical construction must satisfy the relations");
        Ok(rep)
    }

    /// Wraps explicit dense generators (one per vertex). No relation check
    /// is performed here; run [`Representation::verify_relations`].
    pub fn from_dense(graph: Graph, gens: Vec<Operator>, tolerance: f64) -> Result<Self> {
        if gens.len() != graph.n() {
            return Err(Error::ShapeMismatch(format!(
                "need one generator per vertex: {} generators for {} vertices",
                gens.len(),
                graph.n()
            )));
        }
        let dim = gens.first().map_or(1, Operator::dim);
        if gens.iter().any(|op| op.dim() != dim) {
            return Err(Error::ShapeMismatch("generators have mixed dimensions".into()));
        }
        if dim > DENSE_DIM_CAP {
            return Err(Error::LimitExceeded {
                what: "dense representation dimension",
                requested: dim,
                limit: DENSE_DIM_CAP,
            });
        }
        Ok(Self {
            graph,
            dim,
            kind: RepKind::Custom,
            tolerance,
            gens: GenStore::Dense(gens),
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn num_generators(&self) -> usize {
        match &self.gens {
            GenStore::Mask(v) => v.len(),
            GenStore::Dense(v) => v.len(),
        }
    }

    /// The exact mask form of a generator, when this representation has one.
    pub fn generator_mask(&self, i: usize) -> Option<&PauliOp> {
        match &self.gens {
            GenStore::Mask(v) => v.get(i),
            GenStore::Dense(_) => None,
        }
    }

    /// Dense materialization of a generator (capped at [`DENSE_DIM_CAP`]).
    pub fn generator(&self, i: usize) -> Result<Operator> {
        match &self.gens {
            GenStore::Dense(v) => Ok(v[i].clone()),
            GenStore::Mask(v) => {
                if self.dim > DENSE_DIM_CAP {
                    return Err(Error::LimitExceeded {
                        what: "dense generator dimension",
                        requested: self.dim,
                        limit: DENSE_DIM_CAP,
                    });
                }
                Ok(v[i].to_dense())
            }
        }
    }

    /// Applies generator `i` to a state without materializing a matrix.
    pub fn apply_generator(&self, i: usize, state: &StateVector) -> StateVector {
        assert_eq!(state.dim(), self.dim, "state dimension mismatch");
        let amplitudes = match &self.gens {
            GenStore::Mask(v) => v[i].apply(state.amplitudes()),
            GenStore::Dense(v) => v[i].apply(state.amplitudes()),
        };
        StateVector { amplitudes }
    }

    /// Checks self-adjointness, the involution property and the commutation
    /// pattern of every generator pair against the graph adjacency,
    /// reporting the worst deviations. Mask generators are checked exactly;
    /// dense ones through the norm backend.
    pub fn verify_relations(&self) -> RelationReport {
        let n = self.num_generators();
        let mut self_adjoint_dev = 0.0f64;
        let mut involution_dev = 0.0f64;
        let mut commutation_dev = 0.0f64;
        let mut worst_pair = None;
        match &self.gens {
            GenStore::Mask(gens) => {
                let id = PauliOp::identity(gens.first().map_or(0, PauliOp::qubits));
                for u in gens {
                    self_adjoint_dev = self_adjoint_dev.max(u.sub_norm(&u.adjoint()));
                    involution_dev = involution_dev.max(u.mul(u).sub_norm(&id));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        let uv = gens[i].mul(&gens[j]);
                        let mut vu = gens[j].mul(&gens[i]);
                        if self.graph.has_edge(i, j) {
                            vu = vu.scaled(Phase::MINUS_ONE);
                        }
                        let dev = uv.sub_norm(&vu);
                        if dev > commutation_dev {
                            commutation_dev = dev;
                            worst_pair = Some((i, j));
                        }
                    }
                }
            }
            GenStore::Dense(gens) => {
                let norm = |op: &Operator| op.operator_norm().expect("norm converges");
                let id = Operator::identity(self.dim);
                for u in gens {
                    self_adjoint_dev = self_adjoint_dev.max(norm(&u.sub(&u.adjoint())));
                    involution_dev = involution_dev.max(norm(&u.mul(u).sub(&id)));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        let uv = gens[i].mul(&gens[j]);
                        let vu = gens[j].mul(&gens[i]);
                        let dev = if self.graph.has_edge(i, j) {
                            norm(&uv.add(&vu))
                        } else {
                            norm(&uv.sub(&vu))
                        };
                        if dev > commutation_dev {
                            commutation_dev = dev;
                            worst_pair = Some((i, j));
                        }
                    }
                }
            }
        }
        let pass = self_adjoint_dev <= self.tolerance
            && involution_dev <= self.tolerance
            && commutation_dev <= self.tolerance;
        if pass {
            worst_pair = None;
        }
        RelationReport {
            self_adjoint_dev,
            involution_dev,
            commutation_dev,
            worst_pair,
            tolerance: self.tolerance,
            pass,
        }
    }

    fn word_mask(&self, w: &GeneratorWord) -> Result<PauliOp> {
        let GenStore::Mask(gens) = &self.gens else {
            return Err(Error::ShapeMismatch(
                "mask form is unavailable for dense representations".into(),
            ));
        };
        if w.support.len() != self.graph.n() {
            return Err(Error::ShapeMismatch(format!(
                "word support width {} does not match the vertex count {}",
                w.support.len(),
                self.graph.n()
            )));
        }
        let mut op = PauliOp::identity(gens.first().map_or(0, PauliOp::qubits));
        for i in w.support.ones().collect::<Vec<_>>().into_iter().rev() {
            op = gens[i].mul(&op);
        }
        Ok(op.scaled(w.phase))
    }

    /// The operator of a word: its phase times the ordered product of the
    /// generator operators over its support.
    pub fn word_to_operator(&self, w: &GeneratorWord) -> Result<Operator> {
        match &self.gens {
            GenStore::Mask(_) => {
                if self.dim > DENSE_DIM_CAP {
                    return Err(Error::LimitExceeded {
                        what: "dense word-operator dimension",
                        requested: self.dim,
                        limit: DENSE_DIM_CAP,
                    });
                }
                Ok(self.word_mask(w)?.to_dense())
            }
            GenStore::Dense(gens) => {
                if w.support.len() != self.graph.n() {
                    return Err(Error::ShapeMismatch(
                        "word support width does not match the vertex count".into(),
                    ));
                }
                let mut op = Operator::identity(self.dim);
                for i in w.support.ones() {
                    op = op.mul(&gens[i]);
                }
                Ok(op.scale(w.phase.to_complex()))
            }
        }
    }

    /// All `2^n` normalized words as exact mask operators.
    fn mask_words(&self) -> Result<Vec<PauliOp>> {
        let GenStore::Mask(gens) = &self.gens else {
            return Err(Error::ShapeMismatch("mask words need mask generators".into()));
        };
        let n = self.graph.n();
        let qubits = gens.first().map_or(0, PauliOp::qubits);
        let mut words = vec![PauliOp::identity(qubits); 1 << n];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            words[mask] = gens[low].mul(&words[mask & (mask - 1)]);
        }
        for (mask, word) in words.iter_mut().enumerate() {
            let support = mask_to_bitvec(mask, n);
            *word = word.scaled(self_adjoint_phase(&self.graph, &support));
        }
        Ok(words)
    }

    fn dense_words(&self) -> Result<Vec<Operator>> {
        let GenStore::Dense(gens) = &self.gens else {
            return Err(Error::ShapeMismatch("dense words need dense generators".into()));
        };
        let n = self.graph.n();
        let mut words = vec![Operator::identity(self.dim); 1 << n];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            words[mask] = gens[low].mul(&words[mask & (mask - 1)]);
        }
        for (mask, word) in words.iter_mut().enumerate() {
            let support = mask_to_bitvec(mask, n);
            let phase = self_adjoint_phase(&self.graph, &support);
            *word = word.scale(phase.to_complex());
        }
        Ok(words)
    }

    /// The dimension of the linear span of all `2^n` words, as the rank of
    /// their normalized trace Gram matrix (singular values below
    /// [`GRAM_RANK_THRESHOLD`] of the largest count as zero).
    pub fn span_dimension(&self) -> Result<usize> {
        let n = self.graph.n();
        if n > SPAN_VERTEX_LIMIT {
            return Err(Error::LimitExceeded {
                what: "span word count",
                requested: n,
                limit: SPAN_VERTEX_LIMIT,
            });
        }
        let gram = match &self.gens {
            GenStore::Mask(_) => {
                let words = self.mask_words()?;
                words
                    .iter()
                    .map(|a| {
                        words
                            .iter()
                            .map(|b| a.adjoint().mul(b).trace() / self.dim as f64)
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            }
            GenStore::Dense(_) => {
                let words = self.dense_words()?;
                words
                    .iter()
                    .map(|a| words.iter().map(|b| a.trace_inner(b)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            }
        };
        Ok(operator::rank_with_threshold(gram, GRAM_RANK_THRESHOLD))
    }

    /// The dimension of `{X : X u_i = u_i X for all generators}`.
    ///
    /// Mask generators admit an exact computation: conjugation by a mask
    /// operator permutes matrix entries with signs, so the commutant
    /// decomposes into entry orbits and its dimension is the number of
    /// sign-consistent orbits. Dense representations fall back to the
    /// nullspace of the stacked commutation constraints (small dimensions
    /// only).
    pub fn commutant_dimension(&self) -> Result<usize> {
        match &self.gens {
            GenStore::Mask(gens) => {
                let mut orbits = self.entry_orbits(gens)?;
                Ok(orbits.live_roots().len())
            }
            GenStore::Dense(gens) => {
                let ns = self.dense_commutant_basis(gens)?;
                Ok(ns.len())
            }
        }
    }

    /// The dimension of the intersection of the commutant with the span of
    /// the words (the center of the represented algebra).
    pub fn center_dimension(&self) -> Result<usize> {
        let n = self.graph.n();
        if n > SPAN_VERTEX_LIMIT {
            return Err(Error::LimitExceeded {
                what: "span word count",
                requested: n,
                limit: SPAN_VERTEX_LIMIT,
            });
        }
        match &self.gens {
            GenStore::Mask(gens) => {
                let mut orbits = self.entry_orbits(gens)?;
                let roots = orbits.live_roots();
                let root_index: std::collections::HashMap<u32, usize> =
                    roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
                let words = self.mask_words()?;
                let dim = self.dim as u64;
                // Projection coefficients <C_o, w> for each word.
                let mut coeffs = vec![vec![Complex64::ZERO; roots.len()]; words.len()];
                for (wi, word) in words.iter().enumerate() {
                    for b in 0..dim {
                        let (row, p) = word.column(b);
                        let entry = (row * dim + b) as usize;
                        let (root, negated) = orbits.resolve(entry);
                        if let Some(&o) = root_index.get(&root) {
                            let mut v = p.to_complex();
                            if negated {
                                v = -v;
                            }
                            coeffs[wi][o] += v;
                        }
                    }
                }
                let gram: Vec<Vec<Complex64>> = words
                    .iter()
                    .map(|a| {
                        words
                            .iter()
                            .map(|b| a.adjoint().mul(b).trace() / self.dim as f64)
                            .collect()
                    })
                    .collect();
                self.center_from_projection(gram, &coeffs, &orbits.sizes(&roots))
            }
            GenStore::Dense(gens) => {
                let basis = self.dense_commutant_basis(gens)?;
                let basis = orthonormalize(basis);
                let words = self.dense_words()?;
                let vectors: Vec<Vec<Complex64>> = words
                    .iter()
                    .map(|w| {
                        (0..self.dim)
                            .flat_map(|i| (0..self.dim).map(move |j| w.get(i, j)))
                            .collect()
                    })
                    .collect();
                let coeffs: Vec<Vec<Complex64>> = vectors
                    .iter()
                    .map(|v| {
                        basis
                            .iter()
                            .map(|c| c.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
                            .collect()
                    })
                    .collect();
                let gram: Vec<Vec<Complex64>> = words
                    .iter()
                    .map(|a| words.iter().map(|b| a.trace_inner(b)).collect())
                    .collect();
                // The basis is already orthonormal in the entry inner product.
                let sizes = vec![1.0; basis.len()];
                self.center_from_projection(gram, &coeffs, &sizes)
            }
        }
    }

    /// `dim(V ∩ U) = rank(G) − rank(G − M)` where `G` is the word Gram and
    /// `M` the Gram of the projections onto the (orthogonal) commutant
    /// basis; `sizes[o]` is the squared norm of basis vector `o` in the
    /// entry inner product, and the Gram itself is normalized by `dim`.
    fn center_from_projection(
        &self,
        gram: Vec<Vec<Complex64>>,
        coeffs: &[Vec<Complex64>],
        sizes: &[f64],
    ) -> Result<usize> {
        let span_rank = operator::rank_with_threshold(gram.clone(), GRAM_RANK_THRESHOLD);
        let m = gram.len();
        let mut residual = gram;
        for s in 0..m {
            for t in 0..m {
                let mut proj = Complex64::ZERO;
                for (o, &size) in sizes.iter().enumerate() {
                    proj += coeffs[s][o].conj() * coeffs[t][o] / size;
                }
                residual[s][t] -= proj / self.dim as f64;
            }
        }
        let residual_rank = operator::rank_with_threshold(residual, GRAM_RANK_THRESHOLD);
        Ok(span_rank - residual_rank)
    }

    fn entry_orbits(&self, gens: &[PauliOp]) -> Result<SignedDsu> {
        if self.dim > COMMUTANT_ORBIT_DIM_CAP {
            return Err(Error::LimitExceeded {
                what: "commutant orbit dimension",
                requested: self.dim,
                limit: COMMUTANT_ORBIT_DIM_CAP,
            });
        }
        let dim = self.dim as u64;
        let mut dsu = SignedDsu::new((dim * dim) as usize);
        for gen in gens {
            let (x, z) = (gen.x_mask(), gen.z_mask());
            for a in 0..dim {
                for b in 0..dim {
                    let from = (a * dim + b) as usize;
                    let to = ((a ^ x) * dim + (b ^ x)) as usize;
                    let negated = ((a ^ b) & z).count_ones() % 2 == 1;
                    dsu.union(from, to, negated);
                }
            }
        }
        Ok(dsu)
    }

    fn dense_commutant_basis(&self, gens: &[Operator]) -> Result<Vec<Vec<Complex64>>> {
        if self.dim > COMMUTANT_DENSE_DIM_CAP {
            return Err(Error::LimitExceeded {
                what: "dense commutant dimension",
                requested: self.dim,
                limit: COMMUTANT_DENSE_DIM_CAP,
            });
        }
        let d = self.dim;
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(gens.len() * d * d);
        // Constraint (u X - X u)[i][j] = 0, variables X[k][l] flattened
        // row-major.
        for u in gens {
            for i in 0..d {
                for j in 0..d {
                    let mut row = vec![Complex64::ZERO; d * d];
                    for k in 0..d {
                        row[k * d + j] += u.get(i, k);
                    }
                    for l in 0..d {
                        row[i * d + l] -= u.get(l, j);
                    }
                    rows.push(row);
                }
            }
        }
        Ok(operator::nullspace(rows, GRAM_RANK_THRESHOLD))
    }

    /// The minimum operator-norm distance between two generators. Exact for
    /// mask generators; requires at least two of them.
    pub fn min_generator_distance(&self) -> Result<f64> {
        let n = self.num_generators();
        if n < 2 {
            return Err(Error::ShapeMismatch(
                "pair distances need at least two generators".into(),
            ));
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = match &self.gens {
                    GenStore::Mask(gens) => gens[i].sub_norm(&gens[j]),
                    GenStore::Dense(gens) => gens[i].sub(&gens[j]).operator_norm()?,
                };
                best = best.min(d);
            }
        }
        Ok(best)
    }

    /// Evaluates the vanishing property of an anticommuting element on the
    /// eigenvectors of a generator: the maximum of `|⟨bξ, ξ⟩|` over an
    /// orthonormal eigenbasis of the `±1` eigenspaces of generator
    /// `u_index`, where `b` is the operator of `word`. The word must
    /// anticommute with the generator, otherwise `CommutingWord` is
    /// returned.
    pub fn state_vanishing_check(&self, u_index: usize, word: &GeneratorWord) -> Result<f64> {
        match &self.gens {
            GenStore::Mask(gens) => {
                let u = gens[u_index];
                let b = self.word_mask(word)?;
                if u.commutes_with(&b) {
                    return Err(Error::CommutingWord);
                }
                let mut worst = 0.0f64;
                for xi in u.eigenbasis() {
                    worst = worst.max(xi.expectation(&b).norm());
                }
                Ok(worst)
            }
            GenStore::Dense(gens) => {
                let u = &gens[u_index];
                let b = self.word_to_operator(word)?;
                let anti = u.mul(&b).add(&b.mul(u)).operator_norm()?;
                if anti > self.tolerance.max(1e-9) {
                    return Err(Error::CommutingWord);
                }
                let mut worst = 0.0f64;
                let id = Operator::identity(self.dim);
                for sign in [1.0, -1.0] {
                    let proj = id.add(&u.scale(Complex64::new(sign, 0.0))).scale(Complex64::new(0.5, 0.0));
                    let columns: Vec<Vec<Complex64>> = (0..self.dim)
                        .map(|j| (0..self.dim).map(|i| proj.get(i, j)).collect())
                        .collect();
                    for xi in orthonormalize(columns) {
                        let bxi = b.apply(&xi);
                        let exp: Complex64 =
                            xi.iter().zip(&bxi).map(|(a, w)| a.conj() * w).sum();
                        worst = worst.max(exp.norm());
                    }
                }
                Ok(worst)
            }
        }
    }

    /// Runs the verification suite with the budgeted extras, producing the
    /// shared report.
    pub fn report(&self) -> ReprReport {
        let relations = self.verify_relations();
        ReprReport {
            kind: self.kind,
            dim: self.dim,
            tolerance: self.tolerance,
            max_deviation_per_check: DeviationSummary {
                self_adjoint: relations.self_adjoint_dev,
                involution: relations.involution_dev,
                commutation: relations.commutation_dev,
            },
            span_dim: self.span_dimension().ok(),
            center_dim: self.center_dimension().ok(),
            commutant_dim: self.commutant_dimension().ok(),
            min_pair_distance: self.min_generator_distance().ok(),
            pass: relations.pass,
        }
    }
}

fn mask_to_bitvec(mask: usize, n: usize) -> BitVec {
    let mut v = BitVec::zeros(n);
    for i in 0..n {
        if mask >> i & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

/// Modified Gram–Schmidt, dropping vectors whose residual falls below 1e-8
/// of their original norm (or absolutely, for near-zero inputs).
fn orthonormalize(vectors: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            let proj: Complex64 = b.iter().zip(&v).map(|(a, x)| a.conj() * x).sum();
            for (x, a) in v.iter_mut().zip(b) {
                *x -= proj * a;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for a in v.iter_mut() {
                *a /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Union-find over matrix entries with a relative sign on each edge. An
/// orbit that acquires contradictory signs is dead: its entries are forced
/// to zero in the commutant.
struct SignedDsu {
    parent: Vec<u32>,
    negated: Vec<bool>,
    dead: Vec<bool>,
}

impl SignedDsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            negated: vec![false; n],
            dead: vec![false; n],
        }
    }

    fn resolve(&self, mut i: usize) -> (u32, bool) {
        // Read-only find (the structure is compressed during construction).
        let mut sign = false;
        while self.parent[i] as usize != i {
            sign ^= self.negated[i];
            i = self.parent[i] as usize;
        }
        (i as u32, sign)
    }

    fn find(&mut self, i: usize) -> (u32, bool) {
        let (root, sign) = self.resolve(i);
        // Path compression with sign folding.
        let mut cur = i;
        let mut cur_sign = sign;
        while self.parent[cur] as usize != cur {
            let next = self.parent[cur] as usize;
            let next_sign = cur_sign ^ self.negated[cur];
            self.parent[cur] = root;
            self.negated[cur] = cur_sign;
            cur = next;
            cur_sign = next_sign;
        }
        (root, sign)
    }

    fn union(&mut self, a: usize, b: usize, negated: bool) {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            if sa ^ sb != negated {
                self.dead[ra as usize] = true;
            }
            return;
        }
        // value[a] = ±value[b]: attach ra under rb.
        self.parent[ra as usize] = rb;
        self.negated[ra as usize] = sa ^ sb ^ negated;
        if self.dead[ra as usize] {
            self.dead[rb as usize] = true;
        }
    }

    fn live_roots(&mut self) -> Vec<u32> {
        let n = self.parent.len();
        let mut roots = Vec::new();
        for i in 0..n {
            let (root, _) = self.find(i);
            if root as usize == i && !self.dead[i] {
                roots.push(root);
            }
        }
        roots
    }

    fn sizes(&self, roots: &[u32]) -> Vec<f64> {
        let index: std::collections::HashMap<u32, usize> =
            roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut sizes = vec![0.0f64; roots.len()];
        for i in 0..self.parent.len() {
            let (root, _) = self.resolve(i);
            if let Some(&o) = index.get(&root) {
                sizes[o] += 1.0;
            }
        }
        sizes
    }
}

/// Compares `‖a⊗v − b⊗w‖` against the sampled scalar bound
/// `min_λ ‖λa − b‖` over `samples` equally spaced unimodular `λ`.
///
/// Returns `(lhs, rhs)`. `v` and `w` must be unitary within
/// [`UNITARY_TOLERANCE`]. The grid minimum overshoots the true infimum by at
/// most [`tensor_gap_slack`], since `λ ↦ ‖λa − b‖` is `‖a‖`-Lipschitz and
/// the nearest grid point is within arc `π/samples`.
pub fn tensor_gap_bound(
    a: &Operator,
    b: &Operator,
    v: &Operator,
    w: &Operator,
    samples: usize,
) -> Result<(f64, f64)> {
    if a.dim() != b.dim() || v.dim() != w.dim() {
        return Err(Error::ShapeMismatch(
            "tensor gap bound needs matching factor dimensions".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::PatternViolation("sample count must be positive".into()));
    }
    for u in [v, w] {
        let dev = u.unitary_deviation()?;
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
    }
    let lhs = a.kron(v).sub(&b.kron(w)).operator_norm()?;
    let mut rhs = f64::INFINITY;
    for t in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / samples as f64;
        let lambda = Complex64::new(theta.cos(), theta.sin());
        rhs = rhs.min(a.scale(lambda).sub(b).operator_norm()?);
    }
    Ok((lhs, rhs))
}

/// The sampling slack of [`tensor_gap_bound`]: `‖a‖ · π / samples`.
pub fn tensor_gap_slack(a_norm: f64, samples: usize) -> f64 {
    a_norm * std::f64::consts::PI / samples as f64
}
