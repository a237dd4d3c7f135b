//! Classification and finite-dimensional verification of graph CCR algebras.
//!
//! To a finite simple graph `G` attach the C*-algebra `B(G)` generated by one
//! self-adjoint unitary per vertex, where two generators anticommute exactly
//! when the vertices are adjacent and commute otherwise. Every such algebra
//! is isomorphic to `M_{2^k} ⊗ C^{2^l}` with `2k + l = n`; this crate
//! computes the pair `(k, l)` two independent ways (graph rewriting and GF(2)
//! congruence reduction), decides the induced equivalence of graphs,
//! manipulates set families and their bipartite incidence graphs, and backs
//! everything with explicit matrix representations checked numerically.
//!
//! Modules:
//! - [`gf2`] — bit-packed GF(2) linear algebra and the alternating-form
//!   congruence canonicalization.
//! - [`graph`] — graphs, the vertex-product rewriting move, canonical forms,
//!   classification and equivalence, subset graphs, small-graph isomorphism.
//! - [`word`] — the phase-tracked algebra of generator words.
//! - [`setfam`] — finite set families: independence, separation, duality,
//!   the tree-coded independent family, bipartite extraction.
//! - [`repr`] — dense and monomial operator kernels realizing the generators,
//!   with relation, span, center, commutant and norm checks.
//!
//! # Quick start
//!
//! ```
//! use bgraph_core::{classify, equivalent, Graph, Representation};
//!
//! // The triangle and the path on three vertices have isomorphic algebras:
//! // both reduce to one edge plus an isolated vertex, M_2 ⊗ C^2.
//! let triangle = Graph::complete(3);
//! let path = Graph::path(3);
//! assert!(equivalent(&triangle, &path));
//!
//! let class = classify(&triangle);
//! assert_eq!((class.k, class.l), (1, 1));
//! assert!(!class.simple);
//!
//! // The canonical representation is faithful: the 2^n words span the
//! // whole algebra, and the center has dimension 2^l.
//! let rep = Representation::rep_canonical(&triangle)?;
//! assert!(rep.verify_relations().pass);
//! assert_eq!(rep.span_dimension()?, 8);
//! assert_eq!(rep.center_dimension()?, 2);
//! # Ok::<(), bgraph_core::Error>(())
//! ```

pub mod error;
pub mod gf2;
pub mod graph;
pub mod repr;
pub mod setfam;
pub mod word;

pub use error::{Error, Result};
pub use gf2::{BasisChange, BitMatrix, BitVec};
pub use graph::{
    apply_switch, canonicalize, classify, equivalent, AlgebraClass, CanonicalForm, Graph,
    SwitchMove,
};
pub use repr::{tensor_gap_bound, Operator, PauliOp, RepKind, Representation, StateVector};
pub use setfam::{fk_family, FinitePair, SetFamily};
pub use word::{self_adjoint_phase, word_mul, GeneratorWord, Phase};
