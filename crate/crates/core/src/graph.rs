//! Finite simple graphs and the classification of their CCR algebras.
//!
//! The central operation is `canonicalize`: a sequence of vertex-product
//! rewriting moves turning any graph into `k` disjoint edges followed by
//! `l = n - 2k` isolated vertices, which pins the algebra class
//! `M_{2^k} ⊗ C^{2^l}`. The move algorithm is independent of the GF(2)
//! congruence reduction in [`crate::gf2`]; the two are cross-checked against
//! each other on every call.

use crate::error::{Error, Result};
use crate::gf2::{self, BasisChange, BitMatrix, BitVec};
use std::collections::{BTreeMap, HashSet};
use std::fmt;

/// Vertex-count cap for the backtracking isomorphism search.
pub const ISO_VERTEX_LIMIT: usize = 16;
/// Default vertex-count cap for `g_infinity` (output has `2^n - 1` vertices).
pub const G_INFINITY_LIMIT: usize = 4;
/// Hard ceiling on `g_infinity` inputs, whatever cap the caller passes.
pub const G_INFINITY_HARD_LIMIT: usize = 12;
/// Default cap for exhaustive labeled-graph enumeration.
pub const ENUMERATE_LIMIT: usize = 6;
/// Isomorphism-type deduplication is performed up to this vertex count.
pub const TYPE_DEDUP_LIMIT: usize = 5;

/// A finite simple graph: symmetric, zero-diagonal bit-row adjacency.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: BitMatrix,
}

impl Graph {
    /// The graph on `n` vertices with no edges.
    pub fn null(n: usize) -> Self {
        Self {
            n,
            adj: BitMatrix::zeros(n, n),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::null(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::null(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Star with center 0 and leaves `1..n`.
    pub fn star(n: usize) -> Self {
        let mut g = Self::null(n);
        for i in 1..n {
            g.add_edge(0, i);
        }
        g
    }

    /// `k` disjoint edges `(0,1), (2,3), ...` followed by isolated vertices.
    pub fn canonical(n: usize, k: usize) -> Self {
        assert!(2 * k <= n, "canonical graph requires 2k <= n");
        let mut g = Self::null(n);
        for j in 0..k {
            g.add_edge(2 * j, 2 * j + 1);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::null(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parse(format!(
                    "edge ({u}, {v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::Parse(format!("self-loop at vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Wraps an adjacency matrix, validating symmetry and zero diagonal.
    pub fn from_adjacency(adj: BitMatrix) -> Result<Self> {
        if adj.n_rows() != adj.n_cols() {
            return Err(Error::ShapeMismatch(format!(
                "adjacency must be square, got {}x{}",
                adj.n_rows(),
                adj.n_cols()
            )));
        }
        if !adj.is_symmetric() || !adj.has_zero_diagonal() {
            return Err(Error::NotAlternating(
                "adjacency must be symmetric with zero diagonal".into(),
            ));
        }
        Ok(Self {
            n: adj.n_rows(),
            adj,
        })
    }

    /// Uniformly random graph (every edge a fair coin).
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Self {
        Self {
            n,
            adj: gf2::random_alternating(n, rng),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "no self-loops");
        self.adj.set(u, v, true);
        self.adj.set(v, u, true);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    /// Neighbourhood of `u` as a bit row.
    pub fn neighbors(&self, u: usize) -> &BitVec {
        self.adj.row(u)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj.row(u).count_ones()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.adj.row(u).ones() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Induced subgraph on the given vertices, in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let m = vertices.len();
        let mut g = Self::null(m);
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate() {
                if b > a && self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Parity of the crossing-edge count `|{(i, j) : i ∈ s, j ∈ t, ij ∈ E}|`.
    pub fn crossing_parity(&self, s: &BitVec, t: &BitVec) -> bool {
        let mut total = 0usize;
        for i in s.ones() {
            total += self.adj.row(i).count_and(t);
        }
        total % 2 == 1
    }

    /// The sign `(-1)^{crossing edges between s and t}`.
    ///
    /// Symmetric and bimultiplicative with respect to symmetric difference;
    /// this is the commutation sign of the generator words over `s` and `t`.
    pub fn cocycle(&self, s: &BitVec, t: &BitVec) -> i32 {
        if self.crossing_parity(s, t) {
            -1
        } else {
            1
        }
    }

    /// Number of edges with both endpoints in `s`.
    pub fn edges_inside(&self, s: &BitVec) -> usize {
        let mut total = 0usize;
        for i in s.ones() {
            total += self.adj.row(i).count_and(s);
        }
        total / 2
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

// ---------------------------------------------------------------------------
// Rewriting moves and canonical forms
// ---------------------------------------------------------------------------

/// The rewriting move replacing vertex `x` by the product of the generators
/// over `s` (with `x ∈ s`), reusing index `x` for the new vertex.
#[derive(Clone, Debug)]
pub struct SwitchMove {
    pub x: usize,
    pub s: BitVec,
}

impl SwitchMove {
    pub fn new(x: usize, s: BitVec) -> Self {
        Self { x, s }
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        if self.s.len() != g.n() || self.x >= g.n() {
            return Err(Error::InvalidMove(format!(
                "move indices out of range for n={}",
                g.n()
            )));
        }
        if self.s.is_zero() {
            return Err(Error::InvalidMove("move set is empty".into()));
        }
        if !self.s.get(self.x) {
            return Err(Error::InvalidMove(format!(
                "replaced vertex {} is not in the move set",
                self.x
            )));
        }
        Ok(())
    }
}

/// Applies a rewriting move: the new vertex at index `x` is adjacent to `u`
/// exactly when `|{w ∈ s : w ~ u}|` is odd; all other adjacencies are kept.
pub fn apply_switch(g: &Graph, m: &SwitchMove) -> Result<Graph> {
    m.validate(g)?;
    let n = g.n();
    // New row = XOR of the rows over s; the diagonal entry is cleared.
    let mut new_row = BitVec::zeros(n);
    for w in m.s.ones() {
        new_row.xor_assign(g.adj.row(w));
    }
    new_row.set(m.x, false);
    let mut adj = g.adj.clone();
    for u in 0..n {
        adj.set(u, m.x, new_row.get(u));
    }
    *adj.row_mut(m.x) = new_row;
    Ok(Graph { n, adj })
}

/// Replays a move script in order.
pub fn replay(g: &Graph, moves: &[SwitchMove]) -> Result<Graph> {
    let mut cur = g.clone();
    for m in moves {
        cur = apply_switch(&cur, m)?;
    }
    Ok(cur)
}

/// Certificate that a graph reduces to the canonical graph with `k` disjoint
/// edges and `l` isolated vertices.
///
/// Replaying `moves` on the source graph yields `Graph::canonical(n, k)`.
/// `basis` is the GF(2) shadow of the script: column `j` of `basis.forward`
/// is the support of canonical generator `j` as a word over the original
/// vertices, so `forwardᵀ · A · forward` is the canonical adjacency.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub k: usize,
    pub l: usize,
    pub moves: Vec<SwitchMove>,
    pub basis: BasisChange,
}

/// Reduces `g` to canonical form by rewriting moves.
///
/// Follows the inductive reduction: each new vertex is first detached from
/// the matched pairs (one combined move per vertex), then its remaining
/// neighbours among the isolated vertices are merged into a single new pair,
/// which is finally swapped into position. The resulting `k` is cross-checked
/// against the GF(2) rank; a mismatch is an internal error.
pub fn canonicalize(g: &Graph) -> CanonicalForm {
    let n = g.n();
    let mut cur = g.clone();
    // Row j of `words` = support of the current vertex j over the originals.
    let mut words = BitMatrix::identity(n);
    let mut moves: Vec<SwitchMove> = Vec::new();
    let mut k = 0usize;

    let do_move = |cur: &mut Graph, words: &mut BitMatrix, moves: &mut Vec<SwitchMove>, x: usize, s: BitVec| {
        let m = SwitchMove::new(x, s);
        *cur = apply_switch(cur, &m).expect("internal move is legal");
        let mut row = BitVec::zeros(n);
        for w in m.s.ones() {
            row.xor_assign(words.row(w));
        }
        *words.row_mut(x) = row;
        moves.push(m);
    };

    for t in 0..n {
        // Invariant: vertices 0..t form the canonical graph with k pairs at
        // the front. Detach vertex t from every pair: multiplying by one
        // member of a pair flips adjacency to the other and nothing else.
        let mut s = BitVec::zeros(n);
        s.set(t, true);
        let mut touched = false;
        for j in 0..k {
            let (a, b) = (2 * j, 2 * j + 1);
            if cur.has_edge(t, a) {
                s.flip(b);
                touched = true;
            }
            if cur.has_edge(t, b) {
                s.flip(a);
                touched = true;
            }
        }
        if touched {
            do_move(&mut cur, &mut words, &mut moves, t, s);
        }

        // Remaining neighbours of t in the prefix are isolated vertices.
        let nbrs: Vec<usize> = (2 * k..t).filter(|&u| cur.has_edge(t, u)).collect();
        if nbrs.is_empty() {
            continue;
        }
        // Multiply every further neighbour by the first one; afterwards t is
        // adjacent to nbrs[0] alone.
        let y = nbrs[0];
        for &yj in &nbrs[1..] {
            let s = BitVec::from_indices(n, &[y, yj]);
            do_move(&mut cur, &mut words, &mut moves, yj, s);
        }
        // Swap the fresh pair (y, t) into slots (2k, 2k+1). A swap of slots
        // (a, b) is three moves, the XOR-swap pattern.
        let swap = |cur: &mut Graph, words: &mut BitMatrix, moves: &mut Vec<SwitchMove>, a: usize, b: usize| {
            if a == b {
                return;
            }
            let s = BitVec::from_indices(n, &[a, b]);
            do_move(cur, words, moves, a, s.clone());
            do_move(cur, words, moves, b, s.clone());
            do_move(cur, words, moves, a, s);
        };
        swap(&mut cur, &mut words, &mut moves, y, 2 * k);
        swap(&mut cur, &mut words, &mut moves, t, 2 * k + 1);
        k += 1;
    }

    debug_assert_eq!(cur, Graph::canonical(n, k), "reduction did not terminate canonically");

    // Independent oracle: half the GF(2) rank of the adjacency matrix.
    let rank = g.adj.rank();
    assert_eq!(
        2 * k,
        rank,
        "internal error: move reduction found k={k} but the GF(2) rank is {rank}"
    );

    let forward = words.transpose();
    let inverse = forward
        .invert()
        .expect("move script shadow is invertible");
    debug_assert_eq!(
        forward.transpose().multiply(&g.adj).multiply(&forward),
        gf2::hyperbolic_form(n, k),
        "basis change does not transport the adjacency form"
    );

    CanonicalForm {
        k,
        l: n - 2 * k,
        moves,
        basis: BasisChange { forward, inverse },
    }
}

// ---------------------------------------------------------------------------
// Classification and equivalence
// ---------------------------------------------------------------------------

/// The isomorphism class `M_{2^k} ⊗ C^{2^l}` of the algebra of a graph.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AlgebraClass {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub label: String,
    pub simple: bool,
}

fn power_of_two_label(e: usize) -> String {
    if e <= 40 {
        (1u64 << e).to_string()
    } else {
        format!("2^{e}")
    }
}

impl AlgebraClass {
    pub fn new(n: usize, k: usize) -> Self {
        let l = n - 2 * k;
        let label = if l == 0 {
            format!("M_{}", power_of_two_label(k))
        } else {
            format!(
                "M_{} ⊗ C^{}",
                power_of_two_label(k),
                power_of_two_label(l)
            )
        };
        Self {
            n,
            k,
            l,
            label,
            simple: l == 0,
        }
    }
}

/// Computes the algebra class of `g`.
pub fn classify(g: &Graph) -> AlgebraClass {
    AlgebraClass::new(g.n(), canonicalize(g).k)
}

/// Decides whether the algebras of `g` and `h` are isomorphic: equal vertex
/// counts and equal invariant `k`.
pub fn equivalent(g: &Graph, h: &Graph) -> bool {
    g.n() == h.n() && canonicalize(g).k == canonicalize(h).k
}

/// Simplicity of the algebra, with a witness on failure: a nonempty vertex
/// set `s` whose generator word is central (every vertex has even adjacency
/// count into `s`).
pub fn is_simple(g: &Graph) -> (bool, Option<BitVec>) {
    let kernel = g.adjacency().kernel_basis();
    match kernel.into_iter().next() {
        None => (true, None),
        Some(witness) => (false, Some(witness)),
    }
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

/// Per-class row of an enumeration table.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ClassCount {
    pub k: usize,
    pub labeled: u64,
    /// Isomorphism types; present for `n <= 5`.
    pub types: Option<u64>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct EnumerationTable {
    pub n: usize,
    pub labeled_total: u64,
    pub classes: Vec<ClassCount>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // Lexicographic over pairs (i, j), i < j.
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Decodes a labeled graph from its upper-triangle bit code.
pub fn graph_from_code(n: usize, code: u64) -> Graph {
    let mut g = Graph::null(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if code >> pair_index(n, i, j) & 1 == 1 {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Encodes a labeled graph as its upper-triangle bit code.
pub fn graph_to_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n * (n - 1) / 2 <= 64, "graph too large for a u64 code");
    let mut code = 0u64;
    for (i, j) in g.edges() {
        code |= 1 << pair_index(n, i, j);
    }
    code
}

fn permute_code(n: usize, code: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            if code >> pair_index(n, i, j) & 1 == 1 {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                out |= 1 << pair_index(n, a, b);
            }
        }
    }
    out
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut perms = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut perms);
    perms
}

/// Classifies every labeled graph on `n` vertices exhaustively, reporting the
/// labeled count per invariant `k` and, for `n <= 5`, the count of
/// isomorphism types per `k`. The labeled-graph space may be partitioned
/// across `jobs` worker threads; the merged table does not depend on `jobs`.
pub fn enumerate_classes(n: usize, jobs: usize) -> Result<EnumerationTable> {
    if n > ENUMERATE_LIMIT {
        return Err(Error::LimitExceeded {
            what: "enumeration vertex count",
            requested: n,
            limit: ENUMERATE_LIMIT,
        });
    }
    let bits = n * (n - 1) / 2;
    let total: u64 = 1 << bits;
    let max_k = n / 2;
    let jobs = jobs.max(1).min(total as usize);

    let count_range = |lo: u64, hi: u64| -> Vec<u64> {
        let mut counts = vec![0u64; max_k + 1];
        for code in lo..hi {
            let g = graph_from_code(n, code);
            let k = g.adjacency().rank() / 2;
            counts[k] += 1;
        }
        counts
    };

    let mut labeled = vec![0u64; max_k + 1];
    if jobs == 1 {
        labeled = count_range(0, total);
    } else {
        let chunk = total.div_ceil(jobs as u64);
        let partials: Vec<Vec<u64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs as u64)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    scope.spawn(move || count_range(lo, hi.max(lo)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for part in partials {
            for (acc, x) in labeled.iter_mut().zip(part) {
                *acc += x;
            }
        }
    }

    let types = if n <= TYPE_DEDUP_LIMIT {
        let perms = all_permutations(n);
        let mut reps: Vec<HashSet<u64>> = vec![HashSet::new(); max_k + 1];
        for code in 0..total {
            let canon = perms
                .iter()
                .map(|p| permute_code(n, code, p))
                .min()
                .unwrap_or(code);
            if canon == code {
                let k = graph_from_code(n, code).adjacency().rank() / 2;
                reps[k].insert(code);
            }
        }
        Some(reps)
    } else {
        None
    };

    let classes = (0..=max_k)
        .map(|k| ClassCount {
            k,
            labeled: labeled[k],
            types: types.as_ref().map(|t| t[k].len() as u64),
        })
        .collect();
    Ok(EnumerationTable {
        n,
        labeled_total: total,
        classes,
    })
}

// ---------------------------------------------------------------------------
// The subset graph G^{<∞}
// ---------------------------------------------------------------------------

/// The graph on all nonempty vertex subsets of `g`, where `s ~ t` exactly
/// when the crossing-edge count between `s` and `t` is odd. Subsets are
/// ordered by their characteristic vector read as a binary number, so the
/// vertex at index `m - 1` is the subset with mask `m`.
pub fn g_infinity(g: &Graph) -> Result<Graph> {
    g_infinity_capped(g, G_INFINITY_LIMIT)
}

/// `g_infinity` with an explicit cap on the input vertex count (itself
/// bounded by [`G_INFINITY_HARD_LIMIT`]).
pub fn g_infinity_capped(g: &Graph, cap: usize) -> Result<Graph> {
    let n = g.n();
    let cap = cap.min(G_INFINITY_HARD_LIMIT);
    if n > cap {
        return Err(Error::LimitExceeded {
            what: "subset-graph vertex count",
            requested: n,
            limit: cap,
        });
    }
    // Row masks of the adjacency, so the crossing parity of (s, t) is the
    // bit-parity of (A·s) & t.
    let rows: Vec<u64> = (0..n)
        .map(|i| g.neighbors(i).ones().fold(0u64, |acc, j| acc | 1 << j))
        .collect();
    let m = (1usize << n) - 1;
    let image: Vec<u64> = (1..=m as u64)
        .map(|s| {
            (0..n)
                .filter(|&i| s >> i & 1 == 1)
                .fold(0u64, |acc, i| acc ^ rows[i])
        })
        .collect();
    let mut out = Graph::null(m);
    for s in 1..=m as u64 {
        for t in (s + 1)..=m as u64 {
            if (image[(s - 1) as usize] & t).count_ones() % 2 == 1 {
                out.add_edge((s - 1) as usize, (t - 1) as usize);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Small-graph isomorphism
// ---------------------------------------------------------------------------

/// Stable colour refinement: start from degrees, repeatedly split by the
/// multiset of neighbour colours. Both graphs share one colour table so the
/// resulting colours are comparable.
fn refine_colors(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let n = g.n();
    let mut cg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let mut ch: Vec<usize> = (0..n).map(|u| h.degree(u)).collect();
    for _ in 0..n {
        let mut table: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let next = |key: (usize, Vec<usize>), table: &mut BTreeMap<(usize, Vec<usize>), usize>| {
            let id = table.len();
            *table.entry(key).or_insert(id)
        };
        let signature = |graph: &Graph, colors: &[usize], u: usize| {
            let mut nbr: Vec<usize> = graph.neighbors(u).ones().map(|v| colors[v]).collect();
            nbr.sort_unstable();
            (colors[u], nbr)
        };
        let keys_g: Vec<_> = (0..n).map(|u| signature(g, &cg, u)).collect();
        let keys_h: Vec<_> = (0..n).map(|u| signature(h, &ch, u)).collect();
        let new_g: Vec<usize> = keys_g
            .into_iter()
            .map(|key| next(key, &mut table))
            .collect();
        let new_h: Vec<usize> = keys_h
            .into_iter()
            .map(|key| next(key, &mut table))
            .collect();
        if new_g == cg && new_h == ch {
            break;
        }
        cg = new_g;
        ch = new_h;
    }
    (cg, ch)
}

/// Searches for a vertex bijection preserving adjacency both ways.
///
/// Backtracking over a colour-refined candidate order; both graphs must have
/// at most [`ISO_VERTEX_LIMIT`] vertices.
pub fn graphs_isomorphic(g: &Graph, h: &Graph) -> Result<Option<Vec<usize>>> {
    for graph in [g, h] {
        if graph.n() > ISO_VERTEX_LIMIT {
            return Err(Error::LimitExceeded {
                what: "isomorphism vertex count",
                requested: graph.n(),
                limit: ISO_VERTEX_LIMIT,
            });
        }
    }
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let n = g.n();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let (cg, ch) = refine_colors(g, h);
    let mut sorted_g = cg.clone();
    let mut sorted_h = ch.clone();
    sorted_g.sort_unstable();
    sorted_h.sort_unstable();
    if sorted_g != sorted_h {
        return Ok(None);
    }

    // Assign vertices in order of ascending colour-class size.
    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &cg {
        *class_size.entry(c).or_insert(0) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (class_size[&cg[u]], cg[u], u));

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn backtrack(
        g: &Graph,
        h: &Graph,
        cg: &[usize],
        ch: &[usize],
        order: &[usize],
        pos: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let u = order[pos];
        'candidates: for v in 0..h.n() {
            if used[v] || ch[v] != cg[u] {
                continue;
            }
            for &w in &order[..pos] {
                if g.has_edge(u, w) != h.has_edge(v, map[w]) {
                    continue 'candidates;
                }
            }
            map[u] = v;
            used[v] = true;
            if backtrack(g, h, cg, ch, order, pos + 1, map, used) {
                return true;
            }
            used[v] = false;
            map[u] = usize::MAX;
        }
        false
    }

    if backtrack(g, h, &cg, &ch, &order, 0, &mut map, &mut used) {
        debug_assert!((0..n)
            .all(|u| (0..n).all(|v| g.has_edge(u, v) == h.has_edge(map[u], map[v]))));
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

/// Parses the graph text format: first significant line `n=<int>`, then one
/// `u v` edge per line, 0-based; `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph input".into()))?;
    let compact: String = header.chars().filter(|c| !c.is_whitespace()).collect();
    let n: usize = compact
        .strip_prefix("n=")
        .ok_or_else(|| Error::Parse(format!("expected 'n=<int>' header, got '{header}'")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid vertex count in '{header}'")))?;
    let mut edges = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(Error::Parse(format!(
                    "expected 'u v' edge line, got '{line}'"
                )))
            }
        };
        let u: usize = u
            .parse()
            .map_err(|_| Error::Parse(format!("invalid vertex '{u}'")))?;
        let v: usize = v
            .parse()
            .map_err(|_| Error::Parse(format!("invalid vertex '{v}'")))?;
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// Serializes to the graph text format with edges sorted.
pub fn graph_to_text(g: &Graph) -> String {
    let mut out = format!("n={}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// DOT export for visualization.
pub fn graph_to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for u in 0..g.n() {
        out.push_str(&format!("  {u};\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn switch_on_triangle_gives_path() {
        // Vertices x=0, y=1, z=2; replace z by {y, z}.
        let g = Graph::complete(3);
        let m = SwitchMove::new(2, BitVec::from_indices(3, &[1, 2]));
        let out = apply_switch(&g, &m).unwrap();
        assert_eq!(out.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn singleton_move_is_identity() {
        let g = Graph::random(6, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
        let m = SwitchMove::new(4, BitVec::from_indices(6, &[4]));
        assert_eq!(apply_switch(&g, &m).unwrap(), g);
    }

    #[test]
    fn star_leaf_merge_drops_edge() {
        // Center 0, leaves 1..=3; replace leaf 2 by {1, 2}.
        let g = Graph::star(4);
        let m = SwitchMove::new(2, BitVec::from_indices(4, &[1, 2]));
        let out = apply_switch(&g, &m).unwrap();
        assert!(!out.has_edge(0, 2));
        assert!(out.has_edge(0, 1) && out.has_edge(0, 3));
        assert!(!out.has_edge(1, 2));
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let g = Graph::null(3);
        let empty = SwitchMove::new(0, BitVec::zeros(3));
        assert!(apply_switch(&g, &empty).is_err());
        let missing_x = SwitchMove::new(0, BitVec::from_indices(3, &[1]));
        assert!(apply_switch(&g, &missing_x).is_err());
        let out_of_range = SwitchMove::new(5, BitVec::from_indices(3, &[1]));
        assert!(apply_switch(&g, &out_of_range).is_err());
    }

    #[test]
    fn empty_graph_is_legal_everywhere() {
        let g = Graph::null(0);
        let form = canonicalize(&g);
        assert_eq!((form.k, form.l), (0, 0));
        let class = classify(&g);
        assert!(class.simple);
        assert_eq!(class.label, "M_1");
        assert!(graphs_isomorphic(&g, &g).unwrap().is_some());
    }

    #[test]
    fn canonicalize_examples() {
        let cases = [
            (Graph::null(4), 0, 4),
            (Graph::canonical(2, 1), 1, 0),
            (Graph::complete(3), 1, 1),
            (Graph::complete(4), 2, 0),
        ];
        for (g, k, l) in cases {
            let form = canonicalize(&g);
            assert_eq!((form.k, form.l), (k, l), "graph {g:?}");
        }
    }

    #[test]
    fn canonicalize_replay_and_basis() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 0..=9 {
            for _ in 0..20 {
                let g = Graph::random(n, &mut rng);
                let form = canonicalize(&g);
                assert_eq!(2 * form.k + form.l, n);
                let replayed = replay(&g, &form.moves).unwrap();
                assert_eq!(replayed, Graph::canonical(n, form.k));
                assert!(form.basis.is_consistent());
            }
        }
    }

    #[test]
    fn classify_examples() {
        let two_edges = Graph::canonical(4, 2);
        let class = classify(&two_edges);
        assert_eq!(class.label, "M_4");
        assert!(class.simple);

        let star = classify(&Graph::star(4));
        assert_eq!((star.k, star.l), (1, 2));
        assert_eq!(star.label, "M_2 ⊗ C^4");
        assert!(!star.simple);

        let point = classify(&Graph::null(1));
        assert_eq!((point.k, point.l), (0, 1));
        assert!(!point.simple);

        assert_eq!(classify(&Graph::null(4)).label, "M_1 ⊗ C^16");
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(&Graph::complete(3), &Graph::path(3)));
        assert!(!equivalent(&Graph::null(4), &Graph::complete(4)));
        let g = Graph::random(7, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
        assert!(equivalent(&g, &g));
    }

    #[test]
    fn classify_is_move_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = 2 + (rng.random::<u32>() % 8) as usize;
            let g = Graph::random(n, &mut rng);
            let x = (rng.random::<u32>() as usize) % n;
            let mut s = BitVec::zeros(n);
            for i in 0..n {
                s.set(i, rng.random());
            }
            s.set(x, true);
            let moved = apply_switch(&g, &SwitchMove::new(x, s)).unwrap();
            assert_eq!(classify(&g), classify(&moved));
        }
    }

    #[test]
    fn is_simple_examples() {
        let (simple, witness) = is_simple(&Graph::canonical(2, 1));
        assert!(simple && witness.is_none());

        let (simple, witness) = is_simple(&Graph::null(3));
        assert!(!simple);
        assert_eq!(witness.unwrap(), BitVec::from_indices(3, &[0]));

        // Odd vertex counts always have a nontrivial kernel.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in [3usize, 5] {
            let codes = 1u64 << (n * (n - 1) / 2);
            for code in 0..codes {
                let g = graph_from_code(n, code);
                let (simple, witness) = is_simple(&g);
                assert!(!simple);
                let w = witness.unwrap();
                assert!(!w.is_zero());
                for v in 0..n {
                    assert_eq!(g.neighbors(v).count_and(&w) % 2, 0);
                }
            }
        }
        let _ = &mut rng;
    }

    #[test]
    fn simplicity_matches_the_class() {
        for n in 1..=4usize {
            for code in 0..1u64 << (n * (n - 1) / 2) {
                let g = graph_from_code(n, code);
                let (simple, _) = is_simple(&g);
                assert_eq!(simple, classify(&g).l == 0);
            }
        }
    }

    #[test]
    fn enumerate_four_vertices() {
        let table = enumerate_classes(4, 1).unwrap();
        assert_eq!(table.labeled_total, 64);
        let types: Vec<u64> = table.classes.iter().map(|c| c.types.unwrap()).collect();
        assert_eq!(types, vec![1, 6, 4]);
    }

    #[test]
    fn enumerate_is_job_independent() {
        let a = enumerate_classes(5, 1).unwrap();
        let b = enumerate_classes(5, 4).unwrap();
        for (x, y) in a.classes.iter().zip(&b.classes) {
            assert_eq!(x.labeled, y.labeled);
            assert_eq!(x.types, y.types);
        }
    }

    #[test]
    fn g_infinity_of_an_edge_is_a_triangle() {
        let edge = Graph::canonical(2, 1);
        let out = g_infinity(&edge).unwrap();
        assert_eq!(out.n(), 3);
        assert_eq!(out.edge_count(), 3);
    }

    #[test]
    fn g_infinity_trivial_cases() {
        let single = g_infinity(&Graph::null(1)).unwrap();
        assert_eq!(single.n(), 1);
        assert_eq!(single.edge_count(), 0);

        let null = g_infinity(&Graph::null(4)).unwrap();
        assert_eq!(null.n(), 15);
        assert_eq!(null.edge_count(), 0);

        assert!(g_infinity(&Graph::null(5)).is_err());
        // The caller-supplied cap cannot exceed the hard ceiling.
        assert!(g_infinity_capped(&Graph::null(13), usize::MAX).is_err());
        assert!(g_infinity_capped(&Graph::null(5), 5).is_ok());
    }

    #[test]
    fn isomorphism_examples() {
        let k3 = Graph::complete(3);
        let relabeled = Graph::from_edges(3, &[(2, 1), (1, 0), (0, 2)]).unwrap();
        assert!(graphs_isomorphic(&k3, &relabeled).unwrap().is_some());
        assert!(graphs_isomorphic(&k3, &Graph::path(3)).unwrap().is_none());

        let ginf = g_infinity(&Graph::canonical(2, 1)).unwrap();
        assert!(graphs_isomorphic(&ginf, &k3).unwrap().is_some());
    }

    #[test]
    fn isomorphism_respects_limit() {
        let big = Graph::null(17);
        assert!(graphs_isomorphic(&big, &big).is_err());
    }

    #[test]
    fn isomorphism_found_maps_preserve_edges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = 1 + (rng.random::<u32>() % 8) as usize;
            let g = Graph::random(n, &mut rng);
            // Random relabeling of g.
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = (rng.random::<u32>() as usize) % (i + 1);
                perm.swap(i, j);
            }
            let mut h = Graph::null(n);
            for (u, v) in g.edges() {
                h.add_edge(perm[u], perm[v]);
            }
            let map = graphs_isomorphic(&g, &h).unwrap().expect("relabeling is an isomorphism");
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(g.has_edge(u, v), h.has_edge(map[u], map[v]));
                }
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let g = Graph::complete(3);
        let empty = BitVec::zeros(3);
        let ab = BitVec::from_indices(3, &[0, 1]);
        let bc = BitVec::from_indices(3, &[1, 2]);
        assert_eq!(g.cocycle(&empty, &ab), 1);
        assert_eq!(g.cocycle(&ab, &bc), -1);

        let edge = Graph::canonical(2, 1);
        let a = BitVec::from_indices(2, &[0]);
        let b = BitVec::from_indices(2, &[1]);
        assert_eq!(edge.cocycle(&a, &b), -1);
    }

    #[test]
    fn cocycle_laws() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = 1 + (rng.random::<u32>() % 8) as usize;
            let g = Graph::random(n, &mut rng);
            let rand_set = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut s = BitVec::zeros(n);
                for i in 0..n {
                    s.set(i, rng.random());
                }
                s
            };
            let s = rand_set(&mut rng);
            let t1 = rand_set(&mut rng);
            let t2 = rand_set(&mut rng);
            assert_eq!(g.cocycle(&s, &t1), g.cocycle(&t1, &s));
            let mut sym = t1.clone();
            sym.xor_assign(&t2);
            assert_eq!(g.cocycle(&s, &sym), g.cocycle(&s, &t1) * g.cocycle(&s, &t2));
            if g.edges_inside(&s) % 2 == 0 {
                assert_eq!(g.cocycle(&s, &s), 1);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 4), (1, 3)]).unwrap();
        let text = graph_to_text(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);

        let with_comments = "# a comment\n n=3 \n0 1 # edge\n\n1 2\n";
        let parsed = parse_graph(with_comments).unwrap();
        assert_eq!(parsed, Graph::path(3));

        assert!(parse_graph("m=3\n").is_err());
        assert!(parse_graph("n=2\n0 0\n").is_err());
        assert!(parse_graph("n=2\n0 5\n").is_err());
        assert!(parse_graph("n=2\n0\n").is_err());
    }

    #[test]
    fn dot_output_contains_edges() {
        let dot = graph_to_dot(&Graph::path(3));
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.contains("1 -- 2;"));
    }
}
