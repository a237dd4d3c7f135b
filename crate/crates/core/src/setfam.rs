//! Finite set families and their combinatorics.
//!
//! A family is an indexed multiset of subsets of a finite universe
//! `Y = {0..m-1}`: duplicates and empty members are permitted, and the
//! double-dual identity below only holds literally because indices are
//! preserved. The module provides the independence and covering predicates,
//! the separation property standing in for density of the family in `2^Y`,
//! duality, the tree-coded independent family at finite depth, bipartite
//! incidence graphs, and the finite extension step producing full-matrix
//! subpatterns.

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::graph::Graph;
use std::fmt::Write as _;

/// Universe cap for the exhaustive separation check.
pub const SEPARATING_EXHAUSTIVE_LIMIT: usize = 12;
/// Depth cap for `fk_family`; the universe grows as `Σ_{m<=depth} 2^(2^m)`.
pub const FK_DEPTH_LIMIT: usize = 3;

/// An indexed multiset of subsets of `{0..universe_size-1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetFamily {
    universe_size: usize,
    members: Vec<BitVec>,
}

impl SetFamily {
    pub fn new(universe_size: usize, members: Vec<BitVec>) -> Result<Self> {
        for (i, x) in members.iter().enumerate() {
            if x.len() != universe_size {
                return Err(Error::ShapeMismatch(format!(
                    "member {i} has width {} but the universe has size {universe_size}",
                    x.len()
                )));
            }
        }
        Ok(Self {
            universe_size,
            members,
        })
    }

    pub fn from_indices(universe_size: usize, members: &[&[usize]]) -> Self {
        Self {
            universe_size,
            members: members
                .iter()
                .map(|ix| BitVec::from_indices(universe_size, ix))
                .collect(),
        }
    }

    /// All singletons of the universe, in order.
    pub fn singletons(universe_size: usize) -> Self {
        Self {
            universe_size,
            members: (0..universe_size)
                .map(|i| BitVec::from_indices(universe_size, &[i]))
                .collect(),
        }
    }

    /// All `2^m` subsets of the universe in binary-counting order.
    pub fn power_set(universe_size: usize) -> Self {
        assert!(universe_size < 20, "power set universe too large");
        let members = (0u64..1 << universe_size)
            .map(|mask| {
                let mut v = BitVec::zeros(universe_size);
                for i in 0..universe_size {
                    if mask >> i & 1 == 1 {
                        v.set(i, true);
                    }
                }
                v
            })
            .collect();
        Self {
            universe_size,
            members,
        }
    }

    /// All nonempty subsets in binary-counting order.
    pub fn power_set_nonempty(universe_size: usize) -> Self {
        let mut fam = Self::power_set(universe_size);
        fam.members.remove(0);
        fam
    }

    pub fn random(universe_size: usize, count: usize, rng: &mut impl rand::Rng) -> Self {
        let members = (0..count)
            .map(|_| {
                let mut v = BitVec::zeros(universe_size);
                for i in 0..universe_size {
                    v.set(i, rng.random());
                }
                v
            })
            .collect();
        Self {
            universe_size,
            members,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn members(&self) -> &[BitVec] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &BitVec {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The dual family over the member index set: `z(i) = {x : i ∈ member x}`
    /// for each universe element `i`, in universe order. Dualizing twice
    /// returns the original indexed multiset.
    pub fn dual(&self) -> SetFamily {
        let n = self.members.len();
        let members = (0..self.universe_size)
            .map(|i| {
                let mut z = BitVec::zeros(n);
                for (x, member) in self.members.iter().enumerate() {
                    if member.get(i) {
                        z.set(x, true);
                    }
                }
                z
            })
            .collect();
        SetFamily {
            universe_size: n,
            members,
        }
    }

    /// Checks independence over all disjoint selections `(F, G)` of member
    /// indices with `F ≠ ∅` and `|F| + |G| <= max_selection` (clamped to the
    /// member count): every Boolean combination `∩F \ ∪G` must be nonempty.
    /// On failure the first violating selection in enumeration order is
    /// returned.
    pub fn is_independent(&self, max_selection: usize) -> IndependenceCheck {
        let n = self.members.len();
        let cap = max_selection.min(n);
        for t in 1..=cap {
            let mut found = None;
            for_each_combination(n, t, &mut |combo| {
                for split in 1u32..(1 << t) {
                    let mut value = BitVec::full(self.universe_size);
                    for (b, &idx) in combo.iter().enumerate() {
                        if split >> b & 1 == 1 {
                            value.and_assign(&self.members[idx]);
                        }
                    }
                    for (b, &idx) in combo.iter().enumerate() {
                        if split >> b & 1 == 0 {
                            value.andnot_assign(&self.members[idx]);
                        }
                    }
                    if value.is_zero() {
                        let f: Vec<usize> = combo
                            .iter()
                            .enumerate()
                            .filter(|(b, _)| split >> b & 1 == 1)
                            .map(|(_, &i)| i)
                            .collect();
                        let g: Vec<usize> = combo
                            .iter()
                            .enumerate()
                            .filter(|(b, _)| split >> b & 1 == 0)
                            .map(|(_, &i)| i)
                            .collect();
                        found = Some((f, g));
                        return false;
                    }
                }
                true
            });
            if let Some((f, g)) = found {
                return IndependenceCheck {
                    independent: false,
                    counterexample: Some((f, g)),
                };
            }
        }
        IndependenceCheck {
            independent: true,
            counterexample: None,
        }
    }

    /// Exhaustive separation check: for every nonempty `s ⊆ Y` and every
    /// `j ∈ s` some member meets `s` exactly in `{j}`. Limited to universes
    /// of size at most [`SEPARATING_EXHAUSTIVE_LIMIT`]; use
    /// [`SetFamily::separating_report`] with an explicit size bound beyond.
    pub fn is_separating(&self) -> Result<bool> {
        if self.universe_size > SEPARATING_EXHAUSTIVE_LIMIT {
            return Err(Error::LimitExceeded {
                what: "separation-check universe",
                requested: self.universe_size,
                limit: SEPARATING_EXHAUSTIVE_LIMIT,
            });
        }
        Ok(self.separating_report(self.universe_size).is_separating())
    }

    /// Checks the separation condition over all `s` with `|s| <= max_s`,
    /// reporting which `(s, j)` pairs are witnessed.
    pub fn separating_report(&self, max_s: usize) -> SeparatingReport {
        let m = self.universe_size;
        let bound = max_s.min(m);
        let mut satisfied = 0usize;
        let mut total = 0usize;
        let mut unsatisfied = Vec::new();
        for t in 1..=bound {
            for_each_combination(m, t, &mut |combo| {
                let s = BitVec::from_indices(m, combo);
                for &j in combo {
                    total += 1;
                    let witnessed = self
                        .members
                        .iter()
                        .any(|x| x.get(j) && x.count_and(&s) == 1);
                    if witnessed {
                        satisfied += 1;
                    } else {
                        unsatisfied.push((combo.to_vec(), j));
                    }
                }
                true
            });
        }
        SeparatingReport {
            bound,
            total,
            satisfied,
            unsatisfied,
        }
    }

    /// True when every member keeps an element outside the union of all the
    /// other members (the worst finite union).
    pub fn is_noncovered(&self) -> bool {
        for (i, x) in self.members.iter().enumerate() {
            let mut rest = x.clone();
            for (j, y) in self.members.iter().enumerate() {
                if i != j {
                    rest.andnot_assign(y);
                }
            }
            if rest.is_zero() {
                return false;
            }
        }
        true
    }

    /// True when `|x ∩ y| <= threshold` for all distinct member indices.
    pub fn is_almost_disjoint(&self, threshold: usize) -> bool {
        for i in 0..self.members.len() {
            for j in (i + 1)..self.members.len() {
                if self.members[i].count_and(&self.members[j]) > threshold {
                    return false;
                }
            }
        }
        true
    }

    /// The bipartite incidence graph: vertices `0..m` are the universe,
    /// vertices `m..m+N` are the members, and element `i` is adjacent to
    /// member `x` exactly when `i ∈ x`.
    pub fn bipartite_graph(&self) -> Graph {
        let m = self.universe_size;
        let mut g = Graph::null(m + self.members.len());
        for (x, member) in self.members.iter().enumerate() {
            for i in member.ones() {
                g.add_edge(i, m + x);
            }
        }
        g
    }

    /// Extends a finite pair to one realizing the full-matrix pattern.
    ///
    /// The pair is first padded towards equal sizes (best-effort, see
    /// below). Each member of the pair then receives a fresh private element
    /// (inside it but outside every other chosen member and every chosen
    /// element), and each element receives a separating member (meeting the
    /// chosen elements exactly in it). The result has equally many members
    /// and elements and their incidence realizes the split pattern, so the
    /// induced subgraph of the bipartite graph generates a full matrix
    /// algebra (`l = 0` under `classify`).
    ///
    /// At finite scale the universe may simply be too small to supply the
    /// fresh elements or separating members; that is reported as a
    /// resource-exhaustion error.
    pub fn extend_to_full_matrix(&self, pair: &FinitePair) -> Result<MatrixPattern> {
        let m = self.universe_size;
        let n = self.members.len();
        for &x in &pair.members {
            if x >= n {
                return Err(Error::Parse(format!("member index {x} out of range")));
            }
        }
        for &e in &pair.elements {
            if e >= m {
                return Err(Error::Parse(format!("element {e} out of range")));
            }
        }

        let mut f_set: Vec<usize> = pair.members.clone();
        f_set.sort_unstable();
        f_set.dedup();
        let mut g_set: Vec<usize> = pair.elements.clone();
        g_set.sort_unstable();
        g_set.dedup();

        // The construction balances the sizes by itself (each member gets a
        // fresh private element, each element a separating member), so
        // padding towards |F| = |G| is only a normalization. It is applied
        // best-effort: a padding element must lie outside the chosen members
        // (otherwise it could consume a member's private points) and a
        // padding member must bring a point of its own; when no safe pad
        // exists the sides are left unequal.
        let mut f_union = BitVec::zeros(m);
        for &x in &f_set {
            for e in self.members[x].ones() {
                f_union.set(e, true);
            }
        }
        while f_set.len() < g_set.len() {
            let has_private = |x: &usize| {
                let mut pool = self.members[*x].clone();
                pool.andnot_assign(&f_union);
                for &e in &g_set {
                    pool.set(e, false);
                }
                !pool.is_zero()
            };
            let Some(next) = (0..n).find(|x| !f_set.contains(x) && has_private(x)) else {
                break;
            };
            for e in self.members[next].ones() {
                f_union.set(e, true);
            }
            f_set.push(next);
            f_set.sort_unstable();
        }
        while g_set.len() < f_set.len() {
            let Some(next) = (0..m).find(|&e| !g_set.contains(&e) && !f_union.get(e)) else {
                break;
            };
            g_set.push(next);
            g_set.sort_unstable();
        }

        // Fresh private elements for the members of F.
        let mut fresh: Vec<usize> = Vec::with_capacity(f_set.len());
        for (a, &x) in f_set.iter().enumerate() {
            let mut pool = self.members[x].clone();
            for (b, &other) in f_set.iter().enumerate() {
                if a != b {
                    pool.andnot_assign(&self.members[other]);
                }
            }
            for &e in g_set.iter().chain(&fresh) {
                pool.set(e, false);
            }
            let e = pool.first_one().ok_or_else(|| {
                Error::ResourceExhausted(format!(
                    "member {x} has no element outside the other chosen members and elements"
                ))
            })?;
            fresh.push(e);
        }

        // Separating members for the elements of G.
        let mut all_ks = BitVec::zeros(m);
        for &e in g_set.iter().chain(&fresh) {
            all_ks.set(e, true);
        }
        let mut separators: Vec<usize> = Vec::with_capacity(g_set.len());
        for &e in &g_set {
            let y = (0..n)
                .find(|&y| {
                    !f_set.contains(&y)
                        && !separators.contains(&y)
                        && self.members[y].get(e)
                        && self.members[y].count_and(&all_ks) == 1
                })
                .ok_or_else(|| {
                    Error::ResourceExhausted(format!(
                        "no member meets the chosen elements exactly in {{{e}}}"
                    ))
                })?;
            separators.push(y);
        }

        let mut matching: Vec<(usize, usize)> = g_set
            .iter()
            .copied()
            .zip(separators.iter().copied())
            .collect();
        matching.extend(fresh.iter().copied().zip(f_set.iter().copied()));

        // The split pattern: matched pairs before `split` are exact
        // (their element meets no other chosen member), matched pairs after
        // `split` have private elements.
        let split = g_set.len();
        for (a, &(ea, _)) in matching.iter().enumerate() {
            for (b, &(_, xb)) in matching.iter().enumerate() {
                let constrained = b < split || a >= split;
                if constrained {
                    debug_assert_eq!(
                        self.members[xb].get(ea),
                        a == b,
                        "extension does not satisfy the split pattern"
                    );
                }
            }
        }

        let mut members: Vec<usize> = matching.iter().map(|&(_, x)| x).collect();
        let mut elements: Vec<usize> = matching.iter().map(|&(e, _)| e).collect();
        members.sort_unstable();
        elements.sort_unstable();
        Ok(MatrixPattern {
            pair: FinitePair { members, elements },
            matching,
            split,
        })
    }

    /// Greedy separation repair by bounded symmetric-difference edits.
    ///
    /// Walks the unwitnessed `(s, j)` pairs (with `|s| <= s_bound`) in
    /// enumeration order; for each, tries members in index order and edits
    /// the first one whose rewrite `x ↦ (x \ s) ∪ {j}` fits the remaining
    /// budget, keeps the family independent at `selection_cap`, and strictly
    /// increases the number of witnessed pairs. Edits that fail any of these
    /// checks are rolled back.
    pub fn densify(
        &self,
        edit_budget: usize,
        selection_cap: usize,
        s_bound: usize,
    ) -> (SetFamily, DensifyReport) {
        let before = self.separating_report(s_bound);
        let mut fam = self.clone();
        let mut remaining = edit_budget;
        let mut best = before.satisfied;
        let mut edits: Vec<(usize, Vec<usize>)> = Vec::new();

        for (s_indices, j) in &before.unsatisfied {
            if remaining == 0 {
                break;
            }
            let s = BitVec::from_indices(self.universe_size, s_indices);
            // Skip pairs already repaired by an earlier edit.
            let witnessed = fam
                .members
                .iter()
                .any(|x| x.get(*j) && x.count_and(&s) == 1);
            if witnessed {
                continue;
            }
            for idx in 0..fam.members.len() {
                let mut candidate = fam.members[idx].clone();
                candidate.andnot_assign(&s);
                candidate.set(*j, true);
                let mut delta = candidate.clone();
                delta.xor_assign(&fam.members[idx]);
                let cost = delta.count_ones();
                if cost == 0 || cost > remaining {
                    continue;
                }
                let saved = std::mem::replace(&mut fam.members[idx], candidate);
                let report = fam.separating_report(s_bound);
                if report.satisfied > best && fam.is_independent(selection_cap).independent {
                    best = report.satisfied;
                    remaining -= cost;
                    edits.push((idx, delta.ones().collect()));
                    break;
                }
                fam.members[idx] = saved;
            }
        }

        let after = fam.separating_report(s_bound);
        let report = DensifyReport {
            s_bound: after.bound,
            selection_cap,
            edit_budget,
            edits_spent: edit_budget - remaining,
            pair_total: after.total,
            satisfied_before: before.satisfied,
            satisfied_after: after.satisfied,
            edits,
            unsatisfied: after.unsatisfied,
        };
        (fam, report)
    }
}

/// Outcome of an independence check.
#[derive(Clone, Debug)]
pub struct IndependenceCheck {
    pub independent: bool,
    /// A violating `(F, G)` selection of member indices, if any.
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
}

/// Which `(s, j)` pairs are witnessed by a member meeting `s` exactly in `j`.
#[derive(Clone, Debug)]
pub struct SeparatingReport {
    pub bound: usize,
    pub total: usize,
    pub satisfied: usize,
    pub unsatisfied: Vec<(Vec<usize>, usize)>,
}

impl SeparatingReport {
    pub fn is_separating(&self) -> bool {
        self.unsatisfied.is_empty()
    }
}

/// A finite selection: member indices and universe elements.
///
/// The two components play asymmetric roles in `extend_to_full_matrix`:
/// `members` are the chosen sets of the family and `elements` the chosen
/// points of the universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FinitePair {
    pub members: Vec<usize>,
    pub elements: Vec<usize>,
}

impl FinitePair {
    pub fn new(members: Vec<usize>, elements: Vec<usize>) -> Self {
        Self { members, elements }
    }
}

/// A pair extended to the full-matrix pattern, with the witnessing matching.
#[derive(Clone, Debug)]
pub struct MatrixPattern {
    pub pair: FinitePair,
    /// `(element, member index)` pairs; entry `a` is matched exactly when
    /// the pattern requires it.
    pub matching: Vec<(usize, usize)>,
    /// Entries before `split` came from the separation step.
    pub split: usize,
}

/// Report of a `densify` run.
#[derive(Clone, Debug)]
pub struct DensifyReport {
    pub s_bound: usize,
    pub selection_cap: usize,
    pub edit_budget: usize,
    pub edits_spent: usize,
    pub pair_total: usize,
    pub satisfied_before: usize,
    pub satisfied_after: usize,
    /// Committed edits as `(member index, flipped elements)`.
    pub edits: Vec<(usize, Vec<usize>)>,
    pub unsatisfied: Vec<(Vec<usize>, usize)>,
}

/// Legend entry for one universe element of the tree-coded family: the set
/// `T` of binary strings at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub level: usize,
    pub strings: Vec<String>,
}

impl std::fmt::Display for LevelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "level {}: {{", self.level)?;
        for (i, s) in self.strings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(s)?;
        }
        f.write_str("}")
    }
}

fn render_string(code: u64, len: usize) -> String {
    if len == 0 {
        return "ε".to_string();
    }
    let mut out = String::with_capacity(len);
    for t in 0..len {
        let _ = write!(out, "{}", code >> t & 1);
    }
    out
}

/// The tree-coded independent family truncated at `depth`.
///
/// The universe consists of all pairs `(m, T)` with `m <= depth` and
/// `T ⊆ {0,1}^m`, levels ascending and the sets of each level in
/// binary-counting order on their string codes. One member `X_f` is built
/// per `f ∈ {0,1}^depth` (members in binary order on `f`), containing the
/// universe element `(m, T)` exactly when the length-`m` prefix of `f` lies
/// in `T`. Returns the family and a legend mapping universe index to its
/// level set.
pub fn fk_family(depth: usize) -> Result<(SetFamily, Vec<LevelSet>)> {
    if depth > FK_DEPTH_LIMIT {
        return Err(Error::LimitExceeded {
            what: "tree-coded family depth",
            requested: depth,
            limit: FK_DEPTH_LIMIT,
        });
    }
    let mut legend = Vec::new();
    let mut offsets = Vec::with_capacity(depth + 2);
    offsets.push(0usize);
    for level in 0..=depth {
        let strings = 1usize << level;
        let sets = 1usize << strings;
        for code in 0..sets as u64 {
            legend.push(LevelSet {
                level,
                strings: (0..strings as u64)
                    .filter(|s| code >> s & 1 == 1)
                    .map(|s| render_string(s, level))
                    .collect(),
            });
        }
        offsets.push(offsets.last().unwrap() + sets);
    }
    let universe = *offsets.last().unwrap();

    let members = (0..1u64 << depth)
        .map(|f| {
            let mut x = BitVec::zeros(universe);
            for (level, offset) in offsets.iter().copied().enumerate().take(depth + 1) {
                let prefix = f & ((1 << level) - 1);
                let sets = 1u64 << (1 << level);
                for code in 0..sets {
                    if code >> prefix & 1 == 1 {
                        x.set(offset + code as usize, true);
                    }
                }
            }
            x
        })
        .collect();

    Ok((
        SetFamily {
            universe_size: universe,
            members,
        },
        legend,
    ))
}

fn for_each_combination(n: usize, t: usize, visit: &mut impl FnMut(&[usize]) -> bool) {
    if t > n {
        return;
    }
    let mut combo: Vec<usize> = (0..t).collect();
    loop {
        if !visit(&combo) {
            return;
        }
        // Advance to the next combination in lexicographic order.
        let mut i = t;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] != i + n - t {
                break;
            }
            if i == 0 {
                return;
            }
        }
        combo[i] += 1;
        for j in (i + 1)..t {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Parses the family text format: first significant line `m=<int>`, then one
/// member per line as comma-separated element indices. A blank line is the
/// empty set; `#` starts a comment and comment-only lines are skipped.
pub fn parse_family(text: &str) -> Result<SetFamily> {
    let mut universe: Option<usize> = None;
    let mut members = Vec::new();
    for raw in text.lines() {
        let is_comment = raw.trim_start().starts_with('#');
        let line = raw.split('#').next().unwrap_or("").trim();
        if universe.is_none() {
            if line.is_empty() {
                continue;
            }
            let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            let m: usize = compact
                .strip_prefix("m=")
                .ok_or_else(|| Error::Parse(format!("expected 'm=<int>' header, got '{raw}'")))?
                .parse()
                .map_err(|_| Error::Parse(format!("invalid universe size in '{raw}'")))?;
            universe = Some(m);
            continue;
        }
        if is_comment {
            continue;
        }
        let m = universe.unwrap();
        let mut member = BitVec::zeros(m);
        if !line.is_empty() {
            for token in line.split(',') {
                let e: usize = token
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid element '{token}'")))?;
                if e >= m {
                    return Err(Error::Parse(format!(
                        "element {e} out of range for m={m}"
                    )));
                }
                member.set(e, true);
            }
        }
        members.push(member);
    }
    match universe {
        Some(m) => SetFamily::new(m, members),
        None => Err(Error::Parse("empty family input".into())),
    }
}

/// Serializes to the family text format.
pub fn family_to_text(fam: &SetFamily) -> String {
    let mut out = format!("m={}\n", fam.universe_size());
    for member in fam.members() {
        let indices: Vec<String> = member.ones().map(|i| i.to_string()).collect();
        out.push_str(&indices.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{classify, graphs_isomorphic};
    use rand::{Rng, SeedableRng};

    #[test]
    fn disjoint_sets_are_not_independent() {
        let fam = SetFamily::from_indices(2, &[&[0], &[1]]);
        let check = fam.is_independent(2);
        assert!(!check.independent);
        let (f, g) = check.counterexample.unwrap();
        // The first violation in enumeration order is F = {0, 1}, G = ∅.
        assert_eq!((f, g), (vec![0, 1], vec![]));
    }

    #[test]
    fn overlapping_pair_is_independent_at_size_two() {
        let fam = SetFamily::from_indices(4, &[&[0, 1], &[0, 2]]);
        assert!(fam.is_independent(2).independent);
    }

    #[test]
    fn separating_examples() {
        assert!(SetFamily::singletons(5).is_separating().unwrap());
        let whole = SetFamily::from_indices(3, &[&[0, 1, 2]]);
        assert!(!whole.is_separating().unwrap());
        assert!(SetFamily::power_set(4).is_separating().unwrap());
        let big = SetFamily::singletons(13);
        assert!(big.is_separating().is_err());
        assert!(big.separating_report(2).is_separating());
    }

    #[test]
    fn noncovered_examples() {
        assert!(SetFamily::singletons(4).is_noncovered());
        let covered = SetFamily::from_indices(2, &[&[0, 1], &[0], &[1]]);
        assert!(!covered.is_noncovered());
        let (fk2, _) = fk_family(2).unwrap();
        assert!(fk2.is_noncovered());
    }

    #[test]
    fn almost_disjoint_examples() {
        let disjoint = SetFamily::from_indices(4, &[&[0], &[1], &[2, 3]]);
        assert!(disjoint.is_almost_disjoint(0));
        let sharing = SetFamily::from_indices(4, &[&[0, 1, 2], &[0, 1, 3]]);
        assert!(!sharing.is_almost_disjoint(1));
        assert!(sharing.is_almost_disjoint(2));
    }

    #[test]
    fn tree_branches_are_almost_disjoint() {
        // Universe: binary strings of length <= depth; member f = the branch
        // of prefixes of f. Two branches share exactly their common prefix.
        let depth = 3usize;
        let mut offsets = vec![0usize];
        for level in 0..=depth {
            offsets.push(offsets.last().unwrap() + (1 << level));
        }
        let universe = *offsets.last().unwrap();
        let members: Vec<BitVec> = (0..1u64 << depth)
            .map(|f| {
                let mut v = BitVec::zeros(universe);
                for level in 0..=depth {
                    let prefix = (f & ((1 << level) - 1)) as usize;
                    v.set(offsets[level] + prefix, true);
                }
                v
            })
            .collect();
        let fam = SetFamily::new(universe, members).unwrap();
        assert!(fam.is_almost_disjoint(depth));
        assert!(!fam.is_almost_disjoint(depth - 1));
    }

    #[test]
    fn dual_examples() {
        let fam = SetFamily::from_indices(2, &[&[0, 1]]);
        let dual = fam.dual();
        assert_eq!(dual.universe_size(), 1);
        assert_eq!(dual.members().len(), 2);
        assert_eq!(dual.member(0), &BitVec::from_indices(1, &[0]));
        assert_eq!(dual.member(1), &BitVec::from_indices(1, &[0]));

        let singles = SetFamily::singletons(4);
        assert_eq!(singles.dual(), singles);
    }

    #[test]
    fn dual_is_an_involution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let m = 1 + (rng.random::<u32>() % 8) as usize;
            let count = (rng.random::<u32>() % 8) as usize;
            let fam = SetFamily::random(m, count, &mut rng);
            assert_eq!(fam.dual().dual(), fam);
        }
    }

    #[test]
    fn dual_preserves_weakened_conditions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let m = 1 + (rng.random::<u32>() % 6) as usize;
            let count = 1 + (rng.random::<u32>() % 6) as usize;
            let fam = SetFamily::random(m, count, &mut rng);
            let cond = fam.is_separating().unwrap() && fam.is_noncovered();
            let dual = fam.dual();
            let dual_cond = dual.is_separating().unwrap() && dual.is_noncovered();
            assert_eq!(cond, dual_cond);
        }
    }

    #[test]
    fn fk_depth_zero() {
        let (fam, legend) = fk_family(0).unwrap();
        assert_eq!(fam.universe_size(), 2);
        assert_eq!(fam.len(), 1);
        assert_eq!(legend[0], LevelSet { level: 0, strings: vec![] });
        assert_eq!(
            legend[1],
            LevelSet {
                level: 0,
                strings: vec!["ε".to_string()]
            }
        );
        // The single member is {the level-0 set containing ε}.
        assert_eq!(fam.member(0), &BitVec::from_indices(2, &[1]));
    }

    #[test]
    fn fk_members_contain_full_levels() {
        let depth = 2;
        let (fam, legend) = fk_family(depth).unwrap();
        assert_eq!(fam.len(), 4);
        for member in fam.members() {
            for level in 0..=depth {
                let full: Vec<usize> = legend
                    .iter()
                    .enumerate()
                    .filter(|(_, ls)| ls.level == level && ls.strings.len() == 1 << level)
                    .map(|(i, _)| i)
                    .collect();
                assert_eq!(full.len(), 1);
                assert!(member.get(full[0]));
            }
        }
    }

    #[test]
    fn fk_depth_three_is_independent() {
        let (fam, _) = fk_family(3).unwrap();
        assert_eq!(fam.len(), 8);
        assert!(fam.is_independent(4).independent);
        assert!(fk_family(4).is_err());
    }

    #[test]
    fn bipartite_examples() {
        let matching = SetFamily::singletons(3).bipartite_graph();
        assert_eq!(matching.n(), 6);
        let class = classify(&matching);
        assert_eq!((class.k, class.l), (3, 0));

        let empty = SetFamily::new(4, vec![]).unwrap().bipartite_graph();
        assert_eq!(empty.n(), 4);
        assert_eq!(empty.edge_count(), 0);

        let full = SetFamily::power_set(2).bipartite_graph();
        assert_eq!(full.n(), 6);
        assert_eq!(classify(&full).k, 2);
    }

    #[test]
    fn bipartite_of_dual_is_isomorphic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let m = 1 + (rng.random::<u32>() % 5) as usize;
            let count = 1 + (rng.random::<u32>() % 5) as usize;
            let fam = SetFamily::random(m, count, &mut rng);
            let a = fam.bipartite_graph();
            let b = fam.dual().bipartite_graph();
            assert!(graphs_isomorphic(&a, &b).unwrap().is_some());
        }
    }

    #[test]
    fn extend_example_from_power_set() {
        let fam = SetFamily::power_set_nonempty(4);
        // Member {0, 1} has mask 3, hence index 2.
        let pair = FinitePair::new(vec![2], vec![]);
        let pattern = fam.extend_to_full_matrix(&pair).unwrap();
        assert_eq!(pattern.pair.members.len(), 2);
        assert_eq!(pattern.pair.elements.len(), 2);
        // The induced subgraph of the bipartite graph is a full matrix
        // pattern: classify gives l = 0.
        let g = fam.bipartite_graph();
        let mut vertices: Vec<usize> = pattern.pair.elements.clone();
        vertices.extend(pattern.pair.members.iter().map(|&x| 4 + x));
        let class = classify(&g.induced(&vertices));
        assert_eq!(class.l, 0);
    }

    #[test]
    fn extend_trivial_and_exhausted() {
        let fam = SetFamily::power_set_nonempty(3);
        let empty = fam.extend_to_full_matrix(&FinitePair::default()).unwrap();
        assert!(empty.pair.members.is_empty() && empty.pair.elements.is_empty());

        let tiny = SetFamily::from_indices(2, &[&[0]]);
        let err = tiny.extend_to_full_matrix(&FinitePair::new(vec![0], vec![]));
        assert!(matches!(err, Err(Error::ResourceExhausted(_))));
    }

    #[test]
    fn densify_trivial_cases() {
        let fam = SetFamily::singletons(4);
        let (out, report) = fam.densify(10, 2, 4);
        assert_eq!(out, fam);
        assert_eq!(report.edits_spent, 0);
        assert!(report.unsatisfied.is_empty());

        let (fk2, _) = fk_family(2).unwrap();
        let (out, report) = fk2.densify(0, 2, 2);
        assert_eq!(out, fk2);
        assert_eq!(report.satisfied_after, report.satisfied_before);
    }

    #[test]
    fn densify_improves_fk2() {
        let (fk2, _) = fk_family(2).unwrap();
        let (out, report) = fk2.densify(6, 2, 2);
        assert!(report.satisfied_after > report.satisfied_before);
        assert!(out.is_independent(2).independent);
        assert!(report.edits_spent <= 6);
    }

    #[test]
    fn text_round_trip() {
        let fam = SetFamily::from_indices(5, &[&[0, 2], &[], &[1, 3, 4]]);
        let text = family_to_text(&fam);
        assert_eq!(text, "m=5\n0,2\n\n1,3,4\n");
        assert_eq!(parse_family(&text).unwrap(), fam);

        let with_comments = "# family\nm=3\n0, 1 # pair\n# skip me\n\n2\n";
        let parsed = parse_family(with_comments).unwrap();
        assert_eq!(parsed, SetFamily::from_indices(3, &[&[0, 1], &[], &[2]]));

        assert!(parse_family("n=3\n").is_err());
        assert!(parse_family("m=2\n0,5\n").is_err());
        assert!(parse_family("").is_err());
    }

    #[test]
    fn combinations_cover_all() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(6, 0, &mut |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }
}
