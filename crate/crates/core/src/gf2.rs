//! Bit-packed linear algebra over GF(2).
//!
//! Rows are packed into `u64` words so that row XOR, the hot loop of
//! elimination, runs word-parallel. Alongside the usual rank / kernel /
//! inverse operations this module provides `congruent_canonicalize`, which
//! reduces an alternating form (symmetric, zero diagonal) to its canonical
//! block shape and returns the basis change as a witness. All values are
//! immutable after construction; operations allocate fresh outputs.

use crate::error::{Error, Result};
use std::fmt;

/// A vector over GF(2), packed LSB-first into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    /// The all-ones vector.
    pub fn full(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = !0;
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        if self.len % 64 != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in and");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Removes the bits of `other` from `self` (set difference).
    pub fn andnot_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in andnot");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions set in both vectors.
    pub fn count_and(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "length mismatch in count_and");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Number of positions `> i` set in both vectors.
    pub fn count_and_above(&self, other: &Self, i: usize) -> usize {
        assert_eq!(self.len, other.len, "length mismatch in count_and_above");
        let start = (i + 1) / 64;
        let mut total = 0usize;
        for w in start..self.words.len() {
            let mut x = self.words[w] & other.words[w];
            if w == start && (i + 1) % 64 != 0 {
                x &= !0u64 << ((i + 1) % 64);
            }
            total += x.count_ones() as usize;
        }
        total
    }

    pub fn first_one(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let base = w * 64;
            std::iter::successors(
                if word == 0 { None } else { Some(word) },
                |&x| {
                    let next = x & (x - 1);
                    if next == 0 {
                        None
                    } else {
                        Some(next)
                    }
                },
            )
            .map(move |x| base + x.trailing_zeros() as usize)
        })
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in is_subset_of");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2) stored as packed bit rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            rows: (0..n_rows).map(|_| BitVec::zeros(n_cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: Vec<BitVec>) -> Self {
        let n_cols = rows.first().map_or(0, BitVec::len);
        assert!(
            rows.iter().all(|r| r.len() == n_cols),
            "ragged rows in BitMatrix::from_rows"
        );
        Self {
            n_rows: rows.len(),
            n_cols,
            rows,
        }
    }

    pub fn from_bits(bits: &[&[u8]]) -> Self {
        let n_rows = bits.len();
        let n_cols = bits.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(n_rows, n_cols);
        for (i, row) in bits.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows in BitMatrix::from_bits");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVec {
        &mut self.rows[i]
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        self.rows.swap(i, j);
    }

    /// `rows[dst] ^= rows[src]`; the two indices must differ.
    pub fn xor_row_into(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src, "xor_row_into requires distinct rows");
        let (a, b) = if dst < src {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        a.xor_assign(b);
    }

    pub fn is_symmetric(&self) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        for i in 0..self.n_rows {
            for j in (i + 1)..self.n_cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n_rows.min(self.n_cols)).all(|i| !self.get(i, i))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in self.rows[i].ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product over GF(2); `self.n_cols` must equal `other.n_rows`.
    pub fn multiply(&self, other: &Self) -> Self {
        assert_eq!(
            self.n_cols, other.n_rows,
            "shape mismatch in BitMatrix::multiply"
        );
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for j in self.rows[i].ones() {
                out.xor_row_from(i, other.row(j));
            }
        }
        out
    }

    fn xor_row_from(&mut self, dst: usize, src: &BitVec) {
        self.rows[dst].xor_assign(src);
    }

    /// Matrix–vector product `self · x` with `x` a column vector.
    pub fn apply(&self, x: &BitVec) -> BitVec {
        assert_eq!(self.n_cols, x.len(), "shape mismatch in BitMatrix::apply");
        let mut out = BitVec::zeros(self.n_rows);
        for i in 0..self.n_rows {
            out.set(i, self.rows[i].count_and(x) % 2 == 1);
        }
        out
    }

    /// In-place Gauss–Jordan reduction; returns the pivot column indices.
    pub fn echelonize(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.n_cols {
            if r == self.n_rows {
                break;
            }
            let Some(p) = (r..self.n_rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.n_rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        self.clone().echelonize().len()
    }

    /// A basis of the right kernel `{x : self · x = 0}`.
    ///
    /// The returned vectors are linearly independent and there are exactly
    /// `n_cols - rank` of them.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let mut rref = self.clone();
        let pivots = rref.echelonize();
        let mut is_pivot = vec![false; self.n_cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.n_cols - pivots.len());
        for f in 0..self.n_cols {
            if is_pivot[f] {
                continue;
            }
            let mut x = BitVec::zeros(self.n_cols);
            x.set(f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if rref.get(r, f) {
                    x.set(p, true);
                }
            }
            basis.push(x);
        }
        basis
    }

    /// Two-sided inverse; errors on rectangular or singular input.
    pub fn invert(&self) -> Result<Self> {
        if self.n_rows != self.n_cols {
            return Err(Error::ShapeMismatch(format!(
                "invert requires a square matrix, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        let n = self.n_rows;
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| work.get(i, c)) else {
                return Err(Error::SingularMatrix);
            };
            work.swap_rows(c, p);
            inv.swap_rows(c, p);
            for i in 0..n {
                if i != c && work.get(i, c) {
                    work.xor_row_into(i, c);
                    inv.xor_row_into(i, c);
                }
            }
        }
        Ok(inv)
    }

    /// XOR column `src` into column `dst`.
    fn xor_col_into(&mut self, dst: usize, src: usize) {
        for i in 0..self.n_rows {
            if self.get(i, src) {
                self.rows[i].flip(dst);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.n_rows {
            let (x, y) = (self.get(i, a), self.get(i, b));
            self.set(i, a, y);
            self.set(i, b, x);
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.n_rows, self.n_cols)?;
        for row in &self.rows {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// An invertible basis change over GF(2), stored with its inverse.
#[derive(Clone, Debug)]
pub struct BasisChange {
    pub forward: BitMatrix,
    pub inverse: BitMatrix,
}

impl BasisChange {
    pub fn identity(n: usize) -> Self {
        Self {
            forward: BitMatrix::identity(n),
            inverse: BitMatrix::identity(n),
        }
    }

    /// Checks `forward · inverse = 1`.
    pub fn is_consistent(&self) -> bool {
        let n = self.forward.n_rows();
        self.forward.multiply(&self.inverse) == BitMatrix::identity(n)
    }
}

/// The canonical shape of an alternating form: `k` hyperbolic blocks
/// `[[0,1],[1,0]]` on the leading diagonal, zeros elsewhere.
pub fn hyperbolic_form(n: usize, k: usize) -> BitMatrix {
    assert!(2 * k <= n);
    let mut m = BitMatrix::zeros(n, n);
    for j in 0..k {
        m.set(2 * j, 2 * j + 1, true);
        m.set(2 * j + 1, 2 * j, true);
    }
    m
}

/// Reduces an alternating form to the canonical hyperbolic block shape by a
/// congruence, using symmetric Gaussian pairing: locate an off-diagonal 1,
/// move it to the leading block, clear the two rows/columns, recurse.
///
/// Returns `(k, s)` with `s.forwardᵀ · a · s.forward` equal to
/// `hyperbolic_form(n, k)` and `2k = rank(a)`. Rejects input that is not
/// symmetric with zero diagonal.
pub fn congruent_canonicalize(a: &BitMatrix) -> Result<(usize, BasisChange)> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::NotAlternating(format!(
            "matrix is {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if !a.is_symmetric() {
        return Err(Error::NotAlternating("matrix is not symmetric".into()));
    }
    if !a.has_zero_diagonal() {
        return Err(Error::NotAlternating("diagonal is not zero".into()));
    }

    let n = a.n_rows();
    let mut work = a.clone();
    // Columns of `s` are the new basis vectors.
    let mut s = BitMatrix::identity(n);
    let mut p = 0;

    // Applies a congruence column operation col[dst] += col[src] to the
    // working form (both sides) and records it in s.
    fn add_basis(work: &mut BitMatrix, s: &mut BitMatrix, dst: usize, src: usize) {
        work.xor_col_into(dst, src);
        work.xor_row_into(dst, src);
        s.xor_col_into(dst, src);
    }
    fn swap_basis(work: &mut BitMatrix, s: &mut BitMatrix, x: usize, y: usize) {
        if x == y {
            return;
        }
        work.swap_cols(x, y);
        work.swap_rows(x, y);
        s.swap_cols(x, y);
    }

    while p + 1 < n {
        // Deterministic pivot: smallest (i, j) with i < j in the trailing block.
        let pivot = (p..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .find(|&(i, j)| work.get(i, j));
        let Some((i, j)) = pivot else {
            break;
        };
        swap_basis(&mut work, &mut s, p, i);
        let j = if j == p { i } else { j };
        swap_basis(&mut work, &mut s, p + 1, j);
        // Clear everything in rows/columns p and p+1 past the block.
        for t in (p + 2)..n {
            if work.get(p, t) {
                add_basis(&mut work, &mut s, t, p + 1);
            }
            if work.get(p + 1, t) {
                add_basis(&mut work, &mut s, t, p);
            }
        }
        p += 2;
    }

    let k = p / 2;
    let inverse = s.invert().expect("accumulated basis change is invertible");
    let basis = BasisChange {
        forward: s,
        inverse,
    };
    debug_assert_eq!(
        basis
            .forward
            .transpose()
            .multiply(a)
            .multiply(&basis.forward),
        hyperbolic_form(n, k),
        "congruence reduction produced a non-canonical form"
    );
    Ok((k, basis))
}

/// Uniformly random alternating form (symmetric, zero diagonal).
pub fn random_alternating(n: usize, rng: &mut impl rand::Rng) -> BitMatrix {
    let mut m = BitMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<bool>() {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    m
}
