//! Dense complex operators and the numeric kernels behind them.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Dense dimensions at or below this use cyclic Jacobi for spectral norms;
/// larger ones fall back to power iteration.
pub const JACOBI_DIM_LIMIT: usize = 64;
/// Convergence threshold of the power iteration (relative change of the
/// Rayleigh quotient).
pub const POWER_ITERATION_TOLERANCE: f64 = 1e-10;
const POWER_ITERATION_CAP: usize = 200_000;

/// A dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Builds from rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "operator rows must be square");
            for (j, &(re, im)) in row.iter().enumerate() {
                m.data[i * dim + j] = Complex64::new(re, im);
            }
        }
        m
    }

    /// diag(1, -1) padded with the identity: the sign factor.
    pub fn sign_2x2() -> Self {
        Self::from_rows(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (-1.0, 0.0)]])
    }

    /// antidiag(1, 1): the flip factor.
    pub fn flip_2x2() -> Self {
        Self::from_rows(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a == Complex64::ZERO {
                    continue;
                }
                for p in 0..m {
                    for q in 0..m {
                        out.data[(i * m + p) * n * m + (j * m + q)] = a * other.data[p * m + q];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    /// `tr(self† other) / dim`, the normalized trace inner product.
    pub fn trace_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let s: Complex64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s / self.dim as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// The largest singular value.
    ///
    /// Computed as the square root of the top eigenvalue of `A†A`: by cyclic
    /// Jacobi up to [`JACOBI_DIM_LIMIT`], by power iteration with relative
    /// threshold [`POWER_ITERATION_TOLERANCE`] above it (erroring if the
    /// iteration cap is hit).
    pub fn operator_norm(&self) -> Result<f64> {
        if self.dim == 0 {
            return Ok(0.0);
        }
        let h = self.adjoint().mul(self);
        if self.dim <= JACOBI_DIM_LIMIT {
            let top = hermitian_eigenvalues(&h)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            return Ok(top.max(0.0).sqrt());
        }
        let n = self.dim;
        // Deterministic pseudo-random start.
        let mut state = 0x9e3779b97f4a7c15u64 ^ n as u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in v.iter_mut() {
            *a /= norm;
        }
        let mut lambda = 0.0f64;
        for _ in 0..POWER_ITERATION_CAP {
            let w = h.apply(&v);
            let rayleigh: f64 = w.iter().zip(&v).map(|(a, b)| (b.conj() * a).re).sum();
            let wn = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if wn == 0.0 {
                return Ok(0.0);
            }
            v = w.into_iter().map(|a| a / wn).collect();
            if (rayleigh - lambda).abs() <= POWER_ITERATION_TOLERANCE * rayleigh.abs().max(1.0) {
                return Ok(rayleigh.max(0.0).sqrt());
            }
            lambda = rayleigh;
        }
        Err(Error::NormDiverged(POWER_ITERATION_CAP))
    }

    /// `‖A†A − 1‖`, the unitarity deviation.
    pub fn unitary_deviation(&self) -> Result<f64> {
        self.adjoint()
            .mul(self)
            .sub(&Self::identity(self.dim))
            .operator_norm()
    }
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Operator {}x{}", self.dim, self.dim)?;
        if self.dim <= 8 {
            for i in 0..self.dim {
                write!(f, "  ")?;
                for j in 0..self.dim {
                    let v = self.get(i, j);
                    write!(f, "{:+.3}{:+.3}i ", v.re, v.im)?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// Each rotation first absorbs the phase of the targeted off-diagonal entry
/// into its column/row, then applies the standard real rotation that zeroes
/// it. Sweeps stop when the off-diagonal mass falls below `1e-14` of the
/// Frobenius norm.
pub fn hermitian_eigenvalues(a: &Operator) -> Vec<f64> {
    let n = a.dim;
    let mut b = a.data.clone();
    let fnorm = a.frobenius_norm();
    if fnorm == 0.0 || n == 0 {
        return vec![0.0; n];
    }
    let stop = 1e-14 * fnorm;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| b[p * n + q].norm_sqr())
            .sum();
        if (2.0 * off).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let bpq = b[p * n + q];
                let mag = bpq.norm();
                if mag <= stop / (n * n) as f64 {
                    continue;
                }
                // Absorb the phase so the (p, q) entry becomes real.
                let phi = bpq / mag;
                for i in 0..n {
                    b[i * n + q] *= phi.conj();
                }
                for j in 0..n {
                    b[q * n + j] *= phi;
                }
                let app = b[p * n + p].re;
                let aqq = b[q * n + q].re;
                let apq = b[p * n + q].re;
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (vp, vq) = (b[i * n + p], b[i * n + q]);
                    b[i * n + p] = c * vp - s * vq;
                    b[i * n + q] = s * vp + c * vq;
                }
                for j in 0..n {
                    let (vp, vq) = (b[p * n + j], b[q * n + j]);
                    b[p * n + j] = c * vp - s * vq;
                    b[q * n + j] = s * vp + c * vq;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| b[i * n + i].re).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Rank of a rectangular complex matrix by Gaussian elimination with full
/// pivoting; entries below `rel_tol` times the largest initial magnitude are
/// treated as zero.
pub(crate) fn rank_with_threshold(mut rows: Vec<Vec<Complex64>>, rel_tol: f64) -> usize {
    let n_rows = rows.len();
    if n_rows == 0 {
        return 0;
    }
    let n_cols = rows[0].len();
    let max0 = rows
        .iter()
        .flatten()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    if max0 == 0.0 {
        return 0;
    }
    let threshold = rel_tol * max0;
    let mut used_col = vec![false; n_cols];
    let mut r = 0;
    while r < n_rows {
        // Full pivot over the remaining submatrix.
        let mut best = (threshold, None);
        for i in r..n_rows {
            for (j, used) in used_col.iter().enumerate() {
                if !used {
                    let mag = rows[i][j].norm();
                    if mag > best.0 {
                        best = (mag, Some((i, j)));
                    }
                }
            }
        }
        let Some((pi, pj)) = best.1 else {
            break;
        };
        rows.swap(r, pi);
        used_col[pj] = true;
        let pivot = rows[r][pj];
        for i in (r + 1)..n_rows {
            let factor = rows[i][pj] / pivot;
            if factor != Complex64::ZERO {
                for j in 0..n_cols {
                    let sub = factor * rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of the right nullspace `{x : Rx = 0}` of a rectangular complex
/// matrix, with the same thresholding as `rank_with_threshold`.
pub(crate) fn nullspace(mut rows: Vec<Vec<Complex64>>, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let max0 = rows
        .iter()
        .flatten()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    if max0 == 0.0 {
        return (0..n_cols)
            .map(|j| {
                let mut e = vec![Complex64::ZERO; n_cols];
                e[j] = Complex64::ONE;
                e
            })
            .collect();
    }
    let threshold = rel_tol * max0;
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for j in 0..n_cols {
        // Partial pivoting within the column.
        let Some(pi) = (r..n_rows)
            .filter(|&i| rows[i][j].norm() > threshold)
            .max_by(|&a, &b| rows[a][j].norm().total_cmp(&rows[b][j].norm()))
        else {
            continue;
        };
        rows.swap(r, pi);
        let pivot = rows[r][j];
        for v in rows[r].iter_mut() {
            *v /= pivot;
        }
        for i in 0..n_rows {
            if i != r {
                let factor = rows[i][j];
                if factor != Complex64::ZERO {
                    let (src, dst) = if i < r {
                        let (lo, hi) = rows.split_at_mut(r);
                        (&hi[0], &mut lo[i])
                    } else {
                        let (lo, hi) = rows.split_at_mut(i);
                        (&lo[r], &mut hi[0])
                    };
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d -= factor * s;
                    }
                }
            }
        }
        pivots.push(j);
        r += 1;
        if r == n_rows {
            break;
        }
    }
    let mut basis = Vec::new();
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    for f in 0..n_cols {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut x = vec![Complex64::ZERO; n_cols];
        x[f] = Complex64::ONE;
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = -rows[row][f];
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn norm_examples() {
        assert_abs_diff_eq!(Operator::identity(3).operator_norm().unwrap(), 1.0, epsilon = 1e-12);
        // diag(1,-1) - antidiag(1,1) squares to 2·id, so its norm is √2.
        let d = Operator::sign_2x2().sub(&Operator::flip_2x2());
        assert_abs_diff_eq!(d.operator_norm().unwrap(), 2.0f64.sqrt(), epsilon = 1e-12);
        // Cross-check against the closed 2x2 singular value formula.
        let h = d.adjoint().mul(&d);
        let tr = h.trace().re;
        let det = (h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(1, 0)).norm();
        let top = (tr + (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(d.operator_norm().unwrap(), top.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn unitaries_have_norm_one() {
        let u = Operator::flip_2x2().kron(&Operator::sign_2x2());
        assert_abs_diff_eq!(u.operator_norm().unwrap(), 1.0, epsilon = 1e-10);
        assert!(u.unitary_deviation().unwrap() <= 1e-10);
    }

    #[test]
    fn jacobi_matches_trace_identities() {
        // Deterministic Hermitian test matrix.
        let n = 6;
        let mut a = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let re = ((i * 7 + j * 3) % 11) as f64 - 5.0;
                let im = ((i * 5 + j * 2) % 7) as f64 - 3.0;
                a.set(i, j, Complex64::new(re, im));
            }
        }
        let h = a.adjoint().mul(&a);
        let eigs = hermitian_eigenvalues(&h);
        let sum: f64 = eigs.iter().sum();
        assert_abs_diff_eq!(sum, h.trace().re, epsilon = 1e-8);
        let sq: f64 = eigs.iter().map(|l| l * l).sum();
        assert_abs_diff_eq!(sq, h.mul(&h).trace().re, epsilon = 1e-6);
        assert!(eigs.iter().all(|&l| l >= -1e-9));
    }

    #[test]
    fn power_iteration_agrees_with_jacobi() {
        // Force the power-iteration path with a block-diagonal 70x70 matrix
        // whose top singular value is known.
        let n = 70;
        let mut a = Operator::zeros(n);
        for i in 0..n {
            a.set(i, i, Complex64::new(1.0 + (i as f64) / 100.0, 0.0));
        }
        let norm = a.operator_norm().unwrap();
        assert_abs_diff_eq!(norm, 1.69, epsilon = 1e-6);
    }

    #[test]
    fn rank_and_nullspace() {
        let one = Complex64::ONE;
        let rows = vec![
            vec![one, one, Complex64::ZERO],
            vec![one, one, Complex64::ZERO],
            vec![Complex64::ZERO, Complex64::ZERO, one],
        ];
        assert_eq!(rank_with_threshold(rows.clone(), 1e-10), 2);
        let ns = nullspace(rows, 1e-10);
        assert_eq!(ns.len(), 1);
        // The kernel vector satisfies x0 + x1 = 0, x2 = 0.
        assert_abs_diff_eq!((ns[0][0] + ns[0][1]).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ns[0][2].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kron_shapes_and_values() {
        let a = Operator::sign_2x2();
        let b = Operator::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.get(0, 0), Complex64::ONE);
        assert_eq!(k.get(5, 5), -Complex64::ONE);
        assert_eq!(k.get(0, 3), Complex64::ZERO);
    }
}
