//! Dense complex matrices and the small set of factorizations the design
//! needs: SVD (one-sided Jacobi), Cholesky, LU determinant, pseudoinverse.
//!
//! Matrices are column-major so that beamformer columns, codebook beams, and
//! singular vectors are contiguous slices. Sizes in this crate are small
//! (antenna counts up to a few dozen), so the plain O(n^3) kernels here are
//! both fast enough and fully deterministic, which the reproducibility
//! contract of the simulator relies on.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative threshold below which singular values are treated as zero when
/// forming a pseudoinverse.
pub const PINV_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Dense complex matrix, column-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a row-major slice (convenient for literals in tests).
    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        CMat::from_fn(rows, cols, |i, j| entries[i * cols + j])
    }

    pub fn from_col(col: &[C64]) -> Self {
        let mut m = CMat::zeros(col.len(), 1);
        m.col_mut(0).copy_from_slice(col);
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, factor: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scaled_re(&self, factor: f64) -> CMat {
        self.scaled(C64::new(factor, 0.0))
    }

    /// Squared Frobenius norm, summed in storage (column-major) order.
    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        libm::sqrt(self.frob_norm_sq())
    }

    pub fn col_norm_sq(&self, j: usize) -> f64 {
        self.col(j).iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Horizontal concatenation of equally-tall matrices.
    pub fn hcat(blocks: &[CMat]) -> Result<CMat> {
        let first = blocks
            .first()
            .ok_or(Error::InvalidArgument("hcat of an empty block list"))?;
        let rows = first.rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("hcat blocks differ in row count"));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(CMat { rows, cols, data })
    }

    /// Copy of the column range `[start, start + count)`.
    pub fn cols_range(&self, start: usize, count: usize) -> CMat {
        assert!(start + count <= self.cols, "column range out of bounds");
        CMat {
            rows: self.rows,
            cols: count,
            data: self.data[start * self.rows..(start + count) * self.rows].to_vec(),
        }
    }

    /// Copy of the listed columns, in the given order.
    pub fn select_cols(&self, indices: &[usize]) -> CMat {
        let mut m = CMat::zeros(self.rows, indices.len());
        for (dst, &src) in indices.iter().enumerate() {
            let col = self.col(src).to_vec();
            m.col_mut(dst).copy_from_slice(&col);
        }
        m
    }

    /// Inner product of column `j` with a foreign column, conjugating `self`.
    pub fn col_dot(&self, j: usize, other: &[C64]) -> C64 {
        debug_assert_eq!(other.len(), self.rows);
        self.col(j)
            .iter()
            .zip(other.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Thin singular value decomposition with singular values sorted
    /// descending: `self = u * diag(s) * v.adjoint()`.
    pub fn svd(&self) -> Svd {
        svd_jacobi(self)
    }

    /// Moore–Penrose pseudoinverse via the SVD; singular values below
    /// [`PINV_RELATIVE_TOLERANCE`] times the largest are treated as zero.
    pub fn pinv(&self) -> CMat {
        let svd = self.svd();
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        let cutoff = PINV_RELATIVE_TOLERANCE * smax;
        // pinv = V * diag(1/s) * U^*
        let k = svd.singular_values.len();
        let mut scaled_v = CMat::zeros(self.cols, k);
        for j in 0..k {
            let s = svd.singular_values[j];
            if s > cutoff && s > 0.0 {
                let inv = C64::new(1.0 / s, 0.0);
                for i in 0..self.cols {
                    scaled_v[(i, j)] = svd.v[(i, j)] * inv;
                }
            }
        }
        &scaled_v * &svd.u.adjoint()
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl Mul for &CMat {
    type Output = CMat;

    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for k in 0..self.cols {
                let w = rhs[(k, j)];
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                let a_col = self.col(k);
                let out_col = out.col_mut(j);
                for i in 0..a_col.len() {
                    out_col[i] += a_col[i] * w;
                }
            }
        }
        out
    }
}

impl Add for &CMat {
    type Output = CMat;

    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum dimension mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;

    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(
            self.shape(),
            rhs.shape(),
            "matrix difference dimension mismatch"
        );
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Thin SVD: `u` is m×k, `v` is n×k with k = min(m, n), singular values
/// descending. Columns corresponding to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMat,
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

const JACOBI_TOLERANCE: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// One-sided Jacobi SVD. Rotations orthogonalize column pairs of a working
/// copy of `a` while accumulating the right singular vectors; it converges
/// unconditionally for the small matrices used here and gives high relative
/// accuracy.
fn svd_jacobi(a: &CMat) -> Svd {
    if a.rows < a.cols {
        let t = svd_jacobi(&a.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let n = a.cols;
    let mut work = a.clone();
    let mut v = CMat::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (app, aqq, apq) = {
                    let cp = work.col(p);
                    let cq = work.col(q);
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = C64::new(0.0, 0.0);
                    for i in 0..cp.len() {
                        app += cp[i].norm_sqr();
                        aqq += cq[i].norm_sqr();
                        apq += cp[i].conj() * cq[i];
                    }
                    (app, aqq, apq)
                };
                if apq.norm_sqr() <= JACOBI_TOLERANCE * JACOBI_TOLERANCE * app * aqq {
                    continue;
                }
                rotated = true;
                let abs_apq = libm::sqrt(apq.norm_sqr());
                let phase = apq / C64::new(abs_apq, 0.0);
                let tau = (aqq - app) / (2.0 * abs_apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let phase_conj = phase.conj();
                rotate_cols(&mut work, p, q, c, s, phase_conj);
                rotate_cols(&mut v, p, q, c, s, phase_conj);
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending, stable in the
    // original column index so ties break deterministically.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| libm::sqrt(work.col_norm_sq(j))).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let mut u = CMat::zeros(a.rows, n);
    let mut v_sorted = CMat::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        if sigma > 0.0 {
            let inv = C64::new(1.0 / sigma, 0.0);
            for i in 0..a.rows {
                u[(i, dst)] = work[(i, src)] * inv;
            }
        }
        for i in 0..n {
            v_sorted[(i, dst)] = v[(i, src)];
        }
    }

    Svd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Apply the unitary update `[p q] <- [p q] * [[c, s], [-s*w, c*w]]` with
/// `w = conj(phase)` to columns p and q.
fn rotate_cols(m: &mut CMat, p: usize, q: usize, c: f64, s: f64, phase_conj: C64) {
    let rows = m.rows;
    let (pc, qc) = if p < q {
        let (head, tail) = m.data.split_at_mut(q * rows);
        (&mut head[p * rows..(p + 1) * rows], &mut tail[..rows])
    } else {
        unreachable!("rotation requires p < q")
    };
    for i in 0..rows {
        let ap = pc[i];
        let aq_phased = phase_conj * qc[i];
        pc[i] = ap * c - aq_phased * s;
        qc[i] = ap * s + aq_phased * c;
    }
}

/// Cholesky factor L (lower triangular, L * L^adjoint = a) of a Hermitian
/// positive-definite matrix. `relative_pivot_tolerance` rejects pivots below
/// that fraction of the largest diagonal entry; pass 0.0 to only reject
/// non-positive pivots.
pub fn cholesky(a: &CMat, relative_pivot_tolerance: f64) -> Result<CMat> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch("cholesky of a non-square matrix"));
    }
    let scale = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let floor = relative_pivot_tolerance * scale;
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !d.is_finite() || d <= floor {
            return Err(Error::NumericalFailure(
                "non-positive pivot in Cholesky factorization",
            ));
        }
        let ljj = libm::sqrt(d);
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut x = a[(i, j)];
            for k in 0..j {
                x -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = x / ljj;
        }
    }
    Ok(l)
}

/// log2 det of a Hermitian positive-definite matrix via its Cholesky factor.
pub fn log2_det_hpd(a: &CMat, relative_pivot_tolerance: f64) -> Result<f64> {
    Ok(log2_det_from_cholesky(&cholesky(
        a,
        relative_pivot_tolerance,
    )?))
}

/// log2 det of the matrix whose Cholesky factor is `l`.
pub fn log2_det_from_cholesky(l: &CMat) -> f64 {
    let mut acc = 0.0;
    for i in 0..l.rows() {
        acc += libm::log2(l[(i, i)].re);
    }
    2.0 * acc
}

/// Solve `a * x = b` for Hermitian positive-definite `a`.
pub fn solve_hpd(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch("solve_hpd right-hand side rows"));
    }
    let l = cholesky(a, 0.0)?;
    let n = a.rows();
    let mut x = b.clone();
    // Forward substitution L y = b, then backward L^* x = y, per column.
    for j in 0..x.cols() {
        for i in 0..n {
            let mut v = x[(i, j)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = v / l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut v = x[(i, j)];
            for k in (i + 1)..n {
                v -= l[(k, i)].conj() * x[(k, j)];
            }
            x[(i, j)] = v / l[(i, i)].re;
        }
    }
    Ok(x)
}

/// Determinant by LU with partial pivoting. Used by cross-checks and test
/// oracles; the production rate path goes through [`log2_det_hpd`].
pub fn det(a: &CMat) -> C64 {
    let n = a.rows();
    assert_eq!(a.cols(), n, "determinant of a non-square matrix");
    let mut m = a.clone();
    let mut result = C64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = m[(k, k)].norm_sqr();
        for i in (k + 1)..n {
            let mag = m[(i, k)].norm_sqr();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            result = -result;
        }
        let pivot = m[(k, k)];
        result *= pivot;
        for i in (k + 1)..n {
            let factor = m[(i, k)] / pivot;
            for j in (k + 1)..n {
                let sub = factor * m[(k, j)];
                m[(i, j)] -= sub;
            }
        }
    }
    result
}
