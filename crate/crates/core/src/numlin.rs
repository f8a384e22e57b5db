//! Dense complex linear algebra.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. The dimensions in this crate stay small (a few hundred at
//! most), so the kernels favour simplicity and accuracy over blocking:
//! Hermitian eigenproblems use cyclic Jacobi rotations, and the SVD is read
//! off the eigendecomposition of the Hermitian dilation `[[0, A†], [A, 0]]`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Hermiticity tolerance applied by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails on a size mismatch or a
    /// non-finite entry.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        ensure!(
            data.len() == rows * cols,
            "expected {} entries for a {rows}x{cols} matrix, got {}",
            rows * cols,
            data.len()
        );
        ensure!(data.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "matrix entries must be finite");
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; intended for
    /// literals in code and tests.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flatten().copied().collect();
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&e)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_col(&mut self, c: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (r, &z) in v.iter().enumerate() {
            self[(r, c)] = z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    /// Returns `A − zI`.
    pub fn shifted(&self, z: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= z;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self { rows: n, cols: m, data: out }
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `A† B` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let (k, n, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for p in 0..k {
            let b_row = &other.data[p * m..(p + 1) * m];
            for i in 0..n {
                let a = self.data[p * n + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out[i * m..(i + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self { rows: n, cols: m, data: out }
    }

    /// `A B†` without materializing the adjoint.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.rows, other.rows, |r, c| {
            self.row(r).iter().zip(other.row(c)).map(|(&a, &b)| a * b.conj()).sum()
        })
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).mul_adjoint(u)
    }

    /// Extracts the block with top-left corner `(row0, col0)`.
    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(row0 + r, col0 + c)])
    }

    /// Restriction `P† M P` onto the span of the given basis indices.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), indices.len(), |r, c| self[(indices[r], indices[c])])
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(svd(self)?.sigma.last().copied().unwrap_or(0.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigResult {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

/// Singular value decomposition `A = U diag(sigma) V†`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    /// Singular values in ascending order; `sigma[0]` is the smallest.
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for c in 0..us.cols() {
            for r in 0..us.rows() {
                us[(r, c)] *= self.sigma[c];
            }
        }
        us.mul_adjoint(&self.v)
    }

    pub fn smallest(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn largest(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn eigh(h: &ComplexMatrix) -> Result<EigResult> {
    ensure!(h.is_square(), "eigh needs a square matrix, got {}x{}", h.rows, h.cols);
    ensure!(h.is_finite(), "eigh input must be finite");
    ensure!(
        h.is_hermitian(HERMITIAN_TOL),
        "eigh input is not Hermitian (defect {:.3e})",
        h.hermiticity_defect()
    );
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = n <= 1 || scale == 0.0;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&a);
        if off <= JACOBI_OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if sweep > 3 && app.abs() + 100.0 * babs == app.abs() && aqq.abs() + 100.0 * babs == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                jacobi_rotate(&mut a, &mut v, p, q, b, babs, app, aqq);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > JACOBI_OFF_TOL * scale {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {off:.3e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigResult { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

#[allow(clippy::too_many_arguments)]
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, b: C64, babs: f64, app: f64, aqq: f64) {
    let n = a.rows;
    // Phase e^{-iφ} turns the (p, q) entry real; a real rotation then zeroes it.
    let phase = (b / babs).conj();
    let theta = (aqq - app) / (2.0 * babs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// `e^{−iHt}` for Hermitian `H`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    Ok(spectral_apply(&eig, |lambda| C64::from_polar(1.0, -lambda * t)))
}

/// `V f(Λ) V†` for a Hermitian eigendecomposition.
pub fn spectral_apply(eig: &EigResult, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let n = eig.values.len();
    let mut vf = eig.vectors.clone();
    for c in 0..n {
        let w = f(eig.values[c]);
        for r in 0..n {
            vf[(r, c)] *= w;
        }
    }
    vf.mul_adjoint(&eig.vectors)
}

/// Hermitian dilation `[[0, K†], [K, 0]]` of a square `K`.
pub fn hermitian_dilation(k: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure!(k.is_square(), "hermitian dilation needs a square operator, got {}x{}", k.rows, k.cols);
    Ok(rectangular_dilation(k))
}

fn rectangular_dilation(a: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.rows, a.cols);
    let mut d = ComplexMatrix::zeros(n + m, n + m);
    for r in 0..m {
        for c in 0..n {
            let z = a[(r, c)];
            d[(n + r, c)] = z;
            d[(c, n + r)] = z.conj();
        }
    }
    d
}

/// Traces out the leading tensor factor of dimension `dim_a`.
pub fn partial_trace_first(m: &ComplexMatrix, dim_a: usize) -> Result<ComplexMatrix> {
    ensure!(m.is_square(), "partial trace needs a square matrix");
    ensure!(dim_a > 0 && m.rows % dim_a == 0, "dimension {} is not divisible by {dim_a}", m.rows);
    let d = m.rows / dim_a;
    let mut out = ComplexMatrix::zeros(d, d);
    for a in 0..dim_a {
        for r in 0..d {
            for c in 0..d {
                out[(r, c)] += m[(a * d + r, a * d + c)];
            }
        }
    }
    Ok(out)
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Projects `v` off the given orthonormal vectors (two Gram–Schmidt passes)
/// and returns the residual norm.
fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    norm(v)
}

/// Picks `count` orthonormal vectors from `candidates`: first every candidate
/// whose residual keeps at least `accept` of its norm (in order), then the
/// remaining candidate with the largest residual, then standard basis vectors.
fn select_orthonormal(basis: &mut Vec<Vec<C64>>, candidates: &[Vec<C64>], count: usize, accept: f64, dim: usize) -> Vec<usize> {
    let mut taken = vec![false; candidates.len()];
    let mut picked = Vec::new();
    for (i, cand) in candidates.iter().enumerate() {
        if picked.len() == count {
            break;
        }
        let raw = norm(cand);
        if raw == 0.0 {
            continue;
        }
        let mut v = cand.clone();
        let res = orthogonalize(&mut v, basis);
        if res >= accept * raw.max(1e-300) && res > 1e-8 {
            v.iter_mut().for_each(|x| *x /= res);
            basis.push(v);
            taken[i] = true;
            picked.push(i);
        }
    }
    while picked.len() < count {
        let mut best: Option<(usize, f64, Vec<C64>)> = None;
        for (i, cand) in candidates.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let mut v = cand.clone();
            let res = orthogonalize(&mut v, basis);
            if best.as_ref().map_or(true, |b| res > b.1) {
                best = Some((i, res, v));
            }
        }
        match best {
            Some((i, res, mut v)) if res > 1e-8 => {
                v.iter_mut().for_each(|x| *x /= res);
                basis.push(v);
                taken[i] = true;
                picked.push(i);
            }
            _ => {
                // Fall back to the standard basis vector with the largest residual.
                let mut best_e: Option<(f64, Vec<C64>)> = None;
                for e in 0..dim {
                    let mut v = vec![ZERO; dim];
                    v[e] = ONE;
                    let res = orthogonalize(&mut v, basis);
                    if best_e.as_ref().map_or(true, |b| res > b.0) {
                        best_e = Some((res, v));
                    }
                }
                let (res, mut v) = best_e.expect("dimension is positive");
                v.iter_mut().for_each(|x| *x /= res);
                basis.push(v);
                picked.push(usize::MAX);
            }
        }
    }
    picked
}

/// Thin singular value decomposition via the Hermitian dilation.
///
/// The eigenvalues of `[[0, A†], [A, 0]]` are `±σ_j` (plus `|m − n|` zeros),
/// and an eigenvector `(x; y)` for `+σ_j` carries `v_j ∝ x`, `u_j ∝ y`.
/// Clusters near zero mix the two halves, so right vectors are selected by
/// Gram–Schmidt over all eigenvector top halves, and left vectors for the
/// near-null part are completed from the bottom halves.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    ensure!(a.is_finite(), "svd input must be finite");
    let (m, n) = (a.rows, a.cols);
    let k = m.min(n);
    if k == 0 {
        return Ok(SvdResult { u: ComplexMatrix::zeros(m, 0), sigma: vec![], v: ComplexMatrix::zeros(n, 0) });
    }
    let eig = eigh(&rectangular_dilation(a))?;
    let dim = n + m;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.values[j].total_cmp(&eig.values[i]));

    let tops: Vec<Vec<C64>> = order.iter().map(|&i| (0..n).map(|r| eig.vectors[(r, i)]).collect()).collect();
    let bottoms: Vec<Vec<C64>> = order.iter().map(|&i| (n..dim).map(|r| eig.vectors[(r, i)]).collect()).collect();

    let mut vbasis = Vec::with_capacity(k);
    let picked = select_orthonormal(&mut vbasis, &tops, k, 0.5, n);

    let scale = eig.values.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let mut triples: Vec<(f64, Vec<C64>)> = picked
        .iter()
        .zip(vbasis)
        .map(|(&p, v)| {
            let s = if p == usize::MAX { norm(&a.matvec(&v)) } else { eig.values[order[p]].abs() };
            (s, v)
        })
        .collect();
    triples.sort_by(|x, y| y.0.total_cmp(&x.0));

    // Left vectors, largest singular values first; near-null ones are
    // completed from the bottom halves of the dilation eigenvectors.
    let null_tol = 1e-11 * scale.max(f64::MIN_POSITIVE);
    let mut ubasis: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut ucols: Vec<Option<usize>> = vec![None; k];
    for (j, (s, v)) in triples.iter().enumerate() {
        if *s > null_tol {
            let mut u = a.matvec(v);
            let res = orthogonalize(&mut u, &ubasis);
            if res > 1e-300 {
                u.iter_mut().for_each(|x| *x /= res);
                ucols[j] = Some(ubasis.len());
                ubasis.push(u);
            }
        }
    }
    let deferred: Vec<usize> = (0..k).filter(|&j| ucols[j].is_none()).collect();
    if !deferred.is_empty() {
        let first = ubasis.len();
        select_orthonormal(&mut ubasis, &bottoms, deferred.len(), 0.5, m);
        for (i, &j) in deferred.iter().enumerate() {
            ucols[j] = Some(first + i);
        }
    }

    let mut u = ComplexMatrix::zeros(m, k);
    let mut v = ComplexMatrix::zeros(n, k);
    let mut sigma = Vec::with_capacity(k);
    for (c, j) in (0..k).rev().enumerate() {
        sigma.push(triples[j].0);
        v.set_col(c, &triples[j].1);
        u.set_col(c, &ubasis[ucols[j].expect("every column assigned")]);
    }
    Ok(SvdResult { u, sigma, v })
}
