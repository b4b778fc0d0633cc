//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything runs on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. The eigensolver is a cyclic Jacobi sweep in complex Givens
//! form; at the dimensions used here (≤ 64) it is robust for every Hermitian
//! input and fast enough that nothing else is needed.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

/// Acceptance threshold for Hermiticity of operator inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues at or below this magnitude count as kernel directions in
/// pseudo-inverses.
pub const KERNEL_TOL: f64 = 1e-12;
/// Negative eigenvalues above this magnitude are clamped to zero before
/// matrix square roots; anything more negative is rejected.
pub const PSD_CLAMP: f64 = 1e-10;
/// Default post-hoc residual tolerance for eigendecompositions.
pub const EIG_TOL: f64 = 1e-10;

const JACOBI_SWEEP_CAP: usize = 100;
const JACOBI_OFF_THRESHOLD: f64 = 1e-14;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: |M[{row}][{col}] - conj(M[{col}][{row}])| = {violation:.3e} exceeds {tol:.1e}")]
    NotHermitian {
        row: usize,
        col: usize,
        violation: f64,
        tol: f64,
    },
    #[error("Jacobi eigensolver did not reach tolerance: residual off-diagonal norm {off_norm:.3e} after {sweeps} sweeps")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} below -{tol:.1e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tol: f64 },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("invalid density matrix: {reason}")]
    InvalidDensity { reason: String },
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C_ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C_ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        Self::from_fn(r, c, |i, j| c64(rows[i][j], 0.0))
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    c64(entries[i], 0.0)
                } else {
                    C_ZERO
                }
            },
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C_ZERO {
                    continue;
                }
                let row_b = &other.data[k * other.cols..(k + 1) * other.cols];
                let row_out = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in row_out.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `M · v` for a column vector.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Worst Hermiticity violation as `(row, col, |M[i][j] - conj(M[j][i])|)`.
    pub fn hermitian_violation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0_f64);
        for i in 0..self.rows {
            for j in i..self.cols {
                let v = (self.get(i, j) - self.get(j, i).conj()).norm();
                if v > worst.2 {
                    worst = (i, j, v);
                }
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<(), LinalgError> {
        self.check_square("Hermitian check")?;
        let (row, col, violation) = self.hermitian_violation();
        if violation > tol {
            return Err(LinalgError::NotHermitian {
                row,
                col,
                violation,
                tol,
            });
        }
        Ok(())
    }

    fn check_square(&self, context: &str) -> Result<(), LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch {
                context: format!("{context}: matrix is {}x{}", self.rows, self.cols),
            });
        }
        Ok(())
    }

    /// `(M + M†) / 2`.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.mul_mat(rhs)
    }
}

/// `⟨u|v⟩ = Σ conj(u_i) v_i`.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &[Complex64], v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// `Tr(A · B)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.cols(), b.rows());
    assert_eq!(a.rows(), b.cols());
    let mut s = C_ZERO;
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            s += a.get(i, k) * b.get(k, i);
        }
    }
    s
}

/// Result of a Hermitian eigendecomposition: `M = V · diag(λ) · V†` with the
/// eigenvalues sorted ascending and the eigenvectors as orthonormal columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm falls below
/// `1e-14 · max(1, ‖M‖_F)`, with a hard cap of 100 sweeps. After
/// convergence the residual `‖M·V − V·Λ‖_max` and the orthonormality defect
/// `‖V†V − I‖_max` are checked against `tol · max(1, ‖M‖_max)`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEig, LinalgError> {
    assert!(tol > 0.0, "eigensolver tolerance must be positive");
    m.check_hermitian(HERMITIAN_TOL)?;
    let n = m.dim();

    // Exact symmetrization so the rotation arithmetic sees a_ij = conj(a_ji).
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_THRESHOLD * m.frobenius_norm().max(1.0);

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < JACOBI_SWEEP_CAP {
        if a.off_diagonal_norm() <= threshold {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let theta = (a.get(q, q).re - a.get(p, p).re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Unitary J: J[p][p]=c, J[p][q]=s, J[q][p]=-s·conj(phase),
                // J[q][q]=c·conj(phase); apply A ← J† A J and V ← V J.
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c - aiq * phase.conj() * s);
                    a.set(i, q, aip * s + aiq * phase.conj() * c);
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * phase.conj() * s);
                    v.set(i, q, vip * s + viq * phase.conj() * c);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * phase * s);
                    a.set(q, j, apj * s + aqj * phase * c);
                }
            }
        }
    }
    if !converged && a.off_diagonal_norm() > threshold {
        return Err(LinalgError::NoConvergence {
            sweeps,
            off_norm: a.off_diagonal_norm(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));

    let eig = HermitianEig {
        eigenvalues,
        eigenvectors,
    };
    verify_eig(m, &eig, tol)?;
    Ok(eig)
}

fn verify_eig(m: &ComplexMatrix, eig: &HermitianEig, tol: f64) -> Result<(), LinalgError> {
    let n = m.dim();
    let scale = m.max_abs().max(1.0);
    let v = &eig.eigenvectors;
    let mv = m * v;
    let mut residual = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            residual = residual.max((mv.get(i, j) - v.get(i, j) * eig.eigenvalues[j]).norm());
        }
    }
    let gram = &v.adjoint() * v;
    let ortho = gram.max_abs_diff(&ComplexMatrix::identity(n));
    if residual > tol * scale || ortho > tol {
        return Err(LinalgError::NoConvergence {
            sweeps: JACOBI_SWEEP_CAP,
            off_norm: residual.max(ortho),
        });
    }
    Ok(())
}

/// Rebuilds `V · diag(f(λ)) · V†` from a Hermitian matrix, applying `f` to
/// each eigenvalue.
pub fn hermitian_matrix_function(
    m: &ComplexMatrix,
    f: impl Fn(f64) -> Complex64,
) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eig(m, EIG_TOL)?;
    Ok(rebuild_from_eig(&eig, f))
}

/// `V · diag(f(λ)) · V†` for an existing decomposition.
pub fn rebuild_from_eig(eig: &HermitianEig, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let n = eig.eigenvalues.len();
    let v = &eig.eigenvectors;
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, j) * f(eig.eigenvalues[j]));
    &scaled * &v.adjoint()
}

/// Positive-semidefinite square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more negative
/// is rejected as not positive semidefinite.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eig(m, EIG_TOL)?;
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if min < -PSD_CLAMP {
            return Err(LinalgError::NotPositiveSemidefinite {
                eigenvalue: min,
                tol: PSD_CLAMP,
            });
        }
    }
    let root = rebuild_from_eig(&eig, |l| c64(l.max(0.0).sqrt(), 0.0));
    Ok(root.hermitized())
}

/// Kronecker product: `(A ⊗ B)[i·rB + k][j·cB + l] = A[i][j] · B[k][l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a.get(i, j);
            if aij == C_ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out.set(i * rb + k, j * cb + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Partial trace of `rho` over the subsystems *not* listed in `keep`.
///
/// `dims` are the subsystem dimensions in tensor order (row-major index
/// convention, consistent with [`kron`]); `keep` must be a strictly
/// increasing, non-empty list of subsystem positions. The kept subsystems
/// retain their original relative order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    let total: usize = dims.iter().product();
    if rho.rows() != total || rho.cols() != total {
        return Err(LinalgError::DimensionMismatch {
            context: format!(
                "partial_trace: matrix is {}x{}, subsystem dims {:?} give {}",
                rho.rows(),
                rho.cols(),
                dims,
                total
            ),
        });
    }
    if keep.is_empty()
        || keep.windows(2).any(|w| w[0] >= w[1])
        || keep.iter().any(|&k| k >= dims.len())
    {
        return Err(LinalgError::DimensionMismatch {
            context: format!(
                "partial_trace: keep set {:?} invalid for {} subsystems",
                keep,
                dims.len()
            ),
        });
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let kept_dim: usize = keep.iter().map(|&p| dims[p]).product();
    let traced_dim: usize = traced.iter().map(|&p| dims[p]).product();

    // Row-major strides over the full index.
    let mut stride = vec![1usize; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        stride[p] = stride[p + 1] * dims[p + 1];
    }
    let unrank = |mut x: usize, positions: &[usize]| -> usize {
        let mut full = 0;
        for &p in positions.iter().rev() {
            full += (x % dims[p]) * stride[p];
            x /= dims[p];
        }
        full
    };

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for ik in 0..kept_dim {
        let base_i = unrank(ik, keep);
        for jk in 0..kept_dim {
            let base_j = unrank(jk, keep);
            let mut s = C_ZERO;
            for t in 0..traced_dim {
                let off = unrank(t, &traced);
                s += rho.get(base_i + off, base_j + off);
            }
            out.set(ik, jk, s);
        }
    }
    Ok(out)
}

/// Hermitian, unit-trace, positive-semidefinite matrix over a declared basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within `tol`.
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        mat.check_square("density matrix")
            .map_err(|e| LinalgError::InvalidDensity {
                reason: e.to_string(),
            })?;
        let (_, _, herm) = mat.hermitian_violation();
        if herm > tol.max(HERMITIAN_TOL) {
            return Err(LinalgError::InvalidDensity {
                reason: format!("Hermiticity violation {herm:.3e} exceeds {tol:.1e}"),
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(LinalgError::InvalidDensity {
                reason: format!("trace {tr} differs from 1 by more than {tol:.1e}"),
            });
        }
        let eig = hermitian_eig(&mat.hermitized(), EIG_TOL)?;
        let min = eig.eigenvalues[0];
        if min < -tol {
            return Err(LinalgError::InvalidDensity {
                reason: format!("minimum eigenvalue {min:.3e} below -{tol:.1e}"),
            });
        }
        Ok(Self { mat })
    }

    /// Pure state `|v⟩⟨v|` from a normalized amplitude vector.
    pub fn pure(v: &[Complex64]) -> Result<Self, LinalgError> {
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LinalgError::InvalidDensity {
                reason: format!("state vector has norm² {norm}, expected 1"),
            });
        }
        Self::new(outer(v, v), 1e-12)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn trace_re(&self) -> f64 {
        self.mat.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_of_product(&self.mat, &self.mat).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        Ok(hermitian_eig(&self.mat.hermitized(), EIG_TOL)?.eigenvalues[0])
    }
}
