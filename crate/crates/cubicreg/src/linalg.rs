//! Self-contained dense symmetric linear algebra: eigendecomposition by
//! cyclic Jacobi rotations and shifted linear solves in the eigenbasis.
//!
//! Sized for desk-scale problems (d ≤ 50); everything is plain `f64` on
//! row-major storage and all operations are pure functions.

use thiserror::Error;

use crate::vecmath;

/// Off-diagonal convergence threshold for Jacobi sweeps, relative to `‖A‖_F`.
const JACOBI_TOL: f64 = 1e-14;
/// Maximum number of Jacobi sweeps before giving up.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative asymmetry beyond which a matrix is rejected instead of symmetrized.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {delta:e} exceeds {tol:e}")]
    NotSymmetric { i: usize, j: usize, delta: f64, tol: f64 },
    #[error("entry buffer has length {len}, expected {dim}x{dim}")]
    BadShape { len: usize, dim: usize },
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("shifted system is not positive definite: eigenvalue {eig} + shift {shift} <= 0")]
    NotPositiveDefinite { eig: f64, shift: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
}

/// Dense symmetric matrix with row-major storage.
///
/// Construction symmetrizes floating-point noise via `(A + Aᵀ)/2` and rejects
/// asymmetry beyond `1e-12·‖A‖_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix from row-major entries of length `dim²`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::ZeroDim);
        }
        if entries.len() != dim * dim {
            return Err(LinalgError::BadShape { len: entries.len(), dim });
        }
        if !vecmath::all_finite(&entries) {
            return Err(LinalgError::NonFinite);
        }
        let fro = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tol = SYMMETRY_TOL * fro;
        let mut m = Self { dim, entries };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let delta = (m.get(i, j) - m.get(j, i)).abs();
                if delta > tol {
                    return Err(LinalgError::NotSymmetric { i, j, delta, tol });
                }
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                m.set(i, j, avg);
                m.set(j, i, avg);
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::BadShape { len: row.len() * dim, dim });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self, LinalgError> {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * dim + i] = v;
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    /// Sets `a[i][j]` and `a[j][i]` to the same value.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Matrix-vector product `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            out[i] = vecmath::dot(row, x);
        }
        out
    }

    /// Returns `A + c·vvᵀ` without mutating `self`.
    pub fn add_rank_one(&self, c: f64, v: &[f64]) -> Self {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let val = out.get(i, j) + c * v[i] * v[j];
                out.set(i, j, val);
            }
        }
        out
    }

    /// Returns `A + shift·I`.
    pub fn add_shift(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            let val = out.get(i, i) + shift;
            out.set(i, i, val);
        }
        out
    }
}

/// Eigendecomposition `A = QΛQᵀ` with eigenvalues ascending and orthonormal
/// columns of `Q` paired with them.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Column-major list of eigenvectors; `eigenvectors[i]` pairs with
    /// `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Coordinates of `x` in the eigenbasis, `Qᵀx`.
    pub fn to_eigenbasis(&self, x: &[f64]) -> Vec<f64> {
        self.eigenvectors.iter().map(|q| vecmath::dot(q, x)).collect()
    }

    /// Maps eigenbasis coordinates back, `Q y`.
    pub fn from_eigenbasis(&self, y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (coef, q) in y.iter().zip(&self.eigenvectors) {
            for i in 0..d {
                out[i] += coef * q[i];
            }
        }
        out
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `1e-14·‖A‖_F`; errors after 100 sweeps (never expected for d ≤ 50).
/// Deterministic for identical input. Eigenvector signs are canonicalized so
/// the component of largest magnitude is positive.
pub fn eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = a.dim;
    if n == 1 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![a.get(0, 0)],
            eigenvectors: vec![vec![1.0]],
        });
    }

    let mut m = a.entries.clone();
    let mut q = SymmetricMatrix::identity(n).entries;
    let fro = a.frobenius_norm();
    let tol = JACOBI_TOL * fro.max(f64::MIN_POSITIVE);

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&m) <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for qi in p + 1..n {
                let apq = m[p * n + qi];
                if apq == 0.0 {
                    continue;
                }
                // Numerically stable rotation (Golub & Van Loan §8.5).
                let theta = (m[qi * n + qi] - m[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + qi];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + qi] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[qi * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[qi * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkq = q[k * n + qi];
                    q[k * n + p] = c * qkp - s * qkq;
                    q[k * n + qi] = s * qkp + c * qkq;
                }
            }
        }
    }
    if !converged && off(&m) > tol {
        return Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| {
            let val = m[j * n + j];
            let vec: Vec<f64> = (0..n).map(|i| q[i * n + j]).collect();
            (val, vec)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    for (_, v) in pairs.iter_mut() {
        let mut imax = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[imax].abs() {
                imax = i;
            }
        }
        if v[imax] < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &SymmetricMatrix) -> Result<f64, LinalgError> {
    Ok(eigh(a)?.min_eigenvalue())
}

/// Solves `(A + shift·I) x = b` through the eigendecomposition of `A`,
/// `x = Q(Λ + shift·I)⁻¹Qᵀb`.
///
/// Errors unless every shifted eigenvalue is strictly positive; the caller is
/// responsible for boundary and hard cases.
pub fn solve_shifted(e: &EigenDecomposition, shift: f64, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != e.dim() {
        return Err(LinalgError::DimMismatch { expected: e.dim(), got: b.len() });
    }
    for &ev in &e.eigenvalues {
        if ev + shift <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite { eig: ev, shift });
        }
    }
    let mut y = e.to_eigenbasis(b);
    for (yi, ev) in y.iter_mut().zip(&e.eigenvalues) {
        *yi /= ev + shift;
    }
    Ok(e.from_eigenbasis(&y))
}
