//! Dense complex matrices and the handful of decompositions the lattice
//! needs: Hermitian eigensystems and rank-revealing orthonormal bases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Builds a matrix from real rows, scaled by `scale`.
pub fn real_matrix(rows: &[&[f64]], scale: f64) -> CMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    CMatrix::from_fn(r, cols, |i, j| cr(rows[i][j] * scale))
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(d: usize, columns: &[Vec<Complex64>]) -> Result<CMatrix> {
    for col in columns {
        if col.len() != d {
            return Err(Error::ShapeMismatch {
                left: (d, 1),
                right: (col.len(), 1),
            });
        }
    }
    Ok(CMatrix::from_fn(d, columns.len(), |i, j| columns[j][i]))
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows == cols {
        Ok(rows)
    } else {
        Err(Error::NonSquare { rows, cols })
    }
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok((a - b).norm())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `‖m − m†‖_F`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖u†u − I‖_F`, the deviation from having orthonormal columns.
pub fn orthonormality_residual(u: &CMatrix) -> f64 {
    let k = u.ncols();
    (u.adjoint() * u - CMatrix::identity(k, k)).norm()
}

/// `max(‖u†u − I‖_F, ‖uu† − I‖_F)`; `∞` for non-square input.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    let id = CMatrix::identity(n, n);
    (u.adjoint() * u - &id)
        .norm()
        .max((u * u.adjoint() - id).norm())
}

pub fn ensure_unitary(u: &CMatrix, tol: &Tolerance) -> Result<()> {
    let residual = unitarity_residual(u);
    if residual <= tol.zero_tol {
        Ok(())
    } else {
        Err(Error::NotUnitary { residual })
    }
}

/// Eigensystem of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let lambda = CMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| cr(l)),
        ));
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigen-decomposition. The input is symmetrized as `(m + m†)/2`
/// first; an asymmetry larger than `zero_tol·(1 + ‖m‖_F)` is rejected.
pub fn hermitian_eigen(m: &CMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let residual = hermitian_residual(m);
    if residual > tol.zero_tol * (1.0 + m.norm()) {
        return Err(Error::NotHermitian { residual });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()) * cr(0.5);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Orthonormal basis for the column span of `m`.
///
/// Rank is the number of singular values above `rank_tol · σ_max`. A rank-0
/// input yields an `rows × 0` matrix.
pub fn orthonormal_column_basis(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let rows = m.nrows();
    let (w, sigma) = jacobi_orthogonalize(m);
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    if sigma_max.is_nan() || sigma_max <= 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let cutoff = tol.rank_tol * sigma_max;
    let mut keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cutoff).collect();
    keep.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    CMatrix::from_fn(rows, keep.len(), |r, k| w[(r, keep[k])] / sigma[keep[k]])
}

/// The `min(rows, cols)` singular values of `m`, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let (_, mut sigma) = jacobi_orthogonalize(m);
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma.truncate(m.nrows().min(m.ncols()));
    sigma
}

/// One-sided (Hestenes) Jacobi: applies plane rotations from the right until
/// the columns of `m` are mutually orthogonal. Returns the rotated matrix
/// `U·Σ` and its column norms `Σ`.
fn jacobi_orthogonalize(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    const MAX_SWEEPS: usize = 80;
    let mut w = m.clone();
    let n = w.ncols();
    let col_norm_sqr =
        |w: &CMatrix, j: usize| w.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = col_norm_sqr(&w, p);
                let beta = col_norm_sqr(&w, q);
                let gamma: Complex64 = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= 4.0 * f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rephase column q so that ⟨w_p, w_q⟩ is real and positive
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for r in 0..w.nrows() {
                    let wp = w[(r, p)];
                    let wq = w[(r, q)] * phase;
                    w[(r, p)] = wp * cs - wq * sn;
                    w[(r, q)] = wp * sn + wq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = (0..n).map(|j| col_norm_sqr(&w, j).sqrt()).collect();
    (w, sigma)
}

/// Numerical rank under the same rule as [`orthonormal_column_basis`].
pub fn rank(m: &CMatrix, tol: &Tolerance) -> usize {
    orthonormal_column_basis(m, tol).ncols()
}

/// Row-major JSON encoding `{"rows":r,"cols":c,"data":[[re,im],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self { rows, cols, data }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(Error::ShapeMismatch {
                left: (j.rows, j.cols),
                right: (j.data.len(), 1),
            });
        }
        let m = CMatrix::from_fn(j.rows, j.cols, |i, k| {
            let [re, im] = j.data[i * j.cols + k];
            c(re, im)
        });
        ensure_finite(&m)?;
        Ok(m)
    }
}

/// `(re, im)` pair list, the vector encoding used by the CLI.
pub fn vector_to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn pairs_to_vector(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|&[re, im]| c(re, im)).collect()
}
