//! The lattice of subspaces of `H(d)`.
//!
//! A [`Subspace`] carries an orthonormal basis together with its projector.
//! Two subspaces are equal when their projectors agree in Frobenius norm;
//! bases are never compared directly since they are only defined up to a
//! unitary mixing of columns.
//!
//! The zero subspace `𝒪` (dimension 0) and the whole space `ℐ` are ordinary
//! values, so the lattice identities need no special cases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, ensure_finite, ensure_square, hermitian_eigen, orthonormal_column_basis,
    orthonormality_residual, trace, CMatrix, MatrixJson,
};
use crate::tolerance::{self, Tolerance};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SubspaceJson", into = "SubspaceJson")]
pub struct Subspace {
    basis: CMatrix,
    projector: CMatrix,
}

impl Subspace {
    fn from_basis_unchecked(basis: CMatrix) -> Self {
        let projector = &basis * basis.adjoint();
        Self { basis, projector }
    }

    /// The zero subspace `𝒪` of `H(d)`.
    pub fn zero(d: usize) -> Self {
        Self {
            basis: CMatrix::zeros(d, 0),
            projector: CMatrix::zeros(d, d),
        }
    }

    /// The whole space `ℐ = H(d)`.
    pub fn full(d: usize) -> Self {
        Self {
            basis: CMatrix::identity(d, d),
            projector: CMatrix::identity(d, d),
        }
    }

    /// Column span of an arbitrary `d × n` matrix.
    pub fn span(m: &CMatrix) -> Result<Self> {
        ensure_finite(m)?;
        Ok(Self::span_with(m, tolerance::session()))
    }

    pub fn span_with(m: &CMatrix, tol: &Tolerance) -> Self {
        Self::from_basis_unchecked(orthonormal_column_basis(m, tol))
    }

    /// Span of a list of vectors of length `d`.
    pub fn span_vectors(d: usize, vectors: &[Vec<num_complex::Complex64>]) -> Result<Self> {
        Self::span(&crate::linalg::from_columns(d, vectors)?)
    }

    /// Takes `basis` as is after checking that its columns are orthonormal.
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        ensure_finite(&basis)?;
        let residual = orthonormality_residual(&basis);
        if residual > tolerance::session().zero_tol {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self::from_basis_unchecked(basis))
    }

    /// Recovers the subspace from a Hermitian idempotent matrix.
    pub fn from_projector(p: &CMatrix) -> Result<Self> {
        let tol = tolerance::session();
        ensure_square(p)?;
        let eig = hermitian_eigen(p, tol)?;
        let idempotency = (p * p - p).norm();
        if idempotency > tol.zero_tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "not a projector: ‖P² − P‖ = {idempotency:.3e}"
            )));
        }
        let d = p.nrows();
        let keep: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        let basis = CMatrix::from_fn(d, keep.len(), |r, k| eig.eigenvectors[(r, keep[k])]);
        Ok(Self {
            basis,
            projector: (p + p.adjoint()) * crate::linalg::cr(0.5),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `dim(H)`, also the height of `H` in the lattice.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    /// `Tr 𝔓(H)`; equals `dim` up to rounding.
    pub fn trace_dim(&self) -> f64 {
        trace(&self.projector).re
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.ambient_dim() == other.ambient_dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.ambient_dim(),
                other.ambient_dim(),
            ))
        }
    }

    /// `H₁ ∨ H₂ = span(H₁ ∪ H₂)`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        let d = self.ambient_dim();
        let (k1, k2) = (self.dim(), other.dim());
        let mut stacked = CMatrix::zeros(d, k1 + k2);
        stacked.columns_mut(0, k1).copy_from(&self.basis);
        stacked.columns_mut(k1, k2).copy_from(&other.basis);
        Ok(Self::span_with(&stacked, tolerance::session()))
    }

    /// `H₁ ∧ H₂ = H₁ ∩ H₂`, computed as `(H₁⊥ ∨ H₂⊥)⊥`.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(self
            .orthocomplement()
            .join(&other.orthocomplement())?
            .orthocomplement())
    }

    /// `H⊥`, with projector exactly `I − 𝔓(H)`.
    pub fn orthocomplement(&self) -> Self {
        let d = self.ambient_dim();
        let projector = CMatrix::identity(d, d) - &self.projector;
        let basis = if self.is_zero() {
            CMatrix::identity(d, d)
        } else if self.is_full() {
            CMatrix::zeros(d, 0)
        } else {
            // singular values of I − 𝔓 are exactly 0 or 1
            let b = orthonormal_column_basis(&projector, &Tolerance::default());
            debug_assert_eq!(b.ncols(), d - self.dim());
            b
        };
        Self { basis, projector }
    }

    /// `H₁ ≺ H₂`: `𝔓(H₂)𝔓(H₁) = 𝔓(H₁)`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_same_space(other)?;
        let residual = (&other.projector * &self.projector - &self.projector).norm();
        Ok(residual <= tolerance::session().zero_tol)
    }

    /// Lattice test `H₁ = (H₁ ∧ H₂) ∨ (H₁ ∧ H₂⊥)`.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        let inside = self.meet(other)?;
        let outside = self.meet(&other.orthocomplement())?;
        Ok(self.approx_eq(&inside.join(&outside)?))
    }

    /// `‖[𝔓₁, 𝔓₂]‖_F`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(commutator(&self.projector, &other.projector).norm())
    }

    /// `H₁ ⊥ H₂`: `𝔓(H₁)𝔓(H₂) = 0`.
    pub fn is_orthogonal_to(&self, other: &Self) -> Result<bool> {
        self.check_same_space(other)?;
        Ok((&self.projector * &other.projector).norm() <= tolerance::session().zero_tol)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok((&self.projector - &other.projector).norm())
    }

    /// Projector-distance equality at the session `zero_tol`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && (&self.projector - &other.projector).norm() <= tolerance::session().zero_tol
    }

    /// `U·H`.
    pub fn transform(&self, u: &CMatrix) -> Result<Self> {
        crate::linalg::ensure_unitary(u, tolerance::session())?;
        if u.nrows() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(u.nrows(), self.ambient_dim()));
        }
        Ok(Self::from_basis_unchecked(u * &self.basis))
    }
}

/// Meet of a non-empty family.
pub fn meet_all(family: &[Subspace]) -> Result<Subspace> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, h| acc.meet(h))
}

/// Join of a non-empty family.
pub fn join_all(family: &[Subspace]) -> Result<Subspace> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, h| acc.join(h))
}

/// JSON shape `{"ambient_dim":d,"basis":<matrix>}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub basis: MatrixJson,
}

impl From<Subspace> for SubspaceJson {
    fn from(h: Subspace) -> Self {
        Self {
            ambient_dim: h.ambient_dim(),
            basis: MatrixJson::from(&h.basis),
        }
    }
}

impl TryFrom<SubspaceJson> for Subspace {
    type Error = Error;

    /// The basis need not be orthonormal; its column span is taken.
    fn try_from(j: SubspaceJson) -> Result<Self> {
        if j.basis.rows != j.ambient_dim {
            return Err(Error::DimensionMismatch(j.ambient_dim, j.basis.rows));
        }
        Subspace::span(&CMatrix::try_from(&j.basis)?)
    }
}

/// Largest dimension for which all `2^d` elements are built eagerly.
pub const MATERIALIZE_MAX_DIM: usize = 12;
/// Subset bitmasks are `u64`.
pub const MAX_BOOLEAN_DIM: usize = 63;

/// The Boolean subalgebra generated by an orthonormal basis: every element is
/// the span of a subset of the basis vectors, addressed by bitmask (bit `i`
/// selects column `i`).
#[derive(Debug, Clone)]
pub struct BooleanAlgebra {
    basis: CMatrix,
    elements: Option<Vec<Subspace>>,
}

impl BooleanAlgebra {
    /// `vectors` is `d × d` with orthonormal columns.
    pub fn from_basis(vectors: CMatrix) -> Result<Self> {
        let d = ensure_square(&vectors)?;
        if d > MAX_BOOLEAN_DIM {
            return Err(Error::DimensionTooLarge {
                max: MAX_BOOLEAN_DIM,
                got: d,
            });
        }
        ensure_finite(&vectors)?;
        let residual = orthonormality_residual(&vectors);
        if residual > tolerance::session().zero_tol {
            return Err(Error::NotOrthonormal { residual });
        }
        let mut algebra = Self {
            basis: vectors,
            elements: None,
        };
        if d <= MATERIALIZE_MAX_DIM {
            algebra.elements = Some((0..algebra.len()).map(|m| algebra.build(m)).collect());
        }
        Ok(algebra)
    }

    /// Algebra of the standard basis of `H(d)`.
    pub fn standard(d: usize) -> Result<Self> {
        Self::from_basis(CMatrix::identity(d, d))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn generating_basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `2^d`.
    pub fn len(&self) -> u64 {
        1u64 << self.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn full_mask(&self) -> u64 {
        self.len() - 1
    }

    fn build(&self, mask: u64) -> Subspace {
        let d = self.ambient_dim();
        let cols: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        let basis = CMatrix::from_fn(d, cols.len(), |r, k| self.basis[(r, cols[k])]);
        Subspace::from_basis_unchecked(basis)
    }

    /// Element spanned by the basis vectors selected in `mask`.
    pub fn element(&self, mask: u64) -> Option<Subspace> {
        if mask > self.full_mask() {
            return None;
        }
        Some(match &self.elements {
            Some(all) => all[mask as usize].clone(),
            None => self.build(mask),
        })
    }

    pub fn is_materialized(&self) -> bool {
        self.elements.is_some()
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> {
        0..self.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Subspace)> + '_ {
        self.masks()
            .map(|m| (m, self.element(m).expect("mask in range")))
    }

    /// Number of elements of each dimension `e = 0..=d`, counted from the
    /// elements themselves.
    pub fn counts_by_dimension(&self) -> Vec<u64> {
        let d = self.ambient_dim();
        let mut counts = vec![0u64; d + 1];
        for (_, h) in self.iter() {
            counts[h.dim()] += 1;
        }
        counts
    }

    /// Mask of the element equal to `h`, if `h` belongs to the algebra.
    pub fn mask_of(&self, h: &Subspace) -> Option<u64> {
        if h.ambient_dim() != self.ambient_dim() {
            return None;
        }
        let tol = tolerance::session().zero_tol;
        let p = h.projector();
        let mut mask = 0u64;
        for i in 0..self.ambient_dim() {
            let v = self.basis.column(i);
            if (p * v - v).norm() <= tol {
                mask |= 1 << i;
            }
        }
        let candidate = self.element(mask)?;
        candidate.approx_eq(h).then_some(mask)
    }

    /// Image of the algebra under the unitary `u`.
    pub fn transport(&self, u: &CMatrix) -> Result<Self> {
        crate::linalg::ensure_unitary(u, tolerance::session())?;
        if u.nrows() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(u.nrows(), self.ambient_dim()));
        }
        Self::from_basis(u * &self.basis)
    }
}
