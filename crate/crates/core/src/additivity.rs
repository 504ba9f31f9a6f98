//! The generalized additivity operator
//! `𝔇(H₁,H₂) = 𝔓(H₁∨H₂) + 𝔓(H₁∧H₂) − 𝔓(H₁) − 𝔓(H₂)`,
//! Gleason probabilities `p(H|ρ) = Tr[ρ𝔓(H)]`, the scalar
//! `𝔡(H₁,H₂|ρ) = Tr[ρ𝔇]`, and the lower/upper/Kolmogorov reading of a pair
//! of probabilities from the sign of `𝔡`.
//!
//! `𝔇` vanishes exactly when the two subspaces commute. Its eigenvalues sum
//! to zero and bracket `𝔡` for every state.
//!
//! Gleason's theorem only justifies `Tr[ρ𝔓]` as *the* probability measure
//! for `d > 2`; the formulas are still evaluated for `d = 2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Subspace;
use crate::linalg::{
    commutator, cr, ensure_finite, ensure_square, hermitian_eigen, hermitian_residual, trace,
    CMatrix, HermitianEigen, MatrixJson,
};
use crate::random;
use crate::tolerance::{self, Tolerance};

/// `𝔇(H₁,H₂)` with its eigensystem (eigenvalues ascending).
#[derive(Debug, Clone)]
pub struct AdditivityOperator {
    matrix: CMatrix,
    eigen: HermitianEigen,
}

impl AdditivityOperator {
    pub fn new(h1: &Subspace, h2: &Subspace) -> Result<Self> {
        let join = h1.join(h2)?;
        let meet = h1.meet(h2)?;
        let matrix = join.projector() + meet.projector() - h1.projector() - h2.projector();
        Self::from_matrix(matrix)
    }

    /// Wraps an already computed `𝔇` matrix (e.g. a closed form).
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let eigen = hermitian_eigen(&matrix, &Tolerance::default())?;
        Ok(Self { matrix, eigen })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigen.eigenvectors
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen.min()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.max()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// `Tr[ρ𝔇]`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch(rho.dim(), self.matrix.nrows()));
        }
        Ok(trace(&(rho.matrix() * &self.matrix)).re)
    }

    /// `|v_i⟩⟨v_i|` for eigenvector `i` (0-based, ascending eigenvalue).
    pub fn eigenstate(&self, i: usize) -> DensityMatrix {
        let v = self.eigen.vector(i);
        DensityMatrix {
            matrix: &v * v.adjoint(),
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates at the session tolerance. The stored matrix is the Hermitian
    /// part of `m`; eigenvalues down to `−zero_tol` are accepted.
    pub fn new(m: CMatrix) -> Result<Self> {
        let tol = tolerance::session();
        ensure_square(&m)?;
        ensure_finite(&m)?;
        let residual = hermitian_residual(&m);
        if residual > tol.zero_tol * (1.0 + m.norm()) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (residual {residual:.3e})"
            )));
        }
        let tr = trace(&m).re;
        if (tr - 1.0).abs() > tol.zero_tol {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let matrix = (&m + m.adjoint()) * cr(0.5);
        let lowest = hermitian_eigen(&matrix, tol)?.min();
        if lowest < -tol.zero_tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for `ψ` normalized here.
    pub fn pure(state: &[num_complex::Complex64]) -> Result<Self> {
        let n = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidDensityMatrix(
                "zero or non-finite state".into(),
            ));
        }
        let d = state.len();
        let matrix = CMatrix::from_fn(d, d, |i, j| state[i] * state[j].conj() / (n * n));
        Ok(Self { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: CMatrix::identity(d, d) * cr(1.0 / d as f64),
        }
    }

    /// `G G† / Tr(G G†)` for a Ginibre matrix `G` (full rank almost surely).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        let g = random::ginibre(rng, d, d);
        let w = &g * g.adjoint();
        let tr = trace(&w).re;
        Self {
            matrix: w * cr(1.0 / tr),
        }
    }

    /// Random pure state.
    pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        Self::pure(&random::unit_vector(rng, d)).expect("unit vector")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(&self.matrix).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let m = CMatrix::try_from(&j).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// `p(H|ρ) = Tr[ρ𝔓(H)]`, clamped into `[0,1]` when it strays by at most
/// `zero_tol`.
pub fn gleason_probability(h: &Subspace, rho: &DensityMatrix) -> Result<f64> {
    if h.ambient_dim() != rho.dim() {
        return Err(Error::DimensionMismatch(h.ambient_dim(), rho.dim()));
    }
    let p = trace(&(rho.matrix() * h.projector())).re;
    let slack = tolerance::session().zero_tol;
    Ok(if (-slack..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + slack {
        1.0
    } else {
        p
    })
}

/// `𝔡(H₁,H₂|ρ) = Tr[ρ𝔇(H₁,H₂)]`.
pub fn d_scalar(h1: &Subspace, h2: &Subspace, rho: &DensityMatrix) -> Result<f64> {
    AdditivityOperator::new(h1, h2)?.expectation(rho)
}

/// `p(H₁∨H₂|ρ) + p(H₁∧H₂|ρ) − p(H₁|ρ) − p(H₂|ρ)`, the same number as
/// [`d_scalar`] reached through four probabilities.
pub fn d_scalar_from_probabilities(
    h1: &Subspace,
    h2: &Subspace,
    rho: &DensityMatrix,
) -> Result<f64> {
    let p = |h: &Subspace| {
        if h.ambient_dim() != rho.dim() {
            return Err(Error::DimensionMismatch(h.ambient_dim(), rho.dim()));
        }
        Ok(trace(&(rho.matrix() * h.projector())).re)
    };
    Ok(p(&h1.join(h2)?)? + p(&h1.meet(h2)?)? - p(h1)? - p(h2)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// `𝔡 > ε`: the pair behaves as lower probabilities (beliefs).
    Lower,
    /// `𝔡 < −ε`: upper probabilities (plausibilities).
    Upper,
    /// `|𝔡| ≤ ε`: additive on this pair and state.
    Kolmogorov,
}

impl Verdict {
    pub fn from_scalar(d: f64, epsilon: f64) -> Self {
        if d > epsilon {
            Verdict::Lower
        } else if d < -epsilon {
            Verdict::Upper
        } else {
            Verdict::Kolmogorov
        }
    }

    /// The verdict for the complementary pair `(H₁⊥, H₂⊥)`.
    pub fn mirror(self) -> Self {
        match self {
            Verdict::Lower => Verdict::Upper,
            Verdict::Upper => Verdict::Lower,
            Verdict::Kolmogorov => Verdict::Kolmogorov,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairClassification {
    pub d_scalar: f64,
    pub verdict: Verdict,
    pub epsilon: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Per-state verdict for the pair `p(H₁|ρ), p(H₂|ρ)`.
///
/// A Kolmogorov verdict says nothing about `𝔇` itself: `𝔡` can vanish for a
/// particular `ρ` while `𝔇 ≠ 0`. Use [`verify_proposition1`] for the
/// state-independent facts.
pub fn classify_pair(
    h1: &Subspace,
    h2: &Subspace,
    rho: &DensityMatrix,
    epsilon: f64,
) -> Result<PairClassification> {
    let op = AdditivityOperator::new(h1, h2)?;
    classify_with_operator(&op, rho, epsilon)
}

pub fn classify_with_operator(
    op: &AdditivityOperator,
    rho: &DensityMatrix,
    epsilon: f64,
) -> Result<PairClassification> {
    let epsilon = epsilon.max(0.0);
    let d = op.expectation(rho)?;
    Ok(PairClassification {
        d_scalar: d,
        verdict: Verdict::from_scalar(d, epsilon),
        epsilon,
        lambda_min: op.lambda_min(),
        lambda_max: op.lambda_max(),
    })
}

/// Residual norms of the operator identities satisfied by `𝔇`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proposition1Residuals {
    /// `|Tr 𝔇|`.
    pub trace: f64,
    /// `‖𝔓(H₁∧H₂) − 𝔓₁𝔓₂ − 𝔓₁𝔇‖`.
    pub meet_defect_left: f64,
    /// `‖𝔓(H₁∧H₂) − 𝔓₁𝔓₂ − 𝔇𝔓₂‖`.
    pub meet_defect_right: f64,
    /// `‖[𝔓₁,𝔓₂] − 𝔇(𝔓₁ − 𝔓₂)‖`.
    pub commutator_left: f64,
    /// `‖[𝔓₁,𝔓₂] + (𝔓₁ − 𝔓₂)𝔇‖`.
    pub commutator_right: f64,
    /// `‖[𝔓₁,𝔓₂] + [𝔓₁,𝔇]‖`.
    pub commutator_with_operator: f64,
    /// `‖𝔇(H₁⊥,H₂⊥) + 𝔇(H₁,H₂)‖`.
    pub complement_antisymmetry: f64,
    /// `‖𝔇‖` when `H₁ ⊥ H₂` or `H₁ ≺ H₂`, otherwise absent.
    pub ordered_or_orthogonal: Option<f64>,
}

impl Proposition1Residuals {
    pub fn max(&self) -> f64 {
        [
            self.trace,
            self.meet_defect_left,
            self.meet_defect_right,
            self.commutator_left,
            self.commutator_right,
            self.commutator_with_operator,
            self.complement_antisymmetry,
            self.ordered_or_orthogonal.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// The four equivalent characterizations of a commuting pair, each decided
/// independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationEquivalence {
    pub operator_zero: bool,
    pub projectors_commute: bool,
    pub meet_is_product: bool,
    pub lattice_commutes: bool,
}

impl CommutationEquivalence {
    pub fn consistent(&self) -> bool {
        let v = self.operator_zero;
        self.projectors_commute == v && self.meet_is_product == v && self.lattice_commutes == v
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Proposition1Report {
    pub residuals: Proposition1Residuals,
    pub equivalence: CommutationEquivalence,
    pub commutator_norm: f64,
    pub operator_norm: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluates the `𝔇` identities for one pair at the session `zero_tol`.
pub fn verify_proposition1(h1: &Subspace, h2: &Subspace) -> Result<Proposition1Report> {
    verify_proposition1_with(h1, h2, tolerance::session().zero_tol)
}

pub fn verify_proposition1_with(
    h1: &Subspace,
    h2: &Subspace,
    tol: f64,
) -> Result<Proposition1Report> {
    let op = AdditivityOperator::new(h1, h2)?;
    let dm = op.matrix();
    let (p1, p2) = (h1.projector(), h2.projector());
    let meet = h1.meet(h2)?;
    let pm = meet.projector();

    let comm = commutator(p1, p2);
    let diff = p1 - p2;
    let meet_defect = pm - p1 * p2;
    let complement_op = AdditivityOperator::new(&h1.orthocomplement(), &h2.orthocomplement())?;

    let ordered_or_orthogonal = (h1.is_orthogonal_to(h2)? || h1.leq(h2)?).then(|| op.norm());

    let residuals = Proposition1Residuals {
        trace: op.trace().abs(),
        meet_defect_left: (&meet_defect - p1 * dm).norm(),
        meet_defect_right: (&meet_defect - dm * p2).norm(),
        commutator_left: (&comm - dm * &diff).norm(),
        commutator_right: (&comm + &diff * dm).norm(),
        commutator_with_operator: (&comm + commutator(p1, dm)).norm(),
        complement_antisymmetry: (complement_op.matrix() + dm).norm(),
        ordered_or_orthogonal,
    };
    let equivalence = CommutationEquivalence {
        operator_zero: op.norm() <= tol,
        projectors_commute: comm.norm() <= tol,
        meet_is_product: meet_defect.norm() <= tol,
        lattice_commutes: h1.commutes(h2)?,
    };
    let passed = residuals.max() <= tol && equivalence.consistent();
    Ok(Proposition1Report {
        residuals,
        equivalence,
        commutator_norm: comm.norm(),
        operator_norm: op.norm(),
        lambda_min: op.lambda_min(),
        lambda_max: op.lambda_max(),
        tolerance: tol,
        passed,
    })
}
