//! Two spin-½ particles in the Bell state and the four measurements
//! `A = S_x⊗S_x`, `B = S_x⊗S_{a,b}`, `C = S_{a,b}⊗S_x`, `D = S_{a,b}⊗S_{a,b}`.
//!
//! Tensor products put the first particle in the first Kronecker factor.
//! `S_{a,b} = U S_x U†` with `U = [[a, b], [−b*, a*]]`, `|a|²+|b|² = 1`.
//! The outcome subspaces of observable `i` are
//! `H₁ᵢ ↔ (1,1)`, `H₂ᵢ ↔ (1,0)`, `H₃ᵢ ↔ (0,1)`, `H₄ᵢ ↔ (0,0)`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::additivity::{gleason_probability, DensityMatrix};
use crate::error::{Error, Result};
use crate::lattice::{join_all, meet_all, BooleanAlgebra, Subspace};
use crate::linalg::{
    c, commutator, cr, frobenius_distance, singular_values, CMatrix, CVector, ZERO,
};
use crate::random;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2Setting {
    a: Complex64,
    b: Complex64,
}

impl Su2Setting {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > tolerance::session().zero_tol {
            return Err(Error::UnnormalizedSetting(n));
        }
        Ok(Self { a, b })
    }

    /// `a = e^{iθ}`, `b = 0`.
    pub fn from_theta(theta: f64) -> Self {
        Self {
            a: Complex64::from_polar(1.0, theta),
            b: ZERO,
        }
    }

    /// `a = 1`, `b = 0`: `S_{a,b} = S_x`.
    pub fn identity() -> Self {
        Self::from_theta(0.0)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v = random::unit_vector(rng, 2);
        Self { a: v[0], b: v[1] }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// `U(a,b)`.
    pub fn rotation(&self) -> CMatrix {
        let (a, b) = (self.a, self.b);
        CMatrix::from_row_slice(2, 2, &[a, b, -b.conj(), a.conj()])
    }

    /// `κ = ½(a_R² + b_I²)`.
    pub fn kappa(&self) -> f64 {
        0.5 * (self.a.re * self.a.re + self.b.im * self.b.im)
    }

    /// `λ = ⅛{|a+b|⁴ + |a−b|⁴ + (a²−b²)² + [(a*)²−(b*)²]²}`.
    pub fn lambda(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        let s = (a + b).norm_sqr();
        let d = (a - b).norm_sqr();
        let w = a * a - b * b;
        let wc = a.conj() * a.conj() - b.conj() * b.conj();
        (s * s + d * d + (w * w + wc * wc).re) / 8.0
    }

    /// `S_{a,b}` commutes with `S_x`, so all four algebras coincide.
    pub fn is_degenerate(&self) -> bool {
        let (p1, _) = spin_projectors(self);
        commutator(&x_projector(1), &p1).norm() <= tolerance::session().zero_tol
    }
}

/// `Π(x,1) = ½[[1,1],[1,1]]`, `Π(x,0) = ½[[1,−1],[−1,1]]`.
pub fn x_projector(outcome: u8) -> CMatrix {
    let s = if outcome == 1 { 0.5 } else { -0.5 };
    CMatrix::from_row_slice(2, 2, &[cr(0.5), cr(s), cr(s), cr(0.5)])
}

/// `S_x = ½[Π(x,1) − Π(x,0)]`.
pub fn spin_x() -> CMatrix {
    (x_projector(1) - x_projector(0)) * cr(0.5)
}

/// `(Π(a,b;1), Π(a,b;0))` from the closed form
/// `Π(a,b;1) = ½[[|a+b|², a²−b²], [(a*)²−(b*)², |a−b|²]]`.
pub fn spin_projectors(setting: &Su2Setting) -> (CMatrix, CMatrix) {
    let (a, b) = (setting.a, setting.b);
    let off = a * a - b * b;
    let p1 = CMatrix::from_row_slice(
        2,
        2,
        &[
            cr(0.5 * (a + b).norm_sqr()),
            off * 0.5,
            off.conj() * 0.5,
            cr(0.5 * (a - b).norm_sqr()),
        ],
    );
    let p0 = CMatrix::identity(2, 2) - &p1;
    (p1, p0)
}

/// The same pair as `U Π(x,·) U†`.
pub fn rotated_projectors(setting: &Su2Setting) -> (CMatrix, CMatrix) {
    let u = setting.rotation();
    let ud = u.adjoint();
    (&u * x_projector(1) * &ud, &u * x_projector(0) * ud)
}

/// `S_{a,b} = U S_x U†`.
pub fn spin_ab(setting: &Su2Setting) -> CMatrix {
    let u = setting.rotation();
    &u * spin_x() * u.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    A,
    B,
    C,
    D,
}

impl Observable {
    pub const ALL: [Observable; 4] = [Observable::A, Observable::B, Observable::C, Observable::D];

    /// Whether the first and second particle use the rotated spin.
    fn rotated(self) -> (bool, bool) {
        match self {
            Observable::A => (false, false),
            Observable::B => (false, true),
            Observable::C => (true, false),
            Observable::D => (true, true),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Named element `H_{kᵢ}` (`k = 1..=7`) or its orthocomplement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub k: u8,
    pub complement: bool,
}

impl Label {
    pub fn new(k: u8) -> Self {
        Self {
            k,
            complement: false,
        }
    }

    pub fn perp(k: u8) -> Self {
        Self {
            k,
            complement: true,
        }
    }

    /// The 14 named elements, `H₁ … H₇` and their complements.
    pub fn all() -> impl Iterator<Item = Label> {
        (1..=7).flat_map(|k| [Label::new(k), Label::perp(k)])
    }

    /// Mask in the algebra generated by `(H₁, H₂, H₃, H₄)`.
    pub fn mask(&self) -> u64 {
        let m = match self.k {
            1 => 0b0001,
            2 => 0b0010,
            3 => 0b0100,
            4 => 0b1000,
            5 => 0b0011,
            6 => 0b0101,
            7 => 0b1001,
            _ => panic!("no element H{}", self.k),
        };
        if self.complement {
            !m & 0b1111
        } else {
            m
        }
    }
}

/// Closed-form projector of a named element, from the single-particle
/// projectors `Π(x,·)` and `Π(a,b;·)`.
pub fn closed_form_projector(setting: &Su2Setting, obs: Observable, label: Label) -> CMatrix {
    let (rot_left, rot_right) = obs.rotated();
    let (ab1, ab0) = spin_projectors(setting);
    let (x1, x0) = (x_projector(1), x_projector(0));
    let (l1, l0) = if rot_left { (&ab1, &ab0) } else { (&x1, &x0) };
    let (r1, r0) = if rot_right { (&ab1, &ab0) } else { (&x1, &x0) };
    let id2 = CMatrix::identity(2, 2);
    let p = match label.k {
        1 => l1.kronecker(r1),
        2 => l1.kronecker(r0),
        3 => l0.kronecker(r1),
        4 => l0.kronecker(r0),
        5 => l1.kronecker(&id2),
        6 => id2.kronecker(r1),
        7 => l1.kronecker(r1) + l0.kronecker(r0),
        k => panic!("no element H{k}"),
    };
    if label.complement {
        CMatrix::identity(4, 4) - p
    } else {
        p
    }
}

/// `(1,0,0,1)ᵀ/√2`.
pub fn bell_state() -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![cr(s), ZERO, ZERO, cr(s)]
}

pub fn bell_density() -> DensityMatrix {
    DensityMatrix::pure(&bell_state()).expect("unit vector")
}

/// The four Boolean algebras of the measurements and the observables.
#[derive(Debug, Clone)]
pub struct MeasurementSetup {
    pub setting: Su2Setting,
    algebras: [BooleanAlgebra; 4],
}

/// `B_A`, generated by `(1,1,1,1)/2, (1,−1,1,−1)/2, (1,1,−1,−1)/2, (1,−1,−1,1)/2`.
pub fn algebra_a() -> BooleanAlgebra {
    let rows: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    // rows above are the generating vectors; store them as columns
    let basis = CMatrix::from_fn(4, 4, |r, k| cr(rows[k][r] * 0.5));
    BooleanAlgebra::from_basis(basis).expect("orthonormal")
}

/// `[B_A, B_B, B_C, B_D]` with `B_B = (1⊗U)B_A`, `B_C = (U⊗1)B_A`,
/// `B_D = (U⊗U)B_A`.
pub fn boolean_tables(setting: &Su2Setting) -> Result<[BooleanAlgebra; 4]> {
    let u = setting.rotation();
    let id = CMatrix::identity(2, 2);
    let ba = algebra_a();
    let bb = ba.transport(&id.kronecker(&u))?;
    let bc = ba.transport(&u.kronecker(&id))?;
    let bd = ba.transport(&u.kronecker(&u))?;
    Ok([ba, bb, bc, bd])
}

impl MeasurementSetup {
    pub fn new(setting: Su2Setting) -> Result<Self> {
        Ok(Self {
            setting,
            algebras: boolean_tables(&setting)?,
        })
    }

    pub fn algebra(&self, obs: Observable) -> &BooleanAlgebra {
        &self.algebras[obs as usize]
    }

    pub fn element(&self, obs: Observable, label: Label) -> Subspace {
        self.algebra(obs)
            .element(label.mask())
            .expect("4-dim algebra")
    }

    /// `H_{kᵢ}` for `k = 1..=4`.
    pub fn outcome(&self, obs: Observable, k: u8) -> Subspace {
        self.element(obs, Label::new(k))
    }

    /// The spin observable as a 4×4 matrix, built from `S_x` and `S_{a,b}`.
    pub fn observable(&self, obs: Observable) -> CMatrix {
        let (rl, rr) = obs.rotated();
        let sx = spin_x();
        let sab = spin_ab(&self.setting);
        let l = if rl { &sab } else { &sx };
        let r = if rr { &sab } else { &sx };
        l.kronecker(r)
    }

    /// `‖O − ¼[𝔓₁+𝔓₄] + ¼[𝔓₂+𝔓₃]‖_F`.
    pub fn decomposition_residual(&self, obs: Observable) -> f64 {
        let p = |k| self.outcome(obs, k).projector().clone();
        let rebuilt = (p(1) + p(4) - p(2) - p(3)) * cr(0.25);
        (self.observable(obs) - rebuilt).norm()
    }

    /// `[H₁A∨H₄A, H₁B∨H₄B, H₁C∨H₄C, H₂D∨H₃D]`, joined in the lattice.
    pub fn chsh_family(&self) -> Result<Vec<Subspace>> {
        Observable::ALL
            .iter()
            .map(|&obs| {
                let (x, y) = chsh_pair(obs);
                self.outcome(obs, x).join(&self.outcome(obs, y))
            })
            .collect()
    }
}

/// Outcomes joined for each observable in the CHSH family.
fn chsh_pair(obs: Observable) -> (u8, u8) {
    match obs {
        Observable::D => (2, 3),
        _ => (1, 4),
    }
}

/// Column order of the probability table: `(1,1), (0,1), (1,0), (0,0)`,
/// i.e. `H₁, H₃, H₂, H₄`.
pub const TABLE_COLUMNS: [u8; 4] = [1, 3, 2, 4];
pub const TABLE_COLUMN_LABELS: [&str; 4] = ["(1,1)", "(0,1)", "(1,0)", "(0,0)"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub kappa: f64,
    pub lambda: f64,
    /// `⟨s|𝔓(H_{kᵢ})|s⟩`, rows `A..D`, columns as [`TABLE_COLUMNS`].
    pub rows: [[f64; 4]; 4],
    /// The same cells from `κ` and `λ`.
    pub closed_form: [[f64; 4]; 4],
    /// Largest cell disagreement between the two routes.
    pub residual: f64,
}

impl ProbabilityTable {
    pub fn row_sum(&self, obs: Observable) -> f64 {
        self.rows[obs as usize].iter().sum()
    }
}

fn expectation(state: &[Complex64], p: &CMatrix) -> f64 {
    let v = CVector::from_column_slice(state);
    (v.adjoint() * p * &v)[(0, 0)].re
}

pub fn probability_table(setting: &Su2Setting) -> Result<ProbabilityTable> {
    let setup = MeasurementSetup::new(*setting)?;
    let s = bell_state();
    let (kappa, lambda) = (setting.kappa(), setting.lambda());
    let mut rows = [[0.0; 4]; 4];
    for obs in Observable::ALL {
        for (col, &k) in TABLE_COLUMNS.iter().enumerate() {
            rows[obs as usize][col] = expectation(&s, setup.outcome(obs, k).projector());
        }
    }
    let closed_form = [
        [0.5, 0.0, 0.0, 0.5],
        [kappa, 0.5 - kappa, 0.5 - kappa, kappa],
        [kappa, 0.5 - kappa, 0.5 - kappa, kappa],
        [lambda, 0.5 - lambda, 0.5 - lambda, lambda],
    ];
    let residual = rows
        .iter()
        .flatten()
        .zip(closed_form.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(ProbabilityTable {
        kappa,
        lambda,
        rows,
        closed_form,
        residual,
    })
}

/// `1 + 4κ + (1 − 2λ)`.
pub fn chsh_lhs_closed(kappa: f64, lambda: f64) -> f64 {
    1.0 + 4.0 * kappa + (1.0 - 2.0 * lambda)
}

/// `Σ p(Jᵢ|s)` over the CHSH family `Jᵢ`, with the joins formed in the
/// lattice and probabilities taken in the Bell state.
pub fn chsh_lhs(setting: &Su2Setting) -> Result<f64> {
    let setup = MeasurementSetup::new(*setting)?;
    let rho = bell_density();
    setup
        .chsh_family()?
        .iter()
        .map(|h| gleason_probability(h, &rho))
        .sum()
}

/// One of the 16 products in the expansion of
/// `∏ᵢ 𝔓(Jᵢ)`, with `Jᵢ` the CHSH family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductTerm {
    /// Outcome index `k` chosen from each of `A, B, C, D`.
    pub outcomes: [u8; 4],
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeetZeroReport {
    pub terms: Vec<ProductTerm>,
    pub max_term_norm: f64,
    /// `‖∏ᵢ 𝔓(Jᵢ)‖_F`.
    pub product_norm: f64,
    pub products_vanish: bool,
    pub meet_dim: usize,
    /// Smallest singular value of the stacked complement bases; the meet is
    /// `𝒪` exactly when this is nonzero.
    pub complement_min_singular_value: f64,
    pub meet_is_zero: bool,
    /// `S_{a,b}` commutes with `S_x` and the four algebras coincide.
    pub degenerate: bool,
}

pub fn verify_meet_zero(setting: &Su2Setting) -> Result<MeetZeroReport> {
    let setup = MeasurementSetup::new(*setting)?;
    let tol = tolerance::session().zero_tol;
    let choices: Vec<[u8; 2]> = Observable::ALL
        .iter()
        .map(|&o| {
            let (x, y) = chsh_pair(o);
            [x, y]
        })
        .collect();
    let mut terms = Vec::with_capacity(16);
    for bits in 0..16u8 {
        let outcomes: [u8; 4] = std::array::from_fn(|i| choices[i][(bits >> (3 - i) & 1) as usize]);
        let product = Observable::ALL
            .iter()
            .zip(outcomes)
            .fold(CMatrix::identity(4, 4), |acc, (&o, k)| {
                acc * setup.outcome(o, k).projector()
            });
        terms.push(ProductTerm {
            outcomes,
            norm: product.norm(),
        });
    }
    let family = setup.chsh_family()?;
    let product = family
        .iter()
        .fold(CMatrix::identity(4, 4), |acc, h| acc * h.projector());
    let meet = meet_all(&family)?;
    let stacked = CMatrix::from_fn(4, 8, |r, col| {
        family[col / 2].orthocomplement().basis()[(r, col % 2)]
    });
    let sv = singular_values(&stacked);
    let max_term_norm = terms.iter().map(|t| t.norm).fold(0.0, f64::max);
    Ok(MeetZeroReport {
        products_vanish: max_term_norm <= tol,
        terms,
        max_term_norm,
        product_norm: product.norm(),
        meet_dim: meet.dim(),
        complement_min_singular_value: sv.iter().copied().fold(f64::INFINITY, f64::min),
        meet_is_zero: meet.is_zero(),
        degenerate: setting.is_degenerate(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Proposition2Report {
    pub sum: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// `Σ p(Hᵢ|ρ)` against `n − 1` for a family whose meet is `𝒪`.
pub fn proposition2_bound(
    subspaces: &[Subspace],
    rho: &DensityMatrix,
) -> Result<Proposition2Report> {
    let meet = meet_all(subspaces)?;
    if !meet.is_zero() {
        return Err(Error::MeetNotZero(meet.dim()));
    }
    let sum = subspaces
        .iter()
        .map(|h| gleason_probability(h, rho))
        .sum::<Result<f64>>()?;
    let bound = (subspaces.len() - 1) as f64;
    Ok(Proposition2Report {
        sum,
        bound,
        satisfied: sum <= bound + tolerance::session().zero_tol,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BooleReport {
    /// `Σ p(Jᵢ⊥|s)`, from the projectors.
    pub lhs_sum: f64,
    /// `2 − 4κ + 2λ`.
    pub closed_form: f64,
    /// `p(J₁⊥ ∨ … ∨ J₄⊥ | s)`.
    pub joint: f64,
    /// Dimension of `J₁⊥ ∨ … ∨ J₄⊥`.
    pub join_dim: usize,
    pub violated: bool,
}

pub fn boole_violation(setting: &Su2Setting) -> Result<BooleReport> {
    let setup = MeasurementSetup::new(*setting)?;
    let rho = bell_density();
    let complements: Vec<Subspace> = setup
        .chsh_family()?
        .iter()
        .map(Subspace::orthocomplement)
        .collect();
    let lhs_sum = complements
        .iter()
        .map(|h| gleason_probability(h, &rho))
        .sum::<Result<f64>>()?;
    let join = join_all(&complements)?;
    let joint = gleason_probability(&join, &rho)?;
    Ok(BooleReport {
        lhs_sum,
        closed_form: 2.0 - 4.0 * setting.kappa() + 2.0 * setting.lambda(),
        joint,
        join_dim: join.dim(),
        violated: lhs_sum < joint - tolerance::session().zero_tol,
    })
}

#[derive(Debug, Clone)]
pub struct CommutatorWitness {
    /// `[𝔓(H₁A∨H₄A), 𝔓(H₁B∨H₄B)]`.
    pub matrix: CMatrix,
    /// `Π(x,1)⊗[Π(x,1),Π(a,b;1)] + Π(x,0)⊗[Π(x,0),Π(a,b;0)]`.
    pub tensor_form: CMatrix,
    pub residual: f64,
    pub norm: f64,
}

pub fn commutator_witness(setting: &Su2Setting) -> Result<CommutatorWitness> {
    let setup = MeasurementSetup::new(*setting)?;
    let family = setup.chsh_family()?;
    let matrix = commutator(family[0].projector(), family[1].projector());
    let (ab1, ab0) = spin_projectors(setting);
    let (x1, x0) = (x_projector(1), x_projector(0));
    let tensor_form = x1.kronecker(&commutator(&x1, &ab1)) + x0.kronecker(&commutator(&x0, &ab0));
    let residual = frobenius_distance(&matrix, &tensor_form)?;
    let norm = matrix.norm();
    Ok(CommutatorWitness {
        matrix,
        tensor_form,
        residual,
        norm,
    })
}

/// Setting from the real and imaginary parts of `a` and `b`.
pub fn setting_from_parts(a_re: f64, a_im: f64, b_re: f64, b_im: f64) -> Result<Su2Setting> {
    Su2Setting::new(c(a_re, a_im), c(b_re, b_im))
}
