//! Quantum systems with positions in `ℤ(d)`, `d` odd.
//!
//! Position states are the standard basis vectors, `|X;n⟩ = eₙ`, so that
//! `Z = diag(ω(0), ω(1), …)` and `X|X;m⟩ = |X;m+1⟩`. Momentum states are the
//! columns of the Fourier matrix `F[n,m] = ω(mn)/√d`.
//!
//! Coherent states `|C;α,β⟩ = D(α,β)|f⟩` are generated from a fiducial
//! vector `f` that is neither a position nor a momentum state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::additivity::AdditivityOperator;
use crate::error::{Error, Result};
use crate::lattice::Subspace;
use crate::linalg::{
    frobenius_distance, pairs_to_vector, vector_to_pairs, CMatrix, CVector, ONE, ZERO,
};
use crate::random;
use crate::tolerance;

pub const MAX_DIMENSION: usize = 99;

/// Index pair `(α, β) ∈ ℤ(d)²`.
pub type Index = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteSystem {
    d: usize,
}

impl FiniteSystem {
    pub fn new(d: usize) -> Result<Self> {
        if d.is_multiple_of(2) {
            return Err(Error::EvenDimension(d));
        }
        if d < 3 {
            return Err(Error::DimensionTooSmall { min: 3, got: d });
        }
        if d > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge {
                max: MAX_DIMENSION,
                got: d,
            });
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn reduce(&self, k: i64) -> i64 {
        k.rem_euclid(self.d as i64)
    }

    /// `ω(k) = exp(2πik/d)`.
    pub fn omega(&self, k: i64) -> Complex64 {
        let k = self.reduce(k);
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.d as f64)
    }

    /// `2⁻¹` in `ℤ(d)`.
    pub fn half(&self) -> i64 {
        (self.d as i64 + 1) / 2
    }

    pub fn z(&self) -> CMatrix {
        CMatrix::from_fn(self.d, self.d, |i, j| {
            if i == j {
                self.omega(i as i64)
            } else {
                ZERO
            }
        })
    }

    pub fn x(&self) -> CMatrix {
        let d = self.d;
        CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO })
    }

    /// `D(α,β) = Z^α X^β ω(−2⁻¹αβ)`, built entry-wise:
    /// `D|X;m⟩ = ω(α(m+β) − 2⁻¹αβ)|X;m+β⟩`.
    pub fn displacement(&self, alpha: usize, beta: usize) -> CMatrix {
        let d = self.d;
        let (a, b) = (alpha as i64, beta as i64);
        let phase = -self.half() * a * b;
        CMatrix::from_fn(d, d, |i, j| {
            if i == (j + beta) % d {
                self.omega(a * i as i64 + phase)
            } else {
                ZERO
            }
        })
    }

    /// `F[n,m] = ω(mn)/√d`; column `m` is `|P;m⟩`.
    pub fn fourier(&self) -> CMatrix {
        let s = 1.0 / (self.d as f64).sqrt();
        CMatrix::from_fn(self.d, self.d, |n, m| self.omega((m * n) as i64) * s)
    }

    pub fn position_state(&self, n: usize) -> Vec<Complex64> {
        (0..self.d)
            .map(|i| if i == n % self.d { ONE } else { ZERO })
            .collect()
    }

    pub fn momentum_state(&self, m: usize) -> Vec<Complex64> {
        let s = 1.0 / (self.d as f64).sqrt();
        (0..self.d)
            .map(|n| self.omega((m * n) as i64) * s)
            .collect()
    }

    /// All `d²` index pairs in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Index> {
        let d = self.d;
        (0..d).flat_map(move |a| (0..d).map(move |b| (a, b)))
    }
}

/// Number of components of `v` above `tol` in modulus.
fn support(v: &[Complex64], tol: f64) -> usize {
    v.iter().filter(|z| z.norm() > tol).count()
}

#[derive(Debug, Clone)]
pub struct CoherentFamily {
    system: FiniteSystem,
    fiducial: Vec<Complex64>,
    seed: Option<u64>,
    states: Vec<Vec<Complex64>>,
}

impl CoherentFamily {
    /// Normalizes `fiducial` and rejects position and momentum states.
    pub fn new(system: FiniteSystem, fiducial: &[Complex64]) -> Result<Self> {
        let d = system.d();
        if fiducial.len() != d {
            return Err(Error::FiducialLength {
                expected: d,
                got: fiducial.len(),
            });
        }
        if fiducial
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = fiducial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tol = tolerance::session().zero_tol;
        if norm <= tol {
            return Err(Error::InvalidFiducial);
        }
        let f: Vec<Complex64> = fiducial.iter().map(|z| z / norm).collect();
        let momentum = system.fourier().adjoint() * CVector::from_column_slice(&f);
        if support(&f, tol) < 2 || support(momentum.as_slice(), tol) < 2 {
            return Err(Error::InvalidFiducial);
        }
        let states = system
            .indices()
            .map(|(a, b)| {
                let v = system.displacement(a, b) * CVector::from_column_slice(&f);
                v.as_slice().to_vec()
            })
            .collect();
        Ok(Self {
            system,
            fiducial: f,
            seed: None,
            states,
        })
    }

    /// Fiducial drawn from a seeded complex Gaussian.
    pub fn random(system: FiniteSystem, seed: u64) -> Self {
        let mut rng = random::seeded(seed);
        loop {
            let f = random::unit_vector(&mut rng, system.d());
            if let Ok(mut fam) = Self::new(system, &f) {
                fam.seed = Some(seed);
                return fam;
            }
        }
    }

    pub fn system(&self) -> FiniteSystem {
        self.system
    }

    pub fn fiducial(&self) -> &[Complex64] {
        &self.fiducial
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    fn slot(&self, (a, b): Index) -> usize {
        let d = self.system.d();
        (a % d) * d + b % d
    }

    /// `|C;α,β⟩`.
    pub fn state(&self, idx: Index) -> &[Complex64] {
        &self.states[self.slot(idx)]
    }

    /// `𝔓(H_{α,β}) = |C;α,β⟩⟨C;α,β|`.
    pub fn projector(&self, idx: Index) -> CMatrix {
        let v = CVector::from_column_slice(self.state(idx));
        &v * v.adjoint()
    }

    pub fn subspace(&self, idx: Index) -> Subspace {
        Subspace::from_orthonormal(CMatrix::from_column_slice(
            self.system.d(),
            1,
            self.state(idx),
        ))
        .expect("coherent states are normalized")
    }

    /// `λ(α,β;γ,δ) = ⟨C;α,β|C;γ,δ⟩` from the fiducial alone:
    /// `ω[2⁻¹(αβ+γδ) − αδ] Σₙ f*_{n+δ−β} fₙ ω[n(γ−α)]`.
    pub fn overlap(&self, p: Index, q: Index) -> Complex64 {
        let sys = &self.system;
        let d = sys.d() as i64;
        let (a, b) = (p.0 as i64, p.1 as i64);
        let (g, dl) = (q.0 as i64, q.1 as i64);
        let f = &self.fiducial;
        let sum: Complex64 = (0..d)
            .map(|n| {
                let shifted = f[(n + dl - b).rem_euclid(d) as usize].conj();
                shifted * f[n as usize] * sys.omega(n * (g - a))
            })
            .sum();
        sys.omega(sys.half() * (a * b + g * dl) - a * dl) * sum
    }

    /// The same overlap as a plain inner product of the stored states.
    pub fn overlap_direct(&self, p: Index, q: Index) -> Complex64 {
        self.state(p)
            .iter()
            .zip(self.state(q))
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    fn distinct_pair(&self, p: Index, q: Index) -> Result<Complex64> {
        if self.slot(p) == self.slot(q) {
            return Err(Error::CoincidentIndices(p));
        }
        let lambda = self.overlap(p, q);
        if 1.0 - lambda.norm_sqr() <= tolerance::session().zero_tol {
            return Err(Error::ParallelStates);
        }
        Ok(lambda)
    }

    /// `𝔓(H_{αβ} ∨ H_{γδ}) = 𝔓(H_{αβ}) + |s⟩⟨s|` with
    /// `|s⟩ = (|C;γ,δ⟩ − λ|C;α,β⟩)/√(1−|λ|²)`.
    pub fn join_projector(&self, p: Index, q: Index) -> Result<CMatrix> {
        let lambda = self.distinct_pair(p, q)?;
        let u = CVector::from_column_slice(self.state(p));
        let v = CVector::from_column_slice(self.state(q));
        let s = (v - &u * lambda) * Complex64::from(1.0 / (1.0 - lambda.norm_sqr()).sqrt());
        Ok(&u * u.adjoint() + &s * s.adjoint())
    }

    /// `𝔇(H_{αβ}, H_{γδ}) = |λ|²/(1−|λ|²)(𝔓₁+𝔓₂) − 1/(1−|λ|²)(𝔓₁𝔓₂+𝔓₂𝔓₁)`.
    pub fn pair_operator(&self, p: Index, q: Index) -> Result<AdditivityOperator> {
        let lambda = self.distinct_pair(p, q)?;
        let l2 = lambda.norm_sqr();
        let p1 = self.projector(p);
        let p2 = self.projector(q);
        let anti = &p1 * &p2 + &p2 * &p1;
        let m =
            (p1 + p2) * Complex64::from(l2 / (1.0 - l2)) - anti * Complex64::from(1.0 / (1.0 - l2));
        AdditivityOperator::from_matrix(m)
    }

    /// `‖(1/d) Σ |C;α,β⟩⟨C;α,β| − I‖_F`.
    pub fn resolution_of_identity(&self) -> f64 {
        let d = self.system.d();
        let mut sum = CMatrix::zeros(d, d);
        for v in &self.states {
            let v = CVector::from_column_slice(v);
            sum += &v * v.adjoint();
        }
        (sum / Complex64::from(d as f64) - CMatrix::identity(d, d)).norm()
    }

    /// Cross-checks every route against its independent counterpart.
    pub fn verify(&self) -> Result<CoherentReport> {
        let idx: Vec<Index> = self.system.indices().collect();
        let mut overlap_residual: f64 = 0.0;
        for &p in &idx {
            for &q in &idx {
                let r = (self.overlap(p, q) - self.overlap_direct(p, q)).norm();
                overlap_residual = overlap_residual.max(r);
            }
        }
        let mut pair_residual: f64 = 0.0;
        let mut join_residual: f64 = 0.0;
        let mut trace_residual: f64 = 0.0;
        let mut max_norm: f64 = 0.0;
        let mut pairs = 0;
        for (i, &p) in idx.iter().enumerate() {
            for &q in &idx[i + 1..] {
                let closed = match self.pair_operator(p, q) {
                    Ok(op) => op,
                    Err(Error::ParallelStates) => continue,
                    Err(e) => return Err(e),
                };
                let (h1, h2) = (self.subspace(p), self.subspace(q));
                let lattice = AdditivityOperator::new(&h1, &h2)?;
                pair_residual =
                    pair_residual.max(frobenius_distance(closed.matrix(), lattice.matrix())?);
                let join = h1.join(&h2)?;
                join_residual = join_residual.max(frobenius_distance(
                    &self.join_projector(p, q)?,
                    join.projector(),
                )?);
                trace_residual = trace_residual.max(closed.trace().abs());
                max_norm = max_norm.max(closed.norm());
                pairs += 1;
            }
        }
        Ok(CoherentReport {
            d: self.system.d(),
            seed: self.seed,
            resolution_residual: self.resolution_of_identity(),
            overlap_residual,
            pair_residual,
            join_residual,
            trace_residual,
            pairs_checked: pairs,
            max_operator_norm: max_norm,
        })
    }
}

/// Residuals of a coherent family self-check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherentReport {
    pub d: usize,
    pub seed: Option<u64>,
    pub resolution_residual: f64,
    pub overlap_residual: f64,
    pub pair_residual: f64,
    pub join_residual: f64,
    pub trace_residual: f64,
    pub pairs_checked: usize,
    /// Largest `‖𝔇‖_F` over distinct pairs; positive even though every
    /// meet is `𝒪`.
    pub max_operator_norm: f64,
}

impl CoherentReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.resolution_residual,
            self.overlap_residual,
            self.pair_residual,
            self.join_residual,
            self.trace_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `{"d":d,"fiducial":[[re,im],...],"seed":s}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    pub d: usize,
    pub fiducial: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl From<&CoherentFamily> for FamilyJson {
    fn from(f: &CoherentFamily) -> Self {
        Self {
            d: f.system.d(),
            fiducial: vector_to_pairs(&f.fiducial),
            seed: f.seed,
        }
    }
}

impl TryFrom<&FamilyJson> for CoherentFamily {
    type Error = Error;
    fn try_from(j: &FamilyJson) -> Result<Self> {
        let sys = FiniteSystem::new(j.d)?;
        let mut fam = CoherentFamily::new(sys, &pairs_to_vector(&j.fiducial))?;
        fam.seed = j.seed;
        Ok(fam)
    }
}
