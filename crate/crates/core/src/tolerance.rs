//! Numerical tolerance policy shared by every module.
//!
//! Two cutoffs are used throughout:
//!
//! * `rank_tol` is relative: a singular value counts towards the rank when it
//!   exceeds `rank_tol * sigma_max`.
//! * `zero_tol` is absolute: scalars and matrix norms at or below it are
//!   treated as zero.
//!
//! A process-wide value can be installed once with [`configure`]; until then
//! [`session`] hands out [`Tolerance::default`].

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub zero_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }
}

impl Tolerance {
    /// Returns `None` unless both cutoffs are finite and strictly positive.
    pub fn new(rank_tol: f64, zero_tol: f64) -> Option<Self> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        (ok(rank_tol) && ok(zero_tol)).then_some(Self { rank_tol, zero_tol })
    }

    /// Same rank cutoff, different absolute cutoff.
    pub fn with_zero_tol(self, zero_tol: f64) -> Option<Self> {
        Self::new(self.rank_tol, zero_tol)
    }

    #[inline]
    pub fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.zero_tol
    }
}

static SESSION: OnceLock<Tolerance> = OnceLock::new();

/// Installs the session tolerance. Fails with the already-installed value if
/// called twice or after [`session`] was first read.
pub fn configure(tol: Tolerance) -> Result<(), Tolerance> {
    SESSION.set(tol).map_err(|_| *session())
}

pub fn session() -> &'static Tolerance {
    SESSION.get_or_init(Tolerance::default)
}
