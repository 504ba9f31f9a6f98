//! Subspace lattices of finite-dimensional Hilbert spaces, the generalized
//! additivity operator `𝔇(H₁,H₂)`, Dempster-Shafer lower/upper probabilities
//! and a two-qubit CHSH harness built on top of them.

pub mod additivity;
pub mod chsh;
pub mod ds;
pub mod error;
pub mod finite_qm;
pub mod lattice;
pub mod linalg;
pub mod random;
pub mod tolerance;

pub use error::{Error, Result};
pub use lattice::{BooleanAlgebra, Subspace};
pub use linalg::CMatrix;
pub use tolerance::Tolerance;
