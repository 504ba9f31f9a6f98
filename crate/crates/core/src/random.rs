//! Seeded random matrices, states and subspaces for property sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, orthonormal_column_basis, CMatrix};
use crate::tolerance::Tolerance;
use num_complex::Complex64;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Normalized complex Gaussian vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| gaussian_complex(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-ish unitary from the orthonormalized columns of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    loop {
        let q = orthonormal_column_basis(&ginibre(rng, d, d), &Tolerance::default());
        if q.ncols() == d {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(3);
        for d in 1..=8 {
            assert!(unitarity_residual(&unitary(&mut rng, d)) < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let a = unit_vector(&mut seeded(11), 5);
        let b = unit_vector(&mut seeded(11), 5);
        assert_eq!(a, b);
    }
}
