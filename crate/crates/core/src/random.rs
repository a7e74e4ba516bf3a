//! Seeded random fixtures shared by tests, benches and the CLI.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::Result;
use crate::semigroup::MetzlerGenerator;
use crate::spectral::spectral_bound;

/// Random Metzler matrix: each off-diagonal entry is nonzero with probability
/// `density` and then uniform on `[0, 1)`; diagonal entries uniform on `[-3, 1)`.
pub fn random_metzler<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> MetzlerGenerator {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = if i == j {
                rng.random_range(-3.0..1.0)
            } else if rng.random_bool(density.clamp(0.0, 1.0)) {
                rng.random_range(0.0..1.0)
            } else {
                0.0
            };
        }
    }
    MetzlerGenerator::new(m).expect("constructed Metzler")
}

/// `A - (s(A) - target)·I`, whose spectral bound is `target`.
pub fn with_spectral_bound(a: &MetzlerGenerator, target: f64) -> Result<MetzlerGenerator> {
    let s = spectral_bound(a)?;
    Ok(a.shifted(s - target))
}

/// Random vector with entries uniform on `[-1, 1)`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}
