//! Shared fixtures for the kernel benchmarks.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use trion_core::evolve::StateVector;
use trion_core::linalg::ComplexMatrix;
use trion_core::ModelParams;

/// The weak-coupling parameter set used by the sweep-style benchmarks.
pub fn sweep_params(phi: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, 0.6, -1.0, 2.0, phi).unwrap()
}

pub fn random_state(seed: u64) -> StateVector {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut amps = [Complex64::new(0.0, 0.0); 8];
    for a in amps.iter_mut() {
        *a = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
    }
    StateVector::normalized(amps).unwrap()
}

pub fn random_matrix(seed: u64, dim: usize) -> ComplexMatrix {
    let mut rng = StdRng::seed_from_u64(seed);
    let entries = (0..dim * dim)
        .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
        .collect();
    ComplexMatrix::new(dim, entries).unwrap()
}
