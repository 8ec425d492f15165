//! Shared fixtures and independent oracles for the acceptance suite.
#![allow(dead_code)] // each test target uses its own subset

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;
use trion_core::evolve::StateVector;
use trion_core::linalg::{eig_hermitian, ComplexMatrix};
use trion_core::ModelParams;

pub fn weak_coupling_params(phi: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, 0.6, -1.0, 2.0, phi).unwrap()
}

pub fn strong_interaction_params() -> ModelParams {
    ModelParams::new(1.7, 1.7, 0.6, -20.0, 2.0, 24.6).unwrap()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_state(rng: &mut StdRng) -> StateVector {
    let mut amps = [c(0.0, 0.0); 8];
    for a in amps.iter_mut() {
        *a = c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
    }
    StateVector::normalized(amps).unwrap()
}

/// State supported on the given 1-based amplitudes, renormalized.
pub fn state_on(support: &[(usize, Complex64)]) -> StateVector {
    let mut amps = [c(0.0, 0.0); 8];
    for &(alpha, z) in support {
        amps[alpha - 1] = z;
    }
    StateVector::normalized(amps).unwrap()
}

// Hermitian-route Wootters oracle: lambda_i are the eigenvalues of
// sqrt(sqrt(rho) rho~ sqrt(rho)), i.e. the square roots of the eigenvalues of
// the Hermitian product, computed with the Jacobi solver only. Builds the
// spin-flipped matrix itself so it shares nothing with the implementation
// path under test.
pub fn concurrence_hermitian_oracle(rho: &ComplexMatrix) -> f64 {
    assert_eq!(rho.dim(), 4);
    let mut flip = ComplexMatrix::zeros(4);
    flip[(0, 3)] = c(-1.0, 0.0);
    flip[(1, 2)] = c(1.0, 0.0);
    flip[(2, 1)] = c(1.0, 0.0);
    flip[(3, 0)] = c(-1.0, 0.0);
    let rho_tilde = flip.mul(&rho.conjugate()).unwrap().mul(&flip).unwrap();

    let eig = eig_hermitian(rho).unwrap();
    let vectors = eig.vectors.as_ref().unwrap();
    let mut sqrt_rho = ComplexMatrix::zeros(4);
    for (value, vector) in eig.values.iter().zip(vectors) {
        let root = value.re.max(0.0).sqrt();
        for i in 0..4 {
            for j in 0..4 {
                sqrt_rho[(i, j)] += root * vector[i] * vector[j].conj();
            }
        }
    }

    let product = sqrt_rho.mul(&rho_tilde).unwrap().mul(&sqrt_rho).unwrap();
    let eig_b = eig_hermitian(&product).unwrap();
    let floor = 1e-12 * product.frobenius_norm().max(1.0);
    let mut roots: Vec<f64> = eig_b
        .values
        .iter()
        .map(|v| if v.re <= floor { 0.0 } else { v.re.sqrt() })
        .collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0)
}

/// Interior local maxima with their topographic prominence: walk outward to
/// the nearest higher ground on each side, the prominence base is the higher
/// of the two valley floors.
pub fn peaks_with_prominence(values: &[f64]) -> Vec<(usize, f64, f64)> {
    let n = values.len();
    let mut peaks = Vec::new();
    for j in 1..n.saturating_sub(1) {
        if values[j] > values[j - 1] && values[j] >= values[j + 1] {
            let mut left_min = values[j];
            let mut k = j;
            while k > 0 && values[k - 1] <= values[j] {
                k -= 1;
                left_min = left_min.min(values[k]);
            }
            let mut right_min = values[j];
            let mut m = j;
            while m + 1 < n && values[m + 1] <= values[j] {
                m += 1;
                right_min = right_min.min(values[m]);
            }
            peaks.push((j, values[j], values[j] - left_min.max(right_min)));
        }
    }
    peaks
}

/// Number of local maxima whose prominence exceeds `floor`.
pub fn count_prominent_maxima(values: &[f64], floor: f64) -> usize {
    peaks_with_prominence(values)
        .iter()
        .filter(|(_, _, prom)| *prom > floor)
        .count()
}
