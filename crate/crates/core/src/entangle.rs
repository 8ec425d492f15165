//! Electron-electron entanglement of the trion state: partial trace over the
//! hole, spin-flipped density matrix, Wootters concurrence, the closed-form
//! two- and four-amplitude approximations, Bell-state overlaps, and the
//! amplitude-filtering used to isolate individual entanglement channels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::StateVector;
use crate::linalg::{eig_general, matmul, ComplexMatrix};
use crate::model::DIM;

/// 4x4 electron-electron reduced density matrix in the pair basis
/// (e_up, e_down) = (0,0), (0,1), (1,0), (1,1).
#[derive(Debug, Clone)]
pub struct DensityMatrix4 {
    matrix: ComplexMatrix,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positive semidefiniteness
    /// before wrapping an arbitrary matrix.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimMismatch {
                left: matrix.dim(),
                right: 4,
            });
        }
        if matrix.hermitian_deviation() > 1e-10 {
            return Err(Error::NotHermitian {
                deviation: matrix.hermitian_deviation(),
            });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "density matrix trace {trace} deviates from 1"
            )));
        }
        let eigen = crate::linalg::eig_hermitian(&matrix)?;
        if eigen.real_values().iter().any(|&x| x < -1e-10) {
            return Err(Error::Domain("density matrix has a negative eigenvalue".into()));
        }
        Ok(Self { matrix })
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Partial trace over the hole: entry (j, k) of the electron-electron
/// density matrix is c_{2j+1} c*_{2k+1} + c_{2j+2} c*_{2k+2} in 1-based
/// amplitude indices, pairing (c1,c2), (c3,c4), (c5,c6), (c7,c8).
pub fn reduce_over_hole(psi: &StateVector) -> DensityMatrix4 {
    let amps = psi.amplitudes();
    let mut rho = ComplexMatrix::zeros(4);
    for j in 0..4 {
        for k in 0..4 {
            rho[(j, k)] = amps[2 * j] * amps[2 * k].conj() + amps[2 * j + 1] * amps[2 * k + 1].conj();
        }
    }
    DensityMatrix4 { matrix: rho }
}

/// Spin-flipped matrix (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y), with
/// the left/right occupancy playing the role of each electron's pseudo-spin.
pub fn spin_flip(rho: &DensityMatrix4) -> ComplexMatrix {
    // sigma_y (x) sigma_y is the anti-diagonal (-1, 1, 1, -1).
    let mut flip = ComplexMatrix::zeros(4);
    flip[(0, 3)] = Complex64::new(-1.0, 0.0);
    flip[(1, 2)] = Complex64::new(1.0, 0.0);
    flip[(2, 1)] = Complex64::new(1.0, 0.0);
    flip[(3, 0)] = Complex64::new(-1.0, 0.0);
    let conj = rho.matrix.conjugate();
    matmul(&matmul(&flip, &conj).unwrap(), &flip).unwrap()
}

/// Wootters concurrence from the eigenvalues of rho rho-tilde: square roots
/// in decreasing order lambda_1..lambda_4, C = max(lambda_1 - lambda_2 -
/// lambda_3 - lambda_4, 0).
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    let product = matmul(&rho.matrix, &spin_flip(rho))?;
    let eigen = eig_general(&product)?;
    // rho rho-tilde is rank-deficient for reduced pure states, so its exact
    // zero eigenvalues come back as O(eps) noise whose square roots would
    // pollute the result; floor them before taking roots.
    let floor = 1e-12 * product.frobenius_norm().max(1.0);
    let mut roots = Vec::with_capacity(4);
    for value in &eigen.values {
        if value.im.abs() > 1e-8 {
            return Err(Error::Numerical(format!(
                "rho rho-tilde eigenvalue {value} has a large imaginary part"
            )));
        }
        if value.re < -1e-8 {
            return Err(Error::Numerical(format!(
                "rho rho-tilde eigenvalue {value} is negative beyond tolerance"
            )));
        }
        let clamped = if value.re <= floor { 0.0 } else { value.re };
        roots.push(clamped.sqrt());
    }
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0))
}

/// Concurrence of a pure 8-amplitude state.
pub fn state_concurrence(psi: &StateVector) -> Result<f64> {
    concurrence(&reduce_over_hole(psi))
}

/// Closed-form concurrence 2 |c3| |c5| for states supported on amplitudes
/// 1, 3, 5.
pub fn concurrence_three_state(c1: Complex64, c3: Complex64, c5: Complex64) -> Result<f64> {
    let norm_sqr = c1.norm_sqr() + c3.norm_sqr() + c5.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "three-state amplitudes have norm^2 = {norm_sqr}, expected 1"
        )));
    }
    Ok(2.0 * c3.norm() * c5.norm())
}

/// Closed-form concurrence sqrt(A + sqrt(B C)) for states supported on
/// amplitudes 1, 2, 7, 8:
///
///   A = (|c1|^2 + |c2|^2)(|c7|^2 + |c8|^2) + |c1* c7 + c2* c8|^2
///   B = |c7 + c8|^2 Re(c1* c7 + c2* c8)
///   C = |c1 + c2|^2 Re(c1* c7 + c2* c8)
///
/// B C >= 0 always, since the shared Re(...) factor enters squared.
pub fn concurrence_double_slit(
    c1: Complex64,
    c2: Complex64,
    c7: Complex64,
    c8: Complex64,
) -> Result<f64> {
    let norm_sqr = c1.norm_sqr() + c2.norm_sqr() + c7.norm_sqr() + c8.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "four-state amplitudes have norm^2 = {norm_sqr}, expected 1"
        )));
    }
    let cross = (c1.conj() * c7 + c2.conj() * c8).re;
    let a = (c1.norm_sqr() + c2.norm_sqr()) * (c7.norm_sqr() + c8.norm_sqr())
        + (c1.conj() * c7 + c2.conj() * c8).norm_sqr();
    let b = (c7 + c8).norm_sqr() * cross;
    let c = (c1 + c2).norm_sqr() * cross;
    Ok((a + (b * c).sqrt()).sqrt())
}

/// The maximally entangled two-electron target states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellLabel {
    /// (|0 1 0> + |1 0 0>)/sqrt(2): electrons swapped between the dots,
    /// hole on the left. Overlap with this target is the rho_1 series.
    PsiBell,
    /// (|0 0 0> + |1 1 0>)/sqrt(2): both electrons together, hole left
    /// (rho_3).
    Alpha,
    /// (|0 0 1> + |1 1 1>)/sqrt(2): both electrons together, hole right
    /// (rho_2).
    Beta,
}

impl BellLabel {
    /// 1-based indices of the two amplitudes the target is built from.
    pub fn amplitude_pair(&self) -> (usize, usize) {
        match self {
            BellLabel::PsiBell => (3, 5),
            BellLabel::Alpha => (1, 7),
            BellLabel::Beta => (2, 8),
        }
    }

    pub fn series_name(&self) -> &'static str {
        match self {
            BellLabel::PsiBell => "rho1",
            BellLabel::Beta => "rho2",
            BellLabel::Alpha => "rho3",
        }
    }
}

/// A Bell target state: two amplitudes of 1/sqrt(2) each.
#[derive(Debug, Clone)]
pub struct BellTarget {
    pub label: BellLabel,
    vector: StateVector,
}

impl BellTarget {
    pub fn new(label: BellLabel) -> Self {
        let (a, b) = label.amplitude_pair();
        Self {
            label,
            vector: StateVector::pair(a, b).expect("valid basis pair"),
        }
    }

    pub fn vector(&self) -> &StateVector {
        &self.vector
    }
}

/// Squared overlap |<target|psi>|^2.
pub fn bell_overlap(psi: &StateVector, target: &BellTarget) -> f64 {
    target.vector.overlap(psi).norm_sqr()
}

/// How zeroed amplitudes are compensated in [`filtered_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Zero the selected amplitudes, rescale the remainder to unit norm.
    Renormalize,
    /// Zero the selected amplitudes, weight the odd-index group by the norm
    /// of amplitudes (1,3,5,7) and the even-index group by the norm of
    /// (2,4,6,8) - group norms taken before zeroing - then rescale to unit
    /// norm.
    GroupWeighted,
}

/// Which amplitudes to suppress and how to reweight the remainder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// 1-based amplitude indices forced to zero. Must leave at least one
    /// amplitude alive.
    pub zeroed: Vec<usize>,
    pub mode: FilterMode,
}

impl FilterSpec {
    pub fn new(zeroed: Vec<usize>, mode: FilterMode) -> Result<Self> {
        let spec = Self { zeroed, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.zeroed.iter().any(|&a| !(1..=DIM).contains(&a)) {
            return Err(Error::Domain("filter indices must lie in 1..=8".into()));
        }
        let mut distinct: Vec<usize> = self.zeroed.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() >= DIM {
            return Err(Error::Domain("filter may not zero all eight amplitudes".into()));
        }
        Ok(())
    }
}

/// Projects out the selected amplitudes and renormalizes per the filter mode.
pub fn filtered_state(psi: &StateVector, spec: &FilterSpec) -> Result<StateVector> {
    spec.validate()?;
    let mut amps = *psi.amplitudes();
    let odd_norm = (0..DIM)
        .step_by(2)
        .map(|i| amps[i].norm_sqr())
        .sum::<f64>()
        .sqrt();
    let even_norm = (1..DIM)
        .step_by(2)
        .map(|i| amps[i].norm_sqr())
        .sum::<f64>()
        .sqrt();
    for &alpha in &spec.zeroed {
        amps[alpha - 1] = Complex64::new(0.0, 0.0);
    }
    if spec.mode == FilterMode::GroupWeighted {
        for (i, amp) in amps.iter_mut().enumerate() {
            // 0-based even slots hold the 1-based odd amplitudes.
            *amp *= if i % 2 == 0 { odd_norm } else { even_norm };
        }
    }
    StateVector::normalized(amps)
        .map_err(|_| Error::Domain("filter removed all remaining amplitude".into()))
}

/// Centered sliding-window maximum: out[i] = max of `values` over samples
/// within `window / 2` of `times[i]`. Used to extract the envelope of a fast
/// overlap series, with the window set to one drive period.
pub fn sliding_window_max(times: &[f64], values: &[f64], window: f64) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    let half = 0.5 * window;
    let n = times.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    let mut lo = 0usize;
    let mut hi = 0usize;
    for i in 0..n {
        while lo < n && times[lo] < times[i] - half {
            lo += 1;
        }
        while hi < n && times[hi] <= times[i] + half {
            hi += 1;
        }
        let mut best = f64::NEG_INFINITY;
        for &v in &values[lo..hi] {
            best = best.max(v);
        }
        out[i] = best;
    }
    out
}
