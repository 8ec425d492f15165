//! Time evolution of the trion state under the driven Hamiltonian.
//!
//! Integration is classical fourth-order Runge-Kutta with a fixed step tied
//! to the drive period. A fixed step keeps trajectories bit-reproducible
//! across runs, which the regression and determinism tests rely on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{ModelParams, TrionState, COULOMB_WEIGHT, DIM, DRIVE_WEIGHT};

/// Fixed-step integrator settings. The step is `period / steps_per_period`;
/// every `sample_stride`-th step is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub steps_per_period: usize,
    pub sample_stride: usize,
}

impl Default for IntegratorConfig {
    /// 32768 steps and 256 samples per drive period. This step keeps the
    /// norm drift of a 30-period run below 1e-9 even at the strongest drive
    /// used by the presets.
    fn default() -> Self {
        Self {
            steps_per_period: 32768,
            sample_stride: 128,
        }
    }
}

impl IntegratorConfig {
    pub fn new(steps_per_period: usize, sample_stride: usize) -> Result<Self> {
        let cfg = Self {
            steps_per_period,
            sample_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < 64 {
            return Err(Error::Domain(format!(
                "steps_per_period must be at least 64, got {}",
                self.steps_per_period
            )));
        }
        if !self.steps_per_period.is_multiple_of(2) {
            return Err(Error::Domain(
                "steps_per_period must be even so half periods land on the step grid".into(),
            ));
        }
        if self.sample_stride == 0 || !self.steps_per_period.is_multiple_of(self.sample_stride) {
            return Err(Error::Domain(format!(
                "sample_stride {} must divide steps_per_period {}",
                self.sample_stride, self.steps_per_period
            )));
        }
        Ok(())
    }
}

/// Eight complex amplitudes over the trion basis, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: [Complex64; DIM],
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized to
    /// within 1e-9.
    pub fn new(amps: [Complex64; DIM]) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("state amplitude is not finite".into()));
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "state norm^2 = {norm_sqr} deviates from 1 by more than 1e-9"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary amplitudes to unit norm.
    pub fn normalized(amps: [Complex64; DIM]) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("state amplitude is not finite".into()));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        let mut out = amps;
        for z in out.iter_mut() {
            *z /= norm;
        }
        Ok(Self { amps: out })
    }

    /// The basis state |alpha| with alpha in 1..=8.
    pub fn basis(alpha: usize) -> Result<Self> {
        let state = TrionState::from_index(alpha)?;
        let mut amps = [Complex64::new(0.0, 0.0); DIM];
        amps[state.index() - 1] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Equal superposition (|a> + |b>)/sqrt(2) of two basis states.
    pub fn pair(alpha: usize, beta: usize) -> Result<Self> {
        if alpha == beta {
            return Err(Error::Domain("pair states must differ".into()));
        }
        let a = TrionState::from_index(alpha)?.index() - 1;
        let b = TrionState::from_index(beta)?.index() - 1;
        let mut amps = [Complex64::new(0.0, 0.0); DIM];
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[a] = w;
        amps[b] = w;
        Ok(Self { amps })
    }

    // Integration output bypasses the construction-time norm gate; drift is
    // governed by the trajectory contract instead.
    pub(crate) fn from_raw(amps: [Complex64; DIM]) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amps
    }

    /// Amplitude c_alpha, alpha in 1..=8.
    pub fn amplitude(&self, alpha: usize) -> Complex64 {
        assert!((1..=DIM).contains(&alpha), "basis index {alpha} outside 1..=8");
        self.amps[alpha - 1]
    }

    /// Population |c_alpha|^2, alpha in 1..=8.
    pub fn population(&self, alpha: usize) -> f64 {
        self.amplitude(alpha).norm_sqr()
    }

    pub fn populations(&self) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for (o, z) in out.iter_mut().zip(&self.amps) {
            *o = z.norm_sqr();
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Time-ordered samples of an integrated state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    step: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// Integrator step that produced the samples.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &StateVector)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// |c_alpha(t)|^2 at every sample.
    pub fn population_series(&self, alpha: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(alpha)).collect()
    }

    /// Largest deviation of the squared norm from 1 over all samples.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

// Derivative of the Schrodinger equation: out = -i H(t) psi, using the fixed
// coupling pattern of the trion Hamiltonian (partner index = bit flip).
#[inline]
fn schrodinger_rhs(params: &ModelParams, f: f64, psi: &[Complex64; DIM], out: &mut [Complex64; DIM]) {
    for i in 0..DIM {
        let diag = DRIVE_WEIGHT[i] * f + COULOMB_WEIGHT[i] * params.u;
        let hv = diag * psi[i]
            + params.w_h * psi[i ^ 0b001]
            + params.w_2e * psi[i ^ 0b010]
            + params.w_e * psi[i ^ 0b100];
        out[i] = Complex64::new(hv.im, -hv.re); // multiply by -i
    }
}

#[inline]
fn rk4_step(params: &ModelParams, t: f64, h: f64, psi: &mut [Complex64; DIM]) {
    let f0 = params.drive_field(t);
    let f_half = params.drive_field(t + 0.5 * h);
    let f1 = params.drive_field(t + h);

    let mut k1 = [Complex64::new(0.0, 0.0); DIM];
    let mut k2 = k1;
    let mut k3 = k1;
    let mut k4 = k1;
    let mut tmp = k1;

    schrodinger_rhs(params, f0, psi, &mut k1);
    for i in 0..DIM {
        tmp[i] = psi[i] + 0.5 * h * k1[i];
    }
    schrodinger_rhs(params, f_half, &tmp, &mut k2);
    for i in 0..DIM {
        tmp[i] = psi[i] + 0.5 * h * k2[i];
    }
    schrodinger_rhs(params, f_half, &tmp, &mut k3);
    for i in 0..DIM {
        tmp[i] = psi[i] + h * k3[i];
    }
    schrodinger_rhs(params, f1, &tmp, &mut k4);
    let w = h / 6.0;
    for i in 0..DIM {
        psi[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn step_count(span: f64, h: f64) -> usize {
    let n = (span / h).round();
    (n as usize).max(1)
}

/// Integrates i dpsi/dt = H(t) psi from `t0` to `t1`, sampling every
/// `sample_stride` steps (plus the final step when it is off-stride).
pub fn integrate(
    params: &ModelParams,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    params.validate()?;
    cfg.validate()?;
    if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
        return Err(Error::Domain(format!("need finite t1 > t0, got [{t0}, {t1}]")));
    }
    let h = params.period() / cfg.steps_per_period as f64;
    let n_steps = step_count(t1 - t0, h);

    let mut psi = *psi0.amplitudes();
    let mut times = Vec::with_capacity(n_steps / cfg.sample_stride + 2);
    let mut states = Vec::with_capacity(times.capacity());
    times.push(t0);
    states.push(StateVector::from_raw(psi));

    for step in 1..=n_steps {
        let t = t0 + (step - 1) as f64 * h;
        rk4_step(params, t, h, &mut psi);
        if step % cfg.sample_stride == 0 || step == n_steps {
            let t_sample = t0 + step as f64 * h;
            if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { t: t_sample });
            }
            times.push(t_sample);
            states.push(StateVector::from_raw(psi));
        }
    }
    Ok(Trajectory { times, states, step: h })
}

/// Time-evolution operator U(t1, t0) obtained by integrating all eight basis
/// columns. `t1 == t0` yields the identity.
pub fn propagator(
    params: &ModelParams,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<ComplexMatrix> {
    params.validate()?;
    cfg.validate()?;
    if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(Error::Domain(format!("need finite t1 >= t0, got [{t0}, {t1}]")));
    }
    let h = params.period() / cfg.steps_per_period as f64;
    let n_steps = if t1 == t0 { 0 } else { step_count(t1 - t0, h) };

    // Column-major working copy: cols[j] evolves the j-th basis state.
    let mut cols = [[Complex64::new(0.0, 0.0); DIM]; DIM];
    for (j, col) in cols.iter_mut().enumerate() {
        col[j] = Complex64::new(1.0, 0.0);
    }
    for step in 0..n_steps {
        let t = t0 + step as f64 * h;
        for col in cols.iter_mut() {
            rk4_step(params, t, h, col);
        }
    }

    let mut u = ComplexMatrix::zeros(DIM);
    for j in 0..DIM {
        for i in 0..DIM {
            let z = cols[j][i];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { t: t1 });
            }
            u[(i, j)] = z;
        }
    }
    let deviation = u
        .adjoint()
        .mul(&u)?
        .sub(&ComplexMatrix::identity(DIM))?
        .frobenius_norm();
    if deviation > 1e-6 {
        return Err(Error::UnitarityLoss { deviation });
    }
    Ok(u)
}

/// Minimum survival probability min_t |c_alpha(t)|^2 for the state started in
/// basis state `alpha`, over all sampled points in (0, n_periods T].
pub fn min_survival(
    params: &ModelParams,
    alpha: usize,
    n_periods: usize,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if n_periods == 0 {
        return Err(Error::Domain("n_periods must be at least 1".into()));
    }
    let psi0 = StateVector::basis(alpha)?;
    let t1 = n_periods as f64 * params.period();
    let trajectory = integrate(params, &psi0, 0.0, t1, cfg)?;
    Ok(trajectory
        .states()
        .iter()
        .skip(1)
        .map(|s| s.population(alpha))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul;
    use crate::model::{parity_matrix, DRIVE_WEIGHT};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diagonal_params(phi: f64) -> ModelParams {
        ModelParams::new(0.0, 0.0, 0.0, -1.0, 2.0, phi).unwrap()
    }

    fn weak_coupling_params(phi: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 0.6, -1.0, 2.0, phi).unwrap()
    }

    fn fast_cfg() -> IntegratorConfig {
        IntegratorConfig::new(512, 8).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(32, 8).is_err());
        assert!(IntegratorConfig::new(127, 1).is_err());
        assert!(IntegratorConfig::new(128, 7).is_err());
        assert!(IntegratorConfig::new(128, 0).is_err());
        assert!(IntegratorConfig::default().validate().is_ok());
    }

    #[test]
    fn state_vector_norm_gate() {
        let mut amps = [c(0.0, 0.0); DIM];
        amps[0] = c(0.9, 0.0);
        assert!(StateVector::new(amps).is_err());
        let renorm = StateVector::normalized(amps).unwrap();
        assert_relative_eq!(renorm.norm_sqr(), 1.0, epsilon = 1e-14);
        assert!(StateVector::normalized([c(0.0, 0.0); DIM]).is_err());
    }

    #[test]
    fn diagonal_hamiltonian_freezes_populations() {
        // With all couplings zero the state |0 0 1> only picks up the phase
        // e^{+i 2 t} from its 2U = -2 diagonal entry.
        let params = diagonal_params(0.0);
        let psi0 = StateVector::basis(2).unwrap();
        let trajectory = integrate(
            &params,
            &psi0,
            0.0,
            3.0 * params.period(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        for (t, state) in trajectory.samples() {
            assert_relative_eq!(state.population(2), 1.0, epsilon = 1e-12);
            let expected = c((2.0 * t).cos(), (2.0 * t).sin());
            assert!((state.amplitude(2) - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn matches_analytic_driven_diagonal_evolution() {
        // Couplings zero but drive on: H(t) stays diagonal and commutes with
        // itself at different times, so each amplitude evolves with the
        // integrated phase g_k (phi/omega)(sin wt - sin wt0) + u_k (t - t0).
        let params = diagonal_params(7.3);
        let amps = [c((1.0f64 / 8.0).sqrt(), 0.0); DIM];
        let psi0 = StateVector::new(amps).unwrap();
        let t0 = 0.4;
        let t1 = t0 + 2.0 * params.period();
        let trajectory = integrate(&params, &psi0, t0, t1, &IntegratorConfig::default()).unwrap();
        for (t, state) in trajectory.samples() {
            let envelope = params.phi / params.omega
                * ((params.omega * t).sin() - (params.omega * t0).sin());
            for alpha in 1..=DIM {
                let k = alpha - 1;
                let phase = -(DRIVE_WEIGHT[k] * envelope
                    + COULOMB_WEIGHT[k] * params.u * (t - t0));
                let expected = psi0.amplitude(alpha) * c(phase.cos(), phase.sin());
                assert!(
                    (state.amplitude(alpha) - expected).norm() < 1e-9,
                    "alpha {alpha} at t {t}"
                );
            }
        }
    }

    #[test]
    fn step_halving_is_converged() {
        let params = weak_coupling_params(10.0);
        let psi0 = StateVector::basis(1).unwrap();
        let t1 = 2.0 * params.period();
        let coarse = integrate(&params, &psi0, 0.0, t1, &IntegratorConfig::new(32768, 128).unwrap())
            .unwrap();
        let fine = integrate(&params, &psi0, 0.0, t1, &IntegratorConfig::new(65536, 256).unwrap())
            .unwrap();
        assert_eq!(coarse.len(), fine.len());
        for ((_, a), (_, b)) in coarse.samples().zip(fine.samples()) {
            for alpha in 1..=DIM {
                assert!((a.amplitude(alpha) - b.amplitude(alpha)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn trajectory_endpoints_and_sampling() {
        let params = weak_coupling_params(5.0);
        let psi0 = StateVector::basis(1).unwrap();
        let t1 = 1.5 * params.period();
        let trajectory = integrate(&params, &psi0, 0.0, t1, &fast_cfg()).unwrap();
        assert_eq!(trajectory.times()[0], 0.0);
        let last = *trajectory.times().last().unwrap();
        assert!((last - t1).abs() <= trajectory.step());
        for w in trajectory.times().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn integrate_rejects_bad_interval() {
        let params = weak_coupling_params(5.0);
        let psi0 = StateVector::basis(1).unwrap();
        assert!(integrate(&params, &psi0, 1.0, 1.0, &fast_cfg()).is_err());
        assert!(integrate(&params, &psi0, 1.0, 0.5, &fast_cfg()).is_err());
    }

    #[test]
    fn integration_is_linear() {
        let params = weak_coupling_params(12.0);
        let cfg = fast_cfg();
        let t1 = params.period();
        let psi_a = StateVector::basis(1).unwrap();
        let psi_b = StateVector::basis(3).unwrap();
        let combined = StateVector::pair(1, 3).unwrap();
        let run_a = integrate(&params, &psi_a, 0.0, t1, &cfg).unwrap();
        let run_b = integrate(&params, &psi_b, 0.0, t1, &cfg).unwrap();
        let run_c = integrate(&params, &combined, 0.0, t1, &cfg).unwrap();
        let w = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..run_c.len() {
            for alpha in 1..=DIM {
                let expected =
                    w * (run_a.states()[k].amplitude(alpha) + run_b.states()[k].amplitude(alpha));
                assert!((run_c.states()[k].amplitude(alpha) - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn propagator_identity_and_composition() {
        let params = weak_coupling_params(8.0);
        let cfg = IntegratorConfig::new(1024, 8).unwrap();
        let id = propagator(&params, 0.3, 0.3, &cfg).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(DIM)).unwrap() == 0.0);

        let t = params.period();
        let full = propagator(&params, 0.0, t, &cfg).unwrap();
        let first = propagator(&params, 0.0, t / 2.0, &cfg).unwrap();
        let second = propagator(&params, t / 2.0, t, &cfg).unwrap();
        let composed = matmul(&second, &first).unwrap();
        assert!(full.max_abs_diff(&composed).unwrap() < 1e-12);
    }

    #[test]
    fn propagator_diagonal_analytic() {
        // Static diagonal H = diag(0, -2, 0, ..., -2, 0) over t = pi gives
        // phases e^{+2 pi i} = 1 on states 2 and 7: the identity.
        let params = diagonal_params(0.0);
        let u = propagator(&params, 0.0, std::f64::consts::PI, &IntegratorConfig::default())
            .unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(DIM)).unwrap() < 1e-9);
    }

    #[test]
    fn propagator_unitary_over_one_period() {
        let params = weak_coupling_params(40.7);
        let u = propagator(&params, 0.0, params.period(), &IntegratorConfig::default()).unwrap();
        let dev = u
            .adjoint()
            .mul(&u)
            .unwrap()
            .sub(&ComplexMatrix::identity(DIM))
            .unwrap()
            .frobenius_norm();
        assert!(dev <= 1e-8, "unitarity deviation {dev:.3e}");
    }

    #[test]
    fn propagator_parity_relation() {
        // U(T, T/2) = P U(T/2, 0) P is exact for the discrete scheme as well.
        let params = weak_coupling_params(8.0);
        let cfg = IntegratorConfig::new(1024, 8).unwrap();
        let t = params.period();
        let first = propagator(&params, 0.0, t / 2.0, &cfg).unwrap();
        let second = propagator(&params, t / 2.0, t, &cfg).unwrap();
        let parity = parity_matrix();
        let conjugated = matmul(&matmul(&parity, &first).unwrap(), &parity).unwrap();
        assert!(second.max_abs_diff(&conjugated).unwrap() < 1e-12);
    }

    #[test]
    fn norm_drift_stays_small() {
        let params = ModelParams::new(1.7, 1.7, 0.6, -20.0, 2.0, 24.6).unwrap();
        let psi0 = StateVector::basis(1).unwrap();
        let t1 = 3.0 * params.period();
        let trajectory =
            integrate(&params, &psi0, 0.0, t1, &IntegratorConfig::default()).unwrap();
        assert!(trajectory.max_norm_drift() < 1e-9);
    }

    #[test]
    fn min_survival_frozen_without_couplings() {
        // Zero Hamiltonian: population exactly frozen.
        let frozen = ModelParams::new(0.0, 0.0, 0.0, 0.0, 2.0, 0.0).unwrap();
        for alpha in [1, 2, 5] {
            assert_eq!(min_survival(&frozen, alpha, 2, &fast_cfg()).unwrap(), 1.0);
        }
        // Diagonal drive only rotates phases; populations stay put to
        // integrator precision.
        let driven = diagonal_params(13.0);
        let pmin = min_survival(&driven, 2, 2, &IntegratorConfig::default()).unwrap();
        assert!((1.0 - pmin).abs() < 1e-12);
        assert!(min_survival(&driven, 1, 0, &fast_cfg()).is_err());
    }
}
