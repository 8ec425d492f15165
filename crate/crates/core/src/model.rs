//! The driven two-site trion model: basis bookkeeping, drive field, and the
//! effective 8x8 Hamiltonian, built two ways.
//!
//! The eight basis states hold one spin-up electron, one spin-down electron
//! and one hole, each localized on the left (0) or right (1) dot. States are
//! indexed alpha = 1..=8 in the order |0 0 0>, |0 0 1>, ..., |1 1 1> with the
//! occupancy bits read as (e_up, e_down, hole).

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Number of trion basis states.
pub const DIM: usize = 8;

// Coefficient of the drive F(t) on each diagonal entry: every carrier on the
// right dot contributes +F/2, every carrier on the left dot -F/2.
pub(crate) const DRIVE_WEIGHT: [f64; DIM] = [-1.5, -0.5, -0.5, 0.5, -0.5, 0.5, 0.5, 1.5];

// Static Coulomb offsets in units of U: the two configurations with both
// electrons in one dot and the hole in the other sit at 2U.
pub(crate) const COULOMB_WEIGHT: [f64; DIM] = [0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0];

/// Parameters of the effective driven Hamiltonian.
///
/// Energies are dimensionless (hbar = 1); `omega` sets the time scale via
/// the drive period T = 2 pi / omega, which is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Spin-up electron hopping.
    pub w_e: f64,
    /// Spin-down electron hopping.
    pub w_2e: f64,
    /// Hole hopping.
    pub w_h: f64,
    /// Coulomb interaction difference U = -|U1| + |V1|.
    pub u: f64,
    /// Drive angular frequency (> 0).
    pub omega: f64,
    /// Drive potential amplitude.
    pub phi: f64,
}

impl ModelParams {
    pub fn new(w_e: f64, w_2e: f64, w_h: f64, u: f64, omega: f64, phi: f64) -> Result<Self> {
        let p = Self {
            w_e,
            w_2e,
            w_h,
            u,
            omega,
            phi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.w_e, self.w_2e, self.w_h, self.u, self.omega, self.phi];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("model parameter is not finite".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::Domain(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Drive period T = 2 pi / omega.
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// Returns the same parameter set with a different drive amplitude.
    pub fn with_phi(&self, phi: f64) -> Self {
        Self { phi, ..*self }
    }

    /// Instantaneous drive field F(t) = phi cos(omega t).
    pub fn drive_field(&self, t: f64) -> f64 {
        drive_field(self, t)
    }

    /// Effective 8x8 Hamiltonian at time t.
    pub fn hamiltonian_at(&self, t: f64) -> ComplexMatrix {
        hamiltonian_at(self, t)
    }
}

/// F(t) = phi cos(omega t).
pub fn drive_field(params: &ModelParams, t: f64) -> f64 {
    params.phi * (params.omega * t).cos()
}

/// The effective Hamiltonian in the trion basis. Real symmetric for real
/// parameters: diagonal from the drive tilt plus the 2U Coulomb entries,
/// off-diagonals W_h on hole flips, W_2e on spin-down flips, W_e on spin-up
/// flips.
pub fn hamiltonian_at(params: &ModelParams, t: f64) -> ComplexMatrix {
    let f = drive_field(params, t);
    let mut h = ComplexMatrix::zeros(DIM);
    for i in 0..DIM {
        h[(i, i)] = Complex64::new(DRIVE_WEIGHT[i] * f + COULOMB_WEIGHT[i] * params.u, 0.0);
        // Each hopping term flips exactly one occupancy bit.
        let couplings = [(i ^ 0b001, params.w_h), (i ^ 0b010, params.w_2e), (i ^ 0b100, params.w_e)];
        for (j, w) in couplings {
            h[(i, j)] = Complex64::new(w, 0.0);
        }
    }
    h
}

/// One trion configuration: each carrier on the left (0) or right (1) dot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrionState {
    pub e_up: u8,
    pub e_down: u8,
    pub hole: u8,
}

impl TrionState {
    pub fn new(e_up: u8, e_down: u8, hole: u8) -> Result<Self> {
        if e_up > 1 || e_down > 1 || hole > 1 {
            return Err(Error::Domain(format!(
                "occupancies must be 0 or 1, got ({e_up}, {e_down}, {hole})"
            )));
        }
        Ok(Self { e_up, e_down, hole })
    }

    /// Basis index alpha = 4 e_up + 2 e_down + hole + 1, in 1..=8.
    pub fn index(&self) -> usize {
        4 * self.e_up as usize + 2 * self.e_down as usize + self.hole as usize + 1
    }

    /// Inverse of [`TrionState::index`].
    pub fn from_index(alpha: usize) -> Result<Self> {
        if !(1..=DIM).contains(&alpha) {
            return Err(Error::Domain(format!("basis index {alpha} outside 1..=8")));
        }
        let bits = alpha - 1;
        Ok(Self {
            e_up: ((bits >> 2) & 1) as u8,
            e_down: ((bits >> 1) & 1) as u8,
            hole: (bits & 1) as u8,
        })
    }

    pub fn all() -> [TrionState; DIM] {
        let mut out = [TrionState {
            e_up: 0,
            e_down: 0,
            hole: 0,
        }; DIM];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = TrionState::from_index(k + 1).unwrap();
        }
        out
    }

    /// Left-right mirror of all three carriers (the parity partner 9 - alpha).
    pub fn mirrored(&self) -> TrionState {
        TrionState {
            e_up: 1 - self.e_up,
            e_down: 1 - self.e_down,
            hole: 1 - self.hole,
        }
    }
}

/// Basis index alpha of the occupancy triple.
pub fn basis_index(e_up: u8, e_down: u8, hole: u8) -> Result<usize> {
    Ok(TrionState::new(e_up, e_down, hole)?.index())
}

/// The permutation matrix flipping all three occupancy bits (alpha <-> 9 -
/// alpha). Together with a half-period time shift it generates the
/// generalized parity symmetry: P H(t + T/2) P = H(t).
pub fn parity_matrix() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(DIM);
    for i in 0..DIM {
        p[(i, DIM - 1 - i)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Microscopic parameters of the second-quantized construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroParams {
    /// Single-particle electron level.
    pub eps_e: f64,
    /// Single-particle hole level.
    pub eps_h: f64,
    /// Intra-dot Coulomb magnitude |U1| (>= 0).
    pub u1: f64,
    /// Inter-dot Coulomb magnitude |V1| (>= 0).
    pub v1: f64,
    pub w_e: f64,
    pub w_2e: f64,
    pub w_h: f64,
    pub omega: f64,
    pub phi: f64,
}

impl MicroParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.eps_e, self.eps_h, self.u1, self.v1, self.w_e, self.w_2e, self.w_h, self.omega,
            self.phi,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("micro parameter is not finite".into()));
        }
        if self.u1 < 0.0 || self.v1 < 0.0 {
            return Err(Error::Domain(
                "Coulomb magnitudes u1, v1 must be non-negative".into(),
            ));
        }
        if self.omega <= 0.0 {
            return Err(Error::Domain(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// The effective parameter set this microscopic model reduces to.
    pub fn to_model(&self) -> ModelParams {
        ModelParams {
            w_e: self.w_e,
            w_2e: self.w_2e,
            w_h: self.w_h,
            u: -self.u1 + self.v1,
            omega: self.omega,
            phi: self.phi,
        }
    }
}

// One of the 32 raw three-particle configurations: two electrons with a dot
// and a spin each, plus a hole with a dot.
#[derive(Clone, Copy, PartialEq, Eq)]
struct RawConfig {
    e1_dot: u8,
    e1_up: bool,
    e2_dot: u8,
    e2_up: bool,
    h_dot: u8,
}

/// Builds the 8x8 Hamiltonian from the second-quantized model: enumerates the
/// 32 three-particle configurations, keeps the 8 holding exactly one spin-up
/// electron, one spin-down electron and one hole, evaluates on-site, hopping
/// and Coulomb matrix elements, and subtracts the constant diagonal offset
/// (the gauge term 2 eps_e + eps_h plus the common Coulomb shift) determined
/// numerically as the mean diagonal discrepancy against [`hamiltonian_at`].
pub fn build_from_second_quantized(micro: &MicroParams, t: f64) -> ComplexMatrix {
    let mut raw = second_quantized_matrix(micro, t);
    let reference = hamiltonian_at(&micro.to_model(), t);
    let mut offset = 0.0;
    for i in 0..DIM {
        offset += raw[(i, i)].re - reference[(i, i)].re;
    }
    offset /= DIM as f64;
    for i in 0..DIM {
        let d = raw[(i, i)];
        raw[(i, i)] = Complex64::new(d.re - offset, d.im);
    }
    raw
}

fn second_quantized_matrix(micro: &MicroParams, t: f64) -> ComplexMatrix {
    let tilt = 0.5 * micro.phi * (micro.omega * t).cos();
    // Level shift: a carrier on the left dot moves down by tilt, on the right
    // dot up by tilt.
    let shift = |dot: u8| if dot == 0 { -tilt } else { tilt };

    // Enumerate all 32 configurations and keep the physical trion sector.
    let mut kept = Vec::with_capacity(DIM);
    for e1 in 0..4u8 {
        for e2 in 0..4u8 {
            for h_dot in 0..2u8 {
                let cfg = RawConfig {
                    e1_dot: e1 >> 1,
                    e1_up: e1 & 1 == 0,
                    e2_dot: e2 >> 1,
                    e2_up: e2 & 1 == 0,
                    h_dot,
                };
                if cfg.e1_up && !cfg.e2_up {
                    kept.push(cfg);
                }
            }
        }
    }
    debug_assert_eq!(kept.len(), DIM);

    // Pairwise Coulomb energy. The ordered-pair sum with its 1/2 factor
    // counts each unordered pair once; the signs below are the index-
    // convention reading that reproduces the 2U diagonal entries on states 2
    // and 7 (electron-electron negative, electron-hole positive). The
    // opposite assignment, with repulsive electron-electron terms, shifts
    // states 2 and 7 by -2U instead and is not implemented.
    let pair = |dot_a: u8, dot_b: u8, sign: f64| {
        if dot_a == dot_b {
            sign * micro.u1
        } else {
            sign * micro.v1
        }
    };

    let mut h = ComplexMatrix::zeros(DIM);
    for cfg in &kept {
        let state = TrionState {
            e_up: cfg.e1_dot,
            e_down: cfg.e2_dot,
            hole: cfg.h_dot,
        };
        let i = state.index() - 1;

        let onsite = micro.eps_e + shift(cfg.e1_dot) + micro.eps_e + shift(cfg.e2_dot)
            + micro.eps_h
            + shift(cfg.h_dot);
        let coulomb = pair(cfg.e1_dot, cfg.e2_dot, -1.0)
            + pair(cfg.e1_dot, cfg.h_dot, 1.0)
            + pair(cfg.e2_dot, cfg.h_dot, 1.0);
        h[(i, i)] = Complex64::new(onsite + coulomb, 0.0);

        // Hopping moves one carrier between the dots.
        let hops = [
            (
                TrionState {
                    e_up: 1 - state.e_up,
                    ..state
                },
                micro.w_e,
            ),
            (
                TrionState {
                    e_down: 1 - state.e_down,
                    ..state
                },
                micro.w_2e,
            ),
            (
                TrionState {
                    hole: 1 - state.hole,
                    ..state
                },
                micro.w_h,
            ),
        ];
        for (other, w) in hops {
            h[(i, other.index() - 1)] = Complex64::new(w, 0.0);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn weak_coupling_params(phi: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 0.6, -1.0, 2.0, phi).unwrap()
    }

    #[test]
    fn drive_field_values() {
        let p = ModelParams::new(1.0, 1.0, 0.6, -1.0, 2.0, 24.6).unwrap();
        assert_relative_eq!(drive_field(&p, 0.0), 24.6);
        assert!(drive_field(&p, p.period() / 4.0).abs() < 1e-12);
        let strong = p.with_phi(40.7);
        assert_relative_eq!(drive_field(&strong, strong.period() / 2.0), -40.7, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(1.0, 1.0, 0.6, -1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, -1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_decoupled_limit() {
        let p = ModelParams::new(0.0, 0.0, 0.0, -1.0, 2.0, 0.0).unwrap();
        let h = hamiltonian_at(&p, 0.37);
        let expected = [0.0, -2.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0];
        for i in 0..DIM {
            for j in 0..DIM {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_relative_eq!(h[(i, j)].re, want, epsilon = 1e-15);
                assert_eq!(h[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn hamiltonian_matches_quoted_entries() {
        // W_e = W_2e = 1.0, W_h = 0.6, omega = 2, U = -1, phi = 10, t = 0.
        let h = hamiltonian_at(&weak_coupling_params(10.0), 0.0);
        assert_relative_eq!(h[(0, 0)].re, -15.0);
        assert_relative_eq!(h[(0, 1)].re, 0.6);
        assert_relative_eq!(h[(0, 2)].re, 1.0);
        assert_relative_eq!(h[(0, 4)].re, 1.0);
        assert_relative_eq!(h[(1, 1)].re, -7.0);
        assert_eq!(h[(0, 3)].re, 0.0);
        assert_eq!(h[(0, 5)].re, 0.0);
        assert_eq!(h[(0, 6)].re, 0.0);
        assert_eq!(h[(0, 7)].re, 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_periodic() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let p = ModelParams::new(
                rng.random::<f64>() * 3.0,
                rng.random::<f64>() * 3.0,
                rng.random::<f64>() * 3.0,
                rng.random::<f64>() * 40.0 - 20.0,
                rng.random::<f64>() * 3.0 + 0.5,
                rng.random::<f64>() * 50.0,
            )
            .unwrap();
            let t = rng.random::<f64>() * 10.0;
            let h = hamiltonian_at(&p, t);
            assert!(h.hermitian_deviation() == 0.0);
            let shifted = hamiltonian_at(&p, t + p.period());
            assert!(h.max_abs_diff(&shifted).unwrap() < 1e-12 * p.phi.abs().max(1.0));
        }
    }

    #[test]
    fn generalized_parity_relation() {
        let mut rng = StdRng::seed_from_u64(12);
        let p = weak_coupling_params(24.6);
        let parity = parity_matrix();
        for _ in 0..10 {
            let t = rng.random::<f64>() * 10.0;
            let lhs = matmul(
                &matmul(&parity, &hamiltonian_at(&p, t + p.period() / 2.0)).unwrap(),
                &parity,
            )
            .unwrap();
            let rhs = hamiltonian_at(&p, t);
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12 * p.phi.max(1.0));
        }
    }

    #[test]
    fn basis_index_round_trip() {
        assert_eq!(basis_index(0, 0, 0).unwrap(), 1);
        assert_eq!(basis_index(1, 1, 1).unwrap(), 8);
        for alpha in 1..=8 {
            let s = TrionState::from_index(alpha).unwrap();
            assert_eq!(s.index(), alpha);
        }
        assert!(TrionState::from_index(0).is_err());
        assert!(TrionState::from_index(9).is_err());
        assert!(basis_index(2, 0, 0).is_err());
    }

    #[test]
    fn mirrored_state_is_parity_partner() {
        for alpha in 1..=8 {
            let s = TrionState::from_index(alpha).unwrap();
            assert_eq!(s.mirrored().index(), 9 - alpha);
        }
    }

    fn random_micro(rng: &mut StdRng) -> MicroParams {
        MicroParams {
            eps_e: rng.random::<f64>() * 10.0 - 5.0,
            eps_h: rng.random::<f64>() * 10.0 - 5.0,
            u1: rng.random::<f64>() * 20.0,
            v1: rng.random::<f64>() * 20.0,
            w_e: rng.random::<f64>() * 3.0,
            w_2e: rng.random::<f64>() * 3.0,
            w_h: rng.random::<f64>() * 3.0,
            omega: rng.random::<f64>() * 3.0 + 0.5,
            phi: rng.random::<f64>() * 50.0,
        }
    }

    #[test]
    fn second_quantized_matches_effective_up_to_identity() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..50 {
            let micro = random_micro(&mut rng);
            micro.validate().unwrap();
            let t = rng.random::<f64>() * 10.0;
            let built = build_from_second_quantized(&micro, t);
            let reference = hamiltonian_at(&micro.to_model(), t);
            // After the mean-offset subtraction the two must agree entry-wise.
            let diff = built.max_abs_diff(&reference).unwrap();
            let scale = reference.frobenius_norm().max(1.0);
            assert!(diff <= 1e-12 * scale, "diff {diff:.3e} at scale {scale:.3e}");
        }
    }

    #[test]
    fn second_quantized_simple_interaction_case() {
        // u1 = 1, v1 = 0, no hopping, no drive: states 2 and 7 sit 2U = -2
        // below the rest once the common offset is removed.
        let micro = MicroParams {
            eps_e: 0.7,
            eps_h: -0.3,
            u1: 1.0,
            v1: 0.0,
            w_e: 0.0,
            w_2e: 0.0,
            w_h: 0.0,
            omega: 2.0,
            phi: 0.0,
        };
        let built = build_from_second_quantized(&micro, 0.0);
        let reference = hamiltonian_at(&ModelParams::new(0.0, 0.0, 0.0, -1.0, 2.0, 0.0).unwrap(), 0.0);
        assert!(built.max_abs_diff(&reference).unwrap() < 1e-12);
    }

    #[test]
    fn second_quantized_zero_coulomb_zero_drive_is_scalar() {
        let micro = MicroParams {
            eps_e: 1.3,
            eps_h: 0.4,
            u1: 0.0,
            v1: 0.0,
            w_e: 0.0,
            w_2e: 0.0,
            w_h: 0.0,
            omega: 2.0,
            phi: 0.0,
        };
        // All eight states degenerate: the raw diagonal is a single constant,
        // so the gauge-subtracted matrix vanishes identically.
        let built = build_from_second_quantized(&micro, 1.2);
        assert!(built.max_abs_diff(&ComplexMatrix::zeros(DIM)).unwrap() < 1e-12);
    }

    #[test]
    fn second_quantized_off_diagonal_pattern() {
        let mut rng = StdRng::seed_from_u64(14);
        let micro = random_micro(&mut rng);
        let t = 0.8;
        let built = build_from_second_quantized(&micro, t);
        for i in 0..DIM {
            for j in 0..DIM {
                if i == j {
                    continue;
                }
                let expected = match i ^ j {
                    0b001 => micro.w_h,
                    0b010 => micro.w_2e,
                    0b100 => micro.w_e,
                    _ => 0.0,
                };
                assert_relative_eq!(built[(i, j)].re, expected, epsilon = 1e-12);
            }
        }
    }
}
