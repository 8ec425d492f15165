//! Floquet analysis of the driven trion system: quasienergies folded to the
//! first Brillouin zone, generalized-parity labels, amplitude sweeps, and
//! exact/avoided crossing classification.
//!
//! Quasienergies come from S = P U(T/2, 0) rather than the plain one-period
//! propagator: the parity relation gives S^2 = U(T, 0), so diagonalizing S
//! yields quasienergies and parity labels in one pass and stays well
//! conditioned at exact crossings, where U(T, 0) itself is degenerate.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{propagator, IntegratorConfig};
use crate::linalg::{eig_general, matmul, ComplexMatrix};
use crate::model::{parity_matrix, ModelParams, DIM};

/// Generalized-parity label of a Floquet mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    Unresolved,
}

impl Parity {
    /// Numeric encoding used in emitted series: +1, -1, 0.
    pub fn as_i8(&self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
            Parity::Unresolved => 0,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
            Parity::Unresolved => 2,
        }
    }
}

/// Quasienergies (ascending, in [-omega/2, omega/2)), Floquet modes at t = 0,
/// and parity labels.
#[derive(Debug, Clone)]
pub struct FloquetSpectrum {
    pub quasienergies: [f64; DIM],
    pub modes: Vec<Vec<Complex64>>,
    pub parities: [Parity; DIM],
}

/// Folds an energy into the first Brillouin zone [-omega/2, omega/2); the
/// upper edge +omega/2 maps to -omega/2.
pub fn fold_to_zone(eps: f64, omega: f64) -> f64 {
    let m = (eps / omega).round();
    let mut r = eps - m * omega;
    if r >= 0.5 * omega {
        r -= omega;
    }
    if r < -0.5 * omega {
        r += omega;
    }
    r
}

/// Distance between two quasienergies on the folded zone circle.
pub fn zone_gap(a: f64, b: f64, omega: f64) -> f64 {
    fold_to_zone(a - b, omega).abs()
}

fn spectrum_from_half_propagator(
    params: &ModelParams,
    u_half: &ComplexMatrix,
) -> Result<FloquetSpectrum> {
    let period = params.period();
    let s = matmul(&parity_matrix(), u_half)?;
    let pairs = eig_general(&s)?;
    let vectors = pairs.vectors.expect("eig_general always returns vectors");

    let mut entries: Vec<(f64, Parity, Vec<Complex64>)> = Vec::with_capacity(DIM);
    for (mu, mode) in pairs.values.into_iter().zip(vectors) {
        let modulus = mu.norm();
        if (modulus - 1.0).abs() > 1e-6 {
            return Err(Error::Numerical(format!(
                "half-period Floquet operator eigenvalue has modulus {modulus}"
            )));
        }
        let mu2 = mu * mu;
        let eps = fold_to_zone(-mu2.arg() / period, params.omega);
        // mu = +-exp(-i eps T / 2); the sign is the parity label.
        let sign = mu * Complex64::from_polar(1.0, 0.5 * eps * period);
        let parity = if sign.re > 0.5 {
            Parity::Even
        } else if sign.re < -0.5 {
            Parity::Odd
        } else {
            Parity::Unresolved
        };
        entries.push((eps, parity, mode));
    }
    entries.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.rank().cmp(&b.1.rank()))
    });

    let mut quasienergies = [0.0; DIM];
    let mut parities = [Parity::Unresolved; DIM];
    let mut modes = Vec::with_capacity(DIM);
    for (k, (eps, parity, mode)) in entries.into_iter().enumerate() {
        quasienergies[k] = eps;
        parities[k] = parity;
        modes.push(mode);
    }
    Ok(FloquetSpectrum {
        quasienergies,
        modes,
        parities,
    })
}

// Fast path used during crossing refinement: skips the S^2 = U(T, 0)
// consistency check and therefore only integrates half a period.
fn spectrum_unverified(params: &ModelParams, cfg: &IntegratorConfig) -> Result<FloquetSpectrum> {
    let period = params.period();
    let u_half = propagator(params, 0.0, 0.5 * period, cfg)?;
    spectrum_from_half_propagator(params, &u_half)
}

/// Floquet spectrum at the given parameters.
///
/// Builds S = P U(T/2, 0), checks S^2 against an independently integrated
/// one-period propagator (a broken parity symmetry or integrator failure
/// shows up here), and reads quasienergies, parity labels and modes off the
/// eigendecomposition of S.
pub fn quasienergies(params: &ModelParams, cfg: &IntegratorConfig) -> Result<FloquetSpectrum> {
    let period = params.period();
    let u_half = propagator(params, 0.0, 0.5 * period, cfg)?;
    let u_second = propagator(params, 0.5 * period, period, cfg)?;
    let u_full = matmul(&u_second, &u_half)?;
    let s = matmul(&parity_matrix(), &u_half)?;
    let deviation = matmul(&s, &s)?.sub(&u_full)?.frobenius_norm();
    if deviation > 1e-5 {
        return Err(Error::Numerical(format!(
            "S^2 deviates from the one-period propagator by {deviation:.3e}"
        )));
    }
    spectrum_from_half_propagator(params, &u_half)
}

/// One continuity-matched quasienergy curve across a sweep.
#[derive(Debug, Clone)]
pub struct Track {
    /// Quasienergy at each sweep point.
    pub quasienergies: Vec<f64>,
    /// Parity label at each sweep point. The label flips where the curve
    /// wraps around the zone edge; between wraps it is constant.
    pub parities: Vec<Parity>,
    /// Index into `spectra[j]` occupied by this track at sweep point j.
    pub slots: Vec<usize>,
    /// Set when the greedy mode matching saw two candidate overlaps closer
    /// than 1e-6 somewhere along the curve.
    pub ambiguous: bool,
}

/// Quasienergy sweep over the drive amplitude.
#[derive(Debug, Clone)]
pub struct QuasienergySweep {
    /// Parameter template; `phi` is overridden point by point.
    pub params: ModelParams,
    pub cfg: IntegratorConfig,
    pub phis: Vec<f64>,
    pub spectra: Vec<FloquetSpectrum>,
    pub tracks: Vec<Track>,
}

fn mode_overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm()
}

/// Sweeps the Floquet spectrum over uniformly spaced drive amplitudes and
/// stitches the per-point spectra into eight continuous tracks by greedy
/// eigenvector-overlap matching (same-parity candidates first).
pub fn sweep_quasienergies(
    params: &ModelParams,
    phi_min: f64,
    phi_max: f64,
    n_points: usize,
    cfg: &IntegratorConfig,
) -> Result<QuasienergySweep> {
    if n_points < 2 {
        return Err(Error::Domain(format!(
            "sweep needs at least 2 points, got {n_points}"
        )));
    }
    if !phi_min.is_finite() || !phi_max.is_finite() || phi_min > phi_max {
        return Err(Error::Domain(format!(
            "invalid sweep range [{phi_min}, {phi_max}]"
        )));
    }
    let step = (phi_max - phi_min) / (n_points - 1) as f64;
    let phis: Vec<f64> = (0..n_points).map(|k| phi_min + k as f64 * step).collect();
    let spectra: Vec<FloquetSpectrum> = phis
        .par_iter()
        .map(|&phi| quasienergies(&params.with_phi(phi), cfg))
        .collect::<Result<_>>()?;

    let mut tracks: Vec<Track> = (0..DIM)
        .map(|k| Track {
            quasienergies: vec![spectra[0].quasienergies[k]],
            parities: vec![spectra[0].parities[k]],
            slots: vec![k],
            ambiguous: false,
        })
        .collect();

    for j in 1..n_points {
        let next = &spectra[j];
        // Overlap of every track's current mode with every candidate mode.
        let mut overlap = [[0.0; DIM]; DIM];
        for (ti, track) in tracks.iter().enumerate() {
            let prev_mode = &spectra[j - 1].modes[track.slots[j - 1]];
            for (s, mode) in next.modes.iter().enumerate() {
                overlap[ti][s] = mode_overlap(prev_mode, mode);
            }
        }
        let assignment = greedy_assign(&mut tracks, &overlap, next, j);
        for (ti, slot) in assignment.into_iter().enumerate() {
            tracks[ti].quasienergies.push(next.quasienergies[slot]);
            tracks[ti].parities.push(next.parities[slot]);
            tracks[ti].slots.push(slot);
        }
    }

    Ok(QuasienergySweep {
        params: *params,
        cfg: *cfg,
        phis,
        spectra,
        tracks,
    })
}

fn greedy_assign(
    tracks: &mut [Track],
    overlap: &[[f64; DIM]; DIM],
    next: &FloquetSpectrum,
    j: usize,
) -> [usize; DIM] {
    let parity_ok = |ti: usize, s: usize, tracks: &[Track]| {
        let prev = tracks[ti].parities[j - 1];
        prev == Parity::Unresolved
            || next.parities[s] == Parity::Unresolved
            || prev == next.parities[s]
    };

    // All candidate pairs sorted by descending overlap; quantize so that
    // floating-point noise cannot reorder genuinely tied candidates.
    let mut order: Vec<(i64, usize, usize)> = Vec::with_capacity(DIM * DIM);
    for (ti, row) in overlap.iter().enumerate() {
        for (s, value) in row.iter().enumerate() {
            order.push((-((value * 1e12).round() as i64), ti, s));
        }
    }
    order.sort();

    let mut chosen = [usize::MAX; DIM];
    let mut slot_used = [false; DIM];
    // Pass 1: respect parity labels.
    for &(_, ti, s) in &order {
        if chosen[ti] != usize::MAX || slot_used[s] || !parity_ok(ti, s, tracks) {
            continue;
        }
        // Flag near-ties against the alternatives still available.
        let best = overlap[ti][s];
        for s2 in 0..DIM {
            if s2 != s && !slot_used[s2] && parity_ok(ti, s2, tracks) && best - overlap[ti][s2] < 1e-6
            {
                tracks[ti].ambiguous = true;
            }
        }
        chosen[ti] = s;
        slot_used[s] = true;
    }
    // Pass 2: leftovers (parity flips at zone-edge wraps) by overlap alone.
    for &(_, ti, s) in &order {
        if chosen[ti] != usize::MAX || slot_used[s] {
            continue;
        }
        chosen[ti] = s;
        slot_used[s] = true;
    }
    chosen
}

/// Exact or avoided quasienergy crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingKind {
    Exact,
    Avoided,
}

impl CrossingKind {
    pub fn label(&self) -> &'static str {
        match self {
            CrossingKind::Exact => "exact",
            CrossingKind::Avoided => "avoided",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossingEvent {
    /// Refined crossing position.
    pub phi_star: f64,
    /// Indices of the two tracks involved.
    pub pair: (usize, usize),
    pub kind: CrossingKind,
    /// Refined minimum gap (zone distance).
    pub gap: f64,
}

// Local gap minima wider than this fraction of the zone are treated as
// incidental track geometry rather than crossing candidates.
const CANDIDATE_GAP_FRACTION: f64 = 0.25;

/// Locates and classifies quasienergy crossings in a sweep.
///
/// For every track pair, interior local minima of the folded gap are refined
/// by golden-section search on the continuous gap (re-diagonalizing at trial
/// amplitudes and re-identifying the pair by mode overlap). Opposite-parity
/// pairs whose refined gap falls below `exact_tol` are exact crossings;
/// same-parity pairs are avoided crossings with their minimum gap recorded.
pub fn classify_crossings(
    sweep: &QuasienergySweep,
    exact_tol: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<CrossingEvent>> {
    let n = sweep.phis.len();
    if n < 3 {
        return Err(Error::Domain("crossing search needs at least 3 sweep points".into()));
    }
    let omega = sweep.params.omega;
    let gap_ceiling = CANDIDATE_GAP_FRACTION * omega;

    let mut events = Vec::new();
    for a in 0..DIM {
        for b in (a + 1)..DIM {
            let ta = &sweep.tracks[a];
            let tb = &sweep.tracks[b];
            let gaps: Vec<f64> = (0..n)
                .map(|j| zone_gap(ta.quasienergies[j], tb.quasienergies[j], omega))
                .collect();
            for j in 1..n - 1 {
                let is_min = gaps[j] <= gaps[j - 1] && gaps[j] <= gaps[j + 1];
                // Ignore dips at rounding level: constant or degenerate gap
                // series are not crossings.
                let depth = gaps[j - 1].max(gaps[j + 1]) - gaps[j];
                if !is_min || depth <= 1e-9 * omega || gaps[j] > gap_ceiling {
                    continue;
                }
                if let Some(event) = refine_crossing(sweep, (a, b), j, exact_tol, cfg)? {
                    events.push(event);
                }
            }
        }
    }
    events.sort_by(|x, y| {
        x.phi_star
            .partial_cmp(&y.phi_star)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.pair.cmp(&y.pair))
    });
    Ok(events)
}

struct GapSample {
    gap: f64,
    parity_a: Parity,
    parity_b: Parity,
}

fn gap_at(
    sweep: &QuasienergySweep,
    pair: (usize, usize),
    anchor: usize,
    phi: f64,
    cfg: &IntegratorConfig,
) -> Result<GapSample> {
    let spectrum = spectrum_unverified(&sweep.params.with_phi(phi), cfg)?;
    let ref_a = &sweep.spectra[anchor].modes[sweep.tracks[pair.0].slots[anchor]];
    let ref_b = &sweep.spectra[anchor].modes[sweep.tracks[pair.1].slots[anchor]];

    // Best distinct-slot identification of the two tracked modes.
    let mut best = (0usize, 1usize, f64::NEG_INFINITY);
    for sa in 0..DIM {
        for sb in 0..DIM {
            if sa == sb {
                continue;
            }
            let score = mode_overlap(ref_a, &spectrum.modes[sa]) + mode_overlap(ref_b, &spectrum.modes[sb]);
            if score > best.2 {
                best = (sa, sb, score);
            }
        }
    }
    let (sa, sb, _) = best;
    Ok(GapSample {
        gap: zone_gap(
            spectrum.quasienergies[sa],
            spectrum.quasienergies[sb],
            sweep.params.omega,
        ),
        parity_a: spectrum.parities[sa],
        parity_b: spectrum.parities[sb],
    })
}

fn refine_crossing(
    sweep: &QuasienergySweep,
    pair: (usize, usize),
    j: usize,
    exact_tol: f64,
    cfg: &IntegratorConfig,
) -> Result<Option<CrossingEvent>> {
    const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;
    let mut lo = sweep.phis[j - 1];
    let mut hi = sweep.phis[j + 1];

    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = gap_at(sweep, pair, j, x1, cfg)?;
    let mut f2 = gap_at(sweep, pair, j, x2, cfg)?;

    while hi - lo > 1e-4 * (0.5 * (hi + lo).abs()).max(1.0) {
        if f1.gap <= f2.gap {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = gap_at(sweep, pair, j, x1, cfg)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = gap_at(sweep, pair, j, x2, cfg)?;
        }
    }
    let (phi_star, sample) = if f1.gap <= f2.gap { (x1, f1) } else { (x2, f2) };

    if sample.parity_a == Parity::Unresolved || sample.parity_b == Parity::Unresolved {
        return Ok(None);
    }
    if sample.parity_a != sample.parity_b {
        if sample.gap <= exact_tol {
            return Ok(Some(CrossingEvent {
                phi_star,
                pair,
                kind: CrossingKind::Exact,
                gap: sample.gap,
            }));
        }
        // Opposite-parity near miss: the curves pass by without touching.
        return Ok(None);
    }
    Ok(Some(CrossingEvent {
        phi_star,
        pair,
        kind: CrossingKind::Avoided,
        gap: sample.gap,
    }))
}
