//! Built-in parameter sets: one preset per reproducible figure-style dataset.

use trion_core::entangle::{BellLabel, FilterMode, FilterSpec};
use trion_core::evolve::IntegratorConfig;
use trion_core::ModelParams;

use crate::config::{
    AnalyticKind, EntangleBlock, EvolveBlock, OutputBlock, RunConfig, SweepBlock,
};

pub const PRESET_NAMES: &[&str] = &[
    "fig1", "fig3", "fig4", "fig5", "fig6", "fig7", "fig9", "fig10",
];

fn weak_coupling_model(phi: f64) -> ModelParams {
    // W_e = W_2e = 1.0, W_h = 0.6, U = -1, omega = 2.
    ModelParams {
        w_e: 1.0,
        w_2e: 1.0,
        w_h: 0.6,
        u: -1.0,
        omega: 2.0,
        phi,
    }
}

fn strong_interaction_model() -> ModelParams {
    // W_e = W_2e = 1.7, W_h = 0.6, U = -20, omega = 2, phi = 24.6.
    ModelParams {
        w_e: 1.7,
        w_2e: 1.7,
        w_h: 0.6,
        u: -20.0,
        omega: 2.0,
        phi: 24.6,
    }
}

fn basis_state(alpha: usize) -> Vec<[f64; 2]> {
    let mut amps = vec![[0.0, 0.0]; 8];
    amps[alpha - 1] = [1.0, 0.0];
    amps
}

fn pair_state(alpha: usize, beta: usize) -> Vec<[f64; 2]> {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![[0.0, 0.0]; 8];
    amps[alpha - 1] = [w, 0.0];
    amps[beta - 1] = [w, 0.0];
    amps
}

fn base(model: ModelParams, integrator: IntegratorConfig) -> RunConfig {
    RunConfig {
        model,
        integrator,
        sweep: None,
        evolve: None,
        entangle: None,
        workers: None,
        output: OutputBlock::default(),
    }
}

pub fn preset(name: &str) -> Option<RunConfig> {
    let config = match name {
        // Quasienergy sweep over the drive amplitude with the two survival
        // probability columns.
        "fig1" => {
            let mut cfg = base(
                weak_coupling_model(0.0),
                IntegratorConfig {
                    steps_per_period: 8192,
                    sample_stride: 32,
                },
            );
            cfg.sweep = Some(SweepBlock {
                phi_min: 0.0,
                phi_max: 50.0,
                n_points: 501,
                pmin_alphas: vec![1, 2],
                pmin_periods: 30,
                exact_tol: None,
            });
            cfg
        }
        // Strong-interaction transition dynamics from |0 0 0>.
        "fig3" => {
            let mut cfg = base(strong_interaction_model(), IntegratorConfig::default());
            cfg.evolve = Some(EvolveBlock {
                initial_state: basis_state(1),
                n_periods: 30,
            });
            cfg
        }
        // Entanglement series for the fig3 run: closed-form pair concurrence
        // versus the swapped-electron Bell overlap.
        "fig4" | "fig5" => {
            let mut cfg = base(strong_interaction_model(), IntegratorConfig::default());
            cfg.entangle = Some(EntangleBlock {
                initial_state: basis_state(1),
                n_periods: 30,
                targets: vec![BellLabel::PsiBell],
                analytic: AnalyticKind::PairProduct,
                filter: None,
            });
            cfg
        }
        // Strong-drive dynamics from (|0 0 0> + |1 1 0>)/sqrt(2).
        "fig6" => {
            let mut cfg = base(weak_coupling_model(40.7), IntegratorConfig::default());
            cfg.evolve = Some(EvolveBlock {
                initial_state: pair_state(1, 7),
                n_periods: 30,
            });
            cfg
        }
        // Same trajectory, hole-right Bell channel with amplitudes 1, 7
        // suppressed.
        "fig7" => {
            let mut cfg = base(weak_coupling_model(40.7), IntegratorConfig::default());
            cfg.entangle = Some(EntangleBlock {
                initial_state: pair_state(1, 7),
                n_periods: 30,
                targets: vec![BellLabel::Beta],
                analytic: AnalyticKind::PairProduct,
                filter: Some(FilterSpec {
                    zeroed: vec![1, 7],
                    mode: FilterMode::Renormalize,
                }),
            });
            cfg
        }
        // Mirror channel: hole-left Bell target, amplitudes 2, 8 suppressed.
        "fig9" => {
            let mut cfg = base(weak_coupling_model(40.7), IntegratorConfig::default());
            cfg.entangle = Some(EntangleBlock {
                initial_state: pair_state(1, 7),
                n_periods: 30,
                targets: vec![BellLabel::Alpha],
                analytic: AnalyticKind::PairProduct,
                filter: Some(FilterSpec {
                    zeroed: vec![2, 8],
                    mode: FilterMode::Renormalize,
                }),
            });
            cfg
        }
        // Full concurrence against both Bell channels.
        "fig10" => {
            let mut cfg = base(weak_coupling_model(40.7), IntegratorConfig::default());
            cfg.entangle = Some(EntangleBlock {
                initial_state: pair_state(1, 7),
                n_periods: 30,
                targets: vec![BellLabel::Beta, BellLabel::Alpha],
                analytic: AnalyticKind::DoubleSlit,
                filter: None,
            });
            cfg
        }
        _ => return None,
    };
    Some(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
        }
        assert!(preset("fig2").is_none());
    }
}
