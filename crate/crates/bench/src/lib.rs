//! Inputs shared by the benchmarks. Sizes follow the default experiments so
//! timings reflect real runs.

use ionframe::bench::{toy_state, FidelitySpec};
use ionframe::evolution::TimeGrid;
use ionframe::tomography::{coherent_ground_population, q_exact, MotionalState, ProbabilitySeries, Regime, TomographyConfig};
use ionframe::{ModelParams, Result, StateVector};
use num_complex::Complex64 as C64;

/// Off-resonant drive with every coupling switched on.
pub fn params() -> ModelParams {
    ModelParams::new(0.95, 0.3)
}

pub fn toy() -> Result<StateVector> {
    toy_state(params().fock())
}

/// Panel with the span cut to `t_max`, keeping the panel's sampling rule.
pub fn short_panel(name: &str, t_max: f64) -> Result<FidelitySpec> {
    Ok(FidelitySpec { t_max, ..FidelitySpec::panel(name)? })
}

/// Tomography run over `omega_t_max` instead of the full default span.
pub fn short_tomography(omega_t_max: f64, samples: usize) -> TomographyConfig {
    TomographyConfig { omega_t_max, samples, ..Default::default() }
}

/// Noiseless ground population built from exact displaced populations, so
/// the fit has a known answer.
pub fn synthetic_series(config: &TomographyConfig) -> Result<ProbabilitySeries> {
    let regime = Regime::Fast;
    let p = regime.params(config.eta, config.cutoff);
    let alpha = C64::new(0.5, -0.5);
    let phi = MotionalState::Cat(C64::new(2.0, 0.0)).state(config.fock()?)?;
    let q = q_exact(&phi, alpha, config.k_max)?;
    let grid: TimeGrid = config.grid(regime)?;
    let times = grid.times();
    Ok(ProbabilitySeries {
        regime,
        alpha,
        gamma: 0.0,
        params: p,
        p_ground: times.iter().map(|&t| coherent_ground_population(&q, &p, t)).collect(),
        times,
    })
}
