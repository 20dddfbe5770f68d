//! Benchmarks for the numerical core; see `benches/`.

use hsc_core::dde::HistoryFunction;
use hsc_core::{ModelParams, Param};

/// Chaotic parameter set used by the longer benchmarks.
pub fn chaotic_params() -> ModelParams {
    ModelParams::table1().with(Param::Kappa, 0.865).with(Param::Tau, 3.9)
}

/// Constant history one percent above the positive steady state.
pub fn near_steady_state(p: &ModelParams) -> HistoryFunction {
    HistoryFunction::constant(1.01 * p.q_star().expect("positive steady state"))
}
