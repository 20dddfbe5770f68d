//! Post-processing of computed solutions: embeddings, sections, periods,
//! orbit diagrams and Lyapunov spectra.

mod lyapunov;
mod period;
mod poincare;
mod sweep;

pub use lyapunov::{
    kaplan_yorke, lyapunov_spectrum, KaplanYorke, LyapunovOptions, LyapunovSettings, LyapunovSpectrum,
    KY_ZERO_TOLERANCE,
};
pub use period::{estimate_period, PeriodEstimate, PeriodOptions, APERIODIC_MIN_RETURNS};
pub use poincare::{poincare_section, PoincareCrossing};
pub use sweep::{
    interleaved_decreasing, orbit_diagram, orbit_diagram_both, piecewise_mesh, ExtremaSelection, SeedNote,
    SweepDirection, SweepOptions, SweepPoint, SweepResult,
};

use crate::dde::Trajectory;
use crate::error::{Error, Result};

/// Rows `(t, Q(t - lag_1), Q(t - lag_2), ...)` for `t` on `[t0, t1]` with
/// spacing `dt`. Every delayed time must fall inside the stored solution.
pub fn delay_embedding(traj: &Trajectory, lags: &[f64], t0: f64, t1: f64, dt: f64) -> Result<Vec<(f64, Vec<f64>)>> {
    if lags.is_empty() || lags.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::InvalidInput("embedding lags must be non-negative and non-empty".into()));
    }
    let max_lag = lags.iter().copied().fold(0.0, f64::max);
    if t0 - max_lag < -traj.tau - 1e-12 {
        return Err(Error::OutOfRange {
            t: t0 - max_lag,
            lo: -traj.tau,
            hi: traj.t_end(),
        });
    }
    let samples = traj.sample(t0, t1, dt)?;
    Ok(samples
        .into_iter()
        .map(|(t, _)| (t, lags.iter().map(|l| traj.value_unchecked(t - l)).collect()))
        .collect())
}
