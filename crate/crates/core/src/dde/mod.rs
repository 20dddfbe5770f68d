//! Method-of-steps integration of scalar constant-delay equations.

mod dopri;
mod events;
mod history;
mod trajectory;
mod variational;

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, NondimParams};

pub use dopri::{integrate, integrate_model, BREAKPOINT_ORDER};
pub use events::{detect_events, Direction, Event, EventKind, EventSpec};
pub use history::{HistoryFunction, Interpolation, PerturbationMode};
pub use trajectory::{Segment, Trajectory};
pub use variational::{integrate_variational, Growth, PerturbationBundle, BUNDLE_MESH};

/// A scalar equation `x'(t) = F(x(t), x(t - delay))`.
pub trait ScalarDde {
    fn delay(&self) -> f64;
    fn rhs(&self, now: f64, delayed: f64) -> f64;
    /// Model constants, when the equation is the dimensional model itself.
    fn params(&self) -> Option<ModelParams> {
        None
    }
}

impl ScalarDde for ModelParams {
    fn delay(&self) -> f64 {
        self.tau
    }

    #[inline]
    fn rhs(&self, now: f64, delayed: f64) -> f64 {
        self.rhs_clamped(now, delayed)
    }

    fn params(&self) -> Option<ModelParams> {
        Some(*self)
    }
}

/// The equation in scaled time `t / tau` and concentration `Q / theta`; the
/// delay is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimensionalModel(pub NondimParams);

impl ScalarDde for NondimensionalModel {
    fn delay(&self) -> f64 {
        1.0
    }

    #[inline]
    fn rhs(&self, now: f64, delayed: f64) -> f64 {
        let p = &self.0;
        let (x, y) = (now.max(0.0), delayed.max(0.0));
        p.f_hat * (-p.kappa_hat * x - x / (1.0 + x.powf(p.s)) + p.a_hat * y / (1.0 + y.powf(p.s)))
    }
}

/// Step-size control settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step; the delay is always a bound as well.
    pub max_step: Option<f64>,
    pub initial_step: Option<f64>,
    /// Number of delay multiples inserted as mandatory step boundaries.
    pub breakpoints: usize,
    pub events: Option<EventSpec>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: None,
            initial_step: None,
            breakpoints: BREAKPOINT_ORDER,
            events: None,
        }
    }
}
