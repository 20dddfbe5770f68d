//! Linear stability of steady states through the characteristic equation
//! `p(lambda) = lambda - a - b exp(-lambda tau)`.

mod hopf;
mod lambert;
mod roots;
mod stability;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

pub use hopf::{hopf_locus_1p, lambertw_coalescence, Coalescence, HopfPoint};
pub use lambert::{lambert_w, w0_from_ln, Branch};
pub use roots::{
    complex_roots, newton_polish, real_roots, winding_count, ComplexSearch, Rect,
};
pub use stability::{
    c0_curve, critical_delays, stability_region, tau1, C0Sample, CriticalDelays, StabilityClass,
};

/// Coefficients of the linear delay equation `z' = a z + b z(t - tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizationCoeffs {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
}

impl LinearizationCoeffs {
    pub fn new(a: f64, b: f64, tau: f64) -> Self {
        Self { a, b, tau }
    }

    /// Coefficients of the linearisation of `h` about an arbitrary reference
    /// concentration (not necessarily an equilibrium).
    pub fn at_reference(q_r: f64, p: &ModelParams) -> Self {
        let hp = p.h_prime(q_r);
        Self {
            a: -p.kappa - hp,
            b: p.amplification() * hp,
            tau: p.tau,
        }
    }

    #[inline]
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        lambda - self.a - self.b * (-lambda * self.tau).exp()
    }

    #[inline]
    pub fn eval_derivative(&self, lambda: Complex64) -> Complex64 {
        1.0 + self.b * self.tau * (-lambda * self.tau).exp()
    }

    /// `|p(lambda)| / max(1, |lambda|)`.
    pub fn residual(&self, lambda: Complex64) -> f64 {
        self.eval(lambda).norm() / lambda.norm().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    Real,
    ComplexPair,
}

impl RootKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RootKind::Real => "real",
            RootKind::ComplexPair => "complex-pair",
        }
    }
}

/// A characteristic value. Complex pairs are stored by their member with
/// non-negative imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoot {
    pub lambda: Complex64,
    pub residual: f64,
    pub kind: RootKind,
}

impl CharRoot {
    pub fn re(&self) -> f64 {
        self.lambda.re
    }

    pub fn im(&self) -> f64 {
        self.lambda.im
    }
}

/// Residual bound every returned root must meet.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Coefficients of the linearisation about a steady state (`0` or `Q*`).
pub fn linearize_at(q_eq: f64, p: &ModelParams) -> Result<LinearizationCoeffs> {
    if q_eq < 0.0 || !q_eq.is_finite() {
        return Err(Error::NegativeConcentration(q_eq));
    }
    if q_eq > 0.0 {
        // rate balance (A-1) beta(Q) = kappa, relative to kappa
        let residual = ((p.amplification() - 1.0) * p.hill(q_eq) - p.kappa).abs() / p.kappa;
        if residual > 1e-8 {
            return Err(Error::NotASteadyState { q: q_eq, residual });
        }
    }
    Ok(LinearizationCoeffs::at_reference(q_eq, p))
}
