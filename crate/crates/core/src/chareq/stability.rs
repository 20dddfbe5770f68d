//! Stability region of `z' = a z + b z(t - tau)` and the critical delays of
//! the positive steady state.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::LinearizationCoeffs;
use crate::model::{bisect, existence_bounds, ModelParams, Param};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityClass {
    Stable,
    Unstable,
    /// On the curve `C0`: a root sits on the imaginary axis.
    Boundary,
}

impl StabilityClass {
    /// Boundary cases count as not stable.
    pub fn is_stable(self) -> bool {
        self == StabilityClass::Stable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::Stable => "stable",
            StabilityClass::Unstable => "unstable",
            StabilityClass::Boundary => "boundary",
        }
    }
}

/// `tau1(a, b) = arccos(-a/b) / sqrt(b^2 - a^2)`, the smallest delay at which
/// a pair crosses the imaginary axis. Defined for `b < -|a|`.
pub fn tau1(a: f64, b: f64) -> Option<f64> {
    if b < 0.0 && b * b > a * a {
        Some((-a / b).clamp(-1.0, 1.0).acos() / (b * b - a * a).sqrt())
    } else {
        None
    }
}

const BOUNDARY_RTOL: f64 = 1e-12;

pub fn stability_region(c: &LinearizationCoeffs) -> StabilityClass {
    let (a, b) = (c.a, c.b);
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let sum = a + b;
    if sum.abs() <= BOUNDARY_RTOL * scale {
        return StabilityClass::Boundary;
    }
    if sum > 0.0 {
        return StabilityClass::Unstable;
    }
    if a < -b.abs() {
        return StabilityClass::Stable;
    }
    let t1 = tau1(a, b).expect("b < -|a| in this branch");
    if (c.tau - t1).abs() <= BOUNDARY_RTOL * t1 {
        StabilityClass::Boundary
    } else if c.tau < t1 {
        StabilityClass::Stable
    } else {
        StabilityClass::Unstable
    }
}

/// One point of the boundary curve in the `(a tau, b tau)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C0Sample {
    pub omega: f64,
    pub a_tau: f64,
    pub b_tau: f64,
}

/// `n` samples of `(omega cot omega, -omega csc omega)` for `omega` in `[0, pi)`.
pub fn c0_curve(n: usize) -> Vec<C0Sample> {
    (0..n)
        .map(|i| {
            let omega = PI * i as f64 / n as f64;
            if omega == 0.0 {
                C0Sample {
                    omega,
                    a_tau: 1.0,
                    b_tau: -1.0,
                }
            } else {
                C0Sample {
                    omega,
                    a_tau: omega / omega.tan(),
                    b_tau: -omega / omega.sin(),
                }
            }
        })
        .collect()
}

/// Critical delays of the positive steady state with every parameter but
/// `tau` held. `None` marks an absent value. `tau_max` is infinite when
/// `gamma = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalDelays {
    pub tau1_minus: Option<f64>,
    pub tau1_plus: Option<f64>,
    pub tau2: Option<f64>,
    pub tau_max: Option<f64>,
}

/// `tau - tau1(a(tau), b(tau))` at the positive steady state, `-inf` where
/// `tau1` is undefined (delay-independent stability) and `NaN` where `Q*` is
/// absent.
pub(crate) fn delay_margin(p: &ModelParams) -> f64 {
    match p.q_star() {
        None => f64::NAN,
        Some(q) => {
            let c = LinearizationCoeffs::at_reference(q, p);
            match tau1(c.a, c.b) {
                Some(t1) => p.tau - t1,
                None => f64::NEG_INFINITY,
            }
        }
    }
}

/// Sign changes of `g` over `n` interior grid points of `(lo, hi)`, each
/// refined by bisection. Changes across non-finite values are kept only if
/// the refined point is a genuine zero.
pub(crate) fn scan_roots<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let step = (hi - lo) / (n + 1) as f64;
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=n {
        let x = lo + step * i as f64;
        let gx = g(x);
        if gx.is_nan() {
            prev = None;
            continue;
        }
        if let Some((xp, gp)) = prev {
            if (gp < 0.0) != (gx < 0.0) || gx == 0.0 {
                let root = bisect(&g, xp, x, tol);
                let gr = g(root);
                let finite_bracket = gp.is_finite() && gx.is_finite();
                if finite_bracket || gr.abs() < 1e-6 {
                    out.push(root);
                }
            }
        }
        prev = Some((x, gx));
    }
    out
}

pub fn critical_delays(p: &ModelParams) -> CriticalDelays {
    let tau_max = existence_bounds(&p.with(Param::Tau, 1.0)).tau_max;
    let tau2 = if p.s > 1.0 && p.gamma > 0.0 {
        let t = -(0.5 * (1.0 + p.kappa * p.s / (p.f * (p.s - 1.0)))).ln() / p.gamma;
        (t > 0.0).then_some(t)
    } else {
        None
    };

    let (tau1_minus, tau1_plus) = if p.gamma == 0.0 {
        // A = 2 for every delay, so a and b do not depend on tau
        let t1 = p.q_star().and_then(|q| {
            let c = LinearizationCoeffs::at_reference(q, p);
            tau1(c.a, c.b)
        });
        (t1, None)
    } else if tau_max > 0.0 {
        let roots = scan_roots(
            |t| delay_margin(&p.with(Param::Tau, t)),
            0.0,
            tau_max,
            10_000,
            1e-10,
        );
        (roots.first().copied(), roots.get(1).copied())
    } else {
        (None, None)
    };

    CriticalDelays {
        tau1_minus,
        tau1_plus,
        tau2,
        tau_max: (tau_max > 0.0).then_some(tau_max),
    }
}
