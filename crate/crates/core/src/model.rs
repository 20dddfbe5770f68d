//! Model algebra for the stem-cell equation
//!
//! ```text
//! Q'(t) = -(kappa + beta(Q(t))) Q(t) + A beta(Q(t - tau)) Q(t - tau)
//! beta(Q) = f theta^s / (theta^s + Q^s),   A = 2 exp(-gamma tau)
//! ```
//!
//! Derived quantities (`A`, `Q*`) are always computed from the six stored
//! constants so that parameter sweeps cannot leave them stale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six constants of the model. Units: rates in 1/day, `tau` in days,
/// `theta` in 10^6 cells/kg, `s` dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub kappa: f64,
    pub gamma: f64,
    pub tau: f64,
    pub theta: f64,
    pub f: f64,
    pub s: f64,
}

/// Calibration input: the homeostatic state plus the directly measured rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomeostasisSpec {
    #[serde(rename = "Q_h")]
    pub q_h: f64,
    pub beta_h: f64,
    pub f: f64,
    pub s: f64,
    pub gamma: f64,
    pub tau: f64,
}

impl HomeostasisSpec {
    /// Homeostasis values for human HSCs (Craig et al. 2016).
    pub const fn table1() -> Self {
        Self {
            q_h: 1.1,
            beta_h: 0.043,
            f: 8.0,
            s: 2.0,
            gamma: 0.1,
            tau: 2.8,
        }
    }
}

/// A named model constant, used by sweeps and Hopf location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Kappa,
    Gamma,
    Tau,
    Theta,
    F,
    S,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Kappa => "kappa",
            Param::Gamma => "gamma",
            Param::Tau => "tau",
            Param::Theta => "theta",
            Param::F => "f",
            Param::S => "s",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(Param::Kappa),
            "gamma" => Ok(Param::Gamma),
            "tau" => Ok(Param::Tau),
            "theta" => Ok(Param::Theta),
            "f" => Ok(Param::F),
            "s" => Ok(Param::S),
            other => Err(Error::InvalidInput(format!("unknown parameter `{other}`"))),
        }
    }
}

impl ModelParams {
    pub fn new(kappa: f64, gamma: f64, tau: f64, theta: f64, f: f64, s: f64) -> Result<Self> {
        let p = Self {
            kappa,
            gamma,
            tau,
            theta,
            f,
            s,
        };
        p.validate()?;
        Ok(p)
    }

    /// Homeostasis parameters, with `theta` and `kappa` recomputed in full
    /// double precision from the calibration data.
    pub fn table1() -> Self {
        derive_homeostasis(&HomeostasisSpec::table1()).expect("table 1 calibration is valid")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("tau", self.tau),
            ("theta", self.theta),
            ("f", self.f),
            ("s", self.s),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::Kappa => self.kappa,
            Param::Gamma => self.gamma,
            Param::Tau => self.tau,
            Param::Theta => self.theta,
            Param::F => self.f,
            Param::S => self.s,
        }
    }

    /// Copy with one constant replaced.
    pub fn with(&self, param: Param, value: f64) -> Self {
        let mut p = *self;
        match param {
            Param::Kappa => p.kappa = value,
            Param::Gamma => p.gamma = value,
            Param::Tau => p.tau = value,
            Param::Theta => p.theta = value,
            Param::F => p.f = value,
            Param::S => p.s = value,
        }
        p
    }

    /// `A = 2 exp(-gamma tau)`.
    pub fn amplification(&self) -> f64 {
        amplification(self.gamma, self.tau)
    }

    /// `(Q/theta)^s`, evaluated through exp/ln so non-integer `s` is safe.
    #[inline]
    fn hill_ratio(&self, q: f64) -> f64 {
        if q <= 0.0 {
            0.0
        } else {
            ((q / self.theta).ln() * self.s).exp()
        }
    }

    /// Hill function without the domain check. Negative inputs are treated as zero.
    #[inline]
    pub fn hill(&self, q: f64) -> f64 {
        self.f / (1.0 + self.hill_ratio(q))
    }

    /// `h(Q) = Q beta(Q)`.
    #[inline]
    pub fn h(&self, q: f64) -> f64 {
        q.max(0.0) * self.hill(q)
    }

    /// `h'(Q) = f (1 + (1-s) u) / (1 + u)^2` with `u = (Q/theta)^s`.
    #[inline]
    pub fn h_prime(&self, q: f64) -> f64 {
        let u = self.hill_ratio(q);
        self.f * (1.0 + (1.0 - self.s) * u) / ((1.0 + u) * (1.0 + u))
    }

    /// `h''(Q) = f s u ((s-1) u - (s+1)) / (Q (1+u)^3)`.
    pub fn h_second(&self, q: f64) -> f64 {
        if q <= 0.0 {
            // the limit is finite only for s >= 1; the s = 1 value is -2 f / theta
            return if self.s > 1.0 {
                0.0
            } else if self.s == 1.0 {
                -2.0 * self.f / self.theta
            } else {
                f64::NEG_INFINITY
            };
        }
        let u = self.hill_ratio(q);
        self.f * self.s * u * ((self.s - 1.0) * u - (self.s + 1.0)) / (q * (1.0 + u).powi(3))
    }

    /// Net growth `G(Q) = (A-1) h(Q) - kappa Q`; its roots are the steady states.
    #[inline]
    pub fn growth(&self, q: f64) -> f64 {
        (self.amplification() - 1.0) * self.h(q) - self.kappa * q
    }

    #[inline]
    pub fn growth_prime(&self, q: f64) -> f64 {
        (self.amplification() - 1.0) * self.h_prime(q) - self.kappa
    }

    /// Right-hand side with negative arguments clamped to zero.
    #[inline]
    pub fn rhs_clamped(&self, q_now: f64, q_delayed: f64) -> f64 {
        let q = q_now.max(0.0);
        let qd = q_delayed.max(0.0);
        -(self.kappa + self.hill(q)) * q + self.amplification() * self.hill(qd) * qd
    }

    /// Non-trivial equilibrium, if the existence bounds hold strictly.
    pub fn q_star(&self) -> Option<f64> {
        steady_state(self).nontrivial
    }
}

/// Steady states of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStates {
    pub trivial: f64,
    pub nontrivial: Option<f64>,
}

/// Upper limits on `kappa` and `tau` for the non-trivial state to exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceBounds {
    pub kappa_max: f64,
    /// `f64::INFINITY` when `gamma = 0`.
    pub tau_max: f64,
}

/// Values of `h`, `G` and their first derivatives at one concentration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HG {
    pub h: f64,
    pub h_prime: f64,
    pub g: f64,
    pub g_prime: f64,
}

/// Four-parameter scaled form: time in units of `tau`, concentration in units of `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondimParams {
    pub f_hat: f64,
    pub kappa_hat: f64,
    pub s: f64,
    pub a_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    /// days per unit of scaled time
    pub time: f64,
    /// 10^6 cells/kg per unit of scaled concentration
    pub concentration: f64,
}

fn check_concentration(q: f64) -> Result<()> {
    if q < 0.0 || q.is_nan() {
        Err(Error::NegativeConcentration(q))
    } else {
        Ok(())
    }
}

/// Hill function `beta(Q) = f theta^s / (theta^s + Q^s)`.
pub fn beta(q: f64, p: &ModelParams) -> Result<f64> {
    check_concentration(q)?;
    Ok(p.hill(q))
}

/// `A = 2 exp(-gamma tau)`.
pub fn amplification(gamma: f64, tau: f64) -> f64 {
    2.0 * (-gamma * tau).exp()
}

/// Solve the homeostasis conditions for `theta` and `kappa`.
pub fn derive_homeostasis(spec: &HomeostasisSpec) -> Result<ModelParams> {
    for (name, value) in [
        ("Q_h", spec.q_h),
        ("f", spec.f),
        ("s", spec.s),
        ("gamma", spec.gamma),
        ("tau", spec.tau),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter { name, value });
        }
    }
    if !(spec.beta_h > 0.0 && spec.beta_h < spec.f) {
        return Err(Error::CalibrationImpossible {
            beta_h: spec.beta_h,
            f: spec.f,
        });
    }
    let a = amplification(spec.gamma, spec.tau);
    let theta = spec.q_h * (-(spec.f / spec.beta_h - 1.0).ln() / spec.s).exp();
    let kappa = (a - 1.0) * spec.beta_h;
    ModelParams::new(kappa, spec.gamma, spec.tau, theta, spec.f, spec.s)
}

/// Trivial and non-trivial steady states. The non-trivial state is reported
/// only when `kappa < f (A - 1)` holds strictly.
pub fn steady_state(p: &ModelParams) -> SteadyStates {
    let radicand = p.f * (p.amplification() - 1.0) / p.kappa - 1.0;
    let nontrivial = if radicand > 0.0 {
        Some(p.theta * (radicand.ln() / p.s).exp())
    } else {
        None
    };
    SteadyStates {
        trivial: 0.0,
        nontrivial,
    }
}

pub fn existence_bounds(p: &ModelParams) -> ExistenceBounds {
    let kappa_max = p.f * (p.amplification() - 1.0);
    let tau_max = if p.gamma == 0.0 {
        f64::INFINITY
    } else {
        (2.0 * p.f / (p.kappa + p.f)).ln() / p.gamma
    };
    ExistenceBounds { kappa_max, tau_max }
}

pub fn h_and_g(q: f64, p: &ModelParams) -> Result<HG> {
    check_concentration(q)?;
    Ok(HG {
        h: p.h(q),
        h_prime: p.h_prime(q),
        g: p.growth(q),
        g_prime: p.growth_prime(q),
    })
}

pub fn nondimensionalize(p: &ModelParams) -> (NondimParams, Scaling) {
    (
        NondimParams {
            f_hat: p.tau * p.f,
            kappa_hat: p.kappa / p.f,
            s: p.s,
            a_hat: p.amplification(),
        },
        Scaling {
            time: p.tau,
            concentration: p.theta,
        },
    )
}

/// Right-hand side of the delay equation.
pub fn rhs(q_now: f64, q_delayed: f64, p: &ModelParams) -> Result<f64> {
    check_concentration(q_now)?;
    check_concentration(q_delayed)?;
    Ok(p.rhs_clamped(q_now, q_delayed))
}

/// Bisection for a sign change of `g` on `[lo, hi]`.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= tol || mid == lo || mid == hi {
            return mid;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Location of the maximum of `G` on `(0, Q*)`, where `h'(Q) = kappa / (A - 1)`.
pub fn growth_argmax(p: &ModelParams) -> Option<f64> {
    let q_star = p.q_star()?;
    let q_h = h_prime_zero(p).unwrap_or(q_star).min(q_star);
    if p.growth_prime(0.0) <= 0.0 {
        return None;
    }
    Some(bisect(|q| p.growth_prime(q), 0.0, q_h, 1e-15))
}

/// `Q_h`, the zero of `h'`, equal to `theta (s-1)^(-1/s)`; absent for `s <= 1`.
pub fn h_prime_zero(p: &ModelParams) -> Option<f64> {
    (p.s > 1.0).then(|| p.theta * (-(p.s - 1.0).ln() / p.s).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn sig(x: f64, digits: i32) -> f64 {
        let mag = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
        (x * mag).round() / mag
    }

    #[test]
    fn beta_values() {
        let p = ModelParams::table1();
        assert_eq!(beta(0.0, &p).unwrap(), 8.0);
        assert!((beta(p.theta, &p).unwrap() - 4.0).abs() < 1e-14);
        assert!((beta(1.1, &p).unwrap() - 0.043).abs() < 1e-14);
        assert!(beta(-1e-3, &p).is_err());
    }

    #[test]
    fn amplification_values() {
        assert_eq!(amplification(0.0, 7.3), 2.0);
        assert_eq!(sig(amplification(0.1, 2.8), 4), 1.512);
        assert!((amplification(std::f64::consts::LN_2, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn calibration_matches_printed_values() {
        let p = ModelParams::table1();
        assert_eq!(sig(p.theta, 4), 0.08086);
        assert_eq!(sig(p.kappa, 4), 0.022);
        let q = steady_state(&p).nontrivial.unwrap();
        assert!(rel(q, 1.1) < 1e-12);
    }

    #[test]
    fn half_effect_calibration() {
        let spec = HomeostasisSpec {
            beta_h: 4.0,
            ..HomeostasisSpec::table1()
        };
        let p = derive_homeostasis(&spec).unwrap();
        assert!(rel(p.theta, 1.1) < 1e-14);
    }

    #[test]
    fn calibration_rejects_saturated_entry() {
        let spec = HomeostasisSpec {
            beta_h: 8.0,
            ..HomeostasisSpec::table1()
        };
        assert!(matches!(
            derive_homeostasis(&spec),
            Err(Error::CalibrationImpossible { .. })
        ));
    }

    #[test]
    fn steady_state_boundary_and_canard_value() {
        let p = ModelParams::table1();
        let kmax = existence_bounds(&p).kappa_max;
        assert!(steady_state(&p.with(Param::Kappa, kmax)).nontrivial.is_none());
        let q = steady_state(&p.with(Param::Gamma, 0.2453692)).nontrivial.unwrap();
        assert_eq!(sig(q, 6), 0.0896868);
    }

    #[test]
    fn bounds() {
        let p = ModelParams::table1();
        let b = existence_bounds(&p);
        assert_eq!(sig(b.kappa_max, 4), 4.093);
        assert_eq!(sig(b.tau_max, 6), 6.90401);
        assert_eq!(existence_bounds(&p.with(Param::Kappa, p.f)).tau_max, 0.0);
    }

    #[test]
    fn h_and_g_landmarks() {
        let p = ModelParams::table1();
        let q = p.q_star().unwrap();
        let v = h_and_g(q, &p).unwrap();
        assert!(v.g.abs() < 1e-15);
        assert_eq!(h_and_g(0.0, &p).unwrap().g, 0.0);
        let c = p.with(Param::Gamma, 0.2453692);
        assert_eq!(sig(growth_argmax(&c).unwrap(), 5), 0.042263);
        let qh = h_prime_zero(&c).unwrap();
        assert!(rel(qh, c.theta) < 1e-15);
        assert!(c.h_prime(qh).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = ModelParams::table1().with(Param::S, 2.7);
        for &q in &[0.01, 0.05, 0.08, 0.2, 1.3] {
            let d = 1e-6 * q;
            let fd1 = (p.h(q + d) - p.h(q - d)) / (2.0 * d);
            let fd2 = (p.h_prime(q + d) - p.h_prime(q - d)) / (2.0 * d);
            assert!((fd1 - p.h_prime(q)).abs() < 1e-7 * (1.0 + fd1.abs()), "h' at {q}");
            assert!((fd2 - p.h_second(q)).abs() < 1e-5 * (1.0 + fd2.abs()), "h'' at {q}");
        }
    }

    #[test]
    fn nondimensional_values() {
        let p = ModelParams::table1();
        let (n, sc) = nondimensionalize(&p);
        // 2.8 * 8 and 0.021997.../8 by hand
        assert!((n.f_hat - 22.4).abs() < 1e-12);
        assert_eq!(sig(n.kappa_hat, 3), 0.00275);
        assert_eq!(sc.time, 2.8);
        let unit = ModelParams { tau: 1.0, f: 1.0, ..p };
        assert_eq!(nondimensionalize(&unit).0.f_hat, 1.0);
    }

    #[test]
    fn rhs_equilibria_and_inflow() {
        let p = ModelParams::table1();
        let q = p.q_star().unwrap();
        assert!(rhs(q, q, &p).unwrap().abs() < 1e-15);
        assert_eq!(rhs(0.0, 0.0, &p).unwrap(), 0.0);
        assert!(rhs(0.0, q, &p).unwrap() > 0.0);
    }

    #[test]
    fn json_keys_are_exact() {
        let p = ModelParams::table1();
        let v: serde_json::Value = serde_json::to_value(p).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["f", "gamma", "kappa", "s", "tau", "theta"]);
        let h: serde_json::Value = serde_json::to_value(HomeostasisSpec::table1()).unwrap();
        assert!(h.get("Q_h").is_some() && h.get("beta_h").is_some());
        assert!(serde_json::from_str::<ModelParams>(
            r#"{"kappa":1,"gamma":1,"tau":1,"theta":1,"f":1,"s":1,"extra":2}"#
        )
        .is_err());
    }
}
