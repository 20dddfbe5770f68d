//! Hopf points along one parameter and the coalescence of real roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lambert::{lambert_w, Branch};
use super::roots::{complex_roots, newton_polish};
use super::stability::{delay_margin, scan_roots};
use super::LinearizationCoeffs;
use crate::error::{Error, Result};
use crate::model::{bisect, h_prime_zero, ModelParams, Param};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub param: Param,
    pub value: f64,
    /// Imaginary part of the critical pair.
    pub omega: f64,
}

const SCAN_POINTS: usize = 4000;

fn coeffs_at(p: &ModelParams) -> Option<LinearizationCoeffs> {
    p.q_star().map(|q| LinearizationCoeffs::at_reference(q, p))
}

/// Follow a root from `prev` to the coefficients `c`. Falls back to a full
/// search when Newton loses the root.
fn track(c: &LinearizationCoeffs, prev: Complex64) -> Result<Complex64> {
    if let Some(z) = newton_polish(c, prev, 60) {
        if z.im > 0.0 && (z - prev).norm() < 0.25 * prev.im.abs().max(1e-3) {
            return Ok(z);
        }
    }
    let search = complex_roots(c, prev.re - 1.0, 2.0 * prev.im.abs() + 1.0)?;
    search
        .roots
        .iter()
        .map(|r| r.lambda)
        .min_by(|x, y| (*x - prev).norm().total_cmp(&(*y - prev).norm()))
        .ok_or_else(|| Error::Numerical("lost the critical pair during Hopf refinement".into()))
}

/// Parameter values in `range` at which a complex pair of the positive
/// steady state crosses the imaginary axis, sorted by value.
pub fn hopf_locus_1p(p: &ModelParams, vary: Param, range: (f64, f64)) -> Result<Vec<HopfPoint>> {
    let (lo, hi) = range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("invalid parameter range [{lo}, {hi}]")));
    }
    let margin = |v: f64| {
        let q = p.with(vary, v);
        if q.validate().is_err() {
            f64::NAN
        } else {
            delay_margin(&q)
        }
    };
    let guesses = scan_roots(margin, lo, hi, SCAN_POINTS, 1e-12);
    let step = (hi - lo) / (SCAN_POINTS + 1) as f64;

    let mut out = Vec::with_capacity(guesses.len());
    for v0 in guesses {
        let c0 = coeffs_at(&p.with(vary, v0))
            .ok_or_else(|| Error::Numerical(format!("steady state lost at {} = {v0}", vary.name())))?;
        let omega0 = (c0.b * c0.b - c0.a * c0.a).sqrt();
        let seed = Complex64::new(0.0, omega0);

        // bracket on Re(lambda) of the pair that starts at i omega0
        let re_at = |v: f64, from: Complex64| -> Result<Complex64> {
            let c = coeffs_at(&p.with(vary, v))
                .ok_or_else(|| Error::Numerical(format!("steady state lost at {} = {v}", vary.name())))?;
            track(&c, from)
        };
        let mut width = 0.25 * step;
        let (mut a, mut b, mut za, mut zb);
        loop {
            a = (v0 - width).max(lo);
            b = (v0 + width).min(hi);
            za = re_at(a, seed)?;
            zb = re_at(b, seed)?;
            if (za.re < 0.0) != (zb.re < 0.0) || width < 1e-14 {
                break;
            }
            width *= 0.5;
        }
        let mut z_mid = seed;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            z_mid = re_at(mid, z_mid)?;
            if z_mid.re == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if (z_mid.re < 0.0) == (za.re < 0.0) {
                a = mid;
                za = z_mid;
            } else {
                b = mid;
            }
            if z_mid.re.abs() < 1e-13 && (b - a) < 1e-12 * (1.0 + mid.abs()) {
                break;
            }
        }
        let value = 0.5 * (a + b);
        let z = re_at(value, z_mid)?;
        if z.re.abs() >= 1e-9 {
            return Err(Error::Numerical(format!(
                "Hopf refinement at {} = {value} left Re(lambda) = {:e}",
                vary.name(),
                z.re
            )));
        }
        out.push(HopfPoint {
            param: vary,
            value,
            omega: z.im,
        });
    }
    Ok(out)
}

/// Concentrations bounding the interval of `Q` above `Q_h` in which the
/// linearisation about `Q` has no real characteristic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coalescence {
    pub minus: f64,
    pub plus: f64,
}

/// Solve `h'(Q) tau = W_k(-exp(-1 - kappa tau) / A)` on the decreasing part of
/// `h'` (between `Q_h` and the inflection of `h`). `W_0` gives the lower
/// point, `W_-1` the upper. `None` when either solution is missing.
pub fn lambertw_coalescence(p: &ModelParams) -> Option<Coalescence> {
    let q_h = h_prime_zero(p)?;
    let q_infl = p.theta * (((p.s + 1.0) / (p.s - 1.0)).ln() / p.s).exp();
    let x = -(-1.0 - p.kappa * p.tau).exp() / p.amplification();
    let hp_min = p.h_prime(q_infl);
    let solve = |branch: Branch| -> Option<f64> {
        let target = lambert_w(branch, x).ok()? / p.tau;
        if !(target < 0.0 && target >= hp_min) {
            return None;
        }
        Some(bisect(|q| p.h_prime(q) - target, q_h, q_infl, 1e-15))
    };
    Some(Coalescence {
        minus: solve(Branch::Principal)?,
        plus: solve(Branch::Lower)?,
    })
}
