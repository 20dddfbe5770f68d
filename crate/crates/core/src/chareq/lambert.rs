//! Real branches of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;

/// Which real branch of `W` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Principal branch, `W >= -1`, defined for `x >= -1/e`.
    Principal,
    /// Lower branch, `W <= -1`, defined for `-1/e <= x < 0`.
    Lower,
}

impl Branch {
    pub fn index(self) -> i32 {
        match self {
            Branch::Principal => 0,
            Branch::Lower => -1,
        }
    }
}

impl TryFrom<i32> for Branch {
    type Error = Error;

    fn try_from(k: i32) -> Result<Self> {
        match k {
            0 => Ok(Branch::Principal),
            -1 => Ok(Branch::Lower),
            _ => Err(Error::InvalidInput(format!(
                "Lambert W branch must be 0 or -1, got {k}"
            ))),
        }
    }
}

/// Solve `w exp(w) = x` on the requested branch.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    let domain_err = || Error::LambertDomain {
        branch: branch.index(),
        x,
    };
    if x.is_nan() {
        return Err(domain_err());
    }
    // allow a couple of ulps of slack below the branch point
    let x = if x < BRANCH_POINT && x > BRANCH_POINT * (1.0 + 4.0 * f64::EPSILON) {
        BRANCH_POINT
    } else {
        x
    };
    match branch {
        Branch::Principal => {
            if x < BRANCH_POINT {
                return Err(domain_err());
            }
            if x == 0.0 {
                return Ok(0.0);
            }
            if x.is_infinite() {
                return Ok(f64::INFINITY);
            }
            if x > E {
                return Ok(w0_from_ln(x.ln()));
            }
            Ok(halley(x, principal_seed(x)))
        }
        Branch::Lower => {
            if !(BRANCH_POINT..0.0).contains(&x) {
                return Err(domain_err());
            }
            Ok(halley(x, lower_seed(x)))
        }
    }
}

/// `W0(x)` for `x > e`, given `ln x`. Works for arguments whose `x`
/// overflows a double.
pub fn w0_from_ln(ln_x: f64) -> f64 {
    // w + ln w = ln x, with w > 1
    let l2 = ln_x.ln();
    let mut w = ln_x - l2 + l2 / ln_x;
    if !(w > 0.0) {
        w = 1.0;
    }
    for _ in 0..50 {
        let g = w + w.ln() - ln_x;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    w
}

fn branch_point_series(p: f64) -> f64 {
    // expansion of W about x = -1/e in p = +-sqrt(2(e x + 1))
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p - 43.0 / 540.0 * p.powi(4)
}

fn principal_seed(x: f64) -> f64 {
    if x < -0.32 {
        branch_point_series((2.0 * (E * x + 1.0)).max(0.0).sqrt())
    } else {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    }
}

fn lower_seed(x: f64) -> f64 {
    if x < -0.25 {
        branch_point_series(-(2.0 * (E * x + 1.0)).max(0.0).sqrt())
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}

fn halley(x: f64, mut w: f64) -> f64 {
    if x == BRANCH_POINT {
        return -1.0;
    }
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-9 {
            // derivative vanishes at the branch point; the series seed is already exact there
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}
