//! Real roots through Lambert W, complex roots through grid-seeded Newton
//! iteration checked against an argument-principle count.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lambert::{lambert_w, w0_from_ln, Branch};
use super::{CharRoot, LinearizationCoeffs, RootKind, ROOT_RESIDUAL_TOL};
use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    fn edge_distance(&self, z: Complex64) -> f64 {
        let mut d = f64::INFINITY;
        if z.im >= self.im_min && z.im <= self.im_max {
            d = d.min((z.re - self.re_min).abs()).min((z.re - self.re_max).abs());
        }
        if z.re >= self.re_min && z.re <= self.re_max {
            d = d.min((z.im - self.im_min).abs()).min((z.im - self.im_max).abs());
        }
        d
    }
}

/// Result of a complex-root search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSearch {
    /// Pairs with `Re >= re_min` and `0 < Im <= im_max`, rightmost first.
    pub roots: Vec<CharRoot>,
    /// Rectangle (symmetric about the real axis) used for the winding count.
    pub count_rect: Rect,
    /// Zeros of `p` inside `count_rect` according to the argument principle.
    pub winding: i64,
    /// Zeros inside `count_rect` accounted for by found roots (real roots
    /// counted once, pairs twice).
    pub accounted: i64,
    pub complete: bool,
    pub warnings: Vec<String>,
}

/// Newton iteration on `p`. Returns `None` if the iteration does not settle
/// on a root meeting the residual bound.
pub fn newton_polish(c: &LinearizationCoeffs, start: Complex64, max_iter: usize) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..max_iter {
        let f = c.eval(z);
        let df = c.eval_derivative(z);
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    (c.residual(z) < ROOT_RESIDUAL_TOL).then_some(z)
}

fn make_root(c: &LinearizationCoeffs, lambda: Complex64, kind: RootKind) -> CharRoot {
    CharRoot {
        lambda,
        residual: c.residual(lambda),
        kind,
    }
}

/// Real characteristic values, `lambda = a + W(b tau exp(-a tau)) / tau`,
/// largest first.
pub fn real_roots(c: &LinearizationCoeffs) -> Vec<CharRoot> {
    let (a, b, tau) = (c.a, c.b, c.tau);
    if b == 0.0 {
        return vec![make_root(c, Complex64::new(a, 0.0), RootKind::Real)];
    }
    let mut ws = Vec::with_capacity(2);
    if b > 0.0 {
        let ln_x = (b * tau).ln() - a * tau;
        let w = if ln_x > 1.0 {
            w0_from_ln(ln_x)
        } else {
            lambert_w(Branch::Principal, ln_x.exp()).expect("positive argument")
        };
        ws.push(w);
    } else {
        let x = b * tau * (-a * tau).exp();
        let threshold = -1.0 / E;
        if x >= threshold * (1.0 + 4.0 * f64::EPSILON) {
            if let Ok(w) = lambert_w(Branch::Principal, x) {
                ws.push(w);
            }
            if x > threshold {
                if let Ok(w) = lambert_w(Branch::Lower, x) {
                    if w != -1.0 {
                        ws.push(w);
                    }
                }
            }
        }
    }
    let mut roots: Vec<CharRoot> = ws
        .into_iter()
        .map(|w| {
            let mut lam = Complex64::new(a + w / tau, 0.0);
            // polish unless we sit on the double root, where Newton stalls
            if c.eval_derivative(lam).norm() > 1e-6 {
                if let Some(z) = newton_polish(c, lam, 8) {
                    lam = Complex64::new(z.re, 0.0);
                }
            }
            make_root(c, lam, RootKind::Real)
        })
        .collect();
    roots.sort_by(|x, y| y.lambda.re.total_cmp(&x.lambda.re));
    roots
}

fn arg_increment(
    c: &LinearizationCoeffs,
    z1: Complex64,
    p1: Complex64,
    z2: Complex64,
    p2: Complex64,
    depth: u32,
) -> Result<f64> {
    let d = (p2 / p1).arg();
    if d.abs() <= PI / 8.0 || depth == 0 {
        return Ok(d);
    }
    let zm = 0.5 * (z1 + z2);
    let pm = c.eval(zm);
    if pm.norm() < 1e-300 {
        return Err(Error::Numerical(format!("characteristic function vanishes on contour at {zm}")));
    }
    Ok(arg_increment(c, z1, p1, zm, pm, depth - 1)? + arg_increment(c, zm, pm, z2, p2, depth - 1)?)
}

/// Number of zeros of `p` inside `rect`, from the total change of `arg p`
/// around its boundary.
pub fn winding_count(c: &LinearizationCoeffs, rect: &Rect) -> Result<i64> {
    let corners = [
        Complex64::new(rect.re_min, rect.im_min),
        Complex64::new(rect.re_max, rect.im_min),
        Complex64::new(rect.re_max, rect.im_max),
        Complex64::new(rect.re_min, rect.im_max),
    ];
    let pitch = (0.05f64).min(PI / (8.0 * c.tau));
    let mut total = 0.0;
    for k in 0..4 {
        let (za, zb) = (corners[k], corners[(k + 1) % 4]);
        let n = ((zb - za).norm() / pitch).ceil().max(1.0) as usize;
        let mut z_prev = za;
        let mut p_prev = c.eval(za);
        for j in 1..=n {
            let z = za + (zb - za) * (j as f64 / n as f64);
            let pz = c.eval(z);
            if pz.norm() < 1e-13 * (1.0 + z.norm()) || p_prev.norm() < 1e-13 * (1.0 + z_prev.norm()) {
                return Err(Error::Numerical(format!("root on the counting contour near {z}")));
            }
            total += arg_increment(c, z_prev, p_prev, z, pz, 40)?;
            z_prev = z;
            p_prev = pz;
        }
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.1 {
        return Err(Error::Numerical(format!("non-integer winding number {w}")));
    }
    Ok(rounded as i64)
}

fn push_unique(list: &mut Vec<Complex64>, z: Complex64) {
    if !list
        .iter()
        .any(|w| (*w - z).norm() <= 1e-8 * z.norm().max(1.0))
    {
        list.push(z);
    }
}

/// All complex-conjugate pairs with `Re >= re_min` and `Im <= im_max`.
pub fn complex_roots(c: &LinearizationCoeffs, re_min: f64, im_max: f64) -> Result<ComplexSearch> {
    if !(im_max > 0.0) || !re_min.is_finite() {
        return Err(Error::InvalidInput(format!(
            "complex root search needs im_max > 0 and finite re_min (got {im_max}, {re_min})"
        )));
    }
    // any root with Re >= 0 satisfies |lambda - a| <= |b|
    let re_max = (c.a + c.b.abs()).max(0.0) + 1.0;
    let reals = real_roots(c);
    let mut warnings = Vec::new();

    if re_min >= re_max {
        return Ok(ComplexSearch {
            roots: Vec::new(),
            count_rect: Rect {
                re_min,
                re_max,
                im_min: -im_max,
                im_max,
            },
            winding: 0,
            accounted: 0,
            complete: true,
            warnings,
        });
    }

    let base_pitch = PI / (2.0 * c.tau);
    let mut found: Vec<Complex64> = Vec::new();
    let mut last: Option<(Rect, i64, i64)> = None;

    for refinement in 0..5 {
        let pitch_im = base_pitch / f64::from(1u32 << refinement);
        let pitch_re = pitch_im.min((re_max - re_min) / 4.0);
        let n_re = ((re_max - re_min) / pitch_re).ceil() as usize + 1;
        let n_im = ((im_max + pitch_im) / pitch_im).ceil() as usize + 1;
        let mut misses = 0usize;
        for i in 0..=n_re {
            let re = re_min - 0.5 * pitch_re + i as f64 * pitch_re;
            for j in 0..=n_im {
                let im = 0.25 * pitch_im + j as f64 * pitch_im;
                match newton_polish(c, Complex64::new(re, im), 80) {
                    Some(z) if z.im.abs() > 1e-9 * z.norm().max(1.0) => {
                        push_unique(&mut found, Complex64::new(z.re, z.im.abs()));
                    }
                    Some(_) => {}
                    None => misses += 1,
                }
            }
        }
        if misses > 0 && refinement > 0 {
            warnings.push(format!(
                "{misses} Newton seeds did not converge at refinement level {refinement}"
            ));
        }

        // nudge the counting contour away from any known root
        let mut rect = Rect {
            re_min,
            re_max,
            im_min: -im_max,
            im_max,
        };
        let all_points: Vec<Complex64> = found
            .iter()
            .flat_map(|z| [*z, z.conj()])
            .chain(reals.iter().map(|r| r.lambda))
            .collect();
        let mut winding = None;
        for attempt in 0..20 {
            let clear = all_points
                .iter()
                .all(|z| rect.edge_distance(*z) > 1e-6 * z.norm().max(1.0));
            if clear {
                match winding_count(c, &rect) {
                    Ok(w) => {
                        winding = Some(w);
                        break;
                    }
                    Err(_) if attempt < 19 => {}
                    Err(e) => return Err(e),
                }
            }
            let bump = 1e-3 * (attempt as f64 + 1.0);
            rect.im_max = im_max * (1.0 + bump);
            rect.im_min = -rect.im_max;
            rect.re_min = re_min - bump * (1.0 + re_min.abs());
        }
        let winding = winding.ok_or_else(|| Error::Numerical("could not place counting contour".into()))?;
        let accounted = reals.iter().filter(|r| rect.contains(r.lambda)).count() as i64
            + 2 * found.iter().filter(|z| rect.contains(**z)).count() as i64;
        last = Some((rect, winding, accounted));
        if winding == accounted {
            break;
        }
    }

    let (count_rect, winding, accounted) = last.expect("at least one refinement");
    let complete = winding == accounted;
    if !complete {
        warnings.push(format!(
            "incomplete coverage: argument principle counts {winding} zeros, {accounted} accounted for"
        ));
    }
    let mut roots: Vec<CharRoot> = found
        .into_iter()
        .filter(|z| z.re >= re_min && z.im <= im_max)
        .map(|z| make_root(c, z, RootKind::ComplexPair))
        .collect();
    roots.sort_by(|x, y| y.lambda.re.total_cmp(&x.lambda.re));
    Ok(ComplexSearch {
        roots,
        count_rect,
        winding,
        accounted,
        complete,
        warnings,
    })
}
