//! Slow-manifold toolkit near the canard explosion: the singular form of the
//! model, the `Q' = 0` nullcline, two approximations of the slow manifold in
//! the delay embedding, and linear solutions about a reference concentration.

use std::f64::consts::{E, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chareq::{complex_roots, lambert_w, lambertw_coalescence, newton_polish, w0_from_ln, Branch, LinearizationCoeffs};
use crate::dde::ScalarDde;
use crate::error::{Error, Result};
use crate::model::{bisect, growth_argmax, h_prime_zero, ModelParams};

/// `epsilon = A - 1` and `C = epsilon f / kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularForm {
    pub epsilon: f64,
    pub c: f64,
}

impl SingularForm {
    /// `theta (C - 1)^(1/s)`, absent when `C <= 1`.
    pub fn q_star(&self, p: &ModelParams) -> Option<f64> {
        (self.c > 1.0).then(|| p.theta * (self.c - 1.0).powf(1.0 / p.s))
    }
}

pub fn singular_params(p: &ModelParams) -> Result<SingularForm> {
    let epsilon = p.amplification() - 1.0;
    if !(epsilon > 0.0) {
        return Err(Error::Regime(format!(
            "epsilon = A - 1 = {epsilon:e} must be positive (gamma tau < ln 2)"
        )));
    }
    Ok(SingularForm {
        epsilon,
        c: epsilon * p.f / p.kappa,
    })
}

/// Concentration at which the line of equilibria of the `epsilon = 0` limit
/// changes stability, i.e. `h'(Q) = -1/tau`. Of the two roots the one
/// closest to `Q*` is returned (the smaller one when `Q*` is absent).
pub fn critical_manifold_stability_switch(p: &ModelParams) -> Option<f64> {
    let f_hat = p.f * p.tau;
    // u^2 + (2 - (s-1) f_hat) u + 1 + f_hat = 0 with u = (Q/theta)^s
    let roots: Vec<f64> = solve_quadratic(1.0, 2.0 - (p.s - 1.0) * f_hat, 1.0 + f_hat)
        .into_iter()
        .filter(|&u| u > 0.0)
        .map(|u| p.theta * u.powf(1.0 / p.s))
        .collect();
    match p.q_star() {
        Some(q) => roots.into_iter().min_by(|a, b| (a - q).abs().total_cmp(&(b - q).abs())),
        None => roots.into_iter().min_by(f64::total_cmp),
    }
}

/// Which coordinate of the nullcline is prescribed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Given {
    QNow,
    QDelayed,
}

/// `v / (1 + (v/theta)^s)`, i.e. `h(v) / f`.
fn hill_h(p: &ModelParams, v: f64) -> f64 {
    p.h(v) / p.f
}

/// Residual of the nullcline `0 = -(kappa/f) x - g(x) + A g(y)`.
fn nullcline_residual(p: &ModelParams, x: f64, y: f64) -> f64 {
    -(p.kappa / p.f) * x - hill_h(p, x) + p.amplification() * hill_h(p, y)
}

/// Non-negative companion values on the nullcline `Q'(t) = 0` when one of
/// `Q(t)`, `Q(t - tau)` is fixed, in increasing order.
pub fn nullcline(p: &ModelParams, given: Given, value: f64) -> Vec<f64> {
    if !(value >= 0.0) || !value.is_finite() {
        return Vec::new();
    }
    let a = p.amplification();
    let k = p.kappa / p.f;
    let th2 = p.theta * p.theta;
    let mut roots = match given {
        Given::QNow => {
            let r = k * value + hill_h(p, value);
            if r == 0.0 {
                vec![0.0]
            } else if p.s == 2.0 {
                solve_quadratic(r, -a * th2, r * th2)
            } else {
                scan_all(|y| a * hill_h(p, y) - r, 0.0, search_limit_delayed(p, r))
            }
        }
        Given::QDelayed => {
            let l = a * hill_h(p, value);
            if p.s == 2.0 {
                solve_cubic(k, -l, th2 * (1.0 + k), -l * th2)
            } else {
                let hi = if k > 0.0 { l / k + p.theta } else { 1e4 * p.theta };
                scan_all(|x| k * x + hill_h(p, x) - l, 0.0, hi)
            }
        }
    };
    roots.retain(|&r| r >= -1e-14);
    for r in roots.iter_mut() {
        *r = polish_companion(p, given, value, r.max(0.0));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-12));
    roots
}

fn search_limit_delayed(p: &ModelParams, r: f64) -> f64 {
    // A g(y) <= A theta^s y^(1-s) bounds the largest root for s > 1
    if p.s > 1.0 {
        let a = p.amplification();
        2.0 * (a * p.theta.powf(p.s) / r).powf(1.0 / (p.s - 1.0)) + p.theta
    } else {
        1e4 * p.theta
    }
}

/// Newton on the free coordinate, keeping the start if the step misbehaves.
fn polish_companion(p: &ModelParams, given: Given, value: f64, start: f64) -> f64 {
    let res = |v: f64| match given {
        Given::QNow => nullcline_residual(p, value, v),
        Given::QDelayed => nullcline_residual(p, v, value),
    };
    let mut v = start;
    for _ in 0..8 {
        let r = res(v);
        let dv = 1e-7 * v.abs().max(p.theta * 1e-3);
        let d = (res(v + dv) - res(v - dv)) / (2.0 * dv);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = v - r / d;
        if !(next >= 0.0) || res(next).abs() > r.abs() {
            break;
        }
        let done = (next - v).abs() <= 1e-13 * v.abs().max(1e-300);
        v = next;
        if done {
            break;
        }
    }
    v
}

fn scan_all<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> Vec<f64> {
    const N: usize = 4000;
    let mut out = Vec::new();
    if g(lo) == 0.0 {
        out.push(lo);
    }
    let mut x0 = lo;
    let mut g0 = g(lo);
    for i in 1..=N {
        // quadratic spacing resolves the region near zero
        let s = i as f64 / N as f64;
        let x1 = lo + (hi - lo) * s * s;
        let g1 = g(x1);
        if g1 == 0.0 {
            out.push(x1);
        } else if g0 != 0.0 && g0.signum() != g1.signum() {
            out.push(bisect(&g, x0, x1, 1e-15 * x1.max(1e-300)));
        }
        x0 = x1;
        g0 = g1;
    }
    out
}

/// Real roots of `a x^2 + b x + c`.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = vec![q / a];
    if q != 0.0 {
        r.push(c / q);
    } else {
        r.push(-r[0]);
    }
    r.sort_by(f64::total_cmp);
    r
}

/// Real roots of `a x^3 + b x^2 + c x + d` by the trigonometric or Cardano
/// form, each polished by Newton.
pub fn solve_cubic(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let scale = b.abs().max(c.abs()).max(d.abs());
    if a.abs() <= 1e-15 * scale {
        return solve_quadratic(b, c, d);
    }
    let (bn, cn, dn) = (b / a, c / a, d / a);
    let shift = bn / 3.0;
    let pp = cn - bn * bn / 3.0;
    let qq = 2.0 * bn.powi(3) / 27.0 - bn * cn / 3.0 + dn;
    let disc = (qq / 2.0).powi(2) + (pp / 3.0).powi(3);
    let mut roots = if disc > 0.0 {
        let sq = disc.sqrt();
        vec![(-qq / 2.0 + sq).cbrt() + (-qq / 2.0 - sq).cbrt() - shift]
    } else if pp == 0.0 {
        vec![-shift]
    } else {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3).map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift).collect()
    };
    let f = |x: f64| ((a * x + b) * x + c) * x + d;
    let df = |x: f64| (3.0 * a * x + 2.0 * b) * x + c;
    for r in roots.iter_mut() {
        for _ in 0..6 {
            let dr = df(*r);
            if dr == 0.0 {
                break;
            }
            let step = f(*r) / dr;
            *r -= step;
            if step.abs() <= 1e-13 * r.abs().max(1e-300) {
                break;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Branch of the nullcline relative to the maximum of `h` at `Q_h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullclineBranch {
    Lower,
    Upper,
    Single,
}

impl NullclineBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            NullclineBranch::Lower => "lower",
            NullclineBranch::Upper => "upper",
            NullclineBranch::Single => "single",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullclinePoint {
    pub q_now: f64,
    pub q_delayed: f64,
    pub branch: NullclineBranch,
}

/// Nullcline points over a grid of `Q(t)` values, labelled by the side of
/// `Q_h` on which `Q(t - tau)` lies.
pub fn nullcline_curve(p: &ModelParams, q_now: &[f64]) -> Vec<NullclinePoint> {
    let q_h = h_prime_zero(p);
    let mut out = Vec::new();
    for &x in q_now {
        for y in nullcline(p, Given::QNow, x) {
            let branch = match q_h {
                Some(qh) if y < qh => NullclineBranch::Lower,
                Some(_) => NullclineBranch::Upper,
                None => NullclineBranch::Single,
            };
            out.push(NullclinePoint {
                q_now: x,
                q_delayed: y,
                branch,
            });
        }
    }
    out
}

/// Slow manifold from `h(Q(t - tau)) ~ h(Q) - tau Q' h'(Q)`:
/// `Q_tau = ((1 + kappa tau + A tau h'(Q)) Q - tau (A-1) h(Q)) / (1 + A tau h'(Q))`.
pub fn slow_manifold_naive(q: f64, p: &ModelParams) -> Result<f64> {
    if q < 0.0 || !q.is_finite() {
        return Err(Error::NegativeConcentration(q));
    }
    let a = p.amplification();
    let den = 1.0 + a * p.tau * p.h_prime(q);
    if den.abs() < 1e-12 {
        return Err(Error::SingularDenominator { q });
    }
    Ok(((1.0 + p.kappa * p.tau + a * p.tau * p.h_prime(q)) * q - p.tau * (a - 1.0) * p.h(q)) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "below_Qf")]
    BelowQf,
    #[serde(rename = "Qf_to_Qh")]
    QfToQh,
    #[serde(rename = "gap")]
    Gap,
    #[serde(rename = "above_Qhp")]
    AboveQhp,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::BelowQf => "below_Qf",
            Regime::QfToQh => "Qf_to_Qh",
            Regime::Gap => "gap",
            Regime::AboveQhp => "above_Qhp",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point `(Q_r, Q_tau)` of the linearised slow manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowManifoldPoint {
    pub q_r: f64,
    /// Real characteristic value of the linearisation about `Q_r`.
    pub lambda: f64,
    /// Drift `lambda G(Q_r) / G'(Q_r)`.
    pub q_prime: f64,
    pub q_tau: f64,
    pub regime: Regime,
    pub residual: f64,
}

/// Landmark concentrations of the slow-manifold analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub epsilon: f64,
    pub c: f64,
    pub q_star: Option<f64>,
    /// Maximum of `G`.
    pub q_f: Option<f64>,
    /// Zero of `h'`.
    pub q_h: Option<f64>,
    pub stability_switch: Option<f64>,
    /// Ends of the interval without real characteristic values.
    pub q_hp_minus: Option<f64>,
    pub q_hp_plus: Option<f64>,
}

pub fn landmarks(p: &ModelParams) -> Result<Landmarks> {
    let sf = singular_params(p)?;
    let co = lambertw_coalescence(p);
    Ok(Landmarks {
        epsilon: sf.epsilon,
        c: sf.c,
        q_star: p.q_star(),
        q_f: growth_argmax(p),
        q_h: h_prime_zero(p),
        stability_switch: critical_manifold_stability_switch(p),
        q_hp_minus: co.map(|c| c.minus),
        q_hp_plus: co.map(|c| c.plus),
    })
}

/// Regime of `Q_r`; `Gap` between the two coalescence points.
pub fn regime(q_r: f64, p: &ModelParams) -> Regime {
    if let Some(co) = lambertw_coalescence(p) {
        if q_r > co.plus {
            return Regime::AboveQhp;
        }
        if q_r > co.minus {
            return Regime::Gap;
        }
    }
    match growth_argmax(p) {
        Some(qf) if q_r < qf => Regime::BelowQf,
        Some(_) => Regime::QfToQh,
        None if p.growth_prime(q_r) > 0.0 => Regime::BelowQf,
        None => Regime::QfToQh,
    }
}

/// Real root `a + W(b tau e^{-a tau}) / tau` on the requested branch.
fn lambert_root(c: &LinearizationCoeffs, branch: Branch) -> Result<f64> {
    let (a, b, tau) = (c.a, c.b, c.tau);
    if b == 0.0 {
        return Ok(a);
    }
    let x = b * tau * (-a * tau).exp();
    let w = if x.is_finite() {
        lambert_w(branch, x)?
    } else if b > 0.0 {
        w0_from_ln((b * tau).ln() - a * tau)
    } else {
        return Err(Error::LambertDomain {
            branch: branch.index(),
            x,
        });
    };
    let lam = a + w / tau;
    // one real Newton correction
    let z = newton_polish(c, Complex64::new(lam, 0.0), 20).map_or(lam, |z| z.re);
    Ok(z)
}

/// Linearise `h` about `Q_r` and return the monotone solution's real rate,
/// drift and delayed coordinate.
pub fn slow_manifold_linearized(q_r: f64, p: &ModelParams) -> Result<SlowManifoldPoint> {
    if !(q_r > 0.0) || !q_r.is_finite() {
        return Err(Error::NegativeConcentration(q_r));
    }
    let reg = regime(q_r, p);
    let c = LinearizationCoeffs::at_reference(q_r, p);
    let branch = match reg {
        Regime::Gap => {
            let co = lambertw_coalescence(p).expect("gap regime implies coalescence points");
            return Err(Error::NoRealRoot {
                q_r,
                lower: co.minus,
                upper: co.plus,
            });
        }
        Regime::AboveQhp => Branch::Lower,
        Regime::BelowQf | Regime::QfToQh => Branch::Principal,
    };
    let x = c.b * c.tau * (-c.a * c.tau).exp();
    if x < -1.0 / E {
        return Err(Error::NoRealRoot {
            q_r,
            lower: f64::NAN,
            upper: f64::NAN,
        });
    }
    let lambda = lambert_root(&c, branch)?;
    let g = p.growth(q_r);
    let gp = p.growth_prime(q_r);
    if gp == 0.0 {
        return Err(Error::SingularDenominator { q: q_r });
    }
    let q_prime = lambda * g / gp;
    Ok(SlowManifoldPoint {
        q_r,
        lambda,
        q_prime,
        q_tau: q_r - p.tau * q_prime,
        regime: reg,
        residual: c.residual(Complex64::new(lambda, 0.0)),
    })
}

/// A row of the slow-manifold table; the gap yields no values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowManifoldRow {
    pub q_r: f64,
    pub regime: Regime,
    pub point: Option<SlowManifoldPoint>,
}

/// Linearised slow manifold over a grid; points inside the gap are marked
/// and carry no values. Other failures propagate.
pub fn slow_manifold_curve(p: &ModelParams, grid: &[f64]) -> Result<Vec<SlowManifoldRow>> {
    grid.iter()
        .map(|&q| match slow_manifold_linearized(q, p) {
            Ok(pt) => Ok(SlowManifoldRow {
                q_r: q,
                regime: pt.regime,
                point: Some(pt),
            }),
            Err(Error::NoRealRoot { .. }) => Ok(SlowManifoldRow {
                q_r: q,
                regime: Regime::Gap,
                point: None,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

/// `Q' = a Q + b Q(t - tau) + c`, the model with `h` linearised about `Q_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearReferenceModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub tau: f64,
}

impl LinearReferenceModel {
    pub fn at(q_r: f64, p: &ModelParams) -> Self {
        let lc = LinearizationCoeffs::at_reference(q_r, p);
        Self {
            a: lc.a,
            b: lc.b,
            c: p.growth(q_r) - p.growth_prime(q_r) * q_r,
            tau: p.tau,
        }
    }
}

impl ScalarDde for LinearReferenceModel {
    fn delay(&self) -> f64 {
        self.tau
    }

    fn rhs(&self, now: f64, delayed: f64) -> f64 {
        self.a * now + self.b * delayed + self.c
    }
}

/// Coefficients of one homogeneous mode. Index 0 is the real root
/// (`cos_coeff` multiplies `e^{lambda t}`); index `j >= 1` is the `j`-th
/// complex pair counted from the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficient {
    pub index: usize,
    pub cos_coeff: f64,
    #[serde(default)]
    pub sin_coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedSolution {
    pub q_r: f64,
    pub lambda: f64,
    /// `G(Q_r) / G'(Q_r)`
    pub drift_ratio: f64,
    pub real_coeff: f64,
    /// `(root with Im > 0, cos coefficient, sin coefficient)`
    pub oscillatory: Vec<(Complex64, f64, f64)>,
}

impl LinearizedSolution {
    pub fn eval(&self, t: f64) -> f64 {
        let e = (self.lambda * t).exp();
        let mut q = self.q_r + (e - 1.0) * self.drift_ratio + self.real_coeff * e;
        for (z, bc, bs) in &self.oscillatory {
            q += (z.re * t).exp() * (bc * (z.im * t).cos() + bs * (z.im * t).sin());
        }
        q
    }

    /// The monotone part alone.
    pub fn monotone(&self, t: f64) -> f64 {
        self.q_r + ((self.lambda * t).exp() - 1.0) * self.drift_ratio
    }
}

/// Rightmost `count` complex pairs of the linearisation about `q_r`.
pub fn leading_pairs(q_r: f64, p: &ModelParams, count: usize) -> Result<Vec<Complex64>> {
    let c = LinearizationCoeffs::at_reference(q_r, p);
    let im_max = (2.0 * count as f64 + 4.0) * PI / p.tau;
    let mut re_min = -2.0;
    loop {
        let search = complex_roots(&c, re_min, im_max)?;
        let mut roots: Vec<Complex64> = search.roots.iter().map(|r| r.lambda).collect();
        roots.sort_by(|a, b| b.re.total_cmp(&a.re));
        if roots.len() >= count || re_min < -64.0 {
            roots.truncate(count);
            return Ok(roots);
        }
        re_min *= 2.0;
    }
}

/// Highest complex pair index computed for a linearised solution.
pub const MAX_MODES: usize = 32;

/// Monotone solution through `Q_r` plus the requested homogeneous modes.
pub fn linearized_solution(q_r: f64, p: &ModelParams, modes: &[ModeCoefficient]) -> Result<LinearizedSolution> {
    let pt = slow_manifold_linearized(q_r, p)?;
    let mut real_coeff = 0.0;
    let need = modes.iter().map(|m| m.index).max().unwrap_or(0).min(MAX_MODES);
    let pairs = if need > 0 { leading_pairs(q_r, p, need)? } else { Vec::new() };
    let mut oscillatory = Vec::new();
    for m in modes {
        if m.index == 0 {
            if m.sin_coeff != 0.0 {
                return Err(Error::InvalidInput("the real mode takes no sine coefficient".into()));
            }
            real_coeff += m.cos_coeff;
            continue;
        }
        let z = *pairs.get(m.index - 1).ok_or(Error::MissingMode {
            index: m.index,
            available: pairs.len(),
        })?;
        oscillatory.push((z, m.cos_coeff, m.sin_coeff));
    }
    Ok(LinearizedSolution {
        q_r,
        lambda: pt.lambda,
        drift_ratio: p.growth(q_r) / p.growth_prime(q_r),
        real_coeff,
        oscillatory,
    })
}
