//! Dormand-Prince 5(4) with the order-4 continuous extension.

use super::events::detect_events;
use super::history::HistoryFunction;
use super::trajectory::{Segment, Trajectory};
use super::{IntegrateOptions, ScalarDde};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Multiples of the delay kept as step boundaries by default. After this
/// many the solution is smooth beyond the order of the pair.
pub const BREAKPOINT_ORDER: usize = 6;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate the model from `history` over `[0, t_end]`.
pub fn integrate(p: &ModelParams, history: HistoryFunction, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    p.validate()?;
    integrate_model(p, history, t_end, opts)
}

/// Integrate any scalar constant-delay equation over `[0, t_end]`.
pub fn integrate_model<M: ScalarDde>(
    model: &M,
    history: HistoryFunction,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let tau = model.delay();
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive and finite, got {t_end}")));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    history.validate(tau)?;

    let mut traj = Trajectory::new(tau, history, model.params());
    let mut stops: Vec<f64> = (1..=opts.breakpoints)
        .map(|k| k as f64 * tau)
        .filter(|&b| b < t_end)
        .collect();
    traj.breakpoints = stops.clone();
    stops.push(t_end);

    let h_max = opts.max_step.map_or(tau, |m| m.min(tau));
    let mut t = 0.0f64;
    let mut y = traj.history.eval(0.0, tau);
    let mut hint = 0usize;
    let mut k1 = model.rhs(y, traj.value_hinted(-tau, &mut hint));
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let sc = opts.abs_tol + opts.rel_tol * y.abs();
        let (d0, d1) = (y.abs() / sc, k1.abs() / sc);
        if d0 < 1e-5 || d1 < 1e-5 {
            1e-3 * tau
        } else {
            0.01 * d0 / d1
        }
    });
    h = h.clamp(1e-6 * tau, h_max);
    let mut rejected_last = false;
    let mut stop_idx = 0;

    while t < t_end {
        let next_stop = stops[stop_idx];
        let mut step = h.min(h_max);
        let mut hits_stop = false;
        if t + step >= next_stop - 1e-12 * next_stop.max(1.0) {
            step = next_stop - t;
            hits_stop = true;
        }
        if step < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h: step });
        }

        let lag = t - tau;
        let mut delayed = |c: f64| traj.value_hinted(lag + c * step, &mut hint);
        let z2 = delayed(C2);
        let z3 = delayed(C3);
        let z4 = delayed(C4);
        let z5 = delayed(C5);
        let z6 = delayed(1.0);

        let k2 = model.rhs(y + step * A21 * k1, z2);
        let k3 = model.rhs(y + step * (A31 * k1 + A32 * k2), z3);
        let k4 = model.rhs(y + step * (A41 * k1 + A42 * k2 + A43 * k3), z4);
        let k5 = model.rhs(y + step * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), z5);
        let k6 = model.rhs(
            y + step * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            z6,
        );
        let y1 = y + step * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = model.rhs(y1, z6);

        let err_abs = step * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let sc = opts.abs_tol + opts.rel_tol * y.abs().max(y1.abs());
        let err = if y1.is_finite() { err_abs.abs() / sc } else { f64::INFINITY };

        if err <= 1.0 {
            let ydiff = y1 - y;
            let bspl = step * k1 - ydiff;
            let r4 = ydiff - step * k7 - bspl;
            let r5 = step * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
            traj.segments.push(Segment {
                t0: t,
                h: step,
                c: [y, ydiff + bspl, -bspl + r4 + r5, -r4 - 2.0 * r5, r5],
            });
            t = if hits_stop { next_stop } else { t + step };
            if hits_stop {
                stop_idx += 1;
            }
            y = y1;
            k1 = k7;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let fac = if rejected_last { fac.min(1.0) } else { fac };
            // keep the proposal from collapsing after a short step onto a stop
            h = if hits_stop { h.max(step * fac) } else { step * fac };
            rejected_last = false;
        } else {
            traj.rejected_steps += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.1 };
            h = step * fac;
            rejected_last = true;
        }
    }

    if let Some(spec) = &opts.events {
        traj.events = detect_events(&traj, spec);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Param;

    #[test]
    fn steady_state_is_preserved() {
        let p = ModelParams::table1();
        let q = p.q_star().unwrap();
        let traj = integrate(&p, HistoryFunction::constant(q), 500.0, &IntegrateOptions::default()).unwrap();
        let worst = traj
            .sample(0.0, 500.0, 0.37)
            .unwrap()
            .into_iter()
            .map(|(_, v)| (v - q).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert!((traj.t_end() - 500.0).abs() < 1e-12);
    }

    #[test]
    fn homeostasis_attracts() {
        let p = ModelParams::table1();
        let traj = integrate(&p, HistoryFunction::constant(1.32), 4000.0, &IntegrateOptions::default()).unwrap();
        assert!((traj.evaluate(4000.0).unwrap() - 1.1).abs() < 1e-3);
    }

    #[test]
    fn linear_delay_equation_against_method_of_steps() {
        // x' = -x(t - 1), x = 1 on [-1, 0]: on [0, 1] x = 1 - t, on [1, 2]
        // x = 1 - t + (t - 1)^2 / 2
        struct Lin;
        impl ScalarDde for Lin {
            fn delay(&self) -> f64 {
                1.0
            }
            fn rhs(&self, _now: f64, delayed: f64) -> f64 {
                -delayed
            }
        }
        let traj = integrate_model(&Lin, HistoryFunction::constant(1.0), 2.0, &IntegrateOptions::default()).unwrap();
        for &t in &[0.3, 0.99, 1.0, 1.4, 2.0] {
            let exact = if t <= 1.0 { 1.0 - t } else { 1.0 - t + 0.5 * (t - 1.0) * (t - 1.0) };
            assert!((traj.evaluate(t).unwrap() - exact).abs() < 1e-12, "t={t}");
        }
        assert_eq!(traj.breakpoints, vec![1.0]);
    }

    #[test]
    fn continuity_at_time_zero_and_mesh_points() {
        let p = ModelParams::table1().with(Param::Kappa, 0.3);
        let h = HistoryFunction::constant(0.5);
        let traj = integrate(&p, h, 50.0, &IntegrateOptions::default()).unwrap();
        assert_eq!(traj.evaluate(0.0).unwrap(), 0.5);
        for w in traj.segments.windows(2) {
            assert!((w[0].value_at(1.0) - w[1].c[0]).abs() < 1e-14);
        }
        assert!(traj.evaluate(51.0).is_err());
        assert!(traj.evaluate(-2.8).is_ok());
    }

    #[test]
    fn rejects_invalid_requests() {
        let p = ModelParams::table1();
        assert!(integrate(&p, HistoryFunction::constant(1.0), -1.0, &IntegrateOptions::default()).is_err());
        assert!(integrate(&p, HistoryFunction::constant(-1.0), 1.0, &IntegrateOptions::default()).is_err());
    }
}
