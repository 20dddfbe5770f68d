use serde::{Deserialize, Serialize};

use crate::dde::{detect_events, Direction, EventKind, EventSpec, Trajectory};
use crate::error::{Error, Result};

/// One return to the section `Q(t - alpha) = c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareCrossing {
    /// Right end of the delay window; the section level is met at `t - alpha`.
    pub t: f64,
    /// `(Q(t - tau), Q(t - tau/2))`
    pub projection: (f64, f64),
    /// Solution on `[t - tau, t]` at `segment_points` equally spaced times.
    pub segment: Vec<f64>,
}

/// Crossings of `Q(t - alpha) = c` in the given direction (`Up` or `Down`)
/// with `t` in `[from, t_end]`.
pub fn poincare_section(
    traj: &Trajectory,
    alpha: f64,
    c: f64,
    direction: Direction,
    from: f64,
    segment_points: usize,
) -> Result<Vec<PoincareCrossing>> {
    let tau = traj.tau;
    if !(0.0..=tau).contains(&alpha) {
        return Err(Error::InvalidInput(format!("section offset {alpha} outside [0, {tau}]")));
    }
    if !matches!(direction, Direction::Up | Direction::Down) {
        return Err(Error::InvalidInput("section direction must be up or down".into()));
    }
    if traj.t_end() <= tau {
        return Err(Error::InvalidInput("trajectory shorter than one delay".into()));
    }
    let spec = EventSpec {
        extrema: false,
        levels: vec![c],
        from: (from - alpha).max(0.0),
    };
    let mut out = Vec::new();
    for ev in detect_events(traj, &spec) {
        if ev.kind != EventKind::Level || ev.direction != direction {
            continue;
        }
        let t = ev.t + alpha;
        if t > traj.t_end() || t < from {
            continue;
        }
        let segment = window(traj, t, segment_points);
        out.push(PoincareCrossing {
            t,
            projection: (traj.value_unchecked(t - tau), traj.value_unchecked(t - 0.5 * tau)),
            segment,
        });
    }
    Ok(out)
}

pub(crate) fn window(traj: &Trajectory, t: f64, points: usize) -> Vec<f64> {
    let tau = traj.tau;
    let n = points.max(2);
    (0..n)
        .map(|i| traj.value_unchecked(t - tau + tau * i as f64 / (n - 1) as f64))
        .collect()
}
