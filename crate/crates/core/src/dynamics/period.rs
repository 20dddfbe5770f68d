use serde::{Deserialize, Serialize};

use super::poincare::window;
use crate::dde::{detect_events, Direction, EventKind, EventSpec, Trajectory};
use crate::error::{Error, Result};

/// Returns needed before a missing match counts as aperiodicity.
pub const APERIODIC_MIN_RETURNS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PeriodEstimate {
    Periodic {
        period: f64,
        /// Section returns per period.
        returns_per_period: usize,
        /// Section level used.
        level: f64,
    },
    Aperiodic {
        returns: usize,
    },
    InsufficientData {
        returns: usize,
    },
}

impl PeriodEstimate {
    pub fn period(&self) -> Option<f64> {
        match self {
            PeriodEstimate::Periodic { period, .. } => Some(*period),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodOptions {
    /// Relative sup-norm tolerance for two delay windows to match.
    pub rel_tol: f64,
    /// Section level; defaults to the mid-range of the window.
    pub level: Option<f64>,
    pub samples_per_delay: usize,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            level: None,
            samples_per_delay: 64,
        }
    }
}

/// Period of the solution on `window` from upward returns to a level
/// section whose delay windows repeat.
pub fn estimate_period(traj: &Trajectory, window_span: (f64, f64), opts: &PeriodOptions) -> Result<PeriodEstimate> {
    let (t0, t1) = window_span;
    if !(t1 > t0) || t0 < 0.0 || t1 > traj.t_end() + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "period window [{t0}, {t1}] not inside [0, {}]",
            traj.t_end()
        )));
    }
    let (lo, hi) = traj.range_after(t0);
    let scale = hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE);
    if hi - lo <= 1e-9 * scale {
        // no oscillation to return to
        return Ok(PeriodEstimate::InsufficientData { returns: 0 });
    }
    let level = opts.level.unwrap_or(0.5 * (lo + hi));
    let spec = EventSpec {
        extrema: false,
        levels: vec![level],
        from: t0.max(traj.tau),
    };
    let times: Vec<f64> = detect_events(traj, &spec)
        .into_iter()
        .filter(|e| e.kind == EventKind::Level && e.direction == Direction::Up && e.t <= t1)
        .map(|e| e.t)
        .collect();
    let n = times.len();
    if n < 3 {
        return Ok(PeriodEstimate::InsufficientData { returns: n });
    }
    let windows: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| window(traj, t, opts.samples_per_delay))
        .collect();
    let matches = |i: usize, j: usize| {
        windows[i]
            .iter()
            .zip(&windows[j])
            .all(|(a, b)| (a - b).abs() <= opts.rel_tol * scale)
    };

    let mut periods = Vec::new();
    let mut counts = Vec::new();
    for i in 0..n {
        if let Some(j) = (i + 1..n).find(|&j| matches(i, j)) {
            periods.push(times[j] - times[i]);
            counts.push(j - i);
        }
    }
    if periods.is_empty() {
        return Ok(if n >= APERIODIC_MIN_RETURNS {
            PeriodEstimate::Aperiodic { returns: n }
        } else {
            PeriodEstimate::InsufficientData { returns: n }
        });
    }
    // the most frequent return count identifies the primitive period
    let mut best = counts[0];
    let mut best_hits = 0;
    for &c in &counts {
        let hits = counts.iter().filter(|&&x| x == c).count();
        if hits > best_hits || (hits == best_hits && c < best) {
            best = c;
            best_hits = hits;
        }
    }
    let selected: Vec<f64> = periods
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c == best)
        .map(|(p, _)| *p)
        .collect();
    Ok(PeriodEstimate::Periodic {
        period: selected.iter().sum::<f64>() / selected.len() as f64,
        returns_per_period: best,
        level,
    })
}
