//! Extrema and level crossings located on the dense output.

use serde::{Deserialize, Serialize};

use super::trajectory::{Segment, Trajectory};

const TIME_TOL: f64 = 1e-10;
/// `|Q''|` below this at an extremum marks it as degenerate.
pub const DEGENERATE_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Max,
    Min,
    Level,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Max => "max",
            EventKind::Min => "min",
            EventKind::Level => "level",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    /// Extremum with a regular second derivative.
    None,
    /// Tangential crossing or flat extremum.
    Degenerate,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::None => "none",
            Direction::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    /// Solution value at the event.
    pub q: f64,
    pub level: Option<f64>,
    pub direction: Direction,
}

/// Which events to look for, and from which time on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventSpec {
    pub extrema: bool,
    pub levels: Vec<f64>,
    pub from: f64,
}

impl Default for EventSpec {
    fn default() -> Self {
        Self {
            extrema: true,
            levels: Vec::new(),
            from: 0.0,
        }
    }
}

fn quadratic_roots_in_unit(a: f64, b: f64, c: f64) -> Vec<f64> {
    // a s^2 + b s + c = 0 on (0, 1)
    let mut out = Vec::with_capacity(2);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return out;
    }
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            out.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                out.push(q / a);
                out.push(c / q);
            } else {
                out.push(0.0);
            }
        }
    }
    out.retain(|s| *s > 0.0 && *s < 1.0);
    out.sort_by(f64::total_cmp);
    out
}

fn bisect_unit<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zeros of the slope on `(0, 1]` at which it changes sign, in local
/// coordinates.
pub(crate) fn slope_roots(seg: &Segment) -> Vec<f64> {
    let c = &seg.c;
    let p = |s: f64| c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * 4.0 * c[4]));
    let mut cuts = vec![0.0];
    cuts.extend(quadratic_roots_in_unit(12.0 * c[4], 6.0 * c[3], 2.0 * c[2]));
    cuts.push(1.0);
    let tol = TIME_TOL / seg.h;
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (pa, pb) = (p(w[0]), p(w[1]));
        if pb == 0.0 {
            out.push(w[1]);
        } else if pa != 0.0 && (pa > 0.0) != (pb > 0.0) {
            out.push(bisect_unit(p, w[0], w[1], tol));
        }
    }
    out.dedup();
    out
}

/// Extrema and level crossings of the trajectory on `[spec.from, t_end]`,
/// ordered by time.
pub fn detect_events(traj: &Trajectory, spec: &EventSpec) -> Vec<Event> {
    let mut out = Vec::new();
    for seg in traj.segments.iter().filter(|s| s.t1() > spec.from) {
        let roots = slope_roots(seg);
        let tol = TIME_TOL / seg.h;
        let start = out.len();

        if spec.extrema {
            for &s in &roots {
                let t = seg.t0 + s * seg.h;
                if t < spec.from {
                    continue;
                }
                let before = seg.slope_at((s - 1e-3).max(0.0));
                let curv = seg.curvature_at(s);
                let kind = if curv < 0.0 || (curv == 0.0 && before > 0.0) {
                    EventKind::Max
                } else {
                    EventKind::Min
                };
                out.push(Event {
                    t,
                    kind,
                    q: seg.value_at(s),
                    level: None,
                    direction: if curv.abs() < DEGENERATE_CURVATURE {
                        Direction::Degenerate
                    } else {
                        Direction::None
                    },
                });
            }
        }

        if !spec.levels.is_empty() {
            let mut cuts = Vec::with_capacity(roots.len() + 2);
            cuts.push(0.0);
            cuts.extend(roots.iter().copied().filter(|&s| s < 1.0));
            cuts.push(1.0);
            for &level in &spec.levels {
                let touch_tol = 1e-12 * level.abs().max(1.0);
                for w in cuts.windows(2) {
                    let va = seg.value_at(w[0]) - level;
                    let vb = seg.value_at(w[1]) - level;
                    let is_extremum_end = w[1] < 1.0;
                    if is_extremum_end && vb.abs() <= touch_tol {
                        // tangency at an interior extremum
                        let t = seg.t0 + w[1] * seg.h;
                        if t >= spec.from {
                            out.push(Event {
                                t,
                                kind: EventKind::Level,
                                q: vb + level,
                                level: Some(level),
                                direction: Direction::Degenerate,
                            });
                        }
                        continue;
                    }
                    let crosses = (vb == 0.0 && va != 0.0) || (va != 0.0 && (va > 0.0) != (vb > 0.0));
                    if !crosses || va.abs() <= touch_tol && w[0] > 0.0 {
                        continue;
                    }
                    let s = if vb == 0.0 {
                        w[1]
                    } else {
                        bisect_unit(|s| seg.value_at(s) - level, w[0], w[1], tol)
                    };
                    let t = seg.t0 + s * seg.h;
                    if t < spec.from {
                        continue;
                    }
                    out.push(Event {
                        t,
                        kind: EventKind::Level,
                        q: seg.value_at(s),
                        level: Some(level),
                        direction: if vb > va { Direction::Up } else { Direction::Down },
                    });
                }
            }
        }
        out[start..].sort_by(|a, b| a.t.total_cmp(&b.t));
    }
    out
}
