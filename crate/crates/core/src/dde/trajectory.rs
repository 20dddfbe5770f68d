use serde::{Deserialize, Serialize};

use super::events::Event;
use super::history::{HistoryFunction, Interpolation};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// One accepted step. On `[t0, t0 + h]` the solution is
/// `c0 + c1 s + c2 s^2 + c3 s^3 + c4 s^4` with `s = (t - t0) / h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t0: f64,
    pub h: f64,
    pub c: [f64; 5],
}

impl Segment {
    #[inline]
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    #[inline]
    pub fn value_at(&self, s: f64) -> f64 {
        let c = &self.c;
        c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * c[4])))
    }

    /// `dQ/dt` at local coordinate `s`.
    #[inline]
    pub fn slope_at(&self, s: f64) -> f64 {
        let c = &self.c;
        (c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * 4.0 * c[4]))) / self.h
    }

    /// `d2Q/dt2` at local coordinate `s`.
    #[inline]
    pub fn curvature_at(&self, s: f64) -> f64 {
        let c = &self.c;
        (2.0 * c[2] + s * (6.0 * c[3] + s * 12.0 * c[4])) / (self.h * self.h)
    }

    #[inline]
    pub fn local(&self, t: f64) -> f64 {
        (t - self.t0) / self.h
    }
}

/// Dense solution on `[-tau, t_end]`: the history followed by the accepted
/// steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub tau: f64,
    pub history: HistoryFunction,
    pub segments: Vec<Segment>,
    /// Mandatory step boundaries used (multiples of the delay).
    pub breakpoints: Vec<f64>,
    pub events: Vec<Event>,
    pub params: Option<ModelParams>,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub(crate) fn new(tau: f64, history: HistoryFunction, params: Option<ModelParams>) -> Self {
        Self {
            tau,
            history,
            segments: Vec::new(),
            breakpoints: Vec::new(),
            events: Vec::new(),
            params,
            rejected_steps: 0,
        }
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, Segment::t1)
    }

    /// Index of the segment containing `t`, for `0 <= t <= t_end`. `hint`
    /// is the previous answer; lookups usually move forward a little.
    #[inline]
    pub(crate) fn locate(&self, t: f64, hint: &mut usize) -> usize {
        let n = self.segments.len();
        let i = (*hint).min(n - 1);
        let seg = &self.segments[i];
        if t >= seg.t0 && t <= seg.t1() {
            return i;
        }
        if t > seg.t1() && i + 1 < n && t <= self.segments[i + 1].t1() {
            *hint = i + 1;
            return i + 1;
        }
        let j = self.segments.partition_point(|s| s.t1() < t).min(n - 1);
        *hint = j;
        j
    }

    /// Value without range checks; history for `t <= 0`.
    #[inline]
    pub(crate) fn value_hinted(&self, t: f64, hint: &mut usize) -> f64 {
        if t <= 0.0 || self.segments.is_empty() {
            return self.history.eval(t, self.tau);
        }
        let seg = &self.segments[self.locate(t, hint)];
        seg.value_at(seg.local(t))
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let hi = self.t_end();
        if t < -self.tau * (1.0 + 1e-12) || t > hi + 1e-12 * hi.max(1.0) || t.is_nan() {
            return Err(Error::OutOfRange {
                t,
                lo: -self.tau,
                hi,
            });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        self.value_hinted(t, &mut 0)
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        Ok(self.value_unchecked(t))
    }

    /// `Q'(t)` for `0 < t <= t_end` (right-hand slope at segment joins).
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if t <= 0.0 || self.segments.is_empty() {
            return Err(Error::OutOfRange {
                t,
                lo: 0.0,
                hi: self.t_end(),
            });
        }
        self.check_range(t)?;
        let seg = &self.segments[self.locate(t, &mut 0)];
        Ok(seg.slope_at(seg.local(t)))
    }

    /// Uniform samples `(t, Q(t))` on `[t0, t1]` with spacing `dt`; `t1` is
    /// always included.
    pub fn sample(&self, t0: f64, t1: f64, dt: f64) -> Result<Vec<(f64, f64)>> {
        if !(dt > 0.0) || t1 < t0 {
            return Err(Error::InvalidInput(format!("bad sampling [{t0}, {t1}] step {dt}")));
        }
        self.check_range(t0)?;
        self.check_range(t1)?;
        let n = ((t1 - t0) / dt).floor() as usize;
        let mut out = Vec::with_capacity(n + 2);
        for i in 0..=n {
            let t = t0 + i as f64 * dt;
            out.push((t, self.value_unchecked(t)));
        }
        if out.last().is_none_or(|&(t, _)| t1 - t > 1e-12 * dt) {
            out.push((t1, self.value_unchecked(t1)));
        }
        Ok(out)
    }

    /// The last `span` time units as a history on `[-span, 0]`, sampled at
    /// `n` intervals.
    pub fn tail_history(&self, span: f64, n: usize, interpolation: Interpolation) -> Result<HistoryFunction> {
        let end = self.t_end();
        self.check_range(end - span)?;
        let times: Vec<f64> = (0..=n).map(|i| -span + span * i as f64 / n as f64).collect();
        let values = times
            .iter()
            .map(|&s| self.value_unchecked(end + s).max(0.0))
            .collect();
        Ok(HistoryFunction::Sampled {
            times,
            values,
            interpolation,
        })
    }

    /// Minimum and maximum of the dense solution over `[t0, t_end]`, found
    /// from segment endpoints and interior critical points.
    pub fn range_after(&self, t0: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for seg in self.segments.iter().filter(|s| s.t1() >= t0) {
            for v in [seg.value_at(0.0), seg.value_at(1.0)] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            for s in super::events::slope_roots(seg) {
                let v = seg.value_at(s);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}
