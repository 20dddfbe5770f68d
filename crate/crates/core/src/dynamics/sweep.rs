//! Orbit diagrams by sequential continuation along a parameter mesh.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dde::{
    detect_events, integrate, Direction, EventKind, EventSpec, HistoryFunction, IntegrateOptions,
    Interpolation, PerturbationMode,
};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Param};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDirection {
    Increasing,
    Decreasing,
}

impl SweepDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepDirection::Increasing => "increasing",
            SweepDirection::Decreasing => "decreasing",
        }
    }
}

impl fmt::Display for SweepDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which extrema of the recorded window go into the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremaSelection {
    /// The last maximum and the last minimum.
    Last,
    /// Every extremum.
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    /// Transient length in delays.
    pub transient: f64,
    /// Recording window after the transient, in delays. With `0` the
    /// extrema are taken from the transient run itself.
    pub record: f64,
    pub selection: ExtremaSelection,
    pub integrate: IntegrateOptions,
    /// Samples used to carry the last delay interval to the next point.
    pub history_points: usize,
    /// History at the first mesh point; a perturbed steady state if absent.
    pub initial_history: Option<HistoryFunction>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            transient: 50.0,
            record: 0.0,
            selection: ExtremaSelection::Last,
            integrate: IntegrateOptions::default(),
            history_points: 1024,
            initial_history: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedNote {
    /// The sweep's initial history.
    Initial,
    /// Last delay interval of the previous point.
    Carried,
    /// Perturbed steady state after a failure at the previous point.
    Fresh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub extrema: Vec<(EventKind, f64)>,
    pub seed: SeedNote,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param: Param,
    pub direction: SweepDirection,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn mesh(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

fn fresh_history(p: &ModelParams) -> HistoryFunction {
    match p.q_star() {
        Some(q) => HistoryFunction::SteadyStatePerturbation {
            base: q,
            amplitude: 0.1 * q,
            mode: PerturbationMode::Sine { cycles: 1.0 },
        },
        None => HistoryFunction::constant(p.theta),
    }
}

fn run_point(
    p: &ModelParams,
    history: HistoryFunction,
    carry_span: f64,
    opts: &SweepOptions,
) -> Result<(Vec<(EventKind, f64)>, HistoryFunction)> {
    let tau = p.tau;
    let t_end = (opts.transient + opts.record) * tau;
    let traj = integrate(p, history, t_end, &opts.integrate)?;
    let from = if opts.record > 0.0 { opts.transient * tau } else { tau.min(t_end) };
    let events: Vec<_> = detect_events(
        &traj,
        &EventSpec {
            extrema: true,
            levels: Vec::new(),
            from,
        },
    )
    .into_iter()
    .filter(|e| e.direction != Direction::Degenerate)
    .collect();
    let mut extrema: Vec<(EventKind, f64)> = match opts.selection {
        ExtremaSelection::All => events.iter().map(|e| (e.kind, e.q)).collect(),
        ExtremaSelection::Last => [EventKind::Max, EventKind::Min]
            .into_iter()
            .filter_map(|k| events.iter().rev().find(|e| e.kind == k).map(|e| (k, e.q)))
            .collect(),
    };
    if extrema.is_empty() {
        // monotone approach to equilibrium: the end value stands for both
        let end = traj.evaluate(t_end)?;
        extrema = vec![(EventKind::Max, end), (EventKind::Min, end)];
    }
    let carry = traj.tail_history(carry_span, opts.history_points, Interpolation::Cubic)?;
    Ok((extrema, carry))
}

/// Sweep `vary` along `mesh`, carrying the last delay interval of each
/// solution to the next mesh point.
pub fn orbit_diagram(
    p: &ModelParams,
    vary: Param,
    mesh: &[f64],
    direction: SweepDirection,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    let monotone = mesh.windows(2).all(|w| match direction {
        SweepDirection::Increasing => w[1] > w[0],
        SweepDirection::Decreasing => w[1] < w[0],
    });
    if mesh.is_empty() || !monotone {
        return Err(Error::InvalidInput(format!(
            "mesh must be non-empty and strictly {direction}"
        )));
    }
    let mut points = Vec::with_capacity(mesh.len());
    let mut history: Option<HistoryFunction> = None;
    let mut seed = SeedNote::Initial;
    for (i, &value) in mesh.iter().enumerate() {
        let q = p.with(vary, value);
        q.validate()?;
        let h = match history.take() {
            Some(h) => h,
            None if i == 0 => opts.initial_history.clone().unwrap_or_else(|| fresh_history(&q)),
            None => fresh_history(&q),
        };
        // the next point reads its history over its own delay
        let carry_span = mesh.get(i + 1).map_or(q.tau, |&v| p.with(vary, v).tau);
        match run_point(&q, h, carry_span, opts) {
            Ok((extrema, carry)) => {
                points.push(SweepPoint {
                    value,
                    extrema,
                    seed,
                    failure: None,
                });
                history = Some(carry);
                seed = SeedNote::Carried;
            }
            Err(e) => {
                points.push(SweepPoint {
                    value,
                    extrema: Vec::new(),
                    seed,
                    failure: Some(e.to_string()),
                });
                history = None;
                seed = SeedNote::Fresh;
            }
        }
    }
    Ok(SweepResult {
        param: vary,
        direction,
        points,
    })
}

/// Run the increasing and decreasing sweeps concurrently.
pub fn orbit_diagram_both(
    p: &ModelParams,
    vary: Param,
    up_mesh: &[f64],
    down_mesh: &[f64],
    opts: &SweepOptions,
) -> Result<(SweepResult, SweepResult)> {
    std::thread::scope(|s| {
        let up = s.spawn(|| orbit_diagram(p, vary, up_mesh, SweepDirection::Increasing, opts));
        let down = orbit_diagram(p, vary, down_mesh, SweepDirection::Decreasing, opts);
        let up = up.join().map_err(|_| Error::Numerical("increasing sweep panicked".into()))?;
        Ok((up?, down?))
    })
}

/// Concatenate uniform pieces `(start, end, points)`, dropping the repeated
/// point where consecutive pieces meet.
pub fn piecewise_mesh(pieces: &[(f64, f64, usize)]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &(a, b, n) in pieces {
        for i in 0..n {
            let x = if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
            if out.last().is_some_and(|&l| (l - x).abs() <= 1e-12 * x.abs().max(1.0)) {
                continue;
            }
            out.push(x);
        }
    }
    out
}

/// Midpoints of consecutive mesh values, in decreasing order.
pub fn interleaved_decreasing(mesh: &[f64]) -> Vec<f64> {
    let mut mids: Vec<f64> = mesh.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    mids.sort_by(|a, b| b.total_cmp(a));
    mids
}
