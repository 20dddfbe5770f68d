//! One function per command. Each writes its data files and returns a
//! summary plus any flags that make the result unconverged.

use std::fmt;
use std::str::FromStr;

use hsc_core::chareq::{
    c0_curve, complex_roots, critical_delays, hopf_locus_1p, linearize_at, real_roots, stability_region,
};
use hsc_core::dde::{detect_events, integrate, Trajectory};
use hsc_core::dynamics::{
    delay_embedding, estimate_period, interleaved_decreasing, kaplan_yorke, lyapunov_spectrum, orbit_diagram,
    orbit_diagram_both, piecewise_mesh, poincare_section, KaplanYorke, SweepDirection, SweepResult,
};
use hsc_core::export;
use hsc_core::model::{existence_bounds, steady_state};
use hsc_core::slow_manifold::{landmarks, nullcline_curve, slow_manifold_curve};
use hsc_core::{ModelParams, Param};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{uniform_grid, DownMesh, RunConfig, StartConfig};
use crate::error::CliError;
use crate::output::Outputs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Steady,
    Stability,
    Roots,
    Hopf,
    Simulate,
    Embed,
    Poincare,
    Sweep,
    Lyapunov,
    Slowman,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Steady,
        Command::Stability,
        Command::Roots,
        Command::Hopf,
        Command::Simulate,
        Command::Embed,
        Command::Poincare,
        Command::Sweep,
        Command::Lyapunov,
        Command::Slowman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Stability => "stability",
            Command::Roots => "roots",
            Command::Hopf => "hopf",
            Command::Simulate => "simulate",
            Command::Embed => "embed",
            Command::Poincare => "poincare",
            Command::Sweep => "sweep",
            Command::Lyapunov => "lyapunov",
            Command::Slowman => "slowman",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command `{s}`")))
    }
}

/// What a command produced besides its files.
pub struct Report {
    pub summary: Value,
    /// Reasons the result should be treated as unconverged.
    pub flags: Vec<String>,
}

impl Report {
    fn ok(summary: Value) -> Self {
        Self {
            summary,
            flags: Vec::new(),
        }
    }
}

pub fn execute(cmd: Command, cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    match cmd {
        Command::Steady => steady(p),
        Command::Stability => stability(cfg, p, out),
        Command::Roots => roots(cfg, p, out),
        Command::Hopf => hopf(cfg, p),
        Command::Simulate => simulate(cfg, p, out),
        Command::Embed => embed(cfg, p, out),
        Command::Poincare => poincare(cfg, p, out),
        Command::Sweep => sweep(cfg, p, out),
        Command::Lyapunov => lyapunov(cfg, p, out),
        Command::Slowman => slowman(cfg, p, out),
    }
}

fn steady(p: &ModelParams) -> Result<Report, CliError> {
    Ok(Report::ok(json!({
        "amplification": p.amplification(),
        "steady_states": steady_state(p),
        "existence_bounds": existence_bounds(p),
    })))
}

fn class_name<T: Serialize>(class: &T) -> String {
    serde_json::to_value(class)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn stability(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let sc = &cfg.stability;
    let delays = critical_delays(p);
    let linear = match p.q_star() {
        Some(q) => {
            let c = linearize_at(q, p)?;
            json!({
                "q_star": q,
                "a": c.a,
                "b": c.b,
                "a_tau": c.a * c.tau,
                "b_tau": c.b * c.tau,
                "classification": stability_region(&c),
            })
        }
        None => Value::Null,
    };
    out.csv("c0", |w| Ok(export::write_c0(w, &c0_curve(sc.c0_points))?))?;
    let mut locus_rows = 0;
    if let Some(locus) = &sc.locus {
        let tau_end = locus
            .tau_end
            .or(delays.tau_max.filter(|t| t.is_finite()))
            .unwrap_or(3.0 * p.tau);
        if !(locus.tau_start > 0.0 && tau_end > locus.tau_start) {
            return Err(CliError::config("stability.locus", format!("empty delay range ({}, {tau_end})", locus.tau_start)));
        }
        let mut rows = Vec::new();
        for tau in uniform_grid((locus.tau_start, tau_end, locus.points)) {
            let q = p.with(Param::Tau, tau);
            if let Some(qs) = q.q_star() {
                let c = linearize_at(qs, &q)?;
                rows.push((tau, c.a * tau, c.b * tau, class_name(&stability_region(&c))));
            }
        }
        locus_rows = rows.len();
        out.csv("locus", |w| {
            let mut wr = csv::Writer::from_writer(w);
            wr.write_record(["tau", "a_tau", "b_tau", "class"])?;
            for (t, a, b, class) in &rows {
                wr.write_record([t.to_string(), a.to_string(), b.to_string(), class.clone()])?;
            }
            wr.flush()?;
            Ok(())
        })?;
    }
    Ok(Report::ok(json!({
        "linearization": linear,
        "critical_delays": delays,
        "c0_points": sc.c0_points,
        "locus_points": locus_rows,
    })))
}

fn roots(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let rc = &cfg.roots;
    let reference = match rc.reference.or_else(|| p.q_star()) {
        Some(q) => q,
        None => return Err(CliError::config("roots.reference", "no positive steady state; give a reference value")),
    };
    let c = linearize_at(reference, p)?;
    let real = real_roots(&c);
    let search = complex_roots(&c, rc.re_min, rc.im_max)?;
    let all: Vec<_> = real.iter().chain(search.roots.iter()).cloned().collect();
    out.csv("roots", |w| Ok(export::write_roots(w, &all)?))?;
    let rightmost = all.iter().map(|r| r.re()).fold(f64::NEG_INFINITY, f64::max);
    let mut flags = Vec::new();
    if !search.complete {
        flags.push(format!(
            "root count incomplete: winding {} but {} roots accounted",
            search.winding, search.accounted
        ));
    }
    Ok(Report {
        summary: json!({
            "reference": reference,
            "a": c.a,
            "b": c.b,
            "tau": c.tau,
            "real_roots": real.len(),
            "complex_roots": search.roots.len(),
            "winding": search.winding,
            "accounted": search.accounted,
            "complete": search.complete,
            "warnings": search.warnings,
            "rightmost_re": rightmost,
        }),
        flags,
    })
}

fn hopf(cfg: &RunConfig, p: &ModelParams) -> Result<Report, CliError> {
    let hc = &cfg.hopf;
    let points = hopf_locus_1p(p, hc.param, hc.range)?;
    Ok(Report::ok(json!({
        "param": hc.param,
        "range": hc.range,
        "points": points,
    })))
}

fn run_from(start: &StartConfig, section: &str, p: &ModelParams, t_end: f64, opts: &hsc_core::dde::IntegrateOptions) -> Result<Trajectory, CliError> {
    if !(t_end > 0.0) {
        return Err(CliError::config(format!("{section}.t_end"), "must be positive"));
    }
    let h = start.history(p, section)?;
    Ok(integrate(p, h, t_end, opts)?)
}

fn simulate(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let sc = &cfg.simulate;
    let traj = run_from(&sc.start, "simulate", p, sc.t_end, &sc.integrate)?;
    let dt = sc.sample_dt.unwrap_or(p.tau / 32.0);
    let samples = traj.sample(sc.sample_from, sc.t_end, dt)?;
    let events = detect_events(&traj, &sc.events);
    out.csv("trajectory", |w| Ok(export::write_trajectory(w, &samples)?))?;
    out.csv("events", |w| Ok(export::write_events(w, &events)?))?;
    let mut periods = Vec::new();
    for &(t0, t1) in &sc.period_windows {
        let est = estimate_period(&traj, (t0, t1), &sc.period)?;
        periods.push(json!({"window": [t0, t1], "estimate": est}));
    }
    let (lo, hi) = traj.range_after(sc.sample_from);
    Ok(Report::ok(json!({
        "t_end": sc.t_end,
        "steps": traj.segments.len(),
        "samples": samples.len(),
        "events": events.len(),
        "min": lo,
        "max": hi,
        "periods": periods,
    })))
}

fn embed(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let ec = &cfg.embed;
    let traj = run_from(&ec.start, "embed", p, ec.t_end, &ec.integrate)?;
    let lags = ec.lags.clone().unwrap_or_else(|| vec![0.0, 0.5 * p.tau, p.tau]);
    let (t0, t1) = ec.window.unwrap_or(((ec.t_end - 1000.0).max(0.0), ec.t_end));
    let rows = delay_embedding(&traj, &lags, t0, t1, ec.dt.unwrap_or(p.tau / 32.0))?;
    out.csv("embedding", |w| Ok(export::write_embedding(w, &lags, &rows)?))?;
    Ok(Report::ok(json!({"lags": lags, "window": [t0, t1], "rows": rows.len()})))
}

fn poincare(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let pc = &cfg.poincare;
    let level = match pc.level.or_else(|| p.q_star()) {
        Some(c) => c,
        None => return Err(CliError::config("poincare.level", "no positive steady state; give a section level")),
    };
    let traj = run_from(&pc.start, "poincare", p, pc.t_end, &pc.integrate)?;
    let crossings = poincare_section(&traj, pc.alpha, level, pc.direction, pc.from, pc.segment_points)?;
    out.csv("poincare", |w| Ok(export::write_poincare(w, &crossings)?))?;
    let mean_return = if crossings.len() > 1 {
        (crossings[crossings.len() - 1].t - crossings[0].t) / (crossings.len() - 1) as f64
    } else {
        f64::NAN
    };
    Ok(Report::ok(json!({
        "alpha": pc.alpha,
        "level": level,
        "direction": pc.direction,
        "crossings": crossings.len(),
        "mean_return_time": mean_return,
    })))
}

fn sweep(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let sc = &cfg.sweep;
    if sc.pieces.is_empty() || sc.directions.is_empty() {
        return Err(CliError::config("sweep", "need at least one mesh piece and one direction"));
    }
    let up_mesh = piecewise_mesh(&sc.pieces);
    let down_mesh = match sc.down_mesh {
        DownMesh::Interleaved => interleaved_decreasing(&up_mesh),
        DownMesh::Reversed => up_mesh.iter().rev().copied().collect(),
    };
    let wants = |d| sc.directions.contains(&d);
    let results: Vec<SweepResult> = match (wants(SweepDirection::Increasing), wants(SweepDirection::Decreasing)) {
        (true, true) => {
            let (up, down) = orbit_diagram_both(p, sc.param, &up_mesh, &down_mesh, &sc.options)?;
            vec![up, down]
        }
        (true, false) => vec![orbit_diagram(p, sc.param, &up_mesh, SweepDirection::Increasing, &sc.options)?],
        _ => vec![orbit_diagram(p, sc.param, &down_mesh, SweepDirection::Decreasing, &sc.options)?],
    };
    let refs: Vec<&SweepResult> = results.iter().collect();
    out.csv("orbit_diagram", |w| Ok(export::write_orbit_diagram(w, &refs)?))?;
    let mut flags = Vec::new();
    let mut per_direction = Vec::new();
    for r in &results {
        let failures: Vec<Value> = r
            .points
            .iter()
            .filter_map(|pt| pt.failure.as_ref().map(|m| json!({"value": pt.value, "message": m})))
            .collect();
        if !failures.is_empty() {
            flags.push(format!("{} mesh points failed in the {} sweep", failures.len(), r.direction.as_str()));
        }
        per_direction.push(json!({
            "direction": r.direction,
            "points": r.points.len(),
            "first": r.points.first().map(|pt| pt.value),
            "last": r.points.last().map(|pt| pt.value),
            "failures": failures,
        }));
    }
    Ok(Report {
        summary: json!({"param": sc.param, "sweeps": per_direction}),
        flags,
    })
}

fn lyapunov(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let lc = &cfg.lyapunov;
    let h = lc.start.history(p, "lyapunov")?;
    let spec = lyapunov_spectrum(p, h, &lc.options)?;
    out.csv("lyapunov", |w| Ok(export::write_lyapunov(w, &spec)?))?;
    let ky = kaplan_yorke(&spec.exponents, lc.zero_tol);
    let mut flags = Vec::new();
    if !spec.converged() {
        let which: Vec<usize> = (1..=spec.unconverged.len()).filter(|&j| spec.unconverged[j - 1]).collect();
        flags.push(format!("running estimates still drifting for exponents {which:?}"));
    }
    if let KaplanYorke::NeedsMoreExponents = ky {
        flags.push("partial sums stay non-negative; more exponents are needed for the dimension".into());
    }
    Ok(Report {
        summary: json!({
            "exponents": spec.exponents,
            "drift": spec.drift,
            "unconverged": spec.unconverged,
            "positive": spec.exponents.iter().filter(|&&x| x > lc.zero_tol).count(),
            "kaplan_yorke_dimension": ky.dimension(),
            "zero_tol": lc.zero_tol,
            "horizon": spec.horizon,
            "settings": spec.settings,
        }),
        flags,
    })
}

fn slowman(cfg: &RunConfig, p: &ModelParams, out: &mut Outputs) -> Result<Report, CliError> {
    let sc = &cfg.slowman;
    let grid = uniform_grid(sc.grid);
    let nc_grid = uniform_grid(sc.nullcline_grid.unwrap_or(sc.grid));
    if grid.is_empty() || grid.iter().chain(&nc_grid).any(|q| !(*q >= 0.0)) {
        return Err(CliError::config("slowman.grid", "grids must be non-empty and non-negative"));
    }
    let rows = slow_manifold_curve(p, &grid)?;
    let nc = nullcline_curve(p, &nc_grid);
    let marks = landmarks(p)?;
    out.csv("slow_manifold", |w| Ok(export::write_slow_manifold(w, &rows)?))?;
    out.csv("nullcline", |w| Ok(export::write_nullcline(w, &nc)?))?;
    let gaps = rows.iter().filter(|r| r.point.is_none()).count();
    Ok(Report::ok(json!({
        "landmarks": marks,
        "manifold_points": rows.len(),
        "gap_points": gaps,
        "nullcline_points": nc.len(),
    })))
}
