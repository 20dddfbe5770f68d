//! CSV writers with fixed header rows. Numbers use the shortest
//! round-trip representation, so equal inputs give identical bytes.

use std::io::Write;

use crate::chareq::{C0Sample, CharRoot};
use crate::dde::Event;
use crate::dynamics::{LyapunovSpectrum, PoincareCrossing, SweepResult};
use crate::error::Result;
use crate::slow_manifold::{NullclinePoint, SlowManifoldRow};

pub const ROOTS_HEADER: &[&str] = &["re", "im", "residual", "kind"];
pub const C0_HEADER: &[&str] = &["omega", "a_tau", "b_tau"];
pub const TRAJECTORY_HEADER: &[&str] = &["t", "Q"];
pub const EVENTS_HEADER: &[&str] = &["t", "kind", "level", "direction"];
pub const ORBIT_DIAGRAM_HEADER: &[&str] = &["param", "direction", "kind", "Q"];
pub const POINCARE_HEADER: &[&str] = &["t", "proj_x", "proj_y"];
pub const SLOW_MANIFOLD_HEADER: &[&str] = &["Q_r", "lambda", "Q_prime", "Q_tau", "regime"];
pub const NULLCLINE_HEADER: &[&str] = &["Q_now", "Q_delayed", "branch"];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

pub fn write_roots<W: Write>(w: W, roots: &[CharRoot]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(ROOTS_HEADER)?;
    for r in roots {
        out.write_record([num(r.re()), num(r.im()), num(r.residual), r.kind.as_str().into()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_c0<W: Write>(w: W, samples: &[C0Sample]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(C0_HEADER)?;
    for s in samples {
        out.write_record([num(s.omega), num(s.a_tau), num(s.b_tau)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trajectory<W: Write>(w: W, samples: &[(f64, f64)]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(TRAJECTORY_HEADER)?;
    for (t, q) in samples {
        out.write_record([num(*t), num(*q)])?;
    }
    out.flush()?;
    Ok(())
}

/// Level crossings report their level; extrema report the extremal value.
pub fn write_events<W: Write>(w: W, events: &[Event]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(EVENTS_HEADER)?;
    for e in events {
        out.write_record([
            num(e.t),
            e.kind.as_str().into(),
            num(e.level.unwrap_or(e.q)),
            e.direction.as_str().into(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_orbit_diagram<W: Write>(w: W, sweeps: &[&SweepResult]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(ORBIT_DIAGRAM_HEADER)?;
    for s in sweeps {
        for pt in &s.points {
            for (kind, q) in &pt.extrema {
                out.write_record([num(pt.value), s.direction.as_str().into(), kind.as_str().into(), num(*q)])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_poincare<W: Write>(w: W, crossings: &[PoincareCrossing]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(POINCARE_HEADER)?;
    for c in crossings {
        out.write_record([num(c.t), num(c.projection.0), num(c.projection.1)])?;
    }
    out.flush()?;
    Ok(())
}

/// Running estimates, one column per direction.
pub fn write_lyapunov<W: Write>(w: W, spectrum: &LyapunovSpectrum) -> Result<()> {
    let mut out = writer(w);
    let m = spectrum.settings.m;
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|j| format!("lambda_{j}")));
    out.write_record(&header)?;
    for (t, est) in &spectrum.history {
        let mut row = vec![num(*t)];
        row.extend(est.iter().map(|x| num(*x)));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Gap rows leave the numeric columns empty.
pub fn write_slow_manifold<W: Write>(w: W, rows: &[SlowManifoldRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(SLOW_MANIFOLD_HEADER)?;
    for r in rows {
        let (lam, qp, qt) = match &r.point {
            Some(p) => (num(p.lambda), num(p.q_prime), num(p.q_tau)),
            None => (String::new(), String::new(), String::new()),
        };
        out.write_record([num(r.q_r), lam, qp, qt, r.regime.as_str().into()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_nullcline<W: Write>(w: W, points: &[NullclinePoint]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(NULLCLINE_HEADER)?;
    for p in points {
        out.write_record([num(p.q_now), num(p.q_delayed), p.branch.as_str().into()])?;
    }
    out.flush()?;
    Ok(())
}

/// Header `t, lag_<l1>, lag_<l2>, ...`.
pub fn write_embedding<W: Write>(w: W, lags: &[f64], rows: &[(f64, Vec<f64>)]) -> Result<()> {
    let mut out = writer(w);
    let mut header = vec!["t".to_string()];
    header.extend(lags.iter().map(|l| format!("lag_{l}")));
    out.write_record(&header)?;
    for (t, v) in rows {
        let mut row = vec![num(*t)];
        row.extend(v.iter().map(|x| num(*x)));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
