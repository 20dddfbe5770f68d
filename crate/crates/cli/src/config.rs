//! Run configuration: one JSON document, optionally based on a preset and
//! patched with dotted-path overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hsc_core::dde::{Direction, EventSpec, HistoryFunction, IntegrateOptions};
use hsc_core::dynamics::{LyapunovOptions, PeriodOptions, SweepDirection, SweepOptions, KY_ZERO_TOLERANCE};
use hsc_core::model::derive_homeostasis;
use hsc_core::{HomeostasisSpec, ModelParams, Param};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<ModelParams>,
    pub homeostasis: Option<HomeostasisSpec>,
    /// Parameter values replaced after calibration, keyed by parameter name.
    pub adjust: BTreeMap<String, f64>,
    pub output: OutputConfig,
    pub stability: StabilityConfig,
    pub roots: RootsConfig,
    pub hopf: HopfConfig,
    pub simulate: SimulateConfig,
    pub embed: EmbedConfig,
    pub poincare: PoincareConfig,
    pub sweep: SweepConfig,
    pub lyapunov: LyapunovConfig,
    pub slowman: SlowmanConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: None,
            homeostasis: Some(HomeostasisSpec::table1()),
            adjust: BTreeMap::new(),
            output: OutputConfig::default(),
            stability: StabilityConfig::default(),
            roots: RootsConfig::default(),
            hopf: HopfConfig::default(),
            simulate: SimulateConfig::default(),
            embed: EmbedConfig::default(),
            poincare: PoincareConfig::default(),
            sweep: SweepConfig::default(),
            lyapunov: LyapunovConfig::default(),
            slowman: SlowmanConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File name prefix; the preset or command name when absent.
    pub prefix: Option<String>,
    /// Also write a gnuplot script next to every CSV.
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("hsc-out"),
            prefix: None,
            plots: false,
        }
    }
}

/// Initial history: an explicit function, or a constant `factor * Q*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StartConfig {
    pub factor: f64,
    pub history: Option<HistoryFunction>,
}

impl Default for StartConfig {
    fn default() -> Self {
        Self {
            factor: 1.01,
            history: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub c0_points: usize,
    /// Trace of `(a tau, b tau)` as the delay varies.
    pub locus: Option<LocusConfig>,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            c0_points: 400,
            locus: Some(LocusConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocusConfig {
    pub tau_start: f64,
    /// Defaults to the largest delay with a positive steady state.
    pub tau_end: Option<f64>,
    pub points: usize,
}

impl Default for LocusConfig {
    fn default() -> Self {
        Self {
            tau_start: 0.01,
            tau_end: None,
            points: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RootsConfig {
    /// Steady state to linearise at; the positive one when absent.
    pub reference: Option<f64>,
    pub re_min: f64,
    pub im_max: f64,
}

impl Default for RootsConfig {
    fn default() -> Self {
        Self {
            reference: None,
            re_min: -2.0,
            im_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HopfConfig {
    pub param: Param,
    pub range: (f64, f64),
}

impl Default for HopfConfig {
    fn default() -> Self {
        Self {
            param: Param::Tau,
            range: (0.1, 7.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub start: StartConfig,
    pub t_end: f64,
    /// Output spacing; `tau / 32` when absent.
    pub sample_dt: Option<f64>,
    pub sample_from: f64,
    pub events: EventSpec,
    /// Windows `(t0, t1)` to classify as periodic or aperiodic.
    pub period_windows: Vec<(f64, f64)>,
    pub period: PeriodOptions,
    pub integrate: IntegrateOptions,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            start: StartConfig::default(),
            t_end: 2000.0,
            sample_dt: None,
            sample_from: 0.0,
            events: EventSpec::default(),
            period_windows: Vec::new(),
            period: PeriodOptions::default(),
            integrate: IntegrateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub start: StartConfig,
    pub t_end: f64,
    /// Lags in days; `0, tau/2, tau` when absent.
    pub lags: Option<Vec<f64>>,
    /// Rows are written for `t` in this window; the last 1000 days when absent.
    pub window: Option<(f64, f64)>,
    pub dt: Option<f64>,
    pub integrate: IntegrateOptions,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            start: StartConfig::default(),
            t_end: 2000.0,
            lags: None,
            window: None,
            dt: None,
            integrate: IntegrateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareConfig {
    pub start: StartConfig,
    pub t_end: f64,
    pub alpha: f64,
    /// Section level; `Q*` when absent.
    pub level: Option<f64>,
    pub direction: Direction,
    pub from: f64,
    pub segment_points: usize,
    pub integrate: IntegrateOptions,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        Self {
            start: StartConfig::default(),
            t_end: 10_000.0,
            alpha: 0.0,
            level: None,
            direction: Direction::Up,
            from: 0.0,
            segment_points: 32,
            integrate: IntegrateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DownMesh {
    /// Midpoints of the increasing mesh, one point fewer.
    Interleaved,
    /// The increasing mesh in reverse.
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub param: Param,
    /// Uniform pieces `(start, end, points)` of the increasing mesh.
    pub pieces: Vec<(f64, f64, usize)>,
    pub directions: Vec<SweepDirection>,
    pub down_mesh: DownMesh,
    pub options: SweepOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            param: Param::Tau,
            pieces: vec![(1.0, 5.0, 201)],
            directions: vec![SweepDirection::Increasing, SweepDirection::Decreasing],
            down_mesh: DownMesh::Interleaved,
            options: SweepOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovConfig {
    pub start: StartConfig,
    pub options: LyapunovOptions,
    /// Exponents this close to zero are treated as zero in the dimension.
    pub zero_tol: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            start: StartConfig::default(),
            options: LyapunovOptions::default(),
            zero_tol: KY_ZERO_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlowmanConfig {
    /// Uniform grid `(start, end, points)` of reference concentrations.
    pub grid: (f64, f64, usize),
    /// Grid of current concentrations for the nullcline; `grid` when absent.
    pub nullcline_grid: Option<(f64, f64, usize)>,
}

impl Default for SlowmanConfig {
    fn default() -> Self {
        Self {
            grid: (0.005, 0.3, 60),
            nullcline_grid: None,
        }
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn uniform_grid((a, b, n): (f64, f64, usize)) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl RunConfig {
    /// Model constants after calibration and adjustments.
    pub fn model(&self) -> Result<ModelParams, CliError> {
        let mut p = match (&self.params, &self.homeostasis) {
            (Some(p), None) => *p,
            (None, Some(h)) => derive_homeostasis(h).map_err(|e| CliError::config("homeostasis", e.to_string()))?,
            (Some(_), Some(_)) => {
                return Err(CliError::config("", "give either `params` or `homeostasis`, not both"));
            }
            (None, None) => return Err(CliError::config("", "one of `params` or `homeostasis` is required")),
        };
        for (name, &value) in &self.adjust {
            let param: Param = name
                .parse()
                .map_err(|e: hsc_core::Error| CliError::config(format!("adjust.{name}"), e.to_string()))?;
            p = p.with(param, value);
        }
        p.validate().map_err(|e| CliError::config("params", e.to_string()))?;
        Ok(p)
    }
}

impl StartConfig {
    pub fn history(&self, p: &ModelParams, section: &str) -> Result<HistoryFunction, CliError> {
        let h = match &self.history {
            Some(h) => h.clone(),
            None => match p.q_star() {
                Some(q) => HistoryFunction::constant(self.factor * q),
                None => {
                    return Err(CliError::config(
                        format!("{section}.start.factor"),
                        "there is no positive steady state to scale; give an explicit history",
                    ))
                }
            },
        };
        h.validate(p.tau)
            .map_err(|e| CliError::config(format!("{section}.start.history"), e.to_string()))?;
        Ok(h)
    }
}

/// Apply `key.path=value` to a JSON document. The value is read as JSON
/// when it parses and as a plain string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(assignment, "override must look like `key.path=value`"))?;
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(CliError::config(path, "empty key in override path"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if let Value::Array(items) = node {
            let idx: usize = key
                .parse()
                .map_err(|_| CliError::config(keys[..=i].join("."), "expected an array index"))?;
            let len = items.len();
            node = items
                .get_mut(idx)
                .ok_or_else(|| CliError::config(keys[..=i].join("."), format!("index out of range (length {len})")))?;
            continue;
        }
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        let map = node.as_object_mut().expect("object");
        node = map.entry(key.to_string()).or_insert(Value::Null);
    }
    *node = value;
    Ok(())
}

/// Deserialize a document, reporting the offending key by path.
pub fn from_value(doc: Value) -> Result<RunConfig, CliError> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })
}

pub fn parse_document(text: &str, origin: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::config("", format!("{origin}: {e}")))
}
