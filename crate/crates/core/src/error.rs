use thiserror::Error;

/// Errors produced anywhere in the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("concentration must be non-negative, got {0}")]
    NegativeConcentration(f64),

    #[error("calibration impossible: homeostatic entry rate beta_h={beta_h} must lie in (0, f={f})")]
    CalibrationImpossible { beta_h: f64, f: f64 },

    #[error("Q={q} is not a steady state (relative residual {residual:e})")]
    NotASteadyState { q: f64, residual: f64 },

    #[error("Lambert W branch {branch} is undefined at x={x}")]
    LambertDomain { branch: i32, x: f64 },

    #[error("no real characteristic root at Q_r={q_r}: inside the coalescence gap ({lower}, {upper})")]
    NoRealRoot { q_r: f64, lower: f64, upper: f64 },

    #[error("parameter regime not supported: {0}")]
    Regime(String),

    #[error("slow-manifold denominator vanishes at Q={q}")]
    SingularDenominator { q: f64 },

    #[error("step size underflow at t={t} (h={h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("time {t} outside the stored range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("base trajectory does not cover t={t} (available [{lo}, {hi}])")]
    BaseTrajectoryGap { t: f64, lo: f64, hi: f64 },

    #[error("mode {index} requested but only {available} complex roots were computed")]
    MissingMode { index: usize, available: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("export failed: {0}")]
    Export(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Export(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Export(e.to_string())
    }
}
