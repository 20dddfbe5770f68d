use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Linear,
    Cubic,
}

/// Shape of the perturbation added to a steady value on `[-tau, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum PerturbationMode {
    /// `base + amplitude`
    Uniform,
    /// `base + amplitude * sin(2 pi cycles (t + tau) / tau)`
    Sine { cycles: f64 },
    /// `base + amplitude * (t + tau) / tau`
    Ramp,
}

/// Initial function on `[-tau, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HistoryFunction {
    Constant {
        value: f64,
    },
    /// Samples on a strictly increasing mesh from `-tau` to `0`.
    Sampled {
        times: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
    },
    SteadyStatePerturbation {
        base: f64,
        amplitude: f64,
        mode: PerturbationMode,
    },
}

impl HistoryFunction {
    pub fn constant(value: f64) -> Self {
        HistoryFunction::Constant { value }
    }

    /// Check the domain and non-negativity for delay `tau`.
    pub fn validate(&self, tau: f64) -> Result<()> {
        match self {
            HistoryFunction::Constant { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return Err(Error::InvalidHistory(format!("constant value {value} must be finite and >= 0")));
                }
            }
            HistoryFunction::Sampled { times, values, .. } => {
                if times.len() != values.len() || times.len() < 2 {
                    return Err(Error::InvalidHistory(format!(
                        "need matching mesh and values with at least 2 points (got {} and {})",
                        times.len(),
                        values.len()
                    )));
                }
                let slack = 1e-9 * tau.max(1.0);
                if (times[0] + tau).abs() > slack || times[times.len() - 1].abs() > slack {
                    return Err(Error::InvalidHistory(format!(
                        "mesh must span [-{tau}, 0], got [{}, {}]",
                        times[0],
                        times[times.len() - 1]
                    )));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidHistory("mesh must be strictly increasing".into()));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::InvalidHistory(format!("sample {v} must be finite and >= 0")));
                }
            }
            HistoryFunction::SteadyStatePerturbation { base, amplitude, mode } => {
                let lowest = match mode {
                    PerturbationMode::Uniform | PerturbationMode::Ramp => base + amplitude.min(0.0),
                    PerturbationMode::Sine { .. } => base - amplitude.abs(),
                };
                if !(base.is_finite() && amplitude.is_finite()) || lowest < 0.0 {
                    return Err(Error::InvalidHistory(format!(
                        "perturbed history dips to {lowest} below zero"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Value at `t` in `[-tau, 0]`. Arguments outside the mesh are clamped.
    pub fn eval(&self, t: f64, tau: f64) -> f64 {
        match self {
            HistoryFunction::Constant { value } => *value,
            HistoryFunction::Sampled {
                times,
                values,
                interpolation,
            } => sample(times, values, *interpolation, t),
            HistoryFunction::SteadyStatePerturbation { base, amplitude, mode } => {
                let s = (t + tau) / tau;
                match mode {
                    PerturbationMode::Uniform => base + amplitude,
                    PerturbationMode::Sine { cycles } => base + amplitude * (2.0 * PI * cycles * s).sin(),
                    PerturbationMode::Ramp => base + amplitude * s,
                }
            }
        }
    }
}

fn sample(times: &[f64], values: &[f64], interpolation: Interpolation, t: f64) -> f64 {
    let n = times.len();
    if t <= times[0] {
        return values[0];
    }
    if t >= times[n - 1] {
        return values[n - 1];
    }
    // times[i] <= t < times[i + 1]
    let i = times.partition_point(|&x| x <= t) - 1;
    match interpolation {
        Interpolation::Linear => {
            let w = (t - times[i]) / (times[i + 1] - times[i]);
            values[i] + w * (values[i + 1] - values[i])
        }
        Interpolation::Cubic if n >= 4 => {
            let start = i.saturating_sub(1).min(n - 4);
            let xs = &times[start..start + 4];
            let ys = &values[start..start + 4];
            let mut acc = 0.0;
            for j in 0..4 {
                let mut l = 1.0;
                for k in 0..4 {
                    if k != j {
                        l *= (t - xs[k]) / (xs[j] - xs[k]);
                    }
                }
                acc += ys[j] * l;
            }
            acc
        }
        Interpolation::Cubic => sample(times, values, Interpolation::Linear, t),
    }
}
