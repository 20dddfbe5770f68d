//! Linearised perturbations transported along a computed solution.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Default number of mesh intervals on one delay.
pub const BUNDLE_MESH: usize = 128;

/// `m` perturbation functions, each sampled on a uniform mesh of `n`
/// intervals covering `[t - tau, t]` plus one extra older point for the
/// centred interpolation of delayed midpoints.
#[derive(Debug, Clone)]
pub struct PerturbationBundle {
    pub t: f64,
    pub tau: f64,
    pub n: usize,
    columns: Vec<VecDeque<f64>>,
}

/// Column norms removed at one re-orthonormalisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub t: f64,
    pub factors: Vec<f64>,
}

impl PerturbationBundle {
    /// Random orthonormal columns at time `t`, reproducible from `seed`.
    pub fn random(t: f64, tau: f64, m: usize, n: usize, seed: u64) -> Result<Self> {
        Self::check(tau, m, n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns = (0..m)
            .map(|_| (0..n + 2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut b = Self { t, tau, n, columns };
        b.orthonormalize();
        Ok(b)
    }

    pub fn zeros(t: f64, tau: f64, m: usize, n: usize) -> Result<Self> {
        Self::check(tau, m, n)?;
        Ok(Self {
            t,
            tau,
            n,
            columns: vec![VecDeque::from(vec![0.0; n + 2]); m],
        })
    }

    fn check(tau: f64, m: usize, n: usize) -> Result<()> {
        if m == 0 || n < 4 || !(tau > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bundle needs m >= 1, n >= 4 and tau > 0 (got m={m}, n={n}, tau={tau})"
            )));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn step_size(&self) -> f64 {
        self.tau / self.n as f64
    }

    /// Samples of column `j` on `[t - tau, t]`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.columns[j].iter().skip(1).copied().collect()
    }

    fn dot(&self, i: usize, j: usize) -> f64 {
        let d = self.step_size();
        self.columns[i]
            .iter()
            .zip(&self.columns[j])
            .skip(1)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * d
    }

    fn gram_schmidt_pass(&mut self) -> Vec<f64> {
        let m = self.m();
        let mut norms = Vec::with_capacity(m);
        for j in 0..m {
            for i in 0..j {
                let r = self.dot(i, j);
                if r != 0.0 {
                    let (head, tail) = self.columns.split_at_mut(j);
                    for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                        *x -= r * y;
                    }
                }
            }
            let norm = self.dot(j, j).sqrt();
            if norm > 0.0 {
                for x in self.columns[j].iter_mut() {
                    *x /= norm;
                }
            }
            norms.push(norm);
        }
        norms
    }

    /// Modified Gram-Schmidt applied twice. Returns the total factor removed
    /// from each column.
    pub fn orthonormalize(&mut self) -> Vec<f64> {
        let first = self.gram_schmidt_pass();
        let second = self.gram_schmidt_pass();
        first.iter().zip(second).map(|(a, b)| a * b).collect()
    }

    /// `max |<v_i, v_j> - delta_ij|` over the non-zero columns.
    pub fn orthonormality_residual(&self) -> f64 {
        let m = self.m();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..=i {
                let target = if i == j && self.dot(i, i) > 0.0 { 1.0 } else { 0.0 };
                worst = worst.max((self.dot(i, j) - target).abs());
            }
        }
        worst
    }
}

/// Advance the bundle over `t_span` under
/// `w' = -(kappa + h'(Q(t))) w + A h'(Q(t - tau)) w(t - tau)` with classical
/// RK4 on the bundle mesh, re-orthonormalising every `reorth` time units.
pub fn integrate_variational(
    traj: &Trajectory,
    bundle: &mut PerturbationBundle,
    t_span: (f64, f64),
    reorth: f64,
) -> Result<Vec<Growth>> {
    let p = traj
        .params
        .ok_or_else(|| Error::InvalidInput("trajectory carries no model parameters".into()))?;
    let (t0, t1) = t_span;
    let d = bundle.step_size();
    if (bundle.tau - traj.tau).abs() > 1e-12 * traj.tau {
        return Err(Error::InvalidInput("bundle and trajectory delays differ".into()));
    }
    if (t0 - bundle.t).abs() > 1e-9 * d {
        return Err(Error::InvalidInput(format!(
            "bundle is at t={} but the span starts at {t0}",
            bundle.t
        )));
    }
    if t0 < 0.0 || t1 > traj.t_end() + 1e-9 {
        return Err(Error::BaseTrajectoryGap {
            t: if t0 < 0.0 { t0 } else { t1 },
            lo: 0.0,
            hi: traj.t_end(),
        });
    }
    let steps = ((t1 - t0) / d).round() as usize;
    let per_reorth = ((reorth / d).round() as usize).max(1);
    let a_amp = p.amplification();
    let n = bundle.n;
    let mut hint_now = 0usize;
    let mut hint_lag = 0usize;
    let mut coeffs = |t: f64| {
        let q = traj.value_hinted(t, &mut hint_now);
        let q_lag = traj.value_hinted(t - p.tau, &mut hint_lag);
        (-p.kappa - p.h_prime(q.max(0.0)), a_amp * p.h_prime(q_lag.max(0.0)))
    };

    let mut out = Vec::new();
    let mut t = t0;
    let (mut al0, mut be0) = coeffs(t);
    for k in 1..=steps {
        let (alm, bem) = coeffs(t + 0.5 * d);
        let (al1, be1) = coeffs(t + d);
        for col in bundle.columns.iter_mut() {
            let w = col[n + 1];
            let z0 = col[1];
            let z1 = col[2];
            let zm = (-col[0] + 9.0 * col[1] + 9.0 * col[2] - col[3]) / 16.0;
            let k1 = al0 * w + be0 * z0;
            let k2 = alm * (w + 0.5 * d * k1) + bem * zm;
            let k3 = alm * (w + 0.5 * d * k2) + bem * zm;
            let k4 = al1 * (w + d * k3) + be1 * z1;
            col.pop_front();
            col.push_back(w + d / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        }
        t = t0 + k as f64 * d;
        al0 = al1;
        be0 = be1;
        bundle.t = t;
        if k % per_reorth == 0 {
            out.push(Growth {
                t,
                factors: bundle.orthonormalize(),
            });
        }
    }
    Ok(out)
}
