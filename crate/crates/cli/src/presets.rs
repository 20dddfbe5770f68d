//! Named reproduction runs, each listing the reference values it checks.

use hsc_core::dde::Direction;
use hsc_core::dynamics::{ExtremaSelection, LyapunovOptions, SweepDirection, SweepOptions};
use hsc_core::{HomeostasisSpec, ModelParams, Param};
use serde::{Deserialize, Serialize};

use crate::commands::Command;
use crate::config::{DownMesh, RunConfig, StartConfig};

/// A published value the preset output should reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub quantity: String,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub command: Command,
    pub description: String,
    pub checks: Vec<Check>,
    pub config: RunConfig,
}

fn check(quantity: &str, expected: f64) -> Check {
    Check {
        quantity: quantity.into(),
        expected,
    }
}

fn adjusted(values: &[(Param, f64)]) -> RunConfig {
    RunConfig {
        homeostasis: Some(HomeostasisSpec::table1()),
        adjust: values.iter().map(|(p, v)| (p.name().to_string(), *v)).collect(),
        ..RunConfig::default()
    }
}

fn lyapunov_run(values: &[(Param, f64)], m: usize, factor: f64) -> RunConfig {
    let mut cfg = adjusted(values);
    cfg.lyapunov.start = StartConfig { factor, history: None };
    cfg.lyapunov.options = LyapunovOptions {
        m,
        horizon: 3.0e4,
        ..LyapunovOptions::default()
    };
    cfg
}

fn scan(param: Param, pieces: Vec<(f64, f64, usize)>, transient: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.sweep.param = param;
    cfg.sweep.pieces = pieces;
    cfg.sweep.options = SweepOptions {
        transient,
        record: 20.0,
        selection: ExtremaSelection::All,
        ..SweepOptions::default()
    };
    cfg
}

fn preset(name: &str, command: Command, description: &str, checks: Vec<Check>, config: RunConfig) -> Preset {
    Preset {
        name: name.into(),
        command,
        description: description.into(),
        checks,
        config,
    }
}

pub fn catalog() -> Vec<Preset> {
    let torus = {
        let mut cfg = lyapunov_run(&[(Param::Kappa, 0.961), (Param::Tau, 3.9)], 4, 0.9);
        cfg.poincare.start = StartConfig { factor: 0.9, history: None };
        cfg.poincare.t_end = 32_000.0;
        cfg.poincare.from = 2000.0;
        cfg.poincare.alpha = 0.0;
        cfg.poincare.level = Some(0.14);
        cfg.poincare.direction = Direction::Up;
        cfg
    };
    let canard = {
        let mut cfg = adjusted(&[(Param::Gamma, 0.2453692)]);
        cfg.simulate.start = StartConfig { factor: 0.3, history: None };
        cfg.simulate.t_end = 40_000.0;
        cfg.simulate.sample_from = 30_000.0;
        cfg.simulate.period_windows = vec![(30_000.0, 40_000.0)];
        cfg
    };
    let orbit_diagram = {
        let mut cfg = adjusted(&[(Param::Kappa, 0.865)]);
        cfg.sweep.param = Param::Tau;
        cfg.sweep.pieces = vec![(1.0, 3.4, 9121), (3.4, 4.4, 19000), (4.4, 5.0, 2281)];
        cfg.sweep.down_mesh = DownMesh::Interleaved;
        cfg.sweep.options = SweepOptions {
            transient: 50.0,
            ..SweepOptions::default()
        };
        cfg
    };
    let transient = {
        let mut cfg = adjusted(&[(Param::Kappa, 0.68), (Param::Gamma, 0.0354608), (Param::Tau, 9.88888)]);
        cfg.simulate.t_end = 30_000.0;
        cfg.simulate.period_windows = vec![(2000.0, 5000.0), (25_000.0, 30_000.0)];
        cfg
    };
    let snaking = {
        let mut cfg = adjusted(&[(Param::Gamma, 0.15), (Param::Kappa, 0.2)]);
        cfg.sweep.param = Param::Tau;
        cfg.sweep.pieces = vec![(4.26197, 4.26219, 2000)];
        cfg.sweep.directions = vec![SweepDirection::Decreasing];
        cfg.sweep.down_mesh = DownMesh::Reversed;
        cfg.sweep.options = SweepOptions {
            transient: 1530.0,
            record: 170.0,
            selection: ExtremaSelection::All,
            ..SweepOptions::default()
        };
        cfg
    };
    let mut fig1 = RunConfig::default();
    fig1.stability.c0_points = 400;

    vec![
        preset(
            "fig1",
            Command::Stability,
            "stability boundary C0 and the (a tau, b tau) locus of the homeostatic state as the delay varies",
            vec![
                check("tau1_minus", 5.74851),
                check("tau1_plus", 6.87437),
                check("tau2", 6.87662),
                check("tau_max", 6.90401),
            ],
            fig1,
        ),
        preset(
            "fig2-kappa-scan",
            Command::Sweep,
            "stable states and orbits continued in kappa at the homeostatic delay",
            vec![check("hopf_kappa_lower", 0.17632), check("hopf_kappa_upper", 1.5317)],
            scan(Param::Kappa, vec![(0.1, 1.8, 341)], 100.0),
        ),
        preset(
            "fig5-gamma-scan",
            Command::Sweep,
            "stable orbits continued in gamma through the long-period region",
            vec![
                check("hopf_gamma_lower", 0.227918),
                check("hopf_gamma_upper", 0.245375),
                check("period_at_fold_days", 82.0),
            ],
            scan(Param::Gamma, vec![(0.2, 0.26, 601)], 200.0),
        ),
        preset(
            "fig7-tau-scan",
            Command::Sweep,
            "stable states and orbits continued in the delay",
            vec![check("hopf_tau_lower", 5.74851), check("hopf_tau_upper", 6.87437)],
            scan(Param::Tau, vec![(3.0, 6.9, 391)], 100.0),
        ),
        preset(
            "fig10-canard",
            Command::Slowman,
            "slow manifold, nullcline and landmarks at the canard parameter set",
            vec![
                check("epsilon", 6.132e-3),
                check("c", 2.23),
                check("q_star", 0.0896868),
                check("q_f", 0.042263),
                check("stability_switch", 0.0893174),
                check("q_hp_minus", 0.08626),
                check("q_hp_plus", 0.09389),
                check("max_period_days", 714.0),
            ],
            canard,
        ),
        preset(
            "fig11-torus",
            Command::Lyapunov,
            "Lyapunov spectrum on the quasi-periodic torus",
            vec![
                check("lambda_1", 0.0),
                check("lambda_2", 0.0),
                check("kaplan_yorke_dimension", 2.0),
            ],
            torus.clone(),
        ),
        preset(
            "fig11-torus-section",
            Command::Poincare,
            "Poincare section Q(t) = 0.14 of the torus, projected on (Q(t - tau), Q(t - tau/2))",
            vec![check("closed_curve_min_crossings", 100.0)],
            torus,
        ),
        preset(
            "fig12-chaos",
            Command::Lyapunov,
            "chaotic attractor at kappa = 0.865, tau = 3.9",
            vec![check("lambda_1", 0.0107), check("kaplan_yorke_dimension", 2.11)],
            lyapunov_run(&[(Param::Kappa, 0.865), (Param::Tau, 3.9)], 4, 1.01),
        ),
        preset(
            "fig12-chaos-b",
            Command::Lyapunov,
            "chaotic attractor at kappa = 0.865, tau = 4.07",
            vec![check("lambda_1", 0.03027), check("kaplan_yorke_dimension", 2.268)],
            lyapunov_run(&[(Param::Kappa, 0.865), (Param::Tau, 4.07)], 4, 1.01),
        ),
        preset(
            "high-dim-chaos",
            Command::Lyapunov,
            "chaos with several positive exponents at a long delay",
            vec![check("kaplan_yorke_dimension", 5.3)],
            lyapunov_run(
                &[(Param::Kappa, 0.662), (Param::Gamma, 0.0354608), (Param::Tau, 9.88888)],
                12,
                1.01,
            ),
        ),
        preset(
            "fig13-orbit-diagram",
            Command::Sweep,
            "orbit diagram in the delay at kappa = 0.865 on the 30400-point mesh, both directions",
            vec![
                check("mesh_points", 30400.0),
                check("hopf_tau_lower", 1.1364),
                check("hopf_tau_upper", 4.6841),
                check("period_doubling_tau", 3.1303),
                check("period_doubling_tau", 4.5575),
                check("hysteresis_near_tau", 3.85),
            ],
            orbit_diagram,
        ),
        preset(
            "fig15-transient-chaos",
            Command::Simulate,
            "irregular transient that settles on a periodic orbit",
            vec![check("final_period_days", 87.75)],
            transient,
        ),
        preset(
            "fig17-snaking",
            Command::Sweep,
            "orbit diagram across the snaking region, decreasing delay",
            vec![
                check("fold_tau", 4.262041),
                check("period_doubling_tau", 4.261983),
                check("period_doubling_tau", 4.262037),
                check("period_doubling_tau", 4.262054),
                check("period_doubling_tau", 4.262183),
            ],
            snaking,
        ),
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    catalog().into_iter().find(|p| p.name == name)
}

/// Parameters a preset resolves to, for listings.
pub fn model_of(p: &Preset) -> Option<ModelParams> {
    p.config.model().ok()
}
