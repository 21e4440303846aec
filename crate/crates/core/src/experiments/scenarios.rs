//! Named parameter sets shipped with the CLI.

use crate::geometry::DomainShape;

use super::config::{ExperimentConfig, ExperimentKind, HRule, SolverSettings, CONFIG_SCHEMA_VERSION};
use super::payoff::PayoffSpec;

fn base(kind: ExperimentKind, shape: DomainShape, p: f64, gamma: f64) -> ExperimentConfig {
    ExperimentConfig {
        version: CONFIG_SCHEMA_VERSION,
        kind,
        shape,
        p,
        gamma,
        epsilons: vec![0.1],
        h_rule: HRule::EpsOver { eps_over: 8 },
        payoff: PayoffSpec::Constant { c: 1.0 },
        seed: 20260811,
        solver: SolverSettings::default(),
        n_samples: 0,
        points: vec![],
        eta: 0.01,
        horizon: 50,
        converge_threshold: None,
        region_radius: None,
        quotient_bound: None,
        dump_trajectories: 0,
    }
}

fn interval() -> DomainShape {
    DomainShape::Interval { a: -1.0, b: 1.0 }
}

fn unit_ball_2d() -> DomainShape {
    DomainShape::Ball {
        center: vec![0.0, 0.0],
        radius: 1.0,
    }
}

/// The 1-D scenario whose solution profile is cosh(x)/cosh(1): p = 3 and
/// γ = 1/4 make the limit equation u'' = u (2(p+1)γ/(p-1) = 1) with data
/// F ≡ 1 on (-1, 1). The ε/16 spacing keeps the sweep errors monotone.
fn figure1_base(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = base(kind, interval(), 3.0, 0.25);
    cfg.epsilons = vec![0.1, 0.05, 0.025];
    cfg.h_rule = HRule::EpsOver { eps_over: 16 };
    cfg
}

/// 2-D radial scenario: p = 4, γ = 1 on the unit ball, F ≡ 1.
fn ball2d_base(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = base(kind, unit_ball_2d(), 4.0, 1.0);
    cfg.epsilons = vec![0.2];
    cfg
}

/// Looks up a named scenario.
pub fn builtin_scenario(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "figure1" => {
            let mut cfg = figure1_base(ExperimentKind::Converge);
            cfg.converge_threshold = Some(0.05);
            cfg
        }
        "figure1-solve" => {
            let mut cfg = figure1_base(ExperimentKind::Solve);
            cfg.epsilons = vec![0.1];
            cfg
        }
        "figure1-compare" => {
            let mut cfg = figure1_base(ExperimentKind::Compare);
            cfg.epsilons = vec![0.1];
            cfg.points = vec![vec![0.0], vec![0.3], vec![-0.3], vec![0.6], vec![-0.6]];
            cfg.n_samples = 100_000;
            cfg
        }
        "figure1-simulate" => {
            let mut cfg = figure1_base(ExperimentKind::Simulate);
            cfg.epsilons = vec![0.1];
            cfg.points = vec![vec![0.0]];
            cfg.n_samples = 20_000;
            cfg.dump_trajectories = 8;
            cfg
        }
        "figure1-regularity" => {
            let mut cfg = figure1_base(ExperimentKind::Regularity);
            cfg.region_radius = Some(0.5);
            cfg
        }
        "figure1-boundary" => figure1_base(ExperimentKind::Boundary),
        "ball2d" => ball2d_base(ExperimentKind::Solve),
        "ball2d-converge" => {
            let mut cfg = ball2d_base(ExperimentKind::Converge);
            cfg.epsilons = vec![0.4, 0.3, 0.2];
            cfg.converge_threshold = Some(0.25);
            cfg
        }
        "ball2d-compare" => {
            let mut cfg = ball2d_base(ExperimentKind::Compare);
            cfg.points = vec![vec![0.0, 0.0], vec![0.4, 0.0], vec![0.0, -0.6]];
            cfg.n_samples = 100_000;
            cfg
        }
        "ball2d-regularity" => {
            let mut cfg = ball2d_base(ExperimentKind::Regularity);
            cfg.epsilons = vec![0.3, 0.2, 0.15];
            cfg.region_radius = Some(0.5);
            cfg
        }
        "annulus-exit" => {
            let mut cfg = base(
                ExperimentKind::StoppingTime,
                DomainShape::Annulus {
                    center: vec![0.0, 0.0],
                    r_in: 0.3,
                    r_out: 2.0,
                },
                6.0, // alpha = 1/2
                0.0,
            );
            cfg.epsilons = vec![0.1, 0.05, 0.025];
            cfg.points = vec![
                vec![0.5, 0.0],
                vec![0.8, 0.0],
                vec![1.2, 0.0],
                vec![1.6, 0.0],
            ];
            cfg.n_samples = 2000;
            cfg
        }
        "expansion-default" => {
            let mut cfg = base(ExperimentKind::Expansion, interval(), 4.0, 0.3);
            cfg.epsilons = vec![0.2, 0.1, 0.05, 0.025];
            cfg
        }
        _ => return None,
    };
    Some(cfg)
}

/// Names accepted by [`builtin_scenario`].
pub fn scenario_names() -> &'static [&'static str] {
    &[
        "figure1",
        "figure1-solve",
        "figure1-compare",
        "figure1-simulate",
        "figure1-regularity",
        "figure1-boundary",
        "ball2d",
        "ball2d-converge",
        "ball2d-compare",
        "ball2d-regularity",
        "annulus-exit",
        "expansion-default",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_validates() {
        for name in scenario_names() {
            let cfg = builtin_scenario(name).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(builtin_scenario("nope").is_none());
    }

    #[test]
    fn figure1_limit_equation_is_unit_coefficient() {
        let cfg = builtin_scenario("figure1").unwrap();
        let params = cfg.params_for(0.1).unwrap();
        // 2(p+1)γ/(p-1) = 1 makes the limit ODE u'' = u
        let mu = params.limit_coupling() / (params.p() - 1.0);
        assert!((mu - 1.0).abs() < 1e-14);
    }
}
