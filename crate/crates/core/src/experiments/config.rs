//! Experiment configuration schema (versioned JSON).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::DomainShape;
use crate::grid::MIN_POINTS_PER_RADIUS;
use crate::params::GameParams;

use super::payoff::PayoffSpec;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Simulate,
    Converge,
    Compare,
    Regularity,
    Boundary,
    StoppingTime,
    Expansion,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Converge => "converge",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Regularity => "regularity",
            ExperimentKind::Boundary => "boundary",
            ExperimentKind::StoppingTime => "stopping-time",
            ExperimentKind::Expansion => "expansion",
        }
    }
}

/// Grid spacing rule: a fraction of ε or an absolute spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HRule {
    /// `{"eps_over": 8}` means h = ε/8.
    EpsOver { eps_over: u32 },
    /// `{"absolute": 0.01}` uses the same spacing for every ε.
    Absolute { absolute: f64 },
}

impl HRule {
    pub fn spacing(&self, epsilon: f64) -> f64 {
        match self {
            HRule::EpsOver { eps_over } => epsilon / *eps_over as f64,
            HRule::Absolute { absolute } => *absolute,
        }
    }
}

fn default_eta() -> f64 {
    0.01
}

fn default_horizon() -> usize {
    50
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    2_000_000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

/// One experiment: geometry, game parameters, the ε sweep, the payoff, and
/// the experiment-specific knobs. Unused knobs are ignored by runners that
/// do not need them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version_default")]
    pub version: u32,
    pub kind: ExperimentKind,
    pub shape: DomainShape,
    pub p: f64,
    pub gamma: f64,
    /// ε values, processed in the given order (sweeps usually descend).
    pub epsilons: Vec<f64>,
    pub h_rule: HRule,
    pub payoff: PayoffSpec,
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Monte Carlo sample count (simulate/compare/stopping-time).
    #[serde(default)]
    pub n_samples: usize,
    /// Evaluation or starting points (simulate/compare/stopping-time).
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Greedy-strategy slack budget.
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Step horizon for per-step statistics.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Final-error assertion threshold for convergence sweeps.
    #[serde(default)]
    pub converge_threshold: Option<f64>,
    /// Radius of the interior sampling region for regularity sweeps
    /// (default: half the inradius).
    #[serde(default)]
    pub region_radius: Option<f64>,
    /// Absolute quotient bound for regularity sweeps (1-D configs derive it
    /// from the oracle when absent).
    #[serde(default)]
    pub quotient_bound: Option<f64>,
    /// How many trajectories `simulate` dumps as JSON lines.
    #[serde(default)]
    pub dump_trajectories: usize,
}

fn schema_version_default() -> u32 {
    CONFIG_SCHEMA_VERSION
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Game parameters for one ε of the sweep.
    pub fn params_for(&self, epsilon: f64) -> Result<GameParams> {
        GameParams::new(self.p, self.dim(), self.gamma, epsilon)
    }

    /// Full validation: shape, payoff preset, every ε of the sweep against
    /// the standing assumption γε² < 1/2 and the spacing floor, and the
    /// kind-specific requirements. Rejects before any compute.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "config schema version {} unsupported (expected {CONFIG_SCHEMA_VERSION})",
                self.version
            )));
        }
        self.shape.validate()?;
        self.payoff.validate(self.dim())?;
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("empty epsilon list".into()));
        }
        for &eps in &self.epsilons {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidConfig(format!("epsilon = {eps}")));
            }
            if self.gamma * eps * eps >= 0.5 {
                return Err(Error::InvalidConfig(format!(
                    "gamma*epsilon^2 = {} >= 1/2 for epsilon = {eps}",
                    self.gamma * eps * eps
                )));
            }
            let h = self.h_rule.spacing(eps);
            if !(h > 0.0) || h * MIN_POINTS_PER_RADIUS > eps * (1.0 + 1e-9) {
                return Err(Error::InvalidConfig(format!(
                    "h rule gives spacing {h} for epsilon {eps}: need h <= eps/{MIN_POINTS_PER_RADIUS}"
                )));
            }
        }
        let _ = self.params_for(self.epsilons[0])?;
        for pt in &self.points {
            if pt.len() != self.dim() {
                return Err(Error::InvalidConfig(format!(
                    "point {pt:?} has wrong dimension (domain is {}-d)",
                    self.dim()
                )));
            }
        }
        match self.kind {
            ExperimentKind::Simulate | ExperimentKind::Compare => {
                if self.points.is_empty() {
                    return Err(Error::InvalidConfig("no evaluation points".into()));
                }
                if self.n_samples == 0 {
                    return Err(Error::InvalidConfig("n_samples must be positive".into()));
                }
                for pt in &self.points {
                    if !self.shape.contains(pt) {
                        return Err(Error::InvalidConfig(format!(
                            "point {pt:?} is not inside the domain"
                        )));
                    }
                }
            }
            ExperimentKind::Converge => {
                if self.epsilons.len() < 2 {
                    return Err(Error::InvalidConfig(
                        "convergence sweeps need at least two epsilons".into(),
                    ));
                }
                for w in self.epsilons.windows(2) {
                    if w[1] >= w[0] {
                        return Err(Error::InvalidConfig(
                            "convergence sweeps list epsilons in decreasing order".into(),
                        ));
                    }
                }
                self.require_oracle()?;
            }
            ExperimentKind::Regularity | ExperimentKind::Boundary => {
                if self.epsilons.len() < 2 {
                    return Err(Error::InvalidConfig(
                        "sweep experiments need at least two epsilons".into(),
                    ));
                }
                if self.kind == ExperimentKind::Boundary && self.payoff.lipschitz().is_none() {
                    return Err(Error::InvalidConfig(
                        "boundary experiments need an analytic (Lipschitz) payoff preset".into(),
                    ));
                }
            }
            ExperimentKind::StoppingTime => {
                if !matches!(self.shape, DomainShape::Annulus { .. }) {
                    return Err(Error::InvalidConfig(
                        "stopping-time experiments run on an annulus".into(),
                    ));
                }
                if self.points.is_empty() || self.n_samples == 0 {
                    return Err(Error::InvalidConfig(
                        "stopping-time experiments need starting points and samples".into(),
                    ));
                }
            }
            ExperimentKind::Solve | ExperimentKind::Expansion => {}
        }
        Ok(())
    }

    /// Whether a reference solution exists for the configured geometry, as
    /// required by convergence sweeps: any payoff on an interval (the 1-D
    /// closed form takes general endpoint data), constant payoffs on a ball.
    pub fn require_oracle(&self) -> Result<()> {
        match (&self.shape, &self.payoff) {
            (DomainShape::Interval { .. }, _) => Ok(()),
            (DomainShape::Ball { .. }, PayoffSpec::Constant { .. }) => Ok(()),
            (DomainShape::Annulus { .. }, PayoffSpec::Constant { .. }) => Err(
                Error::InvalidConfig(
                    "radial annulus sweeps need distinct inner/outer data; use sample payoffs on a ball or an interval".into(),
                ),
            ),
            _ => Err(Error::InvalidConfig(
                "no oracle for this geometry/payoff combination (1-D interval or radial ball with constant data)".into(),
            )),
        }
    }

    /// Hex digest of the canonical JSON serialization; embedded in every
    /// emitted manifest for provenance.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            version: CONFIG_SCHEMA_VERSION,
            kind: ExperimentKind::Solve,
            shape: DomainShape::Interval { a: -1.0, b: 1.0 },
            p: 3.0,
            gamma: 0.25,
            epsilons: vec![0.1],
            h_rule: HRule::EpsOver { eps_over: 8 },
            payoff: PayoffSpec::Constant { c: 1.0 },
            seed: 1,
            solver: SolverSettings::default(),
            n_samples: 0,
            points: vec![],
            eta: default_eta(),
            horizon: default_horizon(),
            converge_threshold: None,
            region_radius: None,
            quotient_bound: None,
            dump_trajectories: 0,
        }
    }

    #[test]
    fn validates_standing_assumption_over_the_whole_sweep() {
        let mut cfg = base();
        cfg.epsilons = vec![0.1, 0.05];
        assert!(cfg.validate().is_ok());
        cfg.gamma = 60.0; // 60 * 0.01 = 0.6 >= 1/2
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_coarse_h_rule() {
        let mut cfg = base();
        cfg.h_rule = HRule::EpsOver { eps_over: 3 };
        assert!(cfg.validate().is_err());
        cfg.h_rule = HRule::Absolute { absolute: 0.05 };
        assert!(cfg.validate().is_err()); // 0.05 * 4 > 0.1
        cfg.h_rule = HRule::Absolute { absolute: 0.025 };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let cfg = base();
        assert_eq!(cfg.hash(), cfg.clone().hash());
        let mut other = base();
        other.seed = 2;
        assert_ne!(cfg.hash(), other.hash());
    }

    #[test]
    fn json_round_trip() {
        let mut cfg = base();
        cfg.kind = ExperimentKind::StoppingTime;
        cfg.shape = DomainShape::Annulus {
            center: vec![0.0, 0.0],
            r_in: 0.3,
            r_out: 2.0,
        };
        cfg.points = vec![vec![0.5, 0.0]];
        cfg.n_samples = 100;
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.hash(), cfg.hash());
        assert!(back.validate().is_ok());
    }

    #[test]
    fn h_rule_parses_both_forms() {
        let r: HRule = serde_json::from_str(r#"{"eps_over": 8}"#).unwrap();
        assert_eq!(r.spacing(0.4), 0.05);
        let r: HRule = serde_json::from_str(r#"{"absolute": 0.01}"#).unwrap();
        assert_eq!(r.spacing(0.4), 0.01);
    }
}
