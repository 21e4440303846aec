//! Configured experiments: convergence sweeps against oracles, game-vs-solver
//! comparisons, regularity and boundary-modulus surveys, stopping-time
//! scaling, and expansion checks. Runners write CSV data plus a JSON manifest
//! and report named pass/fail assertions.

mod config;
mod payoff;
mod report;
mod runners;
mod scenarios;

pub use config::{
    ExperimentConfig, ExperimentKind, HRule, SolverSettings, CONFIG_SCHEMA_VERSION,
};
pub use payoff::PayoffSpec;
pub use report::{linear_fit, Assertion, RunOutcome};
pub use runners::{run, DEFAULT_CONVERGE_THRESHOLD, GAME_VALUE_MARGIN_C};
pub use scenarios::{builtin_scenario, scenario_names};
