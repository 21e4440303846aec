//! Value functions of discounted tug-of-war games.
//!
//! The library discretizes a bounded domain together with its ε-boundary
//! strip, solves the dynamic programming principle
//!
//! ```text
//! u(x) = (1 - γε²) { (α/2)(sup_{B_ε(x)} u + inf_{B_ε(x)} u) + β · avg_{B_ε(x)} u }
//! ```
//!
//! by monotone fixed-point iteration, simulates the underlying two-player
//! stochastic game with pluggable strategies and reproducible randomness,
//! and validates the solver against closed-form and radial ODE references.
//!
//! Modules:
//! - [`geometry`], [`grid`]: domains and their lattice discretization.
//! - [`params`], [`field`]: game parameters and grid fields.
//! - [`solver`]: the sup/inf/average operator and fixed-point solves.
//! - [`expansion`]: grid-free ε² expansion checks for smooth test functions.
//! - [`oracle`]: 1-D closed forms and radial two-point boundary solves.
//! - [`game`]: trajectory simulation, strategies, Monte Carlo estimation.
//! - [`experiments`]: configured experiment runners and their file outputs.

pub mod error;
pub mod expansion;
pub mod experiments;
pub mod field;
pub mod game;
pub mod geometry;
pub mod grid;
pub mod oracle;
pub mod params;
pub mod solver;

pub use error::{Error, Result};
pub use field::{FieldRole, ValueField};
pub use geometry::DomainShape;
pub use grid::{DomainGrid, GridSummary, PointClass};
pub use params::GameParams;
pub use solver::{apply_dpp, dpp_residual, solve_dpp, SolveOptions, SolveReport};
