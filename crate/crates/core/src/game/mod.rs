//! Two-player zero-sum discounted tug-of-war in continuous space.
//!
//! Each turn a coin variable selects Player I (probability α/2), Player II
//! (α/2), or a uniform random move in the ε-ball (β = 1-α); the game stops
//! when the token leaves the open domain and Player II pays
//! (1-γε²)^τ F(X_τ). Strategies are deterministic; all randomness flows
//! through per-trajectory counter-derived streams, so simulations are
//! reproducible and order-independent.

mod martingale;
mod mc;
mod play;
pub mod rng;
mod stopping;
mod strategy;

pub use martingale::{supermartingale_check, StepIncrementStats};
pub use mc::{estimate_value, McEstimate};
pub use play::{play_game, truncation_horizon, Coin, GameTrajectory};
pub use rng::{GameRandomness, MirroredRandomness, TrajectoryRng};
pub use stopping::{stopping_time_stats, StoppingTimeStats};
pub use strategy::{
    Extremum, FleeStrategy, GreedyStrategy, PullStrategy, StepContext, Strategy, ZeroStrategy,
};

/// Boundary payoff F, evaluable anywhere on the strip (exits land between
/// grid points).
pub trait Payoff: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> Payoff for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}
