//! Game parameters (p, n, γ, ε) and the quantities derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the discounted tug-of-war game.
///
/// The mixing weights are α = (p-2)/(p+n) for the coin-toss branch and
/// β = (n+2)/(p+n) for the uniform random move, and each turn multiplies the
/// eventual payoff by the discount factor 1 - γε². The standing assumption
/// γε² < 1/2 keeps the discount positive and the fixed-point iteration
/// contractive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    p: f64,
    dim: usize,
    gamma: f64,
    epsilon: f64,
}

impl GameParams {
    pub fn new(p: f64, dim: usize, gamma: f64, epsilon: f64) -> Result<Self> {
        if !(p.is_finite() && p > 2.0) {
            return Err(Error::InvalidParams(format!("p = {p}, need p > 2")));
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParams(format!("gamma = {gamma}, need gamma >= 0")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParams(format!("epsilon = {epsilon}")));
        }
        if gamma * epsilon * epsilon >= 0.5 {
            return Err(Error::InvalidParams(format!(
                "gamma * epsilon^2 = {} violates the standing assumption < 1/2",
                gamma * epsilon * epsilon
            )));
        }
        Ok(GameParams {
            p,
            dim,
            gamma,
            epsilon,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Coin-toss weight α = (p-2)/(p+n) ∈ (0,1).
    pub fn alpha(&self) -> f64 {
        (self.p - 2.0) / (self.p + self.dim as f64)
    }

    /// Random-move weight β = 1 - α. Defined as the complement so the two
    /// weights sum to exactly 1 in floating point.
    pub fn beta(&self) -> f64 {
        1.0 - self.alpha()
    }

    /// Per-turn payoff discount 1 - γε².
    pub fn discount(&self) -> f64 {
        1.0 - self.gamma * self.epsilon * self.epsilon
    }

    /// Zeroth-order coefficient of the limiting equation.
    ///
    /// Expanding the sup/inf/average operator on a smooth u gives the ε²
    /// increment Δ_p^N u / (2(p+n)) - γu, with Δ_p^N u = Δu + (p-2)Δ_∞^N u.
    /// Setting it to zero yields Δ_p^N u = 2(p+n)γ u, so the effective
    /// zeroth-order coupling is λ = 2(p+n)γ.
    pub fn limit_coupling(&self) -> f64 {
        2.0 * (self.p + self.dim as f64) * self.gamma
    }

    /// Same parameters with a different ε (used by ε-sweeps).
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        GameParams::new(self.p, self.dim, self.gamma, epsilon)
    }
}
