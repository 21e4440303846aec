//! Single-game simulation in continuous space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainShape;
use crate::params::GameParams;

use super::rng::GameRandomness;
use super::strategy::{StepContext, Strategy};
use super::Payoff;

/// Outcome of one turn's coin variable ξ: the intervals [0, α/2), [α/2, α)
/// and [α, 1) select Player I, Player II, and the uniform random move. The
/// single value ξ = α, formally unassigned in the three-interval convention,
/// goes to the random branch so the cases partition [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coin {
    #[serde(rename = "I")]
    PlayerI,
    #[serde(rename = "II")]
    PlayerII,
    #[serde(rename = "0")]
    Random,
}

pub(crate) fn draw_coin(rng: &mut dyn GameRandomness, alpha: f64) -> Coin {
    let xi = rng.uniform01();
    if xi < 0.5 * alpha {
        Coin::PlayerI
    } else if xi < alpha {
        Coin::PlayerII
    } else {
        Coin::Random
    }
}

/// One rollout: positions X_0..X_τ, per-turn coin outcomes, stopping index,
/// and the discounted payoff (1-γε²)^τ F(X_τ).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameTrajectory {
    pub dim: usize,
    /// Flat position storage, `dim` entries per recorded state.
    pub positions: Vec<f64>,
    pub coins: Vec<Coin>,
    pub tau: usize,
    pub payoff: f64,
    pub truncated: bool,
}

impl GameTrajectory {
    pub fn n_states(&self) -> usize {
        self.positions.len() / self.dim
    }

    pub fn position(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn final_position(&self) -> &[f64] {
        self.position(self.n_states() - 1)
    }

    /// Recomputes the discounted payoff from (τ, X_τ, params); equals the
    /// stored value bit for bit on non-truncated trajectories.
    pub fn recompute_payoff(&self, params: &GameParams, payoff: &dyn Payoff) -> f64 {
        if self.truncated {
            return 0.0;
        }
        params.discount().powi(self.tau as i32) * payoff.eval(self.final_position())
    }
}

/// Truncation horizon: the number of turns after which the remaining
/// discounted payoff is below `tol` in absolute value, so a truncated
/// trajectory contributes a bias smaller than `tol`.
///
/// For γ = 0 there is no quantitative tail bound; a hard cap applies and
/// truncations are reported loudly by the callers.
pub fn truncation_horizon(params: &GameParams, payoff_sup: f64, tol: f64) -> usize {
    const GAMMA_ZERO_CAP: usize = 100_000_000;
    let discount = params.discount();
    if params.gamma() == 0.0 || discount >= 1.0 {
        return GAMMA_ZERO_CAP;
    }
    if payoff_sup <= tol {
        return 1;
    }
    ((tol / payoff_sup).ln() / discount.ln()).ceil().max(1.0) as usize
}

/// Advances the token by one turn. Returns the coin outcome.
#[inline]
pub(crate) fn advance(
    position: &mut [f64],
    step: usize,
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    params: &GameParams,
    rng: &mut dyn GameRandomness,
    move_buf: &mut [f64],
) -> Coin {
    let coin = draw_coin(rng, params.alpha());
    match coin {
        Coin::PlayerI => {
            let ctx = StepContext {
                step,
                position,
                epsilon: params.epsilon(),
            };
            player_one.choose(&ctx, move_buf);
        }
        Coin::PlayerII => {
            let ctx = StepContext {
                step,
                position,
                epsilon: params.epsilon(),
            };
            player_two.choose(&ctx, move_buf);
        }
        Coin::Random => rng.unit_ball(move_buf),
    }
    for (x, s) in position.iter_mut().zip(move_buf.iter()) {
        *x += params.epsilon() * s;
    }
    coin
}

/// Plays one game from x₀ ∈ Ω, recording every state and coin outcome.
///
/// The game stops at the first position outside the open domain (which lies
/// in the ε-strip automatically, every step being at most ε). If `max_steps`
/// turns pass without an exit the trajectory is truncated and its payoff set
/// to zero; see [`truncation_horizon`] for the bias bound.
pub fn play_game(
    x0: &[f64],
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    params: &GameParams,
    shape: &DomainShape,
    payoff: &dyn Payoff,
    rng: &mut dyn GameRandomness,
    max_steps: usize,
) -> Result<GameTrajectory> {
    check_game_inputs(x0, params, shape, max_steps)?;
    let dim = params.dim();
    let mut positions = Vec::with_capacity(dim * 16);
    positions.extend_from_slice(x0);
    let mut coins = Vec::new();
    let mut pos = x0.to_vec();
    let mut move_buf = vec![0.0; dim];

    for k in 0..max_steps {
        let coin = advance(
            &mut pos,
            k,
            player_one,
            player_two,
            params,
            rng,
            &mut move_buf,
        );
        positions.extend_from_slice(&pos);
        coins.push(coin);
        if !shape.contains(&pos) {
            let tau = k + 1;
            let payoff_value = params.discount().powi(tau as i32) * payoff.eval(&pos);
            return Ok(GameTrajectory {
                dim,
                positions,
                coins,
                tau,
                payoff: payoff_value,
                truncated: false,
            });
        }
    }
    Ok(GameTrajectory {
        dim,
        positions,
        coins,
        tau: max_steps,
        payoff: 0.0,
        truncated: true,
    })
}

/// Same dynamics as [`play_game`] without recording states; returns
/// (payoff, τ, truncated).
pub(crate) fn rollout_payoff(
    x0: &[f64],
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    params: &GameParams,
    shape: &DomainShape,
    payoff: &dyn Payoff,
    rng: &mut dyn GameRandomness,
    max_steps: usize,
) -> (f64, usize, bool) {
    let mut pos = x0.to_vec();
    let mut move_buf = vec![0.0; params.dim()];
    for k in 0..max_steps {
        advance(
            &mut pos,
            k,
            player_one,
            player_two,
            params,
            rng,
            &mut move_buf,
        );
        if !shape.contains(&pos) {
            let tau = k + 1;
            return (
                params.discount().powi(tau as i32) * payoff.eval(&pos),
                tau,
                false,
            );
        }
    }
    (0.0, max_steps, true)
}

pub(crate) fn check_game_inputs(
    x0: &[f64],
    params: &GameParams,
    shape: &DomainShape,
    max_steps: usize,
) -> Result<()> {
    if x0.len() != params.dim() || shape.dim() != params.dim() {
        return Err(Error::GridMismatch(format!(
            "dimension mismatch: x0 {}d, shape {}d, params {}d",
            x0.len(),
            shape.dim(),
            params.dim()
        )));
    }
    if !shape.contains(x0) {
        return Err(Error::InvalidArgument(format!(
            "starting point {x0:?} is not inside the domain"
        )));
    }
    if max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    Ok(())
}
