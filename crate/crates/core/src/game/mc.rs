//! Monte Carlo estimation of game values for fixed strategies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::DomainShape;
use crate::params::GameParams;
use crate::solver::pairwise_sum;

use super::play::{check_game_inputs, rollout_payoff};
use super::rng::TrajectoryRng;
use super::strategy::Strategy;
use super::Payoff;

/// Sample mean of the discounted payoff over independent rollouts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by √n.
    pub std_error: f64,
    pub n_samples: usize,
    pub truncation_count: usize,
    pub seed: u64,
}

/// Runs `n_samples` independent games from x₀ and averages their payoffs.
///
/// Each sample consumes the stream derived from (seed, sample index), and
/// the reduction runs in sample order, so the estimate is deterministic for
/// a given seed whatever the thread count.
pub fn estimate_value(
    x0: &[f64],
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    params: &GameParams,
    shape: &DomainShape,
    payoff: &dyn Payoff,
    n_samples: usize,
    seed: u64,
    max_steps: usize,
) -> Result<McEstimate> {
    check_game_inputs(x0, params, shape, max_steps)?;
    if n_samples == 0 {
        return Err(crate::error::Error::InvalidArgument(
            "n_samples must be at least 1".into(),
        ));
    }

    let results: Vec<(f64, bool)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = TrajectoryRng::for_sample(seed, sample);
            let (payoff_value, _tau, truncated) = rollout_payoff(
                x0, player_one, player_two, params, shape, payoff, &mut rng, max_steps,
            );
            (payoff_value, truncated)
        })
        .collect();

    let payoffs: Vec<f64> = results.iter().map(|(p, _)| *p).collect();
    let truncation_count = results.iter().filter(|(_, t)| *t).count();
    let n = payoffs.len() as f64;
    let mean = pairwise_sum(&payoffs) / n;
    let std_error = if payoffs.len() > 1 {
        let sq: Vec<f64> = payoffs.iter().map(|p| (p - mean) * (p - mean)).collect();
        (pairwise_sum(&sq) / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error,
        n_samples: payoffs.len(),
        truncation_count,
        seed,
    })
}
