//! Stopping-time statistics of the confined pull process.
//!
//! Player I pulls toward a fixed center z; the token is confined to the
//! closed ball of radius R around z (moves that would leave it are projected
//! back to the sphere along the move segment) and the process stops only
//! when the token reaches the closed ball of radius δ around z. The
//! interesting quantity is the stopping index τ*, whose mean scales like
//! 1/ε².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::params::GameParams;

use super::play::draw_coin;
use super::rng::{GameRandomness, TrajectoryRng};
use super::strategy::{PullStrategy, StepContext, Strategy};
use super::Coin;

/// Summary of the τ* distribution over independent runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoppingTimeStats {
    pub mean: f64,
    pub variance: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub n_samples: usize,
    pub truncation_count: usize,
    pub seed: u64,
}

/// Runs the confined pull process `n_samples` times from x₀ and summarizes
/// the stopping index.
///
/// Preconditions: δ < |x₀ - z| < R.
#[allow(clippy::too_many_arguments)]
pub fn stopping_time_stats(
    x0: &[f64],
    center: &[f64],
    delta: f64,
    outer_radius: f64,
    player_two: &dyn Strategy,
    params: &GameParams,
    n_samples: usize,
    seed: u64,
    max_steps: usize,
) -> Result<StoppingTimeStats> {
    if x0.len() != center.len() || x0.len() != params.dim() {
        return Err(Error::GridMismatch("dimension mismatch".into()));
    }
    if !(delta > 0.0 && delta < outer_radius) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < delta < R, got delta = {delta}, R = {outer_radius}"
        )));
    }
    let start_dist = dist(x0, center);
    if !(start_dist > delta && start_dist < outer_radius) {
        return Err(Error::InvalidArgument(format!(
            "starting distance {start_dist} must lie in (delta, R) = ({delta}, {outer_radius})"
        )));
    }
    if n_samples == 0 || max_steps == 0 {
        return Err(Error::InvalidArgument(
            "n_samples and max_steps must be positive".into(),
        ));
    }

    let puller = PullStrategy::new(center.to_vec());
    let taus: Vec<usize> = (0..n_samples as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = TrajectoryRng::for_sample(seed, sample);
            run_confined(
                x0,
                center,
                delta,
                outer_radius,
                &puller,
                player_two,
                params,
                &mut rng,
                max_steps,
            )
        })
        .collect();

    let truncation_count = taus.iter().filter(|&&t| t >= max_steps).count();
    let n = taus.len() as f64;
    let mean = taus.iter().map(|&t| t as f64).sum::<f64>() / n;
    let variance = if taus.len() > 1 {
        taus.iter()
            .map(|&t| (t as f64 - mean) * (t as f64 - mean))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let mut sorted = taus.clone();
    sorted.sort_unstable();
    let quantile = |q: f64| sorted[((n - 1.0) * q).round() as usize] as f64;
    Ok(StoppingTimeStats {
        mean,
        variance,
        q10: quantile(0.1),
        median: quantile(0.5),
        q90: quantile(0.9),
        n_samples: taus.len(),
        truncation_count,
        seed,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_confined(
    x0: &[f64],
    center: &[f64],
    delta: f64,
    outer_radius: f64,
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    params: &GameParams,
    rng: &mut dyn GameRandomness,
    max_steps: usize,
) -> usize {
    let dim = x0.len();
    let mut pos = x0.to_vec();
    let mut mv = vec![0.0; dim];
    for k in 0..max_steps {
        let coin = draw_coin(rng, params.alpha());
        match coin {
            Coin::PlayerI => {
                let ctx = StepContext {
                    step: k,
                    position: &pos,
                    epsilon: params.epsilon(),
                };
                player_one.choose(&ctx, &mut mv);
            }
            Coin::PlayerII => {
                let ctx = StepContext {
                    step: k,
                    position: &pos,
                    epsilon: params.epsilon(),
                };
                player_two.choose(&ctx, &mut mv);
            }
            Coin::Random => rng.unit_ball(&mut mv),
        }
        for m in mv.iter_mut() {
            *m *= params.epsilon();
        }
        confine_step(&mut pos, &mv, center, outer_radius);
        if dist(&pos, center) <= delta {
            return k + 1;
        }
    }
    max_steps
}

/// Applies the displacement `d` to `pos`, projecting the landing point back
/// onto the sphere of radius R around `center` along the move segment when
/// the move would leave the closed ball. A move pointing outward from a
/// point already on the sphere leaves the token in place.
fn confine_step(pos: &mut [f64], d: &[f64], center: &[f64], outer_radius: f64) {
    let dim = pos.len();
    let mut landing_sq = 0.0;
    for a in 0..dim {
        let v = pos[a] + d[a] - center[a];
        landing_sq += v * v;
    }
    if landing_sq.sqrt() <= outer_radius {
        for a in 0..dim {
            pos[a] += d[a];
        }
        return;
    }
    // segment-sphere intersection: |v + t d| = R with v = pos - center,
    // |v| <= R; take the root in [0, 1]
    let mut a_coef = 0.0;
    let mut b_coef = 0.0;
    let mut c_coef = -outer_radius * outer_radius;
    for a in 0..dim {
        let v = pos[a] - center[a];
        a_coef += d[a] * d[a];
        b_coef += v * d[a];
        c_coef += v * v;
    }
    if a_coef == 0.0 {
        return;
    }
    let disc = (b_coef * b_coef - a_coef * c_coef).max(0.0);
    let t = ((-b_coef + disc.sqrt()) / a_coef).clamp(0.0, 1.0);
    for a in 0..dim {
        pos[a] += t * d[a];
    }
}
