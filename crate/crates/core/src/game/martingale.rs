//! Per-step statistics of the compensated value process
//!
//! ```text
//! M_k = (1-γε²)^k u(x_k) + η·2^{-(k-1)},
//! ```
//!
//! which is a supermartingale when Player II plays the greedy minimizer of a
//! solved field u, whatever Player I does. The check estimates
//! E[M_{k+1} - M_k | τ > k] for each step up to a horizon.
//!
//! Along a trajectory u is read by multilinear interpolation of the solved
//! field inside the domain and by the boundary payoff outside it (the two
//! agree on the strip up to interpolation error).

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldRole, ValueField};
use crate::geometry::DomainShape;
use crate::params::GameParams;

use super::play::advance;
use super::rng::TrajectoryRng;
use super::strategy::{Extremum, GreedyStrategy, Strategy};
use super::Payoff;

/// Estimated mean increment of M at one step, conditional on the game still
/// running.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepIncrementStats {
    pub step: usize,
    pub mean: f64,
    pub std_error: f64,
    pub n_alive: usize,
}

#[derive(Clone, Copy, Default)]
struct Accumulator {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

impl Accumulator {
    fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }
    fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}

/// Samples E[M_{k+1} - M_k | τ > k] for k < horizon over `n_samples`
/// trajectories with Player II playing the greedy minimizer of `u` and
/// Player I playing `player_one`.
///
/// Aggregation is chunked by sample index with a fixed chunk size, so the
/// result does not depend on the number of worker threads.
#[allow(clippy::too_many_arguments)]
pub fn supermartingale_check(
    u: &ValueField,
    params: &GameParams,
    shape: &DomainShape,
    payoff: &dyn Payoff,
    player_one: &dyn Strategy,
    eta: f64,
    n_samples: usize,
    horizon: usize,
    seed: u64,
    x0: &[f64],
) -> Result<Vec<StepIncrementStats>> {
    if u.role() != FieldRole::Solution {
        return Err(Error::InvalidArgument(
            "supermartingale check requires a converged solution field".into(),
        ));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("eta = {eta}, need eta > 0")));
    }
    if horizon == 0 || n_samples == 0 {
        return Err(Error::InvalidArgument(
            "horizon and n_samples must be positive".into(),
        ));
    }
    super::play::check_game_inputs(x0, params, shape, horizon)?;

    let u_shared = Arc::new(u.clone());
    let minimizer = GreedyStrategy::new(u_shared.clone(), Extremum::Minimize, eta);
    let discount = params.discount();
    let eval_u = |x: &[f64]| -> f64 {
        if shape.contains(x) {
            u_shared
                .eval_interpolated(x)
                .or_else(|| u_shared.eval_nearest(x))
                .unwrap_or_else(|| payoff.eval(x))
        } else {
            payoff.eval(x)
        }
    };

    const CHUNK: usize = 1024;
    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunk_accs: Vec<Vec<Accumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_samples);
            let mut accs = vec![Accumulator::default(); horizon];
            let mut pos = vec![0.0; params.dim()];
            let mut mv = vec![0.0; params.dim()];
            for sample in lo..hi {
                let mut rng = TrajectoryRng::for_sample(seed, sample as u64);
                pos.copy_from_slice(x0);
                let mut m_prev = eval_u(&pos) + 2.0 * eta; // M_0: discount^0, η·2^{-(0-1)}
                for k in 0..horizon {
                    advance(
                        &mut pos,
                        k,
                        player_one,
                        &minimizer,
                        params,
                        &mut rng,
                        &mut mv,
                    );
                    let stopped = !shape.contains(&pos);
                    let m_next = discount.powi(k as i32 + 1) * eval_u(&pos)
                        + eta * 2f64.powi(-(k as i32));
                    accs[k].push(m_next - m_prev);
                    if stopped {
                        break;
                    }
                    m_prev = m_next;
                }
            }
            accs
        })
        .collect();

    let mut totals = vec![Accumulator::default(); horizon];
    for accs in &chunk_accs {
        for (t, a) in totals.iter_mut().zip(accs) {
            t.merge(a);
        }
    }

    Ok(totals
        .iter()
        .enumerate()
        .map(|(k, acc)| {
            let n = acc.count as f64;
            let mean = if acc.count > 0 { acc.sum / n } else { 0.0 };
            let std_error = if acc.count > 1 {
                let var = (acc.sum_sq - n * mean * mean).max(0.0) / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            StepIncrementStats {
                step: k,
                mean,
                std_error,
                n_alive: acc.count,
            }
        })
        .collect())
}
