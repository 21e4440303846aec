//! Reproducible randomness for game rollouts.
//!
//! Each trajectory draws from its own counter-derived stream, so Monte Carlo
//! batches are deterministic for a given seed and independent of how samples
//! are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Source of the two kinds of randomness a game consumes: uniform coin
/// variables on [0, 1) and uniform points of the unit ball.
pub trait GameRandomness {
    fn uniform01(&mut self) -> f64;

    /// Uniform sample of the closed unit ball, written into `out`.
    ///
    /// Default implementation: Gaussian direction (Box-Muller) normalized to
    /// the sphere, scaled by U^(1/n). Exact and rejection-free in any
    /// dimension.
    fn unit_ball(&mut self, out: &mut [f64]) {
        let n = out.len();
        loop {
            let mut i = 0;
            while i < n {
                let u1 = 1.0 - self.uniform01(); // (0, 1]: keeps ln finite
                let u2 = self.uniform01();
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
                out[i] = r * c;
                if i + 1 < n {
                    out[i + 1] = r * s;
                }
                i += 2;
            }
            let norm = crate::geometry::norm(out);
            if norm > 0.0 && norm.is_finite() {
                let radius = self.uniform01().powf(1.0 / n as f64);
                for o in out.iter_mut() {
                    *o *= radius / norm;
                }
                return;
            }
        }
    }
}

/// Counter-based per-trajectory stream: `seed` selects the key, the sample
/// index selects the stream.
pub struct TrajectoryRng(ChaCha8Rng);

impl TrajectoryRng {
    pub fn for_sample(seed: u64, sample: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample);
        TrajectoryRng(rng)
    }
}

impl GameRandomness for TrajectoryRng {
    fn uniform01(&mut self) -> f64 {
        self.0.gen::<f64>()
    }
}

/// Mirror wrapper for symmetry harnesses: swaps the two player branches of
/// the coin variable and negates ball samples, which maps each trajectory of
/// the underlying stream to its spatial reflection.
pub struct MirroredRandomness<R> {
    inner: R,
    alpha: f64,
}

impl<R: GameRandomness> MirroredRandomness<R> {
    pub fn new(inner: R, alpha: f64) -> Self {
        MirroredRandomness { inner, alpha }
    }
}

impl<R: GameRandomness> GameRandomness for MirroredRandomness<R> {
    fn uniform01(&mut self) -> f64 {
        let xi = self.inner.uniform01();
        let half = 0.5 * self.alpha;
        if xi < half {
            xi + half
        } else if xi < self.alpha {
            xi - half
        } else {
            xi
        }
    }

    fn unit_ball(&mut self, out: &mut [f64]) {
        self.inner.unit_ball(out);
        for o in out.iter_mut() {
            *o = -*o;
        }
    }
}
