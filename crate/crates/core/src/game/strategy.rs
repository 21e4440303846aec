//! Player strategies: deterministic maps from the game state to a
//! displacement in the closed unit ball (the token moves by ε times the
//! displacement).

use std::sync::Arc;

use crate::field::ValueField;

/// State visible to a strategy when choosing a move. Strategies must be
/// deterministic functions of it.
pub struct StepContext<'a> {
    /// Turn index k (0 for the move leaving the starting position).
    pub step: usize,
    /// Current token position.
    pub position: &'a [f64],
    /// Game step radius ε.
    pub epsilon: f64,
}

pub trait Strategy: Send + Sync {
    fn label(&self) -> &str;

    /// Writes the chosen displacement (|s| ≤ 1) into `out`.
    fn choose(&self, ctx: &StepContext<'_>, out: &mut [f64]);
}

/// Never moves the token.
pub struct ZeroStrategy;

impl Strategy for ZeroStrategy {
    fn label(&self) -> &str {
        "zero"
    }
    fn choose(&self, _ctx: &StepContext<'_>, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Steps the full ε toward a fixed target, or exactly onto it when closer
/// than ε.
pub struct PullStrategy {
    target: Vec<f64>,
}

impl PullStrategy {
    pub fn new(target: Vec<f64>) -> Self {
        PullStrategy { target }
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }
}

impl Strategy for PullStrategy {
    fn label(&self) -> &str {
        "pull"
    }
    fn choose(&self, ctx: &StepContext<'_>, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.target.len());
        let mut norm_sq = 0.0;
        for (o, (t, x)) in out.iter_mut().zip(self.target.iter().zip(ctx.position)) {
            *o = t - x;
            norm_sq += *o * *o;
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            return;
        }
        // unit vector toward the target, or the remaining vector scaled by
        // 1/ε when the target is inside the step radius
        let scale = if norm <= ctx.epsilon {
            1.0 / ctx.epsilon
        } else {
            1.0 / norm
        };
        for o in out.iter_mut() {
            *o *= scale;
        }
    }
}

/// Steps the full ε directly away from a fixed center (the natural adversary
/// of [`PullStrategy`]: against it the pull drift cancels and the token moves
/// diffusively). Stays put at the center itself, where the direction is
/// undefined.
pub struct FleeStrategy {
    center: Vec<f64>,
}

impl FleeStrategy {
    pub fn new(center: Vec<f64>) -> Self {
        FleeStrategy { center }
    }
}

impl Strategy for FleeStrategy {
    fn label(&self) -> &str {
        "flee"
    }
    fn choose(&self, ctx: &StepContext<'_>, out: &mut [f64]) {
        let mut norm_sq = 0.0;
        for (o, (c, x)) in out.iter_mut().zip(self.center.iter().zip(ctx.position)) {
            *o = x - c;
            norm_sq += *o * *o;
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            return;
        }
        for o in out.iter_mut() {
            *o /= norm;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Maximize,
    Minimize,
}

/// Moves to the grid point in the closed ε-ball of the current position with
/// the best field value. The argmin/argmax over the candidate set is exact,
/// so the per-turn slack schedule η·2^{-k} is satisfied by construction; η is
/// kept as the slack budget that acceptance margins account for. Ties break
/// toward the lowest grid index, i.e. the lexicographically smallest
/// candidate.
pub struct GreedyStrategy {
    field: Arc<ValueField>,
    mode: Extremum,
    eta: f64,
    label: String,
}

impl GreedyStrategy {
    pub fn new(field: Arc<ValueField>, mode: Extremum, eta: f64) -> Self {
        let label = match mode {
            Extremum::Maximize => "greedy-max".to_string(),
            Extremum::Minimize => "greedy-min".to_string(),
        };
        GreedyStrategy {
            field,
            mode,
            eta,
            label,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn field(&self) -> &Arc<ValueField> {
        &self.field
    }
}

impl Strategy for GreedyStrategy {
    fn label(&self) -> &str {
        &self.label
    }

    fn choose(&self, ctx: &StepContext<'_>, out: &mut [f64]) {
        let grid = self.field.grid();
        let mut best: Option<(f64, usize)> = None;
        grid.for_ball_around(ctx.position, |j| {
            let v = self.field.value(j);
            let better = match (&best, self.mode) {
                (None, _) => true,
                (Some((bv, _)), Extremum::Maximize) => v > *bv,
                (Some((bv, _)), Extremum::Minimize) => v < *bv,
            };
            if better {
                best = Some((v, j));
            }
        });
        let (_, j) = best.expect("no grid candidate within epsilon of the token");
        let target = grid.coord(j);
        let mut norm_sq = 0.0;
        for (o, (t, x)) in out.iter_mut().zip(target.iter().zip(ctx.position)) {
            *o = (t - x) / ctx.epsilon;
            norm_sq += *o * *o;
        }
        // the candidate ball admits a relative slack, so the displacement can
        // exceed unit length by rounding; renormalize in that case
        let norm = norm_sq.sqrt();
        if norm > 1.0 {
            for o in out.iter_mut() {
                *o /= norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldRole;
    use crate::geometry::DomainShape;
    use crate::grid::DomainGrid;

    fn ctx<'a>(position: &'a [f64], epsilon: f64) -> StepContext<'a> {
        StepContext {
            step: 0,
            position,
            epsilon,
        }
    }

    #[test]
    fn pull_from_unit_distance() {
        let s = PullStrategy::new(vec![0.0, 0.0]);
        let mut out = vec![0.0; 2];
        s.choose(&ctx(&[1.0, 0.0], 0.25), &mut out);
        assert!((out[0] + 1.0).abs() < 1e-15);
        assert!(out[1].abs() < 1e-15);
    }

    #[test]
    fn pull_lands_exactly_on_near_target() {
        let s = PullStrategy::new(vec![0.1]);
        let mut out = vec![0.0];
        // |target - x| = eps/2: displacement length 1/2, landing on target
        s.choose(&ctx(&[0.0], 0.2), &mut out);
        assert!((out[0] - 0.5).abs() < 1e-15);
        let landing = 0.0 + 0.2 * out[0];
        assert!((landing - 0.1).abs() < 1e-15);
    }

    #[test]
    fn pull_at_target_stays() {
        let s = PullStrategy::new(vec![0.3, -0.4]);
        let mut out = vec![9.0, 9.0];
        s.choose(&ctx(&[0.3, -0.4], 0.2), &mut out);
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn greedy_tie_break_is_lowest_index() {
        let grid = Arc::new(
            DomainGrid::build(DomainShape::Interval { a: -1.0, b: 1.0 }, 0.2, 0.05).unwrap(),
        );
        let field = Arc::new(ValueField::constant(grid, 1.0, FieldRole::Solution));
        let s = GreedyStrategy::new(field.clone(), Extremum::Minimize, 0.0);
        let mut out = vec![0.0];
        s.choose(&ctx(&[0.0], 0.2), &mut out);
        // all candidates tie; the lowest index is the leftmost point -0.2
        assert!((out[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_moves_along_monotone_field() {
        let grid = Arc::new(
            DomainGrid::build(DomainShape::Interval { a: -1.0, b: 1.0 }, 0.2, 0.05).unwrap(),
        );
        let vals: Vec<f64> = (0..grid.len()).map(|i| grid.coord(i)[0]).collect();
        let field = Arc::new(ValueField::new(grid, vals, FieldRole::Solution).unwrap());
        let maxer = GreedyStrategy::new(field.clone(), Extremum::Maximize, 0.0);
        let miner = GreedyStrategy::new(field, Extremum::Minimize, 0.0);
        // from x = 0.013 the candidate window is [-0.187, 0.213]: the best
        // lattice points are 0.2 (max) and -0.15 (min)
        let mut out = vec![0.0];
        maxer.choose(&ctx(&[0.013], 0.2), &mut out);
        assert!((out[0] - (0.2 - 0.013) / 0.2).abs() < 1e-12);
        miner.choose(&ctx(&[0.013], 0.2), &mut out);
        assert!((out[0] - (-0.15 - 0.013) / 0.2).abs() < 1e-12);
    }
}
