//! The sup/inf/average dynamic-programming operator and its fixed-point
//! solver.
//!
//! On interior points the operator reads
//!
//! ```text
//! (T u)(x) = (1 - γε²) { (α/2) (max_B u + min_B u) + β · mean_B u }
//! ```
//!
//! with B the set of grid points in the closed ε-ball of x, and acts as the
//! identity on the boundary strip. The ball mean is the unweighted arithmetic
//! mean, accumulated by pairwise summation: the result is independent of
//! thread count, and pairwise trees preserve pointwise order of the inputs,
//! so `u ≤ v` implies `T u ≤ T v` exactly in floating point. The monotone
//! iteration u₀ = -‖F‖_∞, u_{k+1} = T u_k then produces a pointwise
//! nondecreasing sequence without tolerance caveats.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldRole, ValueField};
use crate::grid::{DomainGrid, PointClass};
use crate::params::GameParams;

/// Below this many points a sweep runs sequentially; the per-point arithmetic
/// is identical either way, so results do not depend on the choice.
const PAR_THRESHOLD: usize = 4096;

/// Options for `solve_dpp`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Convergence criterion: sup norm of the sweep update ‖u_{k+1} - u_k‖_∞,
    /// which for Jacobi sweeps equals the residual ‖u_k - T u_k‖_∞.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        // For γ = 0 the iteration is not a contraction and the successive
        // difference criterion is heuristic; with γ > 0 the update shrinks by
        // the factor (1 - γε²) per sweep.
        SolveOptions {
            tol: 1e-10,
            max_iter: 2_000_000,
        }
    }
}

/// Record of one fixed-point solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Residual ‖u - T u‖_∞ of the returned field.
    pub final_residual: f64,
    /// Sup norm of the update after each sweep; strictly decreasing when
    /// γ > 0 (contraction) and nonincreasing otherwise.
    pub sup_update_history: Vec<f64>,
    /// Wall-clock time. Excluded from serialized reports so that experiment
    /// outputs are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

fn check_compatible(field: &ValueField, params: &GameParams) -> Result<()> {
    let grid = field.grid();
    if grid.epsilon() != params.epsilon() {
        return Err(Error::GridMismatch(format!(
            "grid epsilon {} != params epsilon {}",
            grid.epsilon(),
            params.epsilon()
        )));
    }
    if grid.dim() != params.dim() {
        return Err(Error::GridMismatch(format!(
            "grid dimension {} != params dimension {}",
            grid.dim(),
            params.dim()
        )));
    }
    Ok(())
}

/// Pairwise sum. Ordinary recursion with a small sequential base case; the
/// evaluation tree depends only on the slice length.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        let mut s = 0.0;
        for x in v {
            s += x;
        }
        return s;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[inline]
fn dpp_at_point(
    grid: &DomainGrid,
    values: &[f64],
    scratch: &mut Vec<f64>,
    i: usize,
    alpha: f64,
    beta: f64,
    discount: f64,
) -> f64 {
    scratch.clear();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    grid.for_ball_neighbors(i, |j| {
        let v = values[j];
        scratch.push(v);
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    });
    let mean = pairwise_sum(scratch) / scratch.len() as f64;
    discount * (0.5 * alpha * (hi + lo) + beta * mean)
}

/// Applies the operator to the whole field: interior points get the
/// discounted sup/inf/average combination, boundary-strip points pass
/// through unchanged.
pub fn apply_dpp(field: &ValueField, params: &GameParams) -> Result<ValueField> {
    check_compatible(field, params)?;
    let mut out = field.clone();
    out.set_role(FieldRole::Iterate);
    apply_dpp_into(field, params, out.values_mut());
    Ok(out)
}

/// Sweep core: writes T(field) into `out`. Assumes compatibility checks have
/// run.
fn apply_dpp_into(field: &ValueField, params: &GameParams, out: &mut [f64]) {
    let grid = field.grid().clone();
    let values = field.values();
    let alpha = params.alpha();
    let beta = params.beta();
    let discount = params.discount();

    if grid.len() < PAR_THRESHOLD {
        let mut scratch = Vec::with_capacity(grid.ball_offset_count());
        for (i, o) in out.iter_mut().enumerate() {
            *o = match grid.class(i) {
                PointClass::Interior => {
                    dpp_at_point(&grid, values, &mut scratch, i, alpha, beta, discount)
                }
                PointClass::BoundaryStrip => values[i],
            };
        }
    } else {
        out.par_iter_mut().enumerate().for_each_init(
            || Vec::with_capacity(grid.ball_offset_count()),
            |scratch, (i, o)| {
                *o = match grid.class(i) {
                    PointClass::Interior => {
                        dpp_at_point(&grid, values, scratch, i, alpha, beta, discount)
                    }
                    PointClass::BoundaryStrip => values[i],
                };
            },
        );
    }
}

/// Sup norm of u - T u over interior points.
pub fn dpp_residual(field: &ValueField, params: &GameParams) -> Result<f64> {
    let t = apply_dpp(field, params)?;
    let grid = field.grid();
    let mut r = 0.0f64;
    for i in 0..grid.len() {
        if grid.class(i) == PointClass::Interior {
            r = r.max((field.value(i) - t.value(i)).abs());
        }
    }
    Ok(r)
}

/// Solves u = T u by the monotone iteration u₀ = -‖F‖_∞ on Ω (boundary data
/// on the strip), u_{k+1} = T u_k, stopping when the sweep update drops to
/// `opts.tol`.
///
/// Hitting `max_iter` is not an error: the best iterate is returned with
/// `converged = false`. Non-finite input or iterates abort.
pub fn solve_dpp(
    grid: Arc<DomainGrid>,
    params: &GameParams,
    boundary: &ValueField,
    opts: SolveOptions,
) -> Result<(ValueField, SolveReport)> {
    check_compatible(boundary, params)?;
    if !Arc::ptr_eq(boundary.grid(), &grid) {
        return Err(Error::GridMismatch(
            "boundary field lives on a different grid".into(),
        ));
    }
    if !boundary.is_finite() {
        return Err(Error::NonFinite("boundary data".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {}", opts.tol)));
    }

    let start = Instant::now();
    let norm_f = boundary.boundary_sup_norm();
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        values.push(match grid.class(i) {
            PointClass::Interior => -norm_f,
            PointClass::BoundaryStrip => boundary.value(i),
        });
    }
    let mut current = ValueField::new(grid.clone(), values, FieldRole::Iterate)?;
    let mut next = current.clone();

    let mut history = Vec::new();
    let mut converged = false;
    while history.len() < opts.max_iter {
        apply_dpp_into(&current, params, next.values_mut());
        let mut update = 0.0f64;
        for (a, b) in current.values().iter().zip(next.values()) {
            update = update.max((a - b).abs());
        }
        if !update.is_finite() {
            return Err(Error::NonFinite(format!(
                "iterate diverged at sweep {}",
                history.len() + 1
            )));
        }
        history.push(update);
        std::mem::swap(&mut current, &mut next);
        if update <= opts.tol {
            converged = true;
            break;
        }
    }

    let final_residual = dpp_residual(&current, params)?;
    current.set_role(if converged {
        FieldRole::Solution
    } else {
        FieldRole::Iterate
    });
    let report = SolveReport {
        iterations: history.len(),
        converged,
        final_residual,
        sup_update_history: history,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    Ok((current, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainShape;

    fn grid_1d(eps: f64, h: f64) -> Arc<DomainGrid> {
        Arc::new(DomainGrid::build(DomainShape::Interval { a: -1.0, b: 1.0 }, eps, h).unwrap())
    }

    #[test]
    fn constants_are_fixed_points_when_gamma_zero() {
        let grid = grid_1d(0.2, 0.05);
        let params = GameParams::new(3.0, 1, 0.0, 0.2).unwrap();
        let u = ValueField::constant(grid, 4.25, FieldRole::Iterate);
        let tu = apply_dpp(&u, &params).unwrap();
        // max = min = mean = c, and the (α/2)(hi+lo) + β·mean combination is
        // evaluated with β = 1 - α, so the drift is at most an ulp or two.
        assert!(u.sup_diff(&tu) < 1e-14);
    }

    #[test]
    fn constants_scale_by_discount_when_gamma_positive() {
        let grid = grid_1d(0.2, 0.05);
        let params = GameParams::new(3.0, 1, 0.5, 0.2).unwrap();
        let u = ValueField::constant(grid.clone(), 1.0, FieldRole::Iterate);
        let tu = apply_dpp(&u, &params).unwrap();
        for i in 0..grid.len() {
            let want = match grid.class(i) {
                PointClass::Interior => params.discount(),
                PointClass::BoundaryStrip => 1.0,
            };
            assert!((tu.value(i) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn hand_computed_application_on_parabola() {
        // eps=0.5, h=0.125, gamma=1, p=3 (n=1): alpha=1/4, beta=3/4,
        // u(x) = x^2. Ball of x=0: {0, ±0.125, ±0.25, ±0.375, ±0.5},
        // values {0, .015625, .0625, .140625, .25}; sup = .25, inf = 0,
        // mean = 2(.015625+.0625+.140625+.25)/9; out = 0.75*(0.03125 + 0.75*mean).
        let grid = grid_1d(0.5, 0.125);
        let params = GameParams::new(3.0, 1, 1.0, 0.5).unwrap();
        let vals: Vec<f64> = (0..grid.len()).map(|i| grid.coord(i)[0].powi(2)).collect();
        let u = ValueField::new(grid.clone(), vals, FieldRole::Iterate).unwrap();
        let tu = apply_dpp(&u, &params).unwrap();
        let i0 = (0..grid.len()).find(|&i| grid.coord(i)[0].abs() < 1e-12).unwrap();
        let mean = 0.9375 / 9.0;
        let expected = 0.75 * (0.125 * 0.25 + 0.75 * mean);
        assert!((tu.value(i0) - expected).abs() < 1e-15, "{}", tu.value(i0));
        assert!((expected - 0.08203125).abs() < 1e-15);
    }

    #[test]
    fn residual_of_uniform_field() {
        let grid = grid_1d(0.1, 0.025);
        let u = ValueField::constant(grid, 1.0, FieldRole::Iterate);
        let p0 = GameParams::new(3.0, 1, 0.0, 0.1).unwrap();
        assert!(dpp_residual(&u, &p0).unwrap() < 1e-14);
        let p1 = GameParams::new(3.0, 1, 0.5, 0.1).unwrap();
        let r = dpp_residual(&u, &p1).unwrap();
        assert!((r - 0.5 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn solve_constant_boundary_gamma_zero_is_exact() {
        let grid = grid_1d(0.25, 0.0625);
        let params = GameParams::new(3.0, 1, 0.0, 0.25).unwrap();
        let f = ValueField::from_boundary_fn(grid.clone(), |_| 1.0).unwrap();
        let opts = SolveOptions {
            tol: 1e-15,
            max_iter: 100_000,
        };
        let (u, report) = solve_dpp(grid.clone(), &params, &f, opts).unwrap();
        assert!(report.converged);
        for i in 0..grid.len() {
            assert!((u.value(i) - 1.0).abs() < 1e-13, "point {i}: {}", u.value(i));
        }
        assert!(report.final_residual < 1e-14);
    }

    #[test]
    fn solve_discounted_boundary_one_stays_below_one() {
        let grid = grid_1d(0.2, 0.05);
        let params = GameParams::new(3.0, 1, 2.0, 0.2).unwrap();
        let f = ValueField::from_boundary_fn(grid.clone(), |_| 1.0).unwrap();
        let (u, report) = solve_dpp(grid.clone(), &params, &f, SolveOptions::default()).unwrap();
        assert!(report.converged);
        let mut seen_interior = false;
        for i in 0..grid.len() {
            match grid.class(i) {
                PointClass::Interior => {
                    seen_interior = true;
                    assert!(u.value(i) < 1.0 && u.value(i) > 0.0);
                }
                PointClass::BoundaryStrip => assert_eq!(u.value(i), 1.0),
            }
        }
        assert!(seen_interior);
        // radially nonincreasing toward the center on a symmetric domain
        let mid = (0..grid.len()).find(|&i| grid.coord(i)[0].abs() < 1e-12).unwrap();
        let near_edge = (0..grid.len())
            .find(|&i| (grid.coord(i)[0] - 0.95).abs() < 1e-12)
            .unwrap();
        assert!(u.value(mid) < u.value(near_edge));
    }

    #[test]
    fn update_history_is_nonincreasing() {
        let grid = grid_1d(0.25, 0.0625);
        let params = GameParams::new(4.0, 1, 3.0, 0.25).unwrap();
        let f = ValueField::from_boundary_fn(grid.clone(), |x| x[0].cos()).unwrap();
        let (_, report) = solve_dpp(grid, &params, &f, SolveOptions::default()).unwrap();
        for w in report.sup_update_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn epsilon_mismatch_rejected() {
        let grid = grid_1d(0.2, 0.05);
        let params = GameParams::new(3.0, 1, 0.0, 0.1).unwrap();
        let u = ValueField::constant(grid, 0.0, FieldRole::Iterate);
        assert!(apply_dpp(&u, &params).is_err());
    }

    #[test]
    fn non_finite_boundary_rejected() {
        let grid = grid_1d(0.2, 0.05);
        let params = GameParams::new(3.0, 1, 0.0, 0.2).unwrap();
        let mut f = ValueField::constant(grid.clone(), 0.0, FieldRole::BoundaryData);
        let n = f.values().len();
        f.values_mut()[n - 1] = f64::NAN;
        assert!(solve_dpp(grid, &params, &f, SolveOptions::default()).is_err());
    }
}
