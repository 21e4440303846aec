//! Bounded domains Ω ⊂ ℝⁿ on which games are played.
//!
//! Ω is treated as an *open* set: points exactly on ∂Ω do not belong to it.
//! The game terminates the moment the token leaves Ω, and the payoff is read
//! off the boundary strip of width ε surrounding it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when classifying points against analytic
/// boundaries. Points within `GEOM_TOL * scale` of ∂Ω are treated as lying on
/// the boundary (hence outside the open domain), which keeps grids built from
/// rounded lattice coordinates symmetric and deterministic.
pub const GEOM_TOL: f64 = 1e-12;

/// Supported domain geometries. All have finite, nondegenerate bounds and an
/// analytic signed distance to the boundary, and all satisfy the exterior
/// sphere condition used by the boundary experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainShape {
    /// Open interval (a, b) in ℝ.
    Interval { a: f64, b: f64 },
    /// Open axis-aligned box, `lo[i] < x[i] < hi[i]` per axis.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Open ball |x - center| < radius.
    Ball { center: Vec<f64>, radius: f64 },
    /// Open annulus r_in < |x - center| < r_out.
    Annulus {
        center: Vec<f64>,
        r_in: f64,
        r_out: f64,
    },
}

impl DomainShape {
    /// Spatial dimension n.
    pub fn dim(&self) -> usize {
        match self {
            DomainShape::Interval { .. } => 1,
            DomainShape::Box { lo, .. } => lo.len(),
            DomainShape::Ball { center, .. } => center.len(),
            DomainShape::Annulus { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fin = |v: f64| v.is_finite();
        match self {
            DomainShape::Interval { a, b } => {
                if !fin(*a) || !fin(*b) || a >= b {
                    return Err(Error::InvalidShape(format!("interval ({a}, {b})")));
                }
            }
            DomainShape::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidShape("box bounds dimension mismatch".into()));
                }
                for (l, h) in lo.iter().zip(hi) {
                    if !fin(*l) || !fin(*h) || l >= h {
                        return Err(Error::InvalidShape(format!("box axis ({l}, {h})")));
                    }
                }
            }
            DomainShape::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !fin(*c)) {
                    return Err(Error::InvalidShape("ball center".into()));
                }
                if !fin(*radius) || *radius <= 0.0 {
                    return Err(Error::InvalidShape(format!("ball radius {radius}")));
                }
            }
            DomainShape::Annulus {
                center,
                r_in,
                r_out,
            } => {
                if center.is_empty() || center.iter().any(|c| !fin(*c)) {
                    return Err(Error::InvalidShape("annulus center".into()));
                }
                if !fin(*r_in) || !fin(*r_out) || *r_in <= 0.0 || r_in >= r_out {
                    return Err(Error::InvalidShape(format!("annulus radii ({r_in}, {r_out})")));
                }
            }
        }
        Ok(())
    }

    /// Center used to anchor grids so that symmetric shapes produce symmetric
    /// point sets.
    pub fn center(&self) -> Vec<f64> {
        match self {
            DomainShape::Interval { a, b } => vec![0.5 * (a + b)],
            DomainShape::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()
            }
            DomainShape::Ball { center, .. } => center.clone(),
            DomainShape::Annulus { center, .. } => center.clone(),
        }
    }

    /// Half-widths of the bounding box of Ω, measured from `center()`.
    pub fn half_extents(&self) -> Vec<f64> {
        match self {
            DomainShape::Interval { a, b } => vec![0.5 * (b - a)],
            DomainShape::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(l, h)| 0.5 * (h - l)).collect()
            }
            DomainShape::Ball { center, radius } => vec![*radius; center.len()],
            DomainShape::Annulus { center, r_out, .. } => vec![*r_out; center.len()],
        }
    }

    /// Signed distance to ∂Ω in center-relative coordinates: negative inside
    /// Ω, positive outside, zero on the boundary. Exact for all four shapes.
    pub fn signed_boundary_dist_rel(&self, x_rel: &[f64]) -> f64 {
        match self {
            DomainShape::Interval { a, b } => {
                let half = 0.5 * (b - a);
                x_rel[0].abs() - half
            }
            DomainShape::Box { lo, hi } => {
                // Signed distance to an axis-aligned box boundary.
                let mut out_sq = 0.0;
                let mut max_inside = f64::NEG_INFINITY;
                for (i, x) in x_rel.iter().enumerate() {
                    let half = 0.5 * (hi[i] - lo[i]);
                    let d = x.abs() - half;
                    if d > 0.0 {
                        out_sq += d * d;
                    }
                    max_inside = max_inside.max(d);
                }
                if out_sq > 0.0 {
                    out_sq.sqrt()
                } else {
                    max_inside
                }
            }
            DomainShape::Ball { radius, .. } => norm(x_rel) - radius,
            DomainShape::Annulus { r_in, r_out, .. } => {
                let r = norm(x_rel);
                (r_in - r).max(r - r_out)
            }
        }
    }

    /// Signed distance to ∂Ω for an absolute point.
    pub fn signed_boundary_dist(&self, x: &[f64]) -> f64 {
        let c = self.center();
        let rel: Vec<f64> = x.iter().zip(&c).map(|(xi, ci)| xi - ci).collect();
        self.signed_boundary_dist_rel(&rel)
    }

    /// Radius of the largest ball around `center()` fitting inside Ω (for
    /// the annulus: half the ring width, the largest ball around the ring's
    /// midline).
    pub fn inradius(&self) -> f64 {
        match self {
            DomainShape::Interval { a, b } => 0.5 * (b - a),
            DomainShape::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| 0.5 * (h - l))
                .fold(f64::INFINITY, f64::min),
            DomainShape::Ball { radius, .. } => *radius,
            DomainShape::Annulus { r_in, r_out, .. } => 0.5 * (r_out - r_in),
        }
    }

    /// Scale used to make the classification tolerance dimensionless.
    pub fn tol_scale(&self) -> f64 {
        self.half_extents()
            .iter()
            .fold(1.0_f64, |acc, h| acc.max(*h))
    }

    /// Open-domain membership with the boundary tolerance convention: points
    /// within `GEOM_TOL * scale` of ∂Ω count as boundary, not interior.
    pub fn contains_rel(&self, x_rel: &[f64]) -> bool {
        self.signed_boundary_dist_rel(x_rel) < -GEOM_TOL * self.tol_scale()
    }

    /// Membership test for absolute coordinates.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_boundary_dist(x) < -GEOM_TOL * self.tol_scale()
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_membership_and_distance() {
        let s = DomainShape::Interval { a: -1.0, b: 1.0 };
        assert!(s.contains(&[0.0]));
        assert!(s.contains(&[0.999]));
        assert!(!s.contains(&[1.0]));
        assert!(!s.contains(&[-1.0]));
        assert!(!s.contains(&[1.2]));
        assert_eq!(s.signed_boundary_dist(&[1.2]), 0.19999999999999996);
        assert!((s.signed_boundary_dist(&[0.5]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_interval() {
        let s = DomainShape::Interval { a: 0.0, b: 1.0 };
        assert!(s.contains(&[0.5]));
        assert!(!s.contains(&[0.0]));
        assert!(!s.contains(&[1.0]));
        assert!((s.signed_boundary_dist(&[-0.3]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ball_and_annulus() {
        let b = DomainShape::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert!(b.contains(&[0.5, 0.5]));
        assert!(!b.contains(&[1.0, 0.0]));
        assert!((b.signed_boundary_dist(&[1.5, 0.0]) - 0.5).abs() < 1e-15);

        let a = DomainShape::Annulus {
            center: vec![0.0, 0.0],
            r_in: 0.25,
            r_out: 1.0,
        };
        assert!(a.contains(&[0.5, 0.0]));
        assert!(!a.contains(&[0.1, 0.0]));
        assert!(!a.contains(&[0.0, 0.0]));
        // inside the hole: distance to the inner sphere
        assert!((a.signed_boundary_dist(&[0.1, 0.0]) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn box_distance_outside_corner() {
        let s = DomainShape::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        };
        // corner distance
        let d = s.signed_boundary_dist(&[2.0, 2.0]);
        assert!((d - (2.0_f64).sqrt()).abs() < 1e-15);
        assert!(s.contains(&[0.5, 0.5]));
        assert!(!s.contains(&[0.5, 1.0]));
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(DomainShape::Interval { a: 1.0, b: 1.0 }.validate().is_err());
        assert!(DomainShape::Ball {
            center: vec![0.0],
            radius: 0.0
        }
        .validate()
        .is_err());
        assert!(DomainShape::Annulus {
            center: vec![0.0, 0.0],
            r_in: 0.5,
            r_out: 0.5
        }
        .validate()
        .is_err());
        assert!(DomainShape::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, f64::INFINITY]
        }
        .validate()
        .is_err());
    }
}
