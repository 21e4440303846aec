//! Uniform lattice discretization of Ω_ε = Ω ∪ Γ_ε.
//!
//! Grid points are the lattice `center + k·h`, `k ∈ ℤⁿ`, restricted to the
//! open domain Ω (class `Interior`) and the surrounding strip
//! Γ_ε = {x ∉ Ω : dist(x, ∂Ω) ≤ ε} (class `BoundaryStrip`). Anchoring the
//! lattice at the shape's center makes symmetric shapes produce symmetric
//! grids.
//!
//! Ball queries use the *closed* ball |y - x| ≤ ε and are carried out in
//! integer lattice coordinates, so they are exact and symmetric: j is a
//! neighbor of i iff |k_j - k_i|² ≤ (ε/h)² up to a relative slack that admits
//! lattice points landing exactly on the sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainShape, GEOM_TOL};

/// Classification of a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Interior,
    BoundaryStrip,
}

/// Smallest admitted ratio ε/h. Coarser grids make the ball scans useless as
/// quadrature.
pub const MIN_POINTS_PER_RADIUS: f64 = 4.0;

/// Relative slack admitting lattice points that lie exactly on the sphere
/// |y - x| = ε despite rounded inputs (e.g. ε = 0.2, h = 0.05).
const BALL_RADIUS_SLACK: f64 = 1e-9;

/// Uniform axis-aligned grid covering Ω_ε.
///
/// Immutable after construction; shared freely across threads.
#[derive(Debug, Clone)]
pub struct DomainGrid {
    shape: DomainShape,
    epsilon: f64,
    h: f64,
    dim: usize,
    /// Lattice coordinates, `dim` entries per point, in lexicographic order.
    lattice: Vec<i64>,
    /// Absolute coordinates, `dim` entries per point, same order.
    coords: Vec<f64>,
    class: Vec<PointClass>,
    n_interior: usize,
    /// Flat-table index deltas of the ball offsets Δk with |Δk·h| ≤ ε, in
    /// lexicographic offset order (hence increasing).
    offset_deltas: Vec<isize>,
    /// Dense lookup table over the padded lattice bounding box; `u32::MAX`
    /// marks lattice sites that are not grid points.
    table: Vec<u32>,
    table_origin: Vec<i64>,
    table_dims: Vec<usize>,
    table_strides: Vec<usize>,
}

/// Serializable description of a grid, for experiment manifests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSummary {
    pub shape: DomainShape,
    pub epsilon: f64,
    pub h: f64,
    pub n_points: usize,
    pub n_interior: usize,
    pub n_boundary_strip: usize,
}

impl DomainGrid {
    /// Builds the grid over Ω_ε.
    ///
    /// Rejects h > ε/4 and grids that resolve no interior point.
    pub fn build(shape: DomainShape, epsilon: f64, h: f64) -> Result<Self> {
        shape.validate()?;
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("h = {h}")));
        }
        if h * MIN_POINTS_PER_RADIUS > epsilon * (1.0 + BALL_RADIUS_SLACK) {
            return Err(Error::InvalidArgument(format!(
                "h = {h} too coarse for epsilon = {epsilon}: need h <= epsilon/{MIN_POINTS_PER_RADIUS}"
            )));
        }

        let dim = shape.dim();
        let center = shape.center();
        let radius_units = epsilon / h;
        let radius_sq_lattice = radius_units * radius_units * (1.0 + BALL_RADIUS_SLACK);
        let m = radius_units.ceil() as i64;

        // Lattice range per axis: bounding box of Ω inflated by ε, plus one
        // cell of slack for rounding.
        let half = shape.half_extents();
        let kmax: Vec<i64> = half
            .iter()
            .map(|he| ((he + epsilon) / h).ceil() as i64 + 1)
            .collect();

        // Padded dense table so that any in-ball offset from a grid point
        // stays in range.
        let table_origin: Vec<i64> = kmax.iter().map(|k| -(k + m)).collect();
        let table_dims: Vec<usize> = kmax
            .iter()
            .map(|k| (2 * (k + m) + 1) as usize)
            .collect();
        let mut table_strides = vec![0usize; dim];
        let mut stride = 1usize;
        for axis in (0..dim).rev() {
            table_strides[axis] = stride;
            stride *= table_dims[axis];
        }
        let table_len = stride;

        let mut lattice = Vec::new();
        let mut coords = Vec::new();
        let mut class = Vec::new();
        let mut table = vec![u32::MAX; table_len];
        let mut n_interior = 0usize;

        // Enumerate lattice points in lexicographic order of k.
        let mut k = kmax.iter().map(|km| -km).collect::<Vec<i64>>();
        let tol = GEOM_TOL * shape.tol_scale();
        let strip_limit = epsilon * (1.0 + GEOM_TOL);
        let mut x_rel = vec![0.0f64; dim];
        'outer: loop {
            for a in 0..dim {
                x_rel[a] = k[a] as f64 * h;
            }
            let d = shape.signed_boundary_dist_rel(&x_rel);
            let cls = if d < -tol {
                Some(PointClass::Interior)
            } else if d <= strip_limit {
                Some(PointClass::BoundaryStrip)
            } else {
                None
            };
            if let Some(cls) = cls {
                let idx = lattice.len() / dim;
                if idx >= u32::MAX as usize {
                    return Err(Error::InvalidArgument("grid too large".into()));
                }
                let mut flat = 0usize;
                for a in 0..dim {
                    flat += (k[a] - table_origin[a]) as usize * table_strides[a];
                }
                table[flat] = idx as u32;
                lattice.extend_from_slice(&k);
                for a in 0..dim {
                    coords.push(center[a] + x_rel[a]);
                }
                class.push(cls);
                if cls == PointClass::Interior {
                    n_interior += 1;
                }
            }
            // advance k lexicographically
            for a in (0..dim).rev() {
                k[a] += 1;
                if k[a] <= kmax[a] {
                    continue 'outer;
                }
                k[a] = -kmax[a];
            }
            break;
        }

        if n_interior == 0 {
            return Err(Error::InvalidArgument(
                "grid resolves no interior point".into(),
            ));
        }

        // Ball offsets in lexicographic order; their flat deltas are strictly
        // increasing, so neighbor scans visit points in index order.
        let mut offset_deltas = Vec::new();
        let mut dk = vec![-m; dim];
        'offs: loop {
            let r2: i64 = dk.iter().map(|d| d * d).sum();
            if (r2 as f64) <= radius_sq_lattice {
                let mut delta = 0isize;
                for a in 0..dim {
                    delta += dk[a] as isize * table_strides[a] as isize;
                }
                offset_deltas.push(delta);
            }
            for a in (0..dim).rev() {
                dk[a] += 1;
                if dk[a] <= m {
                    continue 'offs;
                }
                dk[a] = -m;
            }
            break;
        }

        Ok(DomainGrid {
            shape,
            epsilon,
            h,
            dim,
            lattice,
            coords,
            class,
            n_interior,
            offset_deltas,
            table,
            table_origin,
            table_dims,
            table_strides,
        })
    }

    pub fn shape(&self) -> &DomainShape {
        &self.shape
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn class(&self, i: usize) -> PointClass {
        self.class[i]
    }

    pub fn coord(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn lattice(&self, i: usize) -> &[i64] {
        &self.lattice[i * self.dim..(i + 1) * self.dim]
    }

    /// Number of lattice offsets in the closed ε-ball (ball size of a deep
    /// interior point).
    pub fn ball_offset_count(&self) -> usize {
        self.offset_deltas.len()
    }

    /// Flat table index of grid point `i`.
    fn flat_index(&self, i: usize) -> usize {
        let k = self.lattice(i);
        let mut flat = 0usize;
        for a in 0..self.dim {
            flat += (k[a] - self.table_origin[a]) as usize * self.table_strides[a];
        }
        flat
    }

    /// Visits the indices of all grid points within the closed ε-ball of
    /// point `i` (including `i`), in increasing index order.
    #[inline]
    pub fn for_ball_neighbors(&self, i: usize, mut f: impl FnMut(usize)) {
        let flat = self.flat_index(i) as isize;
        for &delta in &self.offset_deltas {
            let j = self.table[(flat + delta) as usize];
            if j != u32::MAX {
                f(j as usize);
            }
        }
    }

    /// All grid indices j with |x_j - x_i| ≤ ε, including i, in increasing
    /// index order.
    pub fn ball_neighbors(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.offset_deltas.len());
        self.for_ball_neighbors(i, |j| out.push(j));
        out
    }

    /// Grid index of the lattice site nearest to an arbitrary point, if that
    /// site is a grid point.
    pub fn nearest_index(&self, x: &[f64]) -> Option<usize> {
        let center = self.shape.center();
        let mut flat = 0usize;
        for a in 0..self.dim {
            let k = ((x[a] - center[a]) / self.h).round() as i64;
            if k < self.table_origin[a]
                || k >= self.table_origin[a] + self.table_dims[a] as i64
            {
                return None;
            }
            flat += (k - self.table_origin[a]) as usize * self.table_strides[a];
        }
        let j = self.table[flat];
        (j != u32::MAX).then_some(j as usize)
    }

    /// Visits grid points within the closed ε-ball of an arbitrary
    /// (off-lattice) point, in increasing index order.
    pub fn for_ball_around(&self, x: &[f64], mut f: impl FnMut(usize)) {
        let center = self.shape.center();
        let eps_lim = self.epsilon * (1.0 + BALL_RADIUS_SLACK);
        let mut lo = vec![0i64; self.dim];
        let mut hi = vec![0i64; self.dim];
        for a in 0..self.dim {
            let rel = x[a] - center[a];
            lo[a] = ((rel - self.epsilon) / self.h - BALL_RADIUS_SLACK).ceil() as i64;
            hi[a] = ((rel + self.epsilon) / self.h + BALL_RADIUS_SLACK).floor() as i64;
            lo[a] = lo[a].max(self.table_origin[a]);
            hi[a] = hi[a].min(self.table_origin[a] + self.table_dims[a] as i64 - 1);
            if lo[a] > hi[a] {
                return;
            }
        }
        let mut k = lo.clone();
        'scan: loop {
            let mut d2 = 0.0;
            for a in 0..self.dim {
                let d = k[a] as f64 * self.h + center[a] - x[a];
                d2 += d * d;
            }
            if d2.sqrt() <= eps_lim {
                let mut flat = 0usize;
                for a in 0..self.dim {
                    flat += (k[a] - self.table_origin[a]) as usize * self.table_strides[a];
                }
                let j = self.table[flat];
                if j != u32::MAX {
                    f(j as usize);
                }
            }
            for a in (0..self.dim).rev() {
                k[a] += 1;
                if k[a] <= hi[a] {
                    continue 'scan;
                }
                k[a] = lo[a];
            }
            break;
        }
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            shape: self.shape.clone(),
            epsilon: self.epsilon,
            h: self.h,
            n_points: self.len(),
            n_interior: self.n_interior,
            n_boundary_strip: self.len() - self.n_interior,
        }
    }
}
