//! Scalar fields living on a `DomainGrid`: boundary data, solver iterates,
//! and converged solutions.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DomainGrid, PointClass};

/// What a field represents in the solve pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRole {
    BoundaryData,
    Iterate,
    Solution,
}

/// One value per grid point, in grid index order.
#[derive(Debug, Clone)]
pub struct ValueField {
    grid: Arc<DomainGrid>,
    values: Vec<f64>,
    role: FieldRole,
}

impl ValueField {
    pub fn new(grid: Arc<DomainGrid>, values: Vec<f64>, role: FieldRole) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(ValueField { grid, values, role })
    }

    pub fn constant(grid: Arc<DomainGrid>, value: f64, role: FieldRole) -> Self {
        let n = grid.len();
        ValueField {
            grid,
            values: vec![value; n],
            role,
        }
    }

    /// Boundary data from an evaluable payoff: F on the boundary strip, zero
    /// placeholders on the interior (the solver overwrites them).
    pub fn from_boundary_fn(grid: Arc<DomainGrid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        for i in 0..grid.len() {
            if grid.class(i) == PointClass::BoundaryStrip {
                let v = f(grid.coord(i));
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "boundary data at {:?}",
                        grid.coord(i)
                    )));
                }
                values[i] = v;
            }
        }
        Ok(ValueField {
            grid,
            values,
            role: FieldRole::BoundaryData,
        })
    }

    pub fn grid(&self) -> &Arc<DomainGrid> {
        &self.grid
    }

    pub fn role(&self) -> FieldRole {
        self.role
    }

    pub fn set_role(&mut self, role: FieldRole) {
        self.role = role;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Sup norm of the boundary-strip values.
    pub fn boundary_sup_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.grid.len() {
            if self.grid.class(i) == PointClass::BoundaryStrip {
                m = m.max(self.values[i].abs());
            }
        }
        m
    }

    /// Sup norm over interior points.
    pub fn interior_sup_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.grid.len() {
            if self.grid.class(i) == PointClass::Interior {
                m = m.max(self.values[i].abs());
            }
        }
        m
    }

    /// Sup norm of the pointwise difference (grids must be the same object).
    pub fn sup_diff(&self, other: &ValueField) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    }

    /// Value at the grid point nearest to x.
    pub fn eval_nearest(&self, x: &[f64]) -> Option<f64> {
        self.grid.nearest_index(x).map(|i| self.values[i])
    }

    /// Multilinear interpolation on the lattice cell containing x, falling
    /// back to the nearest grid point when a cell corner is not a grid point
    /// (cells straddling the outer strip edge).
    pub fn eval_interpolated(&self, x: &[f64]) -> Option<f64> {
        let grid = &self.grid;
        let dim = grid.dim();
        let center = grid.shape().center();
        let h = grid.spacing();
        let mut base = vec![0i64; dim];
        let mut frac = vec![0.0f64; dim];
        for a in 0..dim {
            let t = (x[a] - center[a]) / h;
            let f = t.floor();
            base[a] = f as i64;
            frac[a] = t - f;
        }
        let mut acc = 0.0;
        let mut corner = vec![0.0f64; dim];
        for mask in 0..(1usize << dim) {
            let mut w = 1.0;
            for a in 0..dim {
                let bit = (mask >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                corner[a] = (base[a] + bit as i64) as f64 * h + center[a];
            }
            if w == 0.0 {
                continue;
            }
            match self.grid.nearest_index(&corner).map(|i| self.values[i]) {
                Some(v) => acc += w * v,
                None => return self.eval_nearest(x),
            }
        }
        Some(acc)
    }

    /// Writes one `index,class,coordinates...,value` row per grid point.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        let dim = self.grid.dim();
        let mut header = String::from("index,class");
        for a in 0..dim {
            header.push_str(&format!(",x{a}"));
        }
        header.push_str(",value");
        writeln!(w, "{header}")?;
        for i in 0..self.grid.len() {
            let class = match self.grid.class(i) {
                PointClass::Interior => "interior",
                PointClass::BoundaryStrip => "boundary_strip",
            };
            let coords = self
                .grid
                .coord(i)
                .iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(w, "{i},{class},{coords},{}", self.values[i])?;
        }
        Ok(())
    }

    /// Reads values written by `write_csv` back onto a compatible grid.
    pub fn read_csv(grid: Arc<DomainGrid>, path: &Path, role: FieldRole) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut values = vec![f64::NAN; grid.len()];
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                continue; // header
            }
            let mut parts = line.split(',');
            let idx: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("bad csv row: {line}")))?;
            let value: f64 = parts
                .next_back()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("bad csv row: {line}")))?;
            if idx >= values.len() {
                return Err(Error::GridMismatch(format!(
                    "csv row index {idx} out of range for grid of {} points",
                    values.len()
                )));
            }
            values[idx] = value;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::GridMismatch("csv is missing grid points".into()));
        }
        ValueField::new(grid, values, role)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainShape;

    fn small_grid() -> Arc<DomainGrid> {
        Arc::new(DomainGrid::build(DomainShape::Interval { a: -1.0, b: 1.0 }, 0.25, 0.0625).unwrap())
    }

    #[test]
    fn boundary_fn_populates_strip_only() {
        let grid = small_grid();
        let f = ValueField::from_boundary_fn(grid.clone(), |x| 2.0 * x[0]).unwrap();
        for i in 0..grid.len() {
            match grid.class(i) {
                PointClass::BoundaryStrip => {
                    assert!((f.value(i) - 2.0 * grid.coord(i)[0]).abs() < 1e-15)
                }
                PointClass::Interior => assert_eq!(f.value(i), 0.0),
            }
        }
        assert!(f.boundary_sup_norm() > 2.0);
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        let grid = small_grid();
        let vals: Vec<f64> = (0..grid.len()).map(|i| 3.0 * grid.coord(i)[0] + 1.0).collect();
        let f = ValueField::new(grid, vals, FieldRole::Solution).unwrap();
        for &x in &[0.0, 0.013, -0.731, 0.99] {
            let v = f.eval_interpolated(&[x]).unwrap();
            assert!((v - (3.0 * x + 1.0)).abs() < 1e-12, "x = {x}: {v}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let grid = small_grid();
        let vals: Vec<f64> = (0..grid.len()).map(|i| (i as f64).sin()).collect();
        let f = ValueField::new(grid.clone(), vals, FieldRole::Solution).unwrap();
        let dir = std::env::temp_dir().join("towgame_field_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.csv");
        f.write_csv(&path).unwrap();
        let g = ValueField::read_csv(grid, &path, FieldRole::Solution).unwrap();
        assert_eq!(f.sup_diff(&g), 0.0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
