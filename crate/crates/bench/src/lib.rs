//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use towgame_core::field::{FieldRole, ValueField};
use towgame_core::geometry::DomainShape;
use towgame_core::grid::DomainGrid;
use towgame_core::params::GameParams;

pub fn interval_grid(epsilon: f64, points_per_radius: u32) -> Arc<DomainGrid> {
    let shape = DomainShape::Interval { a: -1.0, b: 1.0 };
    Arc::new(DomainGrid::build(shape, epsilon, epsilon / points_per_radius as f64).unwrap())
}

pub fn ball_grid(epsilon: f64, points_per_radius: u32) -> Arc<DomainGrid> {
    let shape = DomainShape::Ball {
        center: vec![0.0, 0.0],
        radius: 1.0,
    };
    Arc::new(DomainGrid::build(shape, epsilon, epsilon / points_per_radius as f64).unwrap())
}

pub fn params_for(grid: &DomainGrid, p: f64, gamma: f64) -> GameParams {
    GameParams::new(p, grid.dim(), gamma, grid.epsilon()).unwrap()
}

/// A smooth non-constant field to feed the operator.
pub fn wavy_field(grid: &Arc<DomainGrid>) -> ValueField {
    let values: Vec<f64> = (0..grid.len())
        .map(|i| grid.coord(i).iter().map(|c| (3.0 * c).sin()).sum::<f64>())
        .collect();
    ValueField::new(grid.clone(), values, FieldRole::Iterate).unwrap()
}
