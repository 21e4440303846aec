//! Boundary payoff presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Payoff;

/// Declarative payoff description used in experiment configs. Analytic
/// presets carry their Lipschitz constants (the boundary experiment scales
/// by ‖F‖_{C^{0,1}}); sample tables evaluate by nearest sample point and have
/// no analytic constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayoffSpec {
    Constant { c: f64 },
    /// F(x) = ⟨a, x⟩ + b.
    Affine { a: Vec<f64>, b: f64 },
    /// F(x) = amp · Π_i cos(freq_i · x_i).
    CosineProduct { freq: Vec<f64>, amp: f64 },
    /// Nearest-sample evaluation of tabulated values.
    Samples {
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
    },
}

impl PayoffSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            PayoffSpec::Constant { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidConfig("constant payoff not finite".into()));
                }
            }
            PayoffSpec::Affine { a, b } => {
                if a.len() != dim {
                    return Err(Error::InvalidConfig(format!(
                        "affine payoff has {} coefficients for dimension {dim}",
                        a.len()
                    )));
                }
                if a.iter().any(|v| !v.is_finite()) || !b.is_finite() {
                    return Err(Error::InvalidConfig("affine payoff not finite".into()));
                }
            }
            PayoffSpec::CosineProduct { freq, amp } => {
                if freq.len() != dim {
                    return Err(Error::InvalidConfig(format!(
                        "cosine payoff has {} frequencies for dimension {dim}",
                        freq.len()
                    )));
                }
                if freq.iter().any(|v| !v.is_finite()) || !amp.is_finite() {
                    return Err(Error::InvalidConfig("cosine payoff not finite".into()));
                }
            }
            PayoffSpec::Samples { points, values } => {
                if points.is_empty() || points.len() != values.len() {
                    return Err(Error::InvalidConfig(
                        "sample payoff needs matching nonempty points/values".into(),
                    ));
                }
                if points.iter().any(|p| p.len() != dim) {
                    return Err(Error::InvalidConfig(
                        "sample payoff point dimension mismatch".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidConfig("sample payoff values not finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Analytic Lipschitz constant, when the preset has one.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            PayoffSpec::Constant { .. } => Some(0.0),
            PayoffSpec::Affine { a, .. } => Some(crate::geometry::norm(a)),
            // |∂_i F| = amp |k_i sin(k_i x_i)| Π_{j≠i} |cos| ≤ amp |k_i|,
            // so |∇F| ≤ amp |k|₂.
            PayoffSpec::CosineProduct { freq, amp } => {
                Some(amp.abs() * crate::geometry::norm(freq))
            }
            PayoffSpec::Samples { .. } => None,
        }
    }

    /// Builds the evaluable payoff.
    pub fn build(&self) -> Box<dyn Payoff> {
        match self.clone() {
            PayoffSpec::Constant { c } => Box::new(move |_: &[f64]| c),
            PayoffSpec::Affine { a, b } => Box::new(move |x: &[f64]| {
                a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() + b
            }),
            PayoffSpec::CosineProduct { freq, amp } => Box::new(move |x: &[f64]| {
                amp * freq
                    .iter()
                    .zip(x)
                    .map(|(k, xi)| (k * xi).cos())
                    .product::<f64>()
            }),
            PayoffSpec::Samples { points, values } => Box::new(move |x: &[f64]| {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (i, p) in points.iter().enumerate() {
                    let d = crate::geometry::dist(p, x);
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                values[best]
            }),
        }
    }
}
