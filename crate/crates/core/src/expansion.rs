//! Consistency check between the discrete operator and its ε² expansion.
//!
//! For smooth φ with Dφ(x) ≠ 0,
//!
//! ```text
//! lhs(ε) = ( (1-γε²){ (α/2)(sup_B φ + inf_B φ) + β · avg_B φ } - φ(x) ) / ε²
//! ```
//!
//! converges as ε → 0 to
//!
//! ```text
//! rhs = Δ_p^N φ(x) / (2(p+n)) - γ φ(x),
//! Δ_p^N φ = Δφ + (p-2) ⟨D²φ ν, ν⟩,   ν = Dφ/|Dφ|.
//! ```
//!
//! The γφ term carries no 1/2: applying the discount (1-γε²) to the bracket
//! contributes -γφ(x)·ε² in full, as the affine case shows exactly —
//! for φ ≡ const the bracket equals φ(x) and lhs = -γφ(x) for every ε.
//!
//! Here lhs is computed grid-free: the ball average by Gauss-Legendre (times
//! trapezoid in angle for n = 2) and the extrema by dense sampling of sphere
//! shells, so the checker is independent of the lattice discretization.

use crate::error::{Error, Result};
use crate::params::GameParams;

/// Gradient magnitude below which the check refuses to run: the expansion
/// assumes Dφ(x) ≠ 0.
pub const GRADIENT_FLOOR: f64 = 1e-8;

/// A smooth test function with analytic derivatives.
pub trait SmoothTestFn: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Row-major dim × dim Hessian.
    fn hessian(&self, x: &[f64]) -> Vec<f64>;
}

/// φ(x) = ⟨a, x⟩ + b.
pub struct Affine {
    pub a: Vec<f64>,
    pub b: f64,
    name: String,
}

impl Affine {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        let name = format!("affine{}d", a.len());
        Affine { a, b, name }
    }
}

impl SmoothTestFn for Affine {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.a.clone()
    }
    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.a.len() * self.a.len()]
    }
}

/// φ(x) = ½ xᵀ A x + ⟨b, x⟩ + c with symmetric A.
pub struct Quadratic {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
    dim: usize,
    name: String,
}

impl Quadratic {
    pub fn new(name: &str, a: Vec<f64>, b: Vec<f64>, c: f64) -> Self {
        let dim = b.len();
        assert_eq!(a.len(), dim * dim);
        Quadratic {
            a,
            b,
            c,
            dim,
            name: name.to_string(),
        }
    }
}

impl SmoothTestFn for Quadratic {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        let mut q = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                q += x[i] * self.a[i * self.dim + j] * x[j];
            }
        }
        0.5 * q + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>() + self.c
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.b.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                g[i] += self.a[i * self.dim + j] * x[j];
            }
        }
        g
    }
    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        self.a.clone()
    }
}

/// φ(x) = amp · Π_i cosh(k_i x_i).
pub struct CoshProduct {
    pub freq: Vec<f64>,
    pub amp: f64,
    name: String,
}

impl CoshProduct {
    pub fn new(freq: Vec<f64>, amp: f64) -> Self {
        let name = format!("cosh_product{}d", freq.len());
        CoshProduct { freq, amp, name }
    }
}

impl SmoothTestFn for CoshProduct {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.freq.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.amp
            * self
                .freq
                .iter()
                .zip(x)
                .map(|(k, x)| (k * x).cosh())
                .product::<f64>()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let v = self.value(x);
        self.freq
            .iter()
            .zip(x)
            .map(|(k, xi)| v * k * (k * xi).tanh())
            .collect()
    }
    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let d = self.freq.len();
        let v = self.value(x);
        let t: Vec<f64> = self.freq.iter().zip(x).map(|(k, xi)| k * (k * xi).tanh()).collect();
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                h[i * d + j] = if i == j {
                    v * self.freq[i] * self.freq[i]
                } else {
                    v * t[i] * t[j]
                };
            }
        }
        h
    }
}

/// A registry entry: the function, the point at which the expansion is
/// checked, and whether the ratio criterion applies (quadratics).
pub struct RegistryEntry {
    pub func: Box<dyn SmoothTestFn>,
    pub point: Vec<f64>,
    pub is_quadratic: bool,
}

/// Registered test functions with nonzero gradient at their check points.
pub fn registry() -> Vec<RegistryEntry> {
    vec![
        RegistryEntry {
            func: Box::new(Affine::new(vec![2.0], 1.0)),
            point: vec![0.3],
            is_quadratic: false,
        },
        RegistryEntry {
            func: Box::new(Affine::new(vec![1.0, -0.5], 0.25)),
            point: vec![0.1, -0.2],
            is_quadratic: false,
        },
        RegistryEntry {
            func: Box::new(Quadratic::new("half_square_1d", vec![1.0], vec![0.0], 0.0)),
            point: vec![0.8],
            is_quadratic: true,
        },
        RegistryEntry {
            func: Box::new(Quadratic::new(
                "half_norm_sq_2d",
                vec![1.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0],
                0.0,
            )),
            point: vec![1.0, 0.0],
            is_quadratic: true,
        },
        RegistryEntry {
            func: Box::new(Quadratic::new(
                "saddle_2d",
                vec![1.0, 0.5, 0.5, -2.0],
                vec![0.3, -0.1],
                0.4,
            )),
            point: vec![0.5, 0.25],
            is_quadratic: true,
        },
        RegistryEntry {
            func: Box::new(CoshProduct::new(vec![1.0], 1.0)),
            point: vec![0.5],
            is_quadratic: false,
        },
        RegistryEntry {
            func: Box::new(CoshProduct::new(vec![1.0, 0.7], 0.5)),
            point: vec![0.4, 0.3],
            is_quadratic: false,
        },
    ]
}

/// Both sides of the expansion at the given ε.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

const GL_POINTS: usize = 48;
const ANGLE_SAMPLES: usize = 2048;
const SHELLS: usize = 16;

/// Mean of φ over the ball B_ε(x) by quadrature.
fn ball_mean(phi: &dyn SmoothTestFn, x: &[f64], eps: f64) -> Result<f64> {
    let (nodes, weights) = gauss_legendre(GL_POINTS);
    match x.len() {
        1 => {
            // (1/2ε) ∫_{-ε}^{ε} φ(x+t) dt
            let mut s = 0.0;
            for (t, w) in nodes.iter().zip(&weights) {
                s += w * phi.value(&[x[0] + eps * t]);
            }
            Ok(0.5 * s)
        }
        2 => {
            // (1/πε²) ∫_0^ε ∫_0^{2π} φ(x + r ω(θ)) r dθ dr, radial by
            // Gauss-Legendre, angular by the trapezoid rule (spectrally
            // accurate for periodic integrands).
            let m = 512usize;
            let mut s = 0.0;
            for (t, w) in nodes.iter().zip(&weights) {
                let r = 0.5 * eps * (t + 1.0);
                let mut ring = 0.0;
                for j in 0..m {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    ring += phi.value(&[x[0] + r * th.cos(), x[1] + r * th.sin()]);
                }
                s += w * r * ring / m as f64;
            }
            // the radial map contributes a factor ε/2; normalize by πε²/(2π)
            Ok(s * (0.5 * eps) * 2.0 / (eps * eps))
        }
        d => Err(Error::InvalidArgument(format!(
            "ball quadrature implemented for n <= 2, got n = {d}"
        ))),
    }
}

/// Sup and inf of φ over the closed ball by dense sampling of sphere shells.
fn ball_extrema(phi: &dyn SmoothTestFn, x: &[f64], eps: f64) -> Result<(f64, f64)> {
    let mut hi = phi.value(x);
    let mut lo = hi;
    let mut consider = |v: f64| {
        if v > hi {
            hi = v;
        }
        if v < lo {
            lo = v;
        }
    };
    match x.len() {
        1 => {
            let n = 4096;
            for j in 0..=n {
                let t = -eps + 2.0 * eps * j as f64 / n as f64;
                consider(phi.value(&[x[0] + t]));
            }
            consider(phi.value(&[x[0] - eps]));
            consider(phi.value(&[x[0] + eps]));
        }
        2 => {
            for shell in 1..=SHELLS {
                let r = eps * shell as f64 / SHELLS as f64;
                for j in 0..ANGLE_SAMPLES {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / ANGLE_SAMPLES as f64;
                    consider(phi.value(&[x[0] + r * th.cos(), x[1] + r * th.sin()]));
                }
            }
        }
        d => {
            return Err(Error::InvalidArgument(format!(
                "ball sampling implemented for n <= 2, got n = {d}"
            )))
        }
    }
    Ok((hi, lo))
}

/// Evaluates both sides of the expansion at ε = `params.epsilon()`.
///
/// Fails when the gradient at x is below `GRADIENT_FLOOR` (the expansion's
/// standing assumption) or when dimensions disagree.
pub fn expansion_check(
    phi: &dyn SmoothTestFn,
    x: &[f64],
    params: &GameParams,
) -> Result<ExpansionCheck> {
    if phi.dim() != x.len() || phi.dim() != params.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: function {}d, point {}d, params {}d",
            phi.dim(),
            x.len(),
            params.dim()
        )));
    }
    let grad = phi.gradient(x);
    let gnorm = crate::geometry::norm(&grad);
    if gnorm < GRADIENT_FLOOR {
        return Err(Error::InvalidArgument(format!(
            "gradient magnitude {gnorm} below {GRADIENT_FLOOR}: expansion invalid near critical points"
        )));
    }

    let eps = params.epsilon();
    let (hi, lo) = ball_extrema(phi, x, eps)?;
    let mean = ball_mean(phi, x, eps)?;
    let bracket = 0.5 * params.alpha() * (hi + lo) + params.beta() * mean;
    let lhs = (params.discount() * bracket - phi.value(x)) / (eps * eps);

    let hess = phi.hessian(x);
    let d = phi.dim();
    let mut laplacian = 0.0;
    for i in 0..d {
        laplacian += hess[i * d + i];
    }
    let nu: Vec<f64> = grad.iter().map(|g| g / gnorm).collect();
    let mut hnn = 0.0;
    for i in 0..d {
        for j in 0..d {
            hnn += nu[i] * hess[i * d + j] * nu[j];
        }
    }
    let delta_p = laplacian + (params.p() - 2.0) * hnn;
    let rhs = delta_p / (2.0 * (params.p() + d as f64)) - params.gamma() * phi.value(x);

    Ok(ExpansionCheck { lhs, rhs })
}
