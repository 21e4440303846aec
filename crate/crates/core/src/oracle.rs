//! Reference solutions of the limiting equation, used as convergence targets
//! for the fixed-point solver.
//!
//! The sup/inf/average operator applied to a smooth u produces the ε²
//! increment Δ_p^N u / (2(p+n)) - γu with Δ_p^N u = Δu + (p-2) Δ_∞^N u, so
//! game values approximate solutions of
//!
//! ```text
//! Δ_p^N u = λ u,   λ = 2 (p+n) γ.
//! ```
//!
//! For radial u one has Δ_∞^N u = u'' and Δu = u'' + (n-1) u'/r, hence
//!
//! ```text
//! (p-1) u'' + (n-1) u'/r = λ u,
//! ```
//!
//! and in one dimension simply (p-1) u'' = λ u. The 1-D problem is solved in
//! closed form (cosh/sinh, or affine when γ = 0); the radial problem by
//! second-order finite differences with a tridiagonal solve on a fine mesh,
//! independent of the game grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::GameParams;

/// Solves a tridiagonal system in place by the Thomas algorithm.
/// `diag` and `rhs` are overwritten; returns the solution in `rhs`.
fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    assert!(n >= 2 && sub.len() == n - 1 && sup.len() == n - 1 && rhs.len() == n);
    for i in 1..n {
        let w = sub[i - 1] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}

/// Closed-form solution of (p-1) u'' = λ u on an interval with Dirichlet
/// data, λ = 2(p+1)γ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Oracle1d {
    a: f64,
    b: f64,
    value_a: f64,
    value_b: f64,
    /// Coefficient of u in u'' = μ u.
    mu: f64,
}

impl Oracle1d {
    /// Builds the oracle directly from the ODE coefficient μ (u'' = μ u).
    pub fn from_ode(a: f64, b: f64, value_a: f64, value_b: f64, mu: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("interval ({a}, {b})")));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidArgument(format!("mu = {mu}")));
        }
        if !value_a.is_finite() || !value_b.is_finite() {
            return Err(Error::NonFinite("boundary values".into()));
        }
        Ok(Oracle1d {
            a,
            b,
            value_a,
            value_b,
            mu,
        })
    }

    /// Oracle for a 1-D game: μ = 2(p+1)γ/(p-1).
    pub fn solve(a: f64, b: f64, value_a: f64, value_b: f64, p: f64, gamma: f64) -> Result<Self> {
        if !(p > 2.0) {
            return Err(Error::InvalidArgument(format!("p = {p}")));
        }
        if !(gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("gamma = {gamma}")));
        }
        let mu = 2.0 * (p + 1.0) * gamma / (p - 1.0);
        Oracle1d::from_ode(a, b, value_a, value_b, mu)
    }

    pub fn for_params(params: &GameParams, a: f64, b: f64, value_a: f64, value_b: f64) -> Result<Self> {
        if params.dim() != 1 {
            return Err(Error::InvalidArgument(
                "1-D oracle requires one-dimensional parameters".into(),
            ));
        }
        Oracle1d::solve(a, b, value_a, value_b, params.p(), params.gamma())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Evaluates the closed form. For μ > 0 the solution is the sinh
    /// combination matching the boundary data; for μ = 0 it is affine.
    pub fn eval(&self, x: f64) -> f64 {
        if self.mu == 0.0 {
            let t = (x - self.a) / (self.b - self.a);
            return self.value_a * (1.0 - t) + self.value_b * t;
        }
        let k = self.mu.sqrt();
        let denom = (k * (self.b - self.a)).sinh();
        (self.value_a * (k * (self.b - x)).sinh() + self.value_b * (k * (x - self.a)).sinh())
            / denom
    }

    /// Derivative of the closed form.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        if self.mu == 0.0 {
            return (self.value_b - self.value_a) / (self.b - self.a);
        }
        let k = self.mu.sqrt();
        let denom = (k * (self.b - self.a)).sinh();
        k * (-self.value_a * (k * (self.b - x)).cosh()
            + self.value_b * (k * (x - self.a)).cosh())
            / denom
    }
}

/// Second-order finite-difference solve of u'' = μ u on [a, b] with
/// Dirichlet data. An independent route used to cross-check the closed form.
pub fn solve_two_point_fd(
    a: f64,
    b: f64,
    value_a: f64,
    value_b: f64,
    mu: f64,
    n_mesh: usize,
) -> Result<Vec<f64>> {
    if n_mesh < 3 {
        return Err(Error::InvalidArgument("mesh too small".into()));
    }
    let n = n_mesh;
    let dx = (b - a) / (n - 1) as f64;
    let m = n - 2;
    let mut diag = vec![-2.0 / (dx * dx) - mu; m];
    let sub = vec![1.0 / (dx * dx); m - 1];
    let sup = vec![1.0 / (dx * dx); m - 1];
    let mut rhs = vec![0.0; m];
    rhs[0] -= value_a / (dx * dx);
    rhs[m - 1] -= value_b / (dx * dx);
    thomas(&sub, &mut diag, &sup, &mut rhs);
    let mut u = Vec::with_capacity(n);
    u.push(value_a);
    u.extend_from_slice(&rhs);
    u.push(value_b);
    Ok(u)
}

/// Radial geometry of the reference problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialGeometry {
    /// Ball of radius `r`; the center uses the regularity condition u'(0)=0.
    Ball { r: f64 },
    /// Annulus with inner value prescribed at `r_in`, outer at `r_out`.
    Annulus { r_in: f64, r_out: f64 },
}

/// Finite-difference solution of (p-1) u'' + (n-1) u'/r = λ u on a radial
/// mesh, λ = 2(p+n)γ, evaluable anywhere by local cubic interpolation.
#[derive(Debug, Clone)]
pub struct RadialOracle {
    geometry: RadialGeometry,
    r0: f64,
    dr: f64,
    profile: Vec<f64>,
    p: f64,
    dim: usize,
    lambda: f64,
}

pub const RADIAL_DEFAULT_MESH: usize = 20_001;

impl RadialOracle {
    /// Solves the radial problem on `n_mesh` points (must be at least 10⁴ for
    /// the stated accuracy budget; use `RADIAL_DEFAULT_MESH` unless testing).
    pub fn solve(
        p: f64,
        dim: usize,
        gamma: f64,
        geometry: RadialGeometry,
        inner_value: f64,
        outer_value: f64,
        n_mesh: usize,
    ) -> Result<Self> {
        if !(p > 2.0) {
            return Err(Error::InvalidArgument(format!("p = {p}")));
        }
        if dim < 2 {
            return Err(Error::InvalidArgument(
                "radial oracle requires n >= 2 (use Oracle1d in one dimension)".into(),
            ));
        }
        if !(gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("gamma = {gamma}")));
        }
        if n_mesh < 11 {
            return Err(Error::InvalidArgument("mesh too small".into()));
        }
        match geometry {
            RadialGeometry::Ball { r } if !(r > 0.0) => {
                return Err(Error::InvalidArgument(format!("ball radius {r}")));
            }
            RadialGeometry::Annulus { r_in, r_out } if !(r_in > 0.0 && r_in < r_out) => {
                return Err(Error::InvalidArgument(format!(
                    "annulus radii ({r_in}, {r_out})"
                )));
            }
            _ => {}
        }

        let lambda = 2.0 * (p + dim as f64) * gamma;
        let profile = Self::solve_mesh(p, dim, lambda, geometry, inner_value, outer_value, n_mesh);
        let (r0, r1) = match geometry {
            RadialGeometry::Ball { r } => (0.0, r),
            RadialGeometry::Annulus { r_in, r_out } => (r_in, r_out),
        };
        let oracle = RadialOracle {
            geometry,
            r0,
            dr: (r1 - r0) / (n_mesh - 1) as f64,
            profile,
            p,
            dim,
            lambda,
        };
        if oracle.profile.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("radial profile".into()));
        }
        Ok(oracle)
    }

    fn solve_mesh(
        p: f64,
        dim: usize,
        lambda: f64,
        geometry: RadialGeometry,
        inner_value: f64,
        outer_value: f64,
        n: usize,
    ) -> Vec<f64> {
        let nm1 = dim as f64 - 1.0;
        match geometry {
            RadialGeometry::Ball { r } => {
                let dr = r / (n - 1) as f64;
                // Unknowns u_0..u_{n-2}; u_{n-1} = outer boundary value.
                let m = n - 1;
                let mut diag = vec![0.0; m];
                let mut sub = vec![0.0; m - 1];
                let mut sup = vec![0.0; m - 1];
                let mut rhs = vec![0.0; m];
                // r = 0: the radial equation degenerates to
                // (p-1+n-1) u''(0) = λ u(0); with the reflected ghost point
                // u_{-1} = u_1 it becomes 2(p+n-2)(u_1 - u_0)/dr² = λ u_0.
                let c0 = 2.0 * (p + dim as f64 - 2.0) / (dr * dr);
                diag[0] = -c0 - lambda;
                sup[0] = c0;
                for i in 1..m {
                    let r_i = i as f64 * dr;
                    let d2 = (p - 1.0) / (dr * dr);
                    let d1 = nm1 / (2.0 * dr * r_i);
                    sub[i - 1] = d2 - d1;
                    diag[i] = -2.0 * d2 - lambda;
                    if i < m - 1 {
                        sup[i] = d2 + d1;
                    } else {
                        rhs[i] -= (d2 + d1) * outer_value;
                    }
                }
                thomas(&sub, &mut diag, &sup, &mut rhs);
                let mut u = rhs;
                u.push(outer_value);
                u
            }
            RadialGeometry::Annulus { r_in, r_out } => {
                let dr = (r_out - r_in) / (n - 1) as f64;
                let m = n - 2;
                let mut diag = vec![0.0; m];
                let mut sub = vec![0.0; m - 1];
                let mut sup = vec![0.0; m - 1];
                let mut rhs = vec![0.0; m];
                for i in 0..m {
                    let r_i = r_in + (i + 1) as f64 * dr;
                    let d2 = (p - 1.0) / (dr * dr);
                    let d1 = nm1 / (2.0 * dr * r_i);
                    diag[i] = -2.0 * d2 - lambda;
                    if i > 0 {
                        sub[i - 1] = d2 - d1;
                    } else {
                        rhs[i] -= (d2 - d1) * inner_value;
                    }
                    if i < m - 1 {
                        sup[i] = d2 + d1;
                    } else {
                        rhs[i] -= (d2 + d1) * outer_value;
                    }
                }
                thomas(&sub, &mut diag, &sup, &mut rhs);
                let mut u = Vec::with_capacity(n);
                u.push(inner_value);
                u.extend_from_slice(&rhs);
                u.push(outer_value);
                u
            }
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mesh_len(&self) -> usize {
        self.profile.len()
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn mesh_radius(&self, i: usize) -> f64 {
        self.r0 + i as f64 * self.dr
    }

    /// Evaluates u(r) by centered 4-point Lagrange interpolation on the
    /// uniform mesh.
    pub fn eval_radius(&self, r: f64) -> f64 {
        let n = self.profile.len();
        let t = (r - self.r0) / self.dr;
        let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = t - i as f64; // local coordinate in [0,1) away from edges
        let (um1, u0, u1, u2) = (
            self.profile[i - 1],
            self.profile[i],
            self.profile[i + 1],
            self.profile[i + 2],
        );
        // Lagrange basis on nodes -1, 0, 1, 2
        let l_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let l_0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let l_1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let l_2 = (s + 1.0) * s * (s - 1.0) / 6.0;
        um1 * l_m1 + u0 * l_0 + u1 * l_1 + u2 * l_2
    }

    /// Evaluates u(|x - center|) for a point of the ambient space; the caller
    /// supplies coordinates already relative to the domain center.
    pub fn eval_point_rel(&self, x_rel: &[f64]) -> f64 {
        self.eval_radius(crate::geometry::norm(x_rel))
    }

    /// Max residual of the stored profile in the radial equation, measured by
    /// second differences at interior mesh points.
    pub fn max_interior_residual(&self) -> f64 {
        let n = self.profile.len();
        let nm1 = self.dim as f64 - 1.0;
        let mut worst = 0.0f64;
        for i in 1..n - 1 {
            let r_i = self.mesh_radius(i);
            if r_i == 0.0 {
                continue;
            }
            let d2 = (self.profile[i - 1] - 2.0 * self.profile[i] + self.profile[i + 1])
                / (self.dr * self.dr);
            let d1 = (self.profile[i + 1] - self.profile[i - 1]) / (2.0 * self.dr);
            let res = (self.p - 1.0) * d2 + nm1 * d1 / r_i - self.lambda * self.profile[i];
            worst = worst.max(res.abs());
        }
        worst
    }

    /// Re-solves on a mesh twice as fine and returns the sup difference at
    /// the shared nodes. Used as the self-consistency check.
    pub fn refinement_change(&self) -> Result<f64> {
        let n = self.profile.len();
        let fine = Self::solve_mesh(
            self.p,
            self.dim,
            self.lambda,
            self.geometry,
            self.profile[0],
            self.profile[n - 1],
            2 * n - 1,
        );
        let mut worst = 0.0f64;
        for i in 0..n {
            worst = worst.max((self.profile[i] - fine[2 * i]).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_reproduces_boundary_data() {
        let o = Oracle1d::solve(-1.0, 1.0, 0.7, -0.3, 3.0, 0.8).unwrap();
        assert!((o.eval(-1.0) - 0.7).abs() < 1e-12);
        assert!((o.eval(1.0) + 0.3).abs() < 1e-12);
    }

    #[test]
    fn gamma_zero_is_affine() {
        let o = Oracle1d::solve(-1.0, 1.0, 1.0, 1.0, 3.0, 0.0).unwrap();
        for &x in &[-1.0, -0.25, 0.0, 0.7, 1.0] {
            assert!((o.eval(x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_mu_matches_cosh_profile() {
        // mu = 2(p+1)γ/(p-1) = 1 at p = 3, γ = 1/4; with data u(±1) = 1 the
        // profile is cosh(x)/cosh(1) = (e^x + e^-x)/(e + 1/e).
        let o = Oracle1d::solve(-1.0, 1.0, 1.0, 1.0, 3.0, 0.25).unwrap();
        assert!((o.mu() - 1.0).abs() < 1e-14);
        let e = std::f64::consts::E;
        let expect_mid = 2.0 / (e + 1.0 / e);
        assert!((o.eval(0.0) - expect_mid).abs() < 1e-14);
        for &x in &[-0.6f64, 0.3, 0.9] {
            let direct = (x.exp() + (-x).exp()) / (e + 1.0 / e);
            assert!((o.eval(x) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let o = Oracle1d::solve(-1.0, 1.0, 0.3, 1.1, 3.5, 0.7).unwrap();
        for &x in &[-0.8, -0.1, 0.0, 0.55] {
            let h = 1e-6;
            let fd = (o.eval(x + h) - o.eval(x - h)) / (2.0 * h);
            assert!((o.eval_deriv(x) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn antisymmetric_data_vanishes_at_center() {
        let o = Oracle1d::solve(-1.0, 1.0, -1.0, 1.0, 4.0, 0.5).unwrap();
        assert!(o.eval(0.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_agrees_with_fd_route() {
        let o = Oracle1d::solve(-1.0, 1.0, 1.0, 0.25, 3.0, 0.25).unwrap();
        let n = 20_001;
        let fd = solve_two_point_fd(-1.0, 1.0, 1.0, 0.25, o.mu(), n).unwrap();
        let dx = 2.0 / (n - 1) as f64;
        let mut worst = 0.0f64;
        for (i, v) in fd.iter().enumerate() {
            let x = -1.0 + i as f64 * dx;
            worst = worst.max((v - o.eval(x)).abs());
        }
        assert!(worst < 1e-8, "sup diff {worst}");
    }

    #[test]
    fn radial_gamma_zero_constant_data_is_constant() {
        let o = RadialOracle::solve(
            3.0,
            2,
            0.0,
            RadialGeometry::Ball { r: 1.0 },
            0.0,
            2.5,
            2001,
        )
        .unwrap();
        for i in 0..o.mesh_len() {
            assert!((o.profile()[i] - 2.5).abs() < 1e-9);
        }
    }

    #[test]
    fn annulus_gamma_zero_matches_euler_closed_form() {
        // γ=0, n=2: (p-1)u'' + u'/r = 0 has solutions A + B r^c with
        // c = (p-2)/(p-1); for p=3, c = 1/2.
        let (r_in, r_out) = (0.25, 1.0);
        let (va, vb) = (1.0, 2.0);
        let o = RadialOracle::solve(
            3.0,
            2,
            0.0,
            RadialGeometry::Annulus { r_in, r_out },
            va,
            vb,
            20_001,
        )
        .unwrap();
        let c = 0.5;
        let b = (vb - va) / (r_out.powf(c) - r_in.powf(c));
        let a = va - b * r_in.powf(c);
        let mut worst = 0.0f64;
        for &r in &[0.25, 0.3, 0.5, 0.77, 0.99, 1.0] {
            worst = worst.max((o.eval_radius(r) - (a + b * r.powf(c))).abs());
        }
        assert!(worst < 1e-6, "sup diff {worst}");
    }

    #[test]
    fn radial_discounted_profile_is_monotone_and_bounded() {
        let o = RadialOracle::solve(
            4.0,
            2,
            1.0,
            RadialGeometry::Ball { r: 1.0 },
            0.0,
            1.0,
            20_001,
        )
        .unwrap();
        let u = o.profile();
        assert!(u[0] > 0.0 && u[0] < 1.0);
        for w in u.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!((u[u.len() - 1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radial_residual_and_refinement_within_budget() {
        let o = RadialOracle::solve(
            4.0,
            2,
            1.0,
            RadialGeometry::Ball { r: 1.0 },
            0.0,
            1.0,
            RADIAL_DEFAULT_MESH,
        )
        .unwrap();
        assert!(o.max_interior_residual() < 1e-6);
        assert!(o.refinement_change().unwrap() < 1e-7);
    }

    #[test]
    fn oracle_respects_maximum_principle() {
        let o = Oracle1d::solve(-1.0, 1.0, 0.9, -0.4, 5.0, 2.0).unwrap();
        for i in 0..=100 {
            let x = -1.0 + 0.02 * i as f64;
            assert!(o.eval(x).abs() <= 0.9 + 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Oracle1d::solve(1.0, 1.0, 0.0, 0.0, 3.0, 0.5).is_err());
        assert!(RadialOracle::solve(
            3.0,
            2,
            0.5,
            RadialGeometry::Annulus {
                r_in: 0.0,
                r_out: 1.0
            },
            0.0,
            1.0,
            2001
        )
        .is_err());
    }
}
