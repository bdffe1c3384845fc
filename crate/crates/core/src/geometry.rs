//! Moment maps in log-squared-modulus coordinates.
//!
//! Every function here is torus invariant, so a point `z ∈ ℂ^{*m}` is represented by
//! `s_j = log|z_j|²`. The simplex chart `L(x)_j = log(x_j / x_0)` with
//! `x_0 = 1 - Σ x_j` inverts the simplex moment map: `L(μ_Σ(s)) = s`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, softplus_logsum};
use crate::polytope::LatticePolytope;

/// A torus orbit in `ℂ^{*m}`, stored as `s_j = log|z_j|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint(pub Vec<f64>);

impl OrbitPoint {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().all(|v| v.is_finite()) {
            Ok(Self(s))
        } else {
            Err(Error::InvalidInput("orbit coordinates must be finite".into()))
        }
    }

    /// From a point of `ℂ^{*m}`; a zero coordinate lies off the open orbit.
    pub fn from_complex(z: &[Complex64]) -> Result<Self> {
        Self::new(z.iter().map(|w| w.norm_sqr().ln()).collect())
    }

    /// From moduli `|z_j| > 0`.
    pub fn from_moduli(r: &[f64]) -> Result<Self> {
        if r.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidInput("moduli must be positive".into()));
        }
        Self::new(r.iter().map(|v| 2.0 * v.ln()).collect())
    }

    pub fn s(&self) -> &[f64] {
        &self.0
    }
}

/// A point of the open simplex `Σ°`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(pub Vec<f64>);

impl SimplexPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        let x0 = 1.0 - x.iter().sum::<f64>();
        if x.iter().any(|&v| v <= 0.0) || x0 <= 0.0 {
            Err(Error::BoundaryPoint)
        } else {
            Ok(Self(x))
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.0
    }
}

/// `μ_Σ(z)_j = |z_j|² / (1 + ‖z‖²)`.
pub fn mu_sigma(s: &[f64]) -> Vec<f64> {
    let lse = softplus_logsum(s);
    s.iter().map(|&v| (v - lse).exp()).collect()
}

/// `L(x)_j = log(x_j / x_0)`.
pub fn lmap(x: &[f64]) -> Result<Vec<f64>> {
    let x0 = 1.0 - x.iter().sum::<f64>();
    if x0 <= 0.0 || x.iter().any(|&v| v <= 0.0) {
        return Err(Error::BoundaryPoint);
    }
    Ok(x.iter().map(|&v| (v / x0).ln()).collect())
}

/// Closed-form inverse of [`lmap`]; identical to [`mu_sigma`].
pub fn lmap_inv(t: &[f64]) -> Vec<f64> {
    mu_sigma(t)
}

/// `∂L_j/∂x_k = 1/x_0 + δ_jk / x_j`.
pub fn lmap_jacobian(x: &[f64]) -> Result<DMatrix<f64>> {
    let x0 = 1.0 - x.iter().sum::<f64>();
    if x0 <= 0.0 || x.iter().any(|&v| v <= 0.0) {
        return Err(Error::BoundaryPoint);
    }
    let m = x.len();
    Ok(DMatrix::from_fn(m, m, |j, k| 1.0 / x0 + if j == k { 1.0 / x[j] } else { 0.0 }))
}

/// `μ_P(z) = Σ_α w_α α` with `w_α ∝ exp⟨α, s⟩` over `P ∩ ℤ^m` (all `c_α = 1`).
pub fn mu_polytope_orbit(poly: &LatticePolytope, s: &[f64]) -> Result<Vec<f64>> {
    let points = poly.lattice_points(1)?;
    let logs: Vec<f64> =
        points.iter().map(|a| a.iter().zip(s).map(|(&ai, &si)| ai as f64 * si).sum()).collect();
    let lse = log_sum_exp(logs.iter().copied());
    let mut out = vec![0.0; poly.dim()];
    for (a, l) in points.iter().zip(&logs) {
        let w = (l - lse).exp();
        for (o, &ai) in out.iter_mut().zip(a) {
            *o += w * ai as f64;
        }
    }
    Ok(out)
}
