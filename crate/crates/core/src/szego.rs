//! Conditional Szegő kernel on the diagonal and the finite-`N` potential `u_N`.
//!
//! With Fubini–Study norms `‖χ_α‖² = p!/((p+m)! C(p,α))` for the monomials of
//! `H⁰(ℂP^m, O(p))`, the conditional kernel of the dilate `NP` is
//!
//! ```text
//! Π_{|NP}(z,z) = (Np+m)!/(Np)! · Σ_{α ∈ NP} C(Np,α) e^{⟨α,s⟩} / (1 + Σ e^{s_j})^{Np}
//! ```
//!
//! so that `Π_{|NpΣ} ≡ ∏_{j=1}^m (Np + j)`. Everything is evaluated in log space.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, softplus_logsum, LnFactorials};
use crate::polytope::{LatticePolytope, DEFAULT_LATTICE_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDiag {
    /// `log Π_{|NP}(z,z)`.
    pub log_value: f64,
    pub term_count: usize,
    pub argmax_alpha: Vec<i64>,
}

/// Lattice points of `NP` with their binomial log-weights, cached for repeated evaluation.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    n: i64,
    np: i64,
    points: Vec<Vec<i64>>,
    /// `ln C(Np, α)` per lattice point.
    log_binomials: Vec<f64>,
    /// `ln((Np+m)!/(Np)!)`.
    log_prefactor: f64,
}

impl KernelEvaluator {
    pub fn new(poly: &LatticePolytope, n: i64) -> Result<Self> {
        Self::with_cap(poly, n, DEFAULT_LATTICE_CAP)
    }

    pub fn with_cap(poly: &LatticePolytope, n: i64, cap: u64) -> Result<Self> {
        let points = poly.lattice_points_capped(n, cap)?;
        let np = n * poly.degree();
        let m = poly.dim();
        let lf = LnFactorials::up_to(np as usize + m);
        let log_binomials = points.iter().map(|a| lf.ln_multinomial(np, a)).collect();
        let log_prefactor = lf.get(np as usize + m) - lf.get(np as usize);
        Ok(Self { n, np, points, log_binomials, log_prefactor })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Degree `Np` of the ambient projective space sections.
    pub fn np(&self) -> i64 {
        self.np
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn term_count(&self) -> usize {
        self.points.len()
    }

    /// `ln(1/‖χ_α‖²)` for the `i`-th lattice point, the log-variance of its random coefficient.
    pub fn log_inverse_norm_sq(&self, i: usize) -> f64 {
        self.log_prefactor + self.log_binomials[i]
    }

    fn log_terms(&self, s: &[f64]) -> Vec<f64> {
        self.points
            .iter()
            .zip(&self.log_binomials)
            .map(|(a, lb)| lb + a.iter().zip(s).map(|(&ai, &si)| ai as f64 * si).sum::<f64>())
            .collect()
    }

    pub fn kernel_diag(&self, s: &[f64]) -> KernelDiag {
        let terms = self.log_terms(s);
        let (imax, _) = terms
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &t)| if t > acc.1 { (i, t) } else { acc });
        let lse = log_sum_exp(terms.iter().copied());
        KernelDiag {
            log_value: self.log_prefactor + lse - self.np as f64 * softplus_logsum(s),
            term_count: self.points.len(),
            argmax_alpha: self.points[imax].clone(),
        }
    }

    /// Expected squared mass density `Π_{|NP}(z,z) / #(NP)`.
    pub fn mass_density(&self, s: &[f64]) -> f64 {
        let k = self.kernel_diag(s);
        (k.log_value - (k.term_count as f64).ln()).exp()
    }

    /// `u_N = (1/N) log Π_{|NP}(z,z) + p log(1 + ‖z‖²)`.
    pub fn u_n(&self, s: &[f64]) -> f64 {
        (self.log_prefactor + log_sum_exp(self.log_terms(s))) / self.n as f64
    }

    /// Weighted mean and covariance of the lattice points under `w_α ∝ C(Np,α)e^{⟨α,s⟩}`.
    pub fn lattice_moments(&self, s: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let terms = self.log_terms(s);
        let lse = log_sum_exp(terms.iter().copied());
        let m = s.len();
        let mut mean = vec![0.0; m];
        let weights: Vec<f64> = terms.iter().map(|t| (t - lse).exp()).collect();
        for (a, w) in self.points.iter().zip(&weights) {
            for j in 0..m {
                mean[j] += w * a[j] as f64;
            }
        }
        let mut cov = DMatrix::zeros(m, m);
        for (a, w) in self.points.iter().zip(&weights) {
            for j in 0..m {
                let dj = a[j] as f64 - mean[j];
                for k in 0..m {
                    cov[(j, k)] += w * dj * (a[k] as f64 - mean[k]);
                }
            }
        }
        (mean, cov)
    }

    /// `∇_s u_N = (1/N)·μ_{NP}`, a point of `P`.
    pub fn grad_u_n(&self, s: &[f64]) -> Vec<f64> {
        let (mean, _) = self.lattice_moments(s);
        mean.into_iter().map(|v| v / self.n as f64).collect()
    }

    pub fn hess_u_n(&self, s: &[f64]) -> DMatrix<f64> {
        let (_, cov) = self.lattice_moments(s);
        cov / self.n as f64
    }
}

/// `log ‖χ_α‖²` for the Fubini–Study norm on `H⁰(ℂP^m, O(p))`.
pub fn fs_norm_sq_log(alpha: &[i64], p: i64, m: usize) -> Result<f64> {
    check_in_simplex(alpha, p)?;
    let lf = LnFactorials::up_to(p as usize + m);
    Ok(lf.get(p as usize) - lf.get(p as usize + m) - lf.ln_multinomial(p, alpha))
}

/// `log |m̂_α(z)|² = log C(Np,α) + ⟨α,s⟩ - Np·log(1 + ‖z‖²)`.
pub fn monomial_mass_log(alpha: &[i64], np: i64, s: &[f64]) -> Result<f64> {
    check_in_simplex(alpha, np)?;
    let lf = LnFactorials::up_to(np as usize);
    let linear: f64 = alpha.iter().zip(s).map(|(&a, &si)| a as f64 * si).sum();
    Ok(lf.ln_multinomial(np, alpha) + linear - np as f64 * softplus_logsum(s))
}

fn check_in_simplex(alpha: &[i64], p: i64) -> Result<()> {
    if alpha.iter().any(|&a| a < 0) || alpha.iter().sum::<i64>() > p {
        return Err(Error::OutOfSimplex { alpha: alpha.to_vec(), p });
    }
    Ok(())
}

pub fn kernel_diag(poly: &LatticePolytope, n: i64, s: &[f64]) -> Result<KernelDiag> {
    Ok(KernelEvaluator::new(poly, n)?.kernel_diag(s))
}

pub fn mass_density(poly: &LatticePolytope, n: i64, s: &[f64]) -> Result<f64> {
    Ok(KernelEvaluator::new(poly, n)?.mass_density(s))
}
