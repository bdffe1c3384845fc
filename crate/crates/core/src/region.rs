//! Classically allowed region, flow-outs of boundary faces, and the decay function.
//!
//! For `s` outside the allowed region `μ_Σ^{-1}((1/p)P°)` there is a unique face `F`
//! of `(1/p)P`, a point `y ∈ F` and a normal-cone vector `v = Σ c_i g_i` (`c_i ≥ 0`,
//! `g_i = -u_i`) with `L(y) + v = s`. The shift is `τ = -v` and `q = p·y ∈ ∂P`.
//!
//! Per face this is the stationarity condition of the strictly convex problem
//! `min φ(y) - ⟨s, y⟩` over `aff(F) ∩ Σ°`, where `φ(x) = Σ x_j log x_j + x_0 log x_0`
//! has gradient `L`; the `c_i` are its Lagrange multipliers. The minimizer is found by
//! damped Newton in tangent coordinates, which updates `y` and `x_0` incrementally
//! so coordinates approaching `∂Σ` keep their relative precision.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::mu_sigma;
use crate::numeric::{simpson_weights, softplus_logsum};
use crate::polytope::{FaceId, LatticePolytope};

/// Numerical tolerances of the region solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Maximum `‖L(y) + v - s‖_∞` for an accepted face.
    pub residual: f64,
    /// Allowed violation of face inequalities and cone signs.
    pub feasibility: f64,
    /// Slack below which a point is flagged as a transition point.
    pub transition: f64,
    /// Central-difference step for Hessians of `u_∞`.
    pub hessian_step: f64,
    pub max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-10, feasibility: 1e-9, transition: 1e-7, hessian_step: 1e-4, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionResult {
    /// Face of `(1/p)P` whose flow-out contains the point; the interior face means allowed.
    pub face: FaceId,
    pub face_dim: usize,
    pub allowed: bool,
    pub tau: Vec<f64>,
    pub q: Vec<f64>,
    pub b: f64,
    pub residual: f64,
    /// Smallest cone coefficient or face-inequality slack of the selected face.
    pub slack: f64,
    pub cone_coefficients: Vec<f64>,
    /// How many faces accepted the point (1 off interfaces).
    pub accepting: usize,
    /// Two or more faces accept within tolerance.
    pub transition: bool,
}

/// Hessian of `u_∞` in `s`-coordinates, the matrix form of the limit zero current.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiHessian {
    pub matrix: Vec<Vec<f64>>,
    pub rank: usize,
    pub face_dim: usize,
}

#[derive(Debug, Clone)]
struct FaceChart {
    id: FaceId,
    dim: usize,
    /// Relative-interior start point in `(1/p)P` coordinates, and its `x_0`.
    start: Vec<f64>,
    start0: f64,
    /// `m × r` tangent basis.
    tangent: DMatrix<f64>,
    /// `m × (m - r)` normal-cone generators.
    generators: DMatrix<f64>,
    /// `[T | G]`, square for Delzant input.
    frame: DMatrix<f64>,
    inactive: Vec<usize>,
}

struct Candidate {
    chart: usize,
    y: Vec<f64>,
    x0: f64,
    c: Vec<f64>,
    residual: f64,
    slack: f64,
}

/// Region solver for one Delzant polytope, immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct RegionSolver {
    poly: LatticePolytope,
    charts: Vec<FaceChart>,
    /// Facets not contained in `∂(pΣ)`; the others can never be reached by `μ_Σ`.
    walls: Vec<usize>,
    interior: FaceId,
    tol: Tolerances,
}

impl RegionSolver {
    pub fn new(poly: &LatticePolytope) -> Result<Self> {
        Self::with_tolerances(poly, Tolerances::default())
    }

    pub fn with_tolerances(poly: &LatticePolytope, tol: Tolerances) -> Result<Self> {
        poly.require_delzant()?;
        let m = poly.dim();
        let p = poly.degree() as f64;
        let walls: Vec<usize> = (0..poly.facets().len())
            .filter(|&i| {
                let f = &poly.facets()[i];
                let coordinate = f.offset == 0 && f.normal.iter().filter(|&&u| u != 0).count() == 1 && f.normal.iter().sum::<i64>() == 1;
                let diagonal = f.offset == poly.degree() && f.normal.iter().all(|&u| u == -1);
                !coordinate && !diagonal
            })
            .collect();
        let mut charts: Vec<FaceChart> = poly
            .faces()
            .iter()
            .filter(|f| !f.is_interior() && !poly.face_on_simplex_boundary(f))
            .map(|f| {
                let start: Vec<f64> = f.interior_point.iter().map(|c| to_f64(*c) / p).collect();
                let sum = f.interior_point.iter().fold(crate::Rational::from_integer(0), |a, &c| a + c);
                let start0 = 1.0 - to_f64(sum) / p;
                let r = f.dim;
                let tangent = DMatrix::from_fn(m, r, |i, k| f.tangent[k][i] as f64);
                let generators = DMatrix::from_fn(m, f.normal_cone.len(), |i, k| f.normal_cone[k][i] as f64);
                let mut frame = DMatrix::zeros(m, r + f.normal_cone.len());
                frame.view_mut((0, 0), (m, r)).copy_from(&tangent);
                frame.view_mut((0, r), (m, f.normal_cone.len())).copy_from(&generators);
                let inactive = walls.iter().copied().filter(|i| !f.active_facets.contains(i)).collect();
                FaceChart { id: f.id, dim: r, start, start0, tangent, generators, frame, inactive }
            })
            .collect();
        charts.sort_by_key(|c| std::cmp::Reverse(c.dim));
        Ok(Self { poly: poly.clone(), charts, walls, interior: poly.interior_face().id, tol })
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.poly
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn p(&self) -> f64 {
        self.poly.degree() as f64
    }

    /// Normalized slack `min_i ℓ_i(p·x)/‖u_i‖` over the given facets.
    fn facet_slack(&self, x: &[f64], facets: impl Iterator<Item = usize>) -> f64 {
        let px: Vec<f64> = x.iter().map(|v| v * self.p()).collect();
        facets
            .map(|i| {
                let f = &self.poly.facets()[i];
                f.eval_f64(&px) / f.normal_norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, s: &[f64]) -> Result<RegionResult> {
        let m = self.poly.dim();
        if s.len() != m || s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("expected {m} finite coordinates, got {s:?}")));
        }
        let mu = mu_sigma(s);
        let interior_slack = self.facet_slack(&mu, self.walls.iter().copied());
        let allowed = || RegionResult {
            face: self.interior,
            face_dim: m,
            allowed: true,
            tau: vec![0.0; m],
            q: mu.iter().map(|v| v * self.p()).collect(),
            b: 0.0,
            residual: 0.0,
            slack: interior_slack,
            cone_coefficients: Vec::new(),
            accepting: 1,
            transition: false,
        };
        if interior_slack > self.tol.transition {
            return Ok(allowed());
        }

        let accepted: Vec<Candidate> = (0..self.charts.len())
            .filter_map(|k| self.solve_face(k, s))
            .filter(|c| c.residual < self.tol.residual && c.slack >= -self.tol.feasibility)
            .collect();
        let interior_ok = interior_slack >= -self.tol.feasibility;
        let accepting = accepted.len() + usize::from(interior_ok);
        if interior_ok {
            let mut r = allowed();
            r.accepting = accepting;
            r.transition = accepting >= 2;
            return Ok(r);
        }
        let best = accepted
            .iter()
            .max_by(|a, b| {
                self.charts[a.chart]
                    .dim
                    .cmp(&self.charts[b.chart].dim)
                    .then(a.slack.total_cmp(&b.slack))
            })
            .ok_or_else(|| Error::NoFaceAccepted {
                s: s.to_vec(),
                diagnostics: format!("interior slack {interior_slack:e}; {} candidate faces", self.charts.len()),
            })?;
        let chart = &self.charts[best.chart];
        let v = &chart.generators * DVector::from_column_slice(&best.c);
        let tau: Vec<f64> = v.iter().map(|x| -x).collect();
        let q: Vec<f64> = best.y.iter().map(|x| x * self.p()).collect();
        // softplus(s + τ) = softplus(L(y)) = -ln x_0
        let b = q.iter().zip(&tau).map(|(a, t)| a * t).sum::<f64>() + self.p() * (softplus_logsum(s) + best.x0.ln());
        Ok(RegionResult {
            face: chart.id,
            face_dim: chart.dim,
            allowed: false,
            tau,
            q,
            b: b.max(0.0),
            residual: best.residual,
            slack: best.slack,
            cone_coefficients: best.c.clone(),
            accepting,
            transition: accepting >= 2,
        })
    }

    fn solve_face(&self, k: usize, s: &[f64]) -> Option<Candidate> {
        let chart = &self.charts[k];
        let m = s.len();
        let mut y = chart.start.clone();
        let mut x0 = chart.start0;
        let sv = DVector::from_column_slice(s);
        let lmap = |y: &[f64], x0: f64| DVector::from_iterator(m, y.iter().map(|v| (v / x0).ln()));
        let objective = |y: &[f64], x0: f64| {
            y.iter().map(|v| v * v.ln()).sum::<f64>() + x0 * x0.ln() - y.iter().zip(s).map(|(a, b)| a * b).sum::<f64>()
        };

        if chart.dim > 0 {
            let t = &chart.tangent;
            for _ in 0..self.tol.max_iterations {
                let grad = t.transpose() * (lmap(&y, x0) - &sv);
                let jac = DMatrix::from_fn(m, m, |i, j| 1.0 / x0 + if i == j { 1.0 / y[i] } else { 0.0 });
                let hess = t.transpose() * jac * t;
                let step = hess.clone().cholesky().map(|c| c.solve(&(-&grad)))?;
                let decrement = -grad.dot(&step);
                if !decrement.is_finite() {
                    return None;
                }
                if decrement < 1e-28 {
                    break;
                }
                let dy = t * &step;
                let d0: f64 = -dy.iter().sum::<f64>();
                let f_old = objective(&y, x0);
                let mut alpha = 1.0;
                let mut moved = false;
                for _ in 0..80 {
                    let ny: Vec<f64> = y.iter().zip(dy.iter()).map(|(a, d)| a + alpha * d).collect();
                    let n0 = x0 + alpha * d0;
                    if ny.iter().all(|&v| v > 0.0) && n0 > 0.0 {
                        let ok = decrement < 1e-12 || objective(&ny, n0) <= f_old - 1e-4 * alpha * decrement;
                        if ok {
                            y = ny;
                            x0 = n0;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !moved {
                    break;
                }
            }
        }

        let rhs = &sv - lmap(&y, x0);
        let coeffs = chart.frame.clone().lu().solve(&rhs)?;
        let c: Vec<f64> = coeffs.iter().skip(chart.dim).copied().collect();
        let v = &chart.generators * DVector::from_column_slice(&c);
        let residual = (lmap(&y, x0) + v - &sv).amax();
        let cone_slack = c.iter().copied().fold(f64::INFINITY, f64::min);
        let face_slack = self.facet_slack(&y, chart.inactive.iter().copied());
        Some(Candidate { chart: k, y, x0, c, residual, slack: cone_slack.min(face_slack) })
    }

    pub fn decay_b(&self, s: &[f64]) -> Result<f64> {
        Ok(self.solve(s)?.b)
    }

    /// `q(s) = ∇_s u_∞(s)`, a point of `P`.
    pub fn q(&self, s: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve(s)?.q)
    }

    /// `∇_s b = p·μ_Σ(s) - q(s)`.
    pub fn grad_b(&self, s: &[f64]) -> Result<Vec<f64>> {
        let q = self.q(s)?;
        Ok(mu_sigma(s).iter().zip(&q).map(|(m, q)| self.p() * m - q).collect())
    }

    /// `u_∞ = p·log(1 + ‖z‖²) - b`.
    pub fn u_infty(&self, s: &[f64]) -> Result<f64> {
        Ok(self.p() * softplus_logsum(s) - self.decay_b(s)?)
    }

    /// `b` as the action `∫_0^1 ⟨q(s + rτ) - p·μ_Σ(s + rτ), τ⟩ dr` (composite Simpson).
    pub fn decay_b_action(&self, s: &[f64], steps: usize) -> Result<f64> {
        if steps < 16 {
            return Err(Error::InvalidInput("decay_b_action needs at least 16 steps".into()));
        }
        let steps = steps + steps % 2;
        let base = self.solve(s)?;
        if base.allowed {
            return Ok(0.0);
        }
        let tau = &base.tau;
        let weights = simpson_weights(0.0, 1.0, steps);
        let mut total = 0.0;
        for (i, w) in weights.iter().enumerate() {
            let r = i as f64 / steps as f64;
            let point: Vec<f64> = s.iter().zip(tau).map(|(a, t)| a + r * t).collect();
            let q = self.q(&point)?;
            let mu = mu_sigma(&point);
            let integrand: f64 = (0..s.len()).map(|j| (q[j] - self.p() * mu[j]) * tau[j]).sum();
            total += w * integrand;
        }
        Ok(total)
    }

    /// Central-difference Jacobian of `q`, without any transition checks.
    pub fn jacobian_q(&self, s: &[f64], h: f64) -> Result<DMatrix<f64>> {
        let m = s.len();
        let mut jac = DMatrix::zeros(m, m);
        for k in 0..m {
            let mut sp = s.to_vec();
            let mut sm = s.to_vec();
            sp[k] += h;
            sm[k] -= h;
            let qp = self.q(&sp)?;
            let qm = self.q(&sm)?;
            for j in 0..m {
                jac[(j, k)] = (qp[j] - qm[j]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    pub fn psi_hessian(&self, s: &[f64]) -> Result<PsiHessian> {
        self.psi_hessian_with_step(s, self.tol.hessian_step)
    }

    /// Symmetrized Hessian of `u_∞` and its numerical rank; refuses transition points.
    pub fn psi_hessian_with_step(&self, s: &[f64], h: f64) -> Result<PsiHessian> {
        let center = self.solve(s)?;
        let transition = || Error::TransitionPoint { s: s.to_vec() };
        if center.transition {
            return Err(transition());
        }
        let m = s.len();
        let mut jac = DMatrix::zeros(m, m);
        for k in 0..m {
            let mut probes = Vec::with_capacity(2);
            for sign in [1.0, -1.0] {
                let mut sk = s.to_vec();
                sk[k] += sign * h;
                let r = self.solve(&sk)?;
                if r.transition || r.face != center.face {
                    return Err(transition());
                }
                probes.push(r.q);
            }
            for j in 0..m {
                jac[(j, k)] = (probes[0][j] - probes[1][j]) / (2.0 * h);
            }
        }
        let sym = (&jac + jac.transpose()) * 0.5;
        let threshold = 1e-6 * (sym.trace() + 1.0);
        let rank = sym.clone().symmetric_eigen().eigenvalues.iter().filter(|&&e| e > threshold).count();
        Ok(PsiHessian {
            matrix: (0..m).map(|i| (0..m).map(|j| sym[(i, j)]).collect()).collect(),
            rank,
            face_dim: center.face_dim,
        })
    }

    /// `∫_{[-B,B]^m} det ∇²u_∞ ds` by composite Simpson with `intervals` per axis.
    pub fn monge_ampere_mass(&self, bound: f64, intervals: usize) -> Result<f64> {
        let m = self.poly.dim();
        let weights = simpson_weights(-bound, bound, intervals);
        let nodes: Vec<f64> = (0..=intervals).map(|i| -bound + 2.0 * bound * i as f64 / intervals as f64).collect();
        let h = self.tol.hessian_step;
        let det_at = |s: &[f64]| -> Result<f64> { Ok(self.jacobian_q(s, h)?.determinant()) };
        match m {
            1 => nodes.iter().zip(&weights).map(|(&x, w)| Ok(w * det_at(&[x])?)).sum(),
            2 => {
                let rows: Vec<f64> = (0..=intervals)
                    .into_par_iter()
                    .map(|i| -> Result<f64> {
                        let mut acc = 0.0;
                        for j in 0..=intervals {
                            acc += weights[j] * det_at(&[nodes[i], nodes[j]])?;
                        }
                        Ok(weights[i] * acc)
                    })
                    .collect::<Result<_>>()?;
                Ok(rows.iter().sum())
            }
            dim => Err(Error::DimensionUnsupported { dim }),
        }
    }
}

fn to_f64(r: crate::Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn solve_region(poly: &LatticePolytope, s: &[f64]) -> Result<RegionResult> {
    RegionSolver::new(poly)?.solve(s)
}

pub fn decay_b(poly: &LatticePolytope, s: &[f64]) -> Result<f64> {
    RegionSolver::new(poly)?.decay_b(s)
}
