//! Amoebas of plane curves and their free tentacles.
//!
//! A free tentacle ends on a facet of `pΣ` meeting `P`. Restricting `f` to the facet
//! leaves a univariate polynomial supported on `N(P ∩ F̄_j)`; its roots in `ℂ*` are the
//! tentacle ends, and each is classified by the one-dimensional region solver.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{roots::aberth_roots, PolySample, Sampler, SampleStream};
use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, SimplexFacet};
use crate::region::RegionSolver;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmoebaSample {
    /// `(log|z_1|, log|z_2|)` on the curve.
    pub points: Vec<[f64; 2]>,
    pub max_residual: f64,
}

/// Points of the amoeba of `f` above each `log|z_1|` value, with `phases` arguments of `z_1`.
pub fn amoeba_points(f: &PolySample, log_z1: &[f64], phases: usize) -> Result<AmoebaSample> {
    if f.dim() != 2 {
        return Err(Error::DimensionUnsupported { dim: f.dim() });
    }
    let max_b = f.support.iter().map(|a| a[1]).max().unwrap_or(0) as usize;
    let mut out = AmoebaSample { points: Vec::new(), max_residual: 0.0 };
    for &x1 in log_z1 {
        for k in 0..phases.max(1) {
            let z1 = Complex64::from_polar(x1.exp(), std::f64::consts::TAU * (k as f64 + 0.5) / phases.max(1) as f64);
            let mut uni = vec![Complex64::ZERO; max_b + 1];
            for (a, c) in f.support.iter().zip(&f.coefficients) {
                uni[a[1] as usize] += c * z1.powi(a[0] as i32);
            }
            if uni.iter().filter(|c| **c != Complex64::ZERO).count() < 2 {
                continue;
            }
            for z2 in aberth_roots(&uni)? {
                let z = [z1, z2];
                let residual = f.eval(&z).norm() / f.abs_eval(&z);
                out.max_residual = out.max_residual.max(residual);
                out.points.push([x1, z2.norm().ln()]);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetTentacles {
    pub facet: SimplexFacet,
    /// Parameter range of `P ∩ F̄_j`, absent when the intersection is empty.
    pub coord_range: Option<(i64, i64)>,
    /// Free tentacles on this facet, `N·length(P ∩ F̄_j)`.
    pub free: usize,
    pub allowed: usize,
    pub boundary: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TentacleStats {
    pub facets: Vec<FacetTentacles>,
    pub free_tentacles: usize,
    /// Classically allowed tentacles `ν_AT`.
    pub nu_at: usize,
}

/// Coefficients of the restriction of `f` to a facet of `Npσ`, indexed by the facet parameter.
fn restriction(f: &PolySample, facet: SimplexFacet) -> Vec<(i64, Complex64)> {
    f.support
        .iter()
        .zip(&f.coefficients)
        .filter_map(|(a, &c)| match facet {
            SimplexFacet::X2Zero => (a[1] == 0).then_some((a[0], c)),
            SimplexFacet::X1Zero => (a[0] == 0).then_some((a[1], c)),
            // z_1 → 1/w_1, z_2 → w_2/w_1, then w_1 = 0: the top-degree part in w = z_2/z_1
            SimplexFacet::Diagonal => (a[0] + a[1] == f.np).then_some((a[1], c)),
        })
        .collect()
}

/// Tentacle census of one sample `f` with Newton polytope `NP`.
pub fn tentacle_stats(f: &PolySample, poly: &LatticePolytope, n: i64) -> Result<TentacleStats> {
    if poly.dim() != 2 || f.dim() != 2 {
        return Err(Error::DimensionUnsupported { dim: poly.dim() });
    }
    let p = poly.degree();
    let mut facets = Vec::with_capacity(3);
    for facet in SimplexFacet::ALL {
        let piece = poly.simplex_facet_intersection(facet);
        let mut record = FacetTentacles {
            facet,
            coord_range: piece.as_ref().map(|e| e.coord_range),
            free: 0,
            allowed: 0,
            boundary: 0,
        };
        if let Some(piece) = piece.filter(|e| e.lattice_length > 0) {
            let terms = restriction(f, facet);
            let (lo, hi) = piece.coord_range;
            let mut dense = vec![Complex64::ZERO; (n * (hi - lo) + 1) as usize];
            for (k, c) in terms {
                let idx = k - n * lo;
                if idx >= 0 && (idx as usize) < dense.len() {
                    dense[idx as usize] += c;
                }
            }
            let segment = LatticePolytope::with_degree(&[vec![lo], vec![hi]], p)?;
            let solver = RegionSolver::new(&segment)?;
            let roots = if dense.iter().any(|c| *c != Complex64::ZERO) { aberth_roots(&dense)? } else { Vec::new() };
            record.free = roots.len();
            for w in roots {
                let r = solver.solve(&[w.norm_sqr().ln()])?;
                if r.transition {
                    record.boundary += 1;
                } else if r.allowed {
                    record.allowed += 1;
                }
            }
        }
        facets.push(record);
    }
    let free_tentacles = facets.iter().map(|f| f.free).sum();
    let nu_at = facets.iter().map(|f| f.allowed).sum();
    Ok(TentacleStats { facets, free_tentacles, nu_at })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TentacleSummary {
    pub n: i64,
    pub trials: usize,
    pub seed: u64,
    /// `Length(∂ᵉP)`.
    pub exterior_length: i64,
    pub per_trial: Vec<TentacleStats>,
    pub mean_nu_at_over_n: f64,
}

/// Tentacle statistics over independent samples; trial `t` uses stream `t` of `seed`.
pub fn tentacle_trials(poly: &LatticePolytope, n: i64, trials: usize, seed: u64) -> Result<TentacleSummary> {
    let exterior_length = poly.boundary_decomposition()?.exterior_length;
    let sampler = Sampler::new(poly, n)?;
    let per_trial: Vec<TentacleStats> = (0..trials)
        .into_par_iter()
        .map(|t| tentacle_stats(&sampler.draw(&mut SampleStream::new(seed, t as u64)), poly, n))
        .collect::<Result<_>>()?;
    let mean = per_trial.iter().map(|t| t.nu_at as f64).sum::<f64>() / (trials.max(1) as f64 * n as f64);
    Ok(TentacleSummary { n, trials, seed, exterior_length, per_trial, mean_nu_at_over_n: mean })
}
