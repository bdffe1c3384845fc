//! Random polynomials from the conditional Gaussian ensemble and their zeros.
//!
//! A sample is `f = Σ_{α ∈ NP} λ_α χ_α / ‖χ_α‖` with i.i.d. standard complex
//! Gaussians `λ_α`, so `E|f(z)|²_FS = Π_{|NP}(z,z)`.

pub mod resultant;
pub mod roots;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::ks_distance;
use crate::polytope::LatticePolytope;
use crate::region::RegionSolver;
use crate::szego::KernelEvaluator;

pub use resultant::{bkk_bound, zeros_2d};
pub use roots::aberth_roots;

/// A polynomial given by its support and coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySample {
    pub support: Vec<Vec<i64>>,
    pub coefficients: Vec<Complex64>,
    /// Degree `Np` of the ambient `O(Np)`, used for Fubini–Study masses.
    pub np: i64,
    /// `(seed, stream, draw)` of the generating stream, if random.
    pub provenance: Option<(u64, u64, u64)>,
}

impl PolySample {
    pub fn from_terms(terms: Vec<(Vec<i64>, Complex64)>, np: i64) -> Result<Self> {
        let dim = terms.first().map(|(a, _)| a.len()).ok_or_else(|| Error::InvalidInput("empty polynomial".into()))?;
        if terms.iter().any(|(a, _)| a.len() != dim || a.iter().any(|&v| v < 0)) {
            return Err(Error::InvalidInput("exponents must be nonnegative with a common dimension".into()));
        }
        let (support, coefficients) = terms.into_iter().unzip();
        Ok(Self { support, coefficients, np, provenance: None })
    }

    pub fn dim(&self) -> usize {
        self.support.first().map_or(0, Vec::len)
    }

    fn monomial(alpha: &[i64], z: &[Complex64]) -> Complex64 {
        alpha.iter().zip(z).map(|(&a, w)| w.powi(a as i32)).product()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.support.iter().zip(&self.coefficients).map(|(a, c)| c * Self::monomial(a, z)).sum()
    }

    /// `Σ |c_α| |z^α|`, the natural scale for relative residuals.
    pub fn abs_eval(&self, z: &[Complex64]) -> f64 {
        self.support.iter().zip(&self.coefficients).map(|(a, c)| c.norm() * Self::monomial(a, z).norm()).sum()
    }

    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|k| {
                self.support
                    .iter()
                    .zip(&self.coefficients)
                    .filter(|(a, _)| a[k] > 0)
                    .map(|(a, c)| {
                        let mut d = a.clone();
                        d[k] -= 1;
                        c * a[k] as f64 * Self::monomial(&d, z)
                    })
                    .sum()
            })
            .collect()
    }

    /// `|f(z)|² / (1 + ‖z‖²)^{Np}`.
    pub fn fs_mass(&self, z: &[Complex64]) -> f64 {
        let norm: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        self.eval(z).norm_sqr() / (1.0 + norm).powf(self.np as f64)
    }
}

/// A reproducible random stream: ChaCha8 keyed by the master seed, one stream per trial.
#[derive(Debug, Clone)]
pub struct SampleStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
    draws: u64,
}

impl SampleStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, seed, stream, draws: 0 }
    }

    /// `(g_1 + i g_2)/√2` with independent standard normals.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let g1: f64 = self.rng.sample(StandardNormal);
        let g2: f64 = self.rng.sample(StandardNormal);
        Complex64::new(g1, g2) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Draws polynomials for a fixed `(P, N)`, sharing the lattice and norm cache.
#[derive(Debug, Clone)]
pub struct Sampler {
    kernel: KernelEvaluator,
    scales: Vec<f64>,
}

impl Sampler {
    pub fn new(poly: &LatticePolytope, n: i64) -> Result<Self> {
        let kernel = KernelEvaluator::new(poly, n)?;
        let scales = (0..kernel.term_count()).map(|i| (0.5 * kernel.log_inverse_norm_sq(i)).exp()).collect();
        Ok(Self { kernel, scales })
    }

    pub fn kernel(&self) -> &KernelEvaluator {
        &self.kernel
    }

    pub fn draw(&self, stream: &mut SampleStream) -> PolySample {
        let coefficients = self.scales.iter().map(|&w| stream.complex_gaussian() * w).collect();
        let draw = stream.draws;
        stream.draws += 1;
        PolySample {
            support: self.kernel.points().to_vec(),
            coefficients,
            np: self.kernel.np(),
            provenance: Some((stream.seed, stream.stream, draw)),
        }
    }
}

pub fn sample_poly(poly: &LatticePolytope, n: i64, stream: &mut SampleStream) -> Result<PolySample> {
    Ok(Sampler::new(poly, n)?.draw(stream))
}

/// Roots in `ℂ*` of a univariate sample; there are `max α - min α` of them.
pub fn roots_1d(f: &PolySample) -> Result<Vec<Complex64>> {
    if f.dim() != 1 {
        return Err(Error::DimensionUnsupported { dim: f.dim() });
    }
    let lo = f.support.iter().map(|a| a[0]).min().unwrap_or(0);
    let hi = f.support.iter().map(|a| a[0]).max().unwrap_or(0);
    let mut dense = vec![Complex64::ZERO; (hi - lo + 1) as usize];
    for (a, c) in f.support.iter().zip(&f.coefficients) {
        dense[(a[0] - lo) as usize] += c;
    }
    aberth_roots(&dense)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroClass {
    Allowed,
    Forbidden,
    /// Within transition tolerance of a region interface.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroPoint {
    pub trial: usize,
    /// `log|z_j|²`.
    pub s: Vec<f64>,
    pub class: ZeroClass,
    pub face_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroStats {
    pub dim: usize,
    pub n: i64,
    pub trials: usize,
    pub seed: u64,
    /// `m! Vol(NP)`.
    pub expected_count: u64,
    /// Zero count per trial; `None` for failed trials.
    pub counts: Vec<Option<usize>>,
    pub failures: Vec<String>,
    pub allowed: usize,
    pub forbidden: usize,
    pub boundary: usize,
    /// Per-trial allowed fraction `allowed / (allowed + forbidden)`, averaged.
    pub allowed_fraction_mean: f64,
    pub allowed_fraction_stderr: f64,
    pub points: Vec<ZeroPoint>,
    /// Sup distance between the empirical `s`-distribution and `E` of the zero
    /// counting function (m = 1).
    pub ks_distance: Option<f64>,
    pub histogram: Option<Histogram>,
}

impl ZeroStats {
    /// Fraction of trials whose count equals the Kouchnirenko number.
    pub fn exact_count_fraction(&self) -> f64 {
        let hits = self.counts.iter().filter(|c| **c == Some(self.expected_count as usize)).count();
        hits as f64 / self.trials.max(1) as f64
    }
}

/// Expected fraction of the `N·length(P)` zeros with `log|z|² ≤ s`, exact at finite `N`:
/// the lattice mean `∂_s log Π_{|NP}` shifted and scaled to `[0, 1]`.
pub fn expected_zero_cdf(kernel: &KernelEvaluator, s: f64) -> f64 {
    let points = kernel.points();
    let lo = points.iter().map(|a| a[0]).min().unwrap_or(0) as f64;
    let hi = points.iter().map(|a| a[0]).max().unwrap_or(0) as f64;
    let (mean, _) = kernel.lattice_moments(&[s]);
    ((mean[0] - lo) / (hi - lo)).clamp(0.0, 1.0)
}

struct TrialOutcome {
    count: Result<usize>,
    points: Vec<ZeroPoint>,
}

fn classify(solver: &RegionSolver, trial: usize, s: Vec<f64>) -> ZeroPoint {
    match solver.solve(&s) {
        Ok(r) => {
            let class = if r.transition {
                ZeroClass::Boundary
            } else if r.allowed {
                ZeroClass::Allowed
            } else {
                ZeroClass::Forbidden
            };
            ZeroPoint { trial, s, class, face_dim: r.face_dim }
        }
        Err(_) => ZeroPoint { trial, s, class: ZeroClass::Boundary, face_dim: 0 },
    }
}

/// Monte Carlo zero statistics for `m ∈ {1, 2}`; trial `t` uses stream `t` of `seed`.
pub fn zero_statistics(poly: &LatticePolytope, n: i64, trials: usize, seed: u64) -> Result<ZeroStats> {
    let dim = poly.dim();
    if !(1..=2).contains(&dim) {
        return Err(Error::DimensionUnsupported { dim });
    }
    if n < 1 || trials == 0 {
        return Err(Error::InvalidInput("need N >= 1 and at least one trial".into()));
    }
    let sampler = Sampler::new(poly, n)?;
    let solver = RegionSolver::new(poly)?;
    let volume = poly.volume();
    let factorial: i64 = (1..=dim as i64).product();
    let scaled = volume * crate::Rational::from_integer(factorial * n.pow(dim as u32));
    let expected_count = scaled.to_integer() as u64;

    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = SampleStream::new(seed, trial as u64);
            let result: Result<Vec<Vec<f64>>> = if dim == 1 {
                let f = sampler.draw(&mut stream);
                roots_1d(&f).map(|r| r.iter().map(|z| vec![z.norm_sqr().ln()]).collect())
            } else {
                let f = sampler.draw(&mut stream);
                let g = sampler.draw(&mut stream);
                zeros_2d(&f, &g).map(|z| z.iter().map(|p| vec![p[0].norm_sqr().ln(), p[1].norm_sqr().ln()]).collect())
            };
            match result {
                Ok(points) => TrialOutcome {
                    count: Ok(points.len()),
                    points: points.into_iter().map(|s| classify(&solver, trial, s)).collect(),
                },
                Err(e) => TrialOutcome { count: Err(e), points: Vec::new() },
            }
        })
        .collect();

    let mut stats = ZeroStats {
        dim,
        n,
        trials,
        seed,
        expected_count,
        counts: Vec::with_capacity(trials),
        failures: Vec::new(),
        allowed: 0,
        forbidden: 0,
        boundary: 0,
        allowed_fraction_mean: 0.0,
        allowed_fraction_stderr: 0.0,
        points: Vec::new(),
        ks_distance: None,
        histogram: None,
    };
    let mut fractions = Vec::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        match outcome.count {
            Ok(c) => stats.counts.push(Some(c)),
            Err(e) => {
                stats.counts.push(None);
                stats.failures.push(format!("trial {trial}: {e}"));
            }
        }
        let (mut a, mut f) = (0, 0);
        for p in &outcome.points {
            match p.class {
                ZeroClass::Allowed => a += 1,
                ZeroClass::Forbidden => f += 1,
                ZeroClass::Boundary => stats.boundary += 1,
            }
        }
        stats.allowed += a;
        stats.forbidden += f;
        if a + f > 0 {
            fractions.push(a as f64 / (a + f) as f64);
        }
        stats.points.extend(outcome.points);
    }
    if !fractions.is_empty() {
        let k = fractions.len() as f64;
        let mean = fractions.iter().sum::<f64>() / k;
        let var = if fractions.len() > 1 { fractions.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
        stats.allowed_fraction_mean = mean;
        stats.allowed_fraction_stderr = (var / k).sqrt();
    }
    if dim == 1 {
        let values: Vec<f64> = stats.points.iter().map(|p| p.s[0]).collect();
        if !values.is_empty() {
            stats.ks_distance = Some(ks_distance(&values, |s| expected_zero_cdf(sampler.kernel(), s)));
            stats.histogram = Some(histogram(&values, 40));
        }
    }
    Ok(stats)
}

fn histogram(values: &[f64], bins: usize) -> Histogram {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges = (0..=bins).map(|k| lo + width * k as f64).collect();
    let mut counts = vec![0; bins];
    for v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment() -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![1], vec![2]]).unwrap()
    }

    fn square() -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn support_and_determinism() {
        let a = sample_poly(&segment(), 3, &mut SampleStream::new(9, 4)).unwrap();
        let b = sample_poly(&segment(), 3, &mut SampleStream::new(9, 4)).unwrap();
        assert_eq!(a.support, vec![vec![3], vec![4], vec![5], vec![6]]);
        assert_eq!(a, b);
        let c = sample_poly(&segment(), 3, &mut SampleStream::new(9, 5)).unwrap();
        assert_ne!(a.coefficients, c.coefficients);
    }

    #[test]
    fn unit_variance_gaussians() {
        let mut stream = SampleStream::new(1, 0);
        let draws = 100_000;
        let mean: f64 = (0..draws).map(|_| stream.complex_gaussian().norm_sqr()).sum::<f64>() / draws as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn expected_fs_mass_is_the_kernel() {
        let poly = square();
        let sampler = Sampler::new(&poly, 2).unwrap();
        let draws = 100_000;
        for (k, z) in [[0.3, 0.2], [1.0, 1.0], [2.0, 0.5], [0.1, 3.0], [0.7, 1.7]].iter().enumerate() {
            let z = [Complex64::new(z[0], 0.1), Complex64::new(z[1], -0.2)];
            let s: Vec<f64> = z.iter().map(|w| w.norm_sqr().ln()).collect();
            let mut stream = SampleStream::new(77, k as u64);
            let masses: Vec<f64> = (0..draws).map(|_| sampler.draw(&mut stream).fs_mass(&z)).collect();
            let mean = masses.iter().sum::<f64>() / draws as f64;
            let sd = (masses.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (draws - 1) as f64).sqrt();
            let target = sampler.kernel().kernel_diag(&s).log_value.exp();
            assert!((mean - target).abs() < 3.0 * sd / (draws as f64).sqrt(), "{mean} vs {target}");
        }
    }

    #[test]
    fn roots_1d_counts() {
        let f = PolySample::from_terms(vec![(vec![0], Complex64::new(-1.0, 0.0)), (vec![1], Complex64::new(1.0, 0.0))], 1).unwrap();
        assert_eq!(roots_1d(&f).unwrap(), vec![Complex64::new(1.0, 0.0)]);
        let s = sample_poly(&segment(), 40, &mut SampleStream::new(5, 0)).unwrap();
        assert_eq!(roots_1d(&s).unwrap().len(), 40);
    }

    #[test]
    fn kouchnirenko_counts_for_the_square() {
        let sampler = Sampler::new(&square(), 1).unwrap();
        let f = sampler.draw(&mut SampleStream::new(2, 0));
        let g = sampler.draw(&mut SampleStream::new(2, 1));
        assert_eq!(zeros_2d(&f, &g).unwrap().len(), 2);
        let stats = zero_statistics(&square(), 2, 10, 3).unwrap();
        assert_eq!(stats.expected_count, 8);
        assert!(stats.exact_count_fraction() >= 0.9, "{:?}", stats.counts);
    }

    #[test]
    fn full_simplex_zeros_are_all_allowed() {
        let stats = zero_statistics(&LatticePolytope::simplex(1, 2).unwrap(), 5, 20, 1).unwrap();
        assert_eq!(stats.forbidden, 0);
        assert_eq!(stats.allowed_fraction_mean, 1.0);
    }

    #[test]
    fn statistics_are_reproducible() {
        let a = zero_statistics(&segment(), 10, 8, 42).unwrap();
        let b = zero_statistics(&segment(), 10, 8, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.counts.iter().all(|c| *c == Some(10)));
    }
}
