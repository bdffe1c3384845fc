//! Common zeros in `ℂ^{*2}` of two Laurent-free polynomials via the Sylvester resultant.
//!
//! The resultant in `z_2` is sampled at roots of unity scaled to a circle, its
//! determinant taken by LU, and its coefficients recovered by an inverse DFT. Each
//! `z_1` root yields `z_2` candidates from both univariate restrictions, which are
//! polished by Newton's method on `(f, g)` jointly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::roots::aberth_roots;
use super::PolySample;
use crate::error::{Error, Result};

/// Common zeros are certified to this relative residual.
pub const ZERO_RESIDUAL: f64 = 1e-8;
const MODULUS_RANGE: (f64, f64) = (1e-12, 1e12);

/// Dense bivariate coefficients `c[a][b]` of `z_1^a z_2^b` after removing monomial factors.
#[derive(Debug, Clone)]
struct Bivariate {
    c: Vec<Vec<Complex64>>,
}

impl Bivariate {
    fn new(f: &PolySample, swap: bool) -> Result<Self> {
        if f.dim() != 2 {
            return Err(Error::DimensionUnsupported { dim: f.dim() });
        }
        let terms: Vec<([i64; 2], Complex64)> = f
            .support
            .iter()
            .zip(&f.coefficients)
            .filter(|(_, c)| **c != Complex64::ZERO)
            .map(|(a, &c)| (if swap { [a[1], a[0]] } else { [a[0], a[1]] }, c))
            .collect();
        if terms.is_empty() {
            return Err(Error::DegenerateSystem);
        }
        let lo = [0, 1].map(|k| terms.iter().map(|(a, _)| a[k]).min().unwrap());
        let hi = [0, 1].map(|k| terms.iter().map(|(a, _)| a[k]).max().unwrap());
        let mut c = vec![vec![Complex64::ZERO; (hi[1] - lo[1] + 1) as usize]; (hi[0] - lo[0] + 1) as usize];
        for (a, v) in terms {
            c[(a[0] - lo[0]) as usize][(a[1] - lo[1]) as usize] += v;
        }
        Ok(Self { c })
    }

    fn deg1(&self) -> usize {
        self.c.len() - 1
    }

    fn deg2(&self) -> usize {
        self.c[0].len() - 1
    }

    /// Coefficients in `z_2` at fixed `z_1`.
    fn in_z2(&self, z1: Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; self.deg2() + 1];
        for row in self.c.iter().rev() {
            for (o, &v) in out.iter_mut().zip(row) {
                *o = *o * z1 + v;
            }
        }
        out
    }
}

/// Twice the area of the convex hull of planar lattice points (0 when degenerate).
fn hull_area2(points: &[[i64; 2]]) -> i64 {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return 0;
    }
    let cross = |o: [i64; 2], a: [i64; 2], b: [i64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[i64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[i64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let n = hull.len();
    (0..n).map(|i| cross([0, 0], hull[i], hull[(i + 1) % n])).sum::<i64>().abs()
}

/// Bernstein–Kouchnirenko count: the mixed area of the two Newton polygons.
pub fn bkk_bound(f: &PolySample, g: &PolySample) -> u64 {
    let support = |p: &PolySample| -> Vec<[i64; 2]> {
        p.support
            .iter()
            .zip(&p.coefficients)
            .filter(|(_, c)| **c != Complex64::ZERO)
            .map(|(a, _)| [a[0], a[1]])
            .collect()
    };
    let (a, b) = (support(f), support(g));
    let sum: Vec<[i64; 2]> = a.iter().flat_map(|x| b.iter().map(move |y| [x[0] + y[0], x[1] + y[1]])).collect();
    ((hull_area2(&sum) - hull_area2(&a) - hull_area2(&b)) / 2) as u64
}

fn relative_residual(f: &PolySample, z: &[Complex64; 2]) -> f64 {
    let scale = f.abs_eval(z);
    if scale == 0.0 {
        return 0.0;
    }
    f.eval(z).norm() / scale
}

fn polish(f: &PolySample, g: &PolySample, mut z: [Complex64; 2]) -> Option<[Complex64; 2]> {
    for _ in 0..40 {
        let (fv, gv) = (f.eval(&z), g.eval(&z));
        let (df, dg) = (f.gradient(&z), g.gradient(&z));
        let det = df[0] * dg[1] - df[1] * dg[0];
        if det == Complex64::ZERO || !det.is_finite() {
            return None;
        }
        let d1 = (fv * dg[1] - gv * df[1]) / det;
        let d2 = (df[0] * gv - dg[0] * fv) / det;
        z[0] -= d1;
        z[1] -= d2;
        if !(z[0].is_finite() && z[1].is_finite()) {
            return None;
        }
        if d1.norm() <= 1e-15 * z[0].norm() && d2.norm() <= 1e-15 * z[1].norm() {
            break;
        }
    }
    let inside = z.iter().all(|w| (MODULUS_RANGE.0..=MODULUS_RANGE.1).contains(&w.norm()));
    (inside && relative_residual(f, &z) < ZERO_RESIDUAL && relative_residual(g, &z) < ZERO_RESIDUAL).then_some(z)
}

fn same_point(a: &[Complex64; 2], b: &[Complex64; 2]) -> bool {
    (a[0] - b[0]).norm() <= 1e-7 * a[0].norm() && (a[1] - b[1]).norm() <= 1e-7 * a[1].norm()
}

/// Resultant coefficients in `z_1` (after trimming negligible leading/trailing terms).
fn resultant(f: &Bivariate, g: &Bivariate, radius: f64, theta: f64) -> Result<Vec<Complex64>> {
    let (df, dg) = (f.deg2(), g.deg2());
    let size = df + dg;
    if size == 0 {
        return Err(Error::DegenerateSystem);
    }
    let degree = dg * f.deg1() + df * g.deg1();
    let nodes = degree + 1;
    let zeta = Complex64::from_polar(radius, theta);
    let mut values = Vec::with_capacity(nodes);
    let mut relative = 0.0f64;
    for k in 0..nodes {
        let z1 = zeta * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nodes as f64);
        let (fc, gc) = (f.in_z2(z1), g.in_z2(z1));
        let mut s = DMatrix::<Complex64>::zeros(size, size);
        for i in 0..dg {
            for (j, &v) in fc.iter().rev().enumerate() {
                s[(i, i + j)] = v;
            }
        }
        for i in 0..df {
            for (j, &v) in gc.iter().rev().enumerate() {
                s[(dg + i, i + j)] = v;
            }
        }
        let hadamard: f64 = s.row_iter().map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).product();
        let det = s.lu().determinant();
        if !det.is_finite() {
            return Err(Error::ResultantIllConditioned);
        }
        if hadamard > 0.0 {
            relative = relative.max(det.norm() / hadamard);
        }
        values.push(det);
    }
    if relative < 1e-13 {
        return Err(Error::DegenerateSystem);
    }
    let mut coeffs: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * (j * k % nodes) as f64 / nodes as f64))
                .sum();
            sum / nodes as f64
        })
        .collect();
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let threshold = 1e-12 * peak;
    while coeffs.last().is_some_and(|c| c.norm() < threshold) {
        coeffs.pop();
    }
    let low = coeffs.iter().take_while(|c| c.norm() < threshold).count();
    for c in coeffs.iter_mut().take(low) {
        *c = Complex64::ZERO;
    }
    // undo the circle scaling: e_j = c_j ζ^j
    let mut power = Complex64::new(1.0, 0.0);
    for c in coeffs.iter_mut() {
        *c /= power;
        power *= zeta;
    }
    Ok(coeffs)
}

fn attempt(f: &PolySample, g: &PolySample, swap: bool, radius: f64, theta: f64) -> Result<Vec<[Complex64; 2]>> {
    let (bf, bg) = (Bivariate::new(f, swap)?, Bivariate::new(g, swap)?);
    let coeffs = resultant(&bf, &bg, radius, theta)?;
    let z1_roots = if coeffs.iter().filter(|c| **c != Complex64::ZERO).count() <= 1 {
        Vec::new()
    } else {
        aberth_roots(&coeffs)?
    };
    let mut found: Vec<[Complex64; 2]> = Vec::new();
    for z1 in z1_roots {
        if !(MODULUS_RANGE.0..=MODULUS_RANGE.1).contains(&z1.norm()) {
            continue;
        }
        let mut candidates = Vec::new();
        for b in [&bf, &bg] {
            let uni = b.in_z2(z1);
            if uni.iter().filter(|c| **c != Complex64::ZERO).count() > 1 {
                if let Ok(r) = aberth_roots(&uni) {
                    candidates.extend(r);
                }
            }
        }
        for z2 in candidates {
            let start = if swap { [z2, z1] } else { [z1, z2] };
            if let Some(z) = polish(f, g, start) {
                if !found.iter().any(|w| same_point(w, &z)) {
                    found.push(z);
                }
            }
        }
    }
    Ok(found)
}

/// Isolated common zeros of `f` and `g` in `ℂ^{*2}`.
///
/// Attempts vary the sampling circle and the elimination variable until the
/// Bernstein–Kouchnirenko count is reached; otherwise the largest certified set is returned.
pub fn zeros_2d(f: &PolySample, g: &PolySample) -> Result<Vec<[Complex64; 2]>> {
    let expected = bkk_bound(f, g) as usize;
    let mut best: Option<Vec<[Complex64; 2]>> = None;
    let mut last_err = Error::ResultantIllConditioned;
    let mut degenerate = 0;
    let plans = [(false, 1.0, 0.3), (true, 1.0, 0.3), (false, 0.7, 1.1), (true, 1.4, 2.0), (false, 1.6, 2.7), (true, 0.6, 0.9)];
    for (swap, radius, theta) in plans {
        match attempt(f, g, swap, radius, theta) {
            Ok(points) => {
                if points.len() == expected {
                    return Ok(points);
                }
                if best.as_ref().is_none_or(|b| points.len() > b.len() && points.len() <= expected) {
                    best = Some(points);
                }
            }
            Err(Error::DegenerateSystem) => degenerate += 1,
            Err(e) => last_err = e,
        }
    }
    if degenerate == plans.len() {
        return Err(Error::DegenerateSystem);
    }
    best.ok_or(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(terms: &[([i64; 2], f64)]) -> PolySample {
        PolySample::from_terms(terms.iter().map(|(a, v)| (a.to_vec(), c(*v))).collect(), 2).unwrap()
    }

    #[test]
    fn hand_solvable_system() {
        let f = poly(&[([1, 1], 1.0), ([0, 0], -1.0)]);
        let g = poly(&[([1, 0], 1.0), ([0, 0], -2.0)]);
        assert_eq!(bkk_bound(&f, &g), 1);
        let z = zeros_2d(&f, &g).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0][0] - 2.0).norm() < 1e-12 && (z[0][1] - 0.5).norm() < 1e-12);
    }

    #[test]
    fn bilinear_pair() {
        // (z1 - 1)(z2 - 2) = 0 and (z1 + 3)z2 - 4 z1 = 0 share two zeros
        let f = poly(&[([1, 1], 1.0), ([1, 0], -2.0), ([0, 1], -1.0), ([0, 0], 2.0)]);
        let g = poly(&[([1, 1], 1.0), ([0, 1], 3.0), ([1, 0], -4.0)]);
        let z = zeros_2d(&f, &g).unwrap();
        assert_eq!(z.len(), 2);
        for p in &z {
            assert!(relative_residual(&f, p) < 1e-10 && relative_residual(&g, p) < 1e-10);
        }
    }

    #[test]
    fn identical_polynomials_are_degenerate() {
        let f = poly(&[([1, 1], 1.0), ([0, 0], -1.0), ([1, 0], 0.5)]);
        assert_eq!(zeros_2d(&f, &f).unwrap_err(), Error::DegenerateSystem);
    }

    #[test]
    fn hull_area() {
        assert_eq!(hull_area2(&[[0, 0], [1, 0], [0, 1], [1, 1]]), 2);
        assert_eq!(hull_area2(&[[0, 0], [2, 0], [1, 0]]), 0);
        assert_eq!(hull_area2(&[[0, 0], [2, 0], [0, 1], [1, 1], [1, 0]]), 3);
    }
}
