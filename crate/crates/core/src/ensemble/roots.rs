//! Aberth–Ehrlich simultaneous root finding with Newton-polygon initialization.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 600;
const ATTEMPTS: u64 = 4;
/// Certified roots satisfy `|p(z)/p'(z)| ≤ CERTIFY·|z|`.
pub const CERTIFY: f64 = 1e-8;

/// Roots in `ℂ*` of `Σ_k a_k z^k`; leading and trailing zero coefficients are stripped,
/// so the result has `deg - valuation` entries.
pub fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let lo = coeffs.iter().position(|c| *c != Complex64::ZERO);
    let hi = coeffs.iter().rposition(|c| *c != Complex64::ZERO);
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::InvalidInput("zero polynomial has no isolated roots".into()));
    };
    let a = &coeffs[lo..=hi];
    let degree = a.len() - 1;
    match degree {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-a[0] / a[1]]),
        _ => {}
    }
    let mut worst = degree;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0xAB_E27 + attempt);
        let mut z = initial_guesses(a, &mut rng, attempt);
        iterate(a, &mut z);
        let uncertified = z.iter().filter(|&&r| !certified(a, r)).count();
        if uncertified == 0 {
            return Ok(z);
        }
        worst = worst.min(uncertified);
    }
    Err(Error::RootFindingFailed { degree, uncertified: worst })
}

/// `p(z)/p'(z)`, evaluated through the reversed polynomial when `|z| > 1`.
fn newton_ratio(a: &[Complex64], z: Complex64) -> Complex64 {
    let d = a.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let (mut p, mut dp) = (a[d], Complex64::ZERO);
        for k in (0..d).rev() {
            dp = dp * z + p;
            p = p * z + a[k];
        }
        p / dp
    } else {
        let w = z.inv();
        let (mut r, mut dr) = (a[0], Complex64::ZERO);
        for &ak in &a[1..] {
            dr = dr * w + r;
            r = r * w + ak;
        }
        // p'/p = w (d - w R'/R), kept as a quotient so that R = 0 gives 0
        r / (w * (r * d as f64 - w * dr))
    }
}

fn certified(a: &[Complex64], z: Complex64) -> bool {
    let ratio = newton_ratio(a, z);
    z.is_finite() && z != Complex64::ZERO && ratio.is_finite() && ratio.norm() <= CERTIFY * z.norm()
}

fn iterate(a: &[Complex64], z: &mut [Complex64]) {
    let n = z.len();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let ratio = newton_ratio(a, z[k]);
            if !ratio.is_finite() {
                all = false;
                continue;
            }
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
            }
            if step.norm() <= 1e-15 * z[k].norm() {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
}

/// Circles whose radii follow the upper hull of `(k, log|a_k|)`.
fn initial_guesses(a: &[Complex64], rng: &mut ChaCha8Rng, attempt: u64) -> Vec<Complex64> {
    let d = a.len() - 1;
    let logs: Vec<f64> = a.iter().map(|c| if *c == Complex64::ZERO { f64::NEG_INFINITY } else { c.norm().ln() }).collect();
    let mut hull: Vec<usize> = Vec::new();
    for k in (0..=d).filter(|&k| logs[k].is_finite()) {
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (j - i) as f64 * (logs[k] - logs[i]) - (k - i) as f64 * (logs[j] - logs[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let jitter = if attempt == 0 { 0.0 } else { 0.1 * attempt as f64 };
    let mut out = Vec::with_capacity(d);
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let count = j - i;
        let radius = ((logs[i] - logs[j]) / count as f64).exp() * (1.0 + jitter * rng.random_range(-1.0..1.0));
        let offset: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        for k in 0..count {
            let angle = offset + std::f64::consts::TAU * k as f64 / count as f64 + 0.4;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}
