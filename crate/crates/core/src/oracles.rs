//! Closed-form decay functions and limit currents for the unit square, the
//! trapezoid `F_1` and the Hirzebruch polytopes `F_n`, written with `A = |z_1|²`,
//! `C = |z_2|²`. These never call the numeric solver; [`compare`] does.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::softplus_logsum;
use crate::polytope::LatticePolytope;
use crate::region::RegionSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleRegion {
    Allowed,
    /// Flow-out of the top edge `x_2 = 1`.
    Upper,
    /// Flow-out of the right edge `x_1 = 1` (square only).
    Lower,
    /// Flow-out of the slanted edge `x_1 + n x_2 = n + 1` of `F_n`.
    Slanted,
    /// Flow-out of the vertex `(1, 1)` of `F_n`.
    Vertex,
}

impl OracleRegion {
    pub fn label(self) -> &'static str {
        match self {
            Self::Allowed => "allowed",
            Self::Upper => "R_F",
            Self::Lower => "R_F_lower",
            Self::Slanted => "R_F'",
            Self::Vertex => "R_v",
        }
    }

    pub fn face_dim(self) -> usize {
        match self {
            Self::Allowed => 2,
            Self::Upper | Self::Lower | Self::Slanted => 1,
            Self::Vertex => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleValue {
    pub region: OracleRegion,
    pub b: f64,
    pub u_infty: f64,
    /// `q = ∇_s u_∞`.
    pub q: [f64; 2],
    pub hessian: [[f64; 2]; 2],
    /// Smallest `|log|` gap to any of the region inequalities.
    pub margin: f64,
}

impl OracleValue {
    pub fn rank(&self) -> usize {
        self.region.face_dim()
    }
}

fn allowed_value(p: f64, s: [f64; 2], margin: f64) -> OracleValue {
    let sp = softplus_logsum(&s);
    let mu = [(s[0] - sp).exp(), (s[1] - sp).exp()];
    OracleValue {
        region: OracleRegion::Allowed,
        b: 0.0,
        u_infty: p * sp,
        q: [p * mu[0], p * mu[1]],
        hessian: [
            [p * mu[0] * (1.0 - mu[0]), -p * mu[0] * mu[1]],
            [-p * mu[0] * mu[1], p * mu[1] * (1.0 - mu[1])],
        ],
        margin,
    }
}

/// `e^{-b} = 4C(1+A)/(1+A+C)²` above `C = A + 1`, the mirror below `C = A - 1`.
pub fn square_oracle(s: [f64; 2]) -> OracleValue {
    let (a, c) = (s[0].exp(), s[1].exp());
    let upper_gap = s[1] - a.ln_1p();
    let lower_gap = s[0] - c.ln_1p();
    if upper_gap >= 0.0 {
        let t = a / (1.0 + a);
        let u = 4f64.ln() + s[1] + a.ln_1p();
        OracleValue {
            region: OracleRegion::Upper,
            b: 2.0 * (1.0 + a + c).ln() - 4f64.ln() - s[1] - a.ln_1p(),
            u_infty: u,
            q: [t, 1.0],
            hessian: [[t * (1.0 - t), 0.0], [0.0, 0.0]],
            margin: upper_gap,
        }
    } else if lower_gap >= 0.0 {
        let t = c / (1.0 + c);
        OracleValue {
            region: OracleRegion::Lower,
            b: 2.0 * (1.0 + a + c).ln() - 4f64.ln() - s[0] - c.ln_1p(),
            u_infty: 4f64.ln() + s[0] + c.ln_1p(),
            q: [1.0, t],
            hessian: [[0.0, 0.0], [0.0, t * (1.0 - t)]],
            margin: lower_gap,
        }
    } else {
        allowed_value(2.0, s, (-upper_gap).min(-lower_gap))
    }
}

/// The trapezoid `F_1`: allowed below `C = A + 1`, the square's upper region above.
pub fn trapezoid_oracle(s: [f64; 2]) -> OracleValue {
    let gap = s[1] - s[0].exp().ln_1p();
    if gap >= 0.0 {
        square_oracle(s)
    } else {
        allowed_value(2.0, s, -gap)
    }
}

/// `F_n` with vertices `(0,0), (n+1,0), (0,1), (1,1)`, `n ≥ 2`.
pub fn hirzebruch_oracle(n: u32, s: [f64; 2]) -> Result<OracleValue> {
    if n < 2 {
        return Err(Error::InvalidInput("hirzebruch_oracle needs n >= 2; use trapezoid_oracle for n = 1".into()));
    }
    let nf = n as f64;
    let p = nf + 1.0;
    let (a, c) = (s[0].exp(), s[1].exp());
    let ln_nm1 = (nf - 1.0).ln();
    let sp = softplus_logsum(&s);
    // log-gaps of the region inequalities
    let upper = s[1] - (a.ln_1p() - nf.ln()); // C vs (A+1)/n
    let slanted = s[1] + ln_nm1; // C vs 1/(n-1)
    let corner = s[0] + ln_nm1; // A vs 1/(n-1)
    let vertex = s[1] - ((nf - 1.0) * ln_nm1 + nf * s[0]); // C vs (n-1)^{n-1} A^n

    if corner < 0.0 {
        if upper < 0.0 {
            return Ok(allowed_value(p, s, (-upper).min(-slanted)));
        }
        let t = a / (1.0 + a);
        let ln_const = p * p.ln() - nf * nf.ln();
        let u = ln_const + s[1] + nf * a.ln_1p();
        return Ok(OracleValue {
            region: OracleRegion::Upper,
            b: p * (1.0 + a + c).ln() - u,
            u_infty: u,
            q: [nf * t, 1.0],
            hessian: [[nf * t * (1.0 - t), 0.0], [0.0, 0.0]],
            margin: upper.min(-corner),
        });
    }
    if slanted < 0.0 {
        return Ok(allowed_value(p, s, (-slanted).min(-upper).min(corner)));
    }
    if vertex < 0.0 {
        let kappa = nf / (nf - 1.0);
        let phi = s[0] - s[1] / nf - ln_nm1 / nf;
        let e = phi.exp();
        let w = e / (kappa + e);
        let u = p * (kappa + e).ln() + (p / nf) * (ln_nm1 + s[1]);
        let h = p * kappa * e / ((kappa + e) * (kappa + e));
        let d = [1.0, -1.0 / nf];
        return Ok(OracleValue {
            region: OracleRegion::Slanted,
            b: p * sp - u,
            u_infty: u,
            q: [p * w, (p / nf) * (1.0 - w)],
            hessian: [[h * d[0] * d[0], h * d[0] * d[1]], [h * d[1] * d[0], h * d[1] * d[1]]],
            margin: slanted.min(-vertex).min(corner),
        });
    }
    let u = p * (p / (nf - 1.0)).ln() + 2.0 * ln_nm1 + s[0] + s[1];
    Ok(OracleValue {
        region: OracleRegion::Vertex,
        b: p * sp - u,
        u_infty: u,
        q: [1.0, 1.0],
        hessian: [[0.0; 2]; 2],
        margin: vertex.min(corner),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleCase {
    Square,
    Trapezoid,
    Hirzebruch(u32),
}

impl OracleCase {
    pub fn name(&self) -> String {
        match self {
            Self::Square => "square".into(),
            Self::Trapezoid => "trapezoid F_1".into(),
            Self::Hirzebruch(n) => format!("Hirzebruch F_{n}"),
        }
    }

    pub fn polytope(&self) -> LatticePolytope {
        let verts = match *self {
            Self::Square => vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
            Self::Trapezoid => vec![vec![0, 0], vec![2, 0], vec![0, 1], vec![1, 1]],
            Self::Hirzebruch(n) => vec![vec![0, 0], vec![n as i64 + 1, 0], vec![0, 1], vec![1, 1]],
        };
        LatticePolytope::from_vertices(&verts).expect("oracle polytopes are valid")
    }

    pub fn evaluate(&self, s: [f64; 2]) -> Result<OracleValue> {
        match *self {
            Self::Square => Ok(square_oracle(s)),
            Self::Trapezoid => Ok(trapezoid_oracle(s)),
            Self::Hirzebruch(n) => hirzebruch_oracle(n, s),
        }
    }
}

/// Outcome of checking the numeric solver against one oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub case: String,
    pub points: usize,
    /// Points at least `margin` away from every interface.
    pub compared: usize,
    pub region_mismatches: usize,
    pub max_b_error: f64,
    pub max_hessian_error: f64,
    pub rank_mismatches: usize,
    pub b_tolerance: f64,
    pub hessian_tolerance: f64,
}

impl OracleComparison {
    pub fn passed(&self) -> bool {
        self.compared > 0
            && self.region_mismatches == 0
            && self.rank_mismatches == 0
            && self.max_b_error <= self.b_tolerance
            && self.max_hessian_error <= self.hessian_tolerance
    }
}

/// Uniform `side × side` grid on `[lo, hi]²`.
pub fn square_grid(lo: f64, hi: f64, side: usize) -> Vec<[f64; 2]> {
    let step = if side > 1 { (hi - lo) / (side - 1) as f64 } else { 0.0 };
    (0..side * side).map(|k| [lo + step * (k / side) as f64, lo + step * (k % side) as f64]).collect()
}

/// Compare classification, `b` and the Hessian of `u_∞` with the closed forms.
pub fn compare(case: OracleCase, grid: &[[f64; 2]], margin: f64) -> Result<OracleComparison> {
    let solver = RegionSolver::new(&case.polytope())?;
    let mut out = OracleComparison {
        case: case.name(),
        points: grid.len(),
        compared: 0,
        region_mismatches: 0,
        max_b_error: 0.0,
        max_hessian_error: 0.0,
        rank_mismatches: 0,
        b_tolerance: 1e-8,
        hessian_tolerance: 1e-5,
    };
    for &s in grid {
        let oracle = case.evaluate(s)?;
        if oracle.margin < margin {
            continue;
        }
        out.compared += 1;
        let numeric = solver.solve(&s)?;
        let q_gap = (numeric.q[0] - oracle.q[0]).abs().max((numeric.q[1] - oracle.q[1]).abs());
        if numeric.face_dim != oracle.region.face_dim() || q_gap > 1e-6 {
            out.region_mismatches += 1;
            continue;
        }
        out.max_b_error = out.max_b_error.max((numeric.b - oracle.b).abs());
        let hess = solver.psi_hessian(&s)?;
        for i in 0..2 {
            for j in 0..2 {
                out.max_hessian_error = out.max_hessian_error.max((hess.matrix[i][j] - oracle.hessian[i][j]).abs());
            }
        }
        if hess.rank != oracle.rank() {
            out.rank_mismatches += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_examples() {
        let v = square_oracle([0.0, 4f64.ln()]);
        assert_eq!(v.region, OracleRegion::Upper);
        assert!((v.b - (9.0f64 / 8.0).ln()).abs() < 1e-14);
        let v = square_oracle([0.0, 0.0]);
        assert_eq!((v.region, v.b), (OracleRegion::Allowed, 0.0));
        // on the interface C = A + 1: e^{-b} = 1
        let v = square_oracle([0.3, 0.3f64.exp().ln_1p()]);
        assert!(v.b.abs() < 1e-14);
        let mirror = square_oracle([4f64.ln(), 0.0]);
        assert_eq!(mirror.region, OracleRegion::Lower);
        assert!((mirror.b - (9.0f64 / 8.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn hirzebruch_examples() {
        let v = hirzebruch_oracle(2, [-(2f64.ln()), 4f64.ln()]).unwrap();
        assert_eq!(v.region, OracleRegion::Upper);
        // e^{-b} = (27/4)·C(1+A)²/(1+A+C)³ with A = 1/2, C = 4
        let expected = -((27.0 / 4.0) * 4.0 * 1.5f64.powi(2) / 5.5f64.powi(3)).ln();
        assert!((v.b - expected).abs() < 1e-13);
        let v = hirzebruch_oracle(2, [1.0, 5.0]).unwrap();
        assert_eq!((v.region, v.rank()), (OracleRegion::Vertex, 0));
        assert!(hirzebruch_oracle(1, [0.0, 0.0]).is_err());
        assert_eq!(hirzebruch_oracle(3, [-3.0, -3.0]).unwrap().region, OracleRegion::Allowed);
        assert_eq!(hirzebruch_oracle(3, [3.0, 0.0]).unwrap().region, OracleRegion::Slanted);
    }

    #[test]
    fn b_is_continuous_across_hirzebruch_interfaces() {
        for n in [2u32, 3, 5] {
            let nf = n as f64;
            let ln_nm1 = (nf - 1.0).ln();
            let eps = 1e-9;
            // R_F' / R_v interface at A = 2/(n-1)
            let s1 = (2.0 / (nf - 1.0)).ln();
            let s2 = (nf - 1.0) * ln_nm1 + nf * s1;
            let lo = hirzebruch_oracle(n, [s1, s2 - eps]).unwrap();
            let hi = hirzebruch_oracle(n, [s1, s2 + eps]).unwrap();
            assert_eq!((lo.region, hi.region), (OracleRegion::Slanted, OracleRegion::Vertex));
            assert!((lo.b - hi.b).abs() < 1e-7);
            // allowed / R_F' interface at C = 1/(n-1)
            let lo = hirzebruch_oracle(n, [1.0, -ln_nm1 - eps]).unwrap();
            let hi = hirzebruch_oracle(n, [1.0, -ln_nm1 + eps]).unwrap();
            assert_eq!((lo.region, hi.region), (OracleRegion::Allowed, OracleRegion::Slanted));
            assert!(hi.b.abs() < 1e-7);
            // allowed / R_F interface at C = (A+1)/n
            let s1 = (0.5 / (nf - 1.0)).ln();
            let s2 = s1.exp().ln_1p() - nf.ln();
            let hi = hirzebruch_oracle(n, [s1, s2 + eps]).unwrap();
            assert_eq!(hi.region, OracleRegion::Upper);
            assert!(hi.b.abs() < 1e-7);
        }
    }

    #[test]
    fn oracle_q_is_gradient_of_u_infty() {
        let h = 1e-6;
        for case in [OracleCase::Square, OracleCase::Trapezoid, OracleCase::Hirzebruch(2), OracleCase::Hirzebruch(4)] {
            for s in square_grid(-4.0, 4.0, 9) {
                let v = case.evaluate(s).unwrap();
                if v.margin < 1e-3 {
                    continue;
                }
                for k in 0..2 {
                    let mut sp = s;
                    let mut sm = s;
                    sp[k] += h;
                    sm[k] -= h;
                    let fd = (case.evaluate(sp).unwrap().u_infty - case.evaluate(sm).unwrap().u_infty) / (2.0 * h);
                    assert!((fd - v.q[k]).abs() < 1e-6, "{case:?} {s:?}");
                }
            }
        }
    }

    #[test]
    fn solver_matches_oracles() {
        let grid = square_grid(-5.0, 5.0, 20);
        for case in [OracleCase::Square, OracleCase::Trapezoid, OracleCase::Hirzebruch(2), OracleCase::Hirzebruch(3)] {
            let r = compare(case, &grid, 1e-2).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
