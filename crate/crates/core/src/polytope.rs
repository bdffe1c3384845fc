//! Lattice polytopes: exact hull, open-face decomposition, normal cones,
//! the Delzant test, lattice point enumeration and volume.
//!
//! All combinatorics here is exact (integers and rationals). Facets are stored as
//! `ℓ_i(x) = ⟨x, u_i⟩ + a_i ≥ 0` with `u_i` the primitive inward normal, sorted
//! canonically so that facet indices (and the face ids derived from them) do not
//! depend on the order in which the input points were listed.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Default cap on the number of bounding-box candidates scanned by [`LatticePolytope::lattice_points`].
pub const DEFAULT_LATTICE_CAP: u64 = 10_000_000;

/// Highest ambient dimension accepted by the hull code.
pub const MAX_DIM: usize = 3;

/// Reproducible identifier of an open face: FNV-1a hash of its sorted active-facet set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceId(pub u64);

impl FaceId {
    fn from_active(active: &[usize]) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &i in active {
            for b in (i as u64).to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        FaceId(h)
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn eval(&self, x: &[i64]) -> i64 {
        self.eval_scaled(x, 1)
    }

    /// `⟨x, u⟩ + n·a`, the facet inequality of the dilate `nP`.
    pub fn eval_scaled(&self, x: &[i64], n: i64) -> i64 {
        dot(&self.normal, x) + n * self.offset
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        self.normal
            .iter()
            .zip(x)
            .fold(Rational::from_integer(self.offset), |acc, (&u, &xi)| acc + xi * u)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(&u, &xi)| u as f64 * xi).sum::<f64>() + self.offset as f64
    }

    pub fn normal_norm(&self) -> f64 {
        self.normal.iter().map(|&u| (u * u) as f64).sum::<f64>().sqrt()
    }
}

/// An open face of the polytope. The open faces are pairwise disjoint and cover `P`.
#[derive(Debug, Clone, Serialize)]
pub struct Face {
    pub id: FaceId,
    pub dim: usize,
    /// Indices into [`LatticePolytope::vertices`] of the vertices of the closed face.
    pub vertices: Vec<usize>,
    /// `dim` independent integer vectors spanning the tangent space `T_F`.
    pub tangent: Vec<Vec<i64>>,
    /// Vertex centroid, a point of the relative interior.
    pub interior_point: Vec<Rational>,
    pub active_facets: Vec<usize>,
    /// Generators `-u_i` of the normal cone, one per active facet.
    pub normal_cone: Vec<Vec<i64>>,
}

impl Face {
    pub fn is_interior(&self) -> bool {
        self.active_facets.is_empty()
    }
}

/// Outcome of the Delzant test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelzantReport {
    pub is_delzant: bool,
    /// First vertex (in vertex order) where the test fails.
    pub failing_vertex: Option<Vec<i64>>,
    pub reason: Option<String>,
}

/// A facet of the standard simplex `pΣ ⊂ ℝ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimplexFacet {
    /// `x_2 = 0`, parametrized by `x_1`.
    X2Zero,
    /// `x_1 = 0`, parametrized by `x_2`.
    X1Zero,
    /// `x_1 + x_2 = p`, parametrized by `x_2`.
    Diagonal,
}

impl SimplexFacet {
    pub const ALL: [SimplexFacet; 3] = [SimplexFacet::X2Zero, SimplexFacet::X1Zero, SimplexFacet::Diagonal];

    fn contains(self, x: &[i64], p: i64) -> bool {
        match self {
            SimplexFacet::X2Zero => x[1] == 0,
            SimplexFacet::X1Zero => x[0] == 0,
            SimplexFacet::Diagonal => x[0] + x[1] == p,
        }
    }

    fn coordinate(self, x: &[i64]) -> i64 {
        match self {
            SimplexFacet::X2Zero => x[0],
            SimplexFacet::X1Zero | SimplexFacet::Diagonal => x[1],
        }
    }
}

/// The intersection `P ∩ F̄_j` of `P` with a facet of `pΣ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExteriorPiece {
    pub facet: SimplexFacet,
    pub endpoints: (Vec<i64>, Vec<i64>),
    /// Range of the facet's parameter coordinate (see [`SimplexFacet`]).
    pub coord_range: (i64, i64),
    pub lattice_length: i64,
}

/// Partition of `∂P` into the part inside `pΣ°` and the part on `∂(pΣ)`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryDecomposition {
    /// Open boundary faces of `P` meeting `pΣ°`.
    pub interior: Vec<FaceId>,
    pub exterior: Vec<ExteriorPiece>,
    pub exterior_length: i64,
}

/// JSON input document for a polytope: `{"vertices": [[..], ..], "p": optional}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub vertices: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
}

impl PolytopeSpec {
    pub fn build(&self) -> Result<LatticePolytope> {
        match self.p {
            Some(p) => LatticePolytope::with_degree(&self.vertices, p),
            None => LatticePolytope::from_vertices(&self.vertices),
        }
    }
}

/// Integral full-dimensional polytope in the nonnegative orthant.
#[derive(Debug, Clone, Serialize)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    facets: Vec<Facet>,
    degree: i64,
    faces: Vec<Face>,
}

impl LatticePolytope {
    /// Convex hull of `points`, with `p` set to the maximal coordinate sum.
    pub fn from_vertices(points: &[Vec<i64>]) -> Result<Self> {
        Self::build(points, None)
    }

    /// Convex hull of `points`, embedded in `pΣ` for a user-chosen `p ≥ deg P`.
    pub fn with_degree(points: &[Vec<i64>], p: i64) -> Result<Self> {
        Self::build(points, Some(p))
    }

    /// The dilated standard simplex `pΣ ⊂ ℝ^m`.
    pub fn simplex(m: usize, p: i64) -> Result<Self> {
        let mut pts = vec![vec![0; m]];
        for j in 0..m {
            let mut v = vec![0; m];
            v[j] = p;
            pts.push(v);
        }
        Self::from_vertices(&pts)
    }

    fn build(points: &[Vec<i64>], degree: Option<i64>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("empty point set".into()))?;
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionUnsupported { dim });
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidInput("points have inconsistent dimensions".into()));
        }
        if let Some(p) = points.iter().find(|p| p.iter().any(|&c| c < 0)) {
            return Err(Error::NegativeCoordinate { point: p.clone() });
        }
        let pts: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let diffs: Vec<Vec<i64>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
        let hull_dim = int_rank(&diffs);
        if hull_dim < dim {
            return Err(Error::NotFullDimensional { dim, hull_dim });
        }

        let mut facets = BTreeSet::new();
        for subset in combinations(pts.len(), dim) {
            let base = &pts[subset[0]];
            let rows: Vec<Vec<i64>> = subset[1..].iter().map(|&i| sub(&pts[i], base)).collect();
            let normal = primitive(&generalized_cross(&rows, dim));
            if normal.iter().all(|&c| c == 0) {
                continue;
            }
            let offset = -dot(&normal, base);
            let values: Vec<i64> = pts.iter().map(|q| dot(&normal, q) + offset).collect();
            if values.iter().all(|&v| v >= 0) {
                facets.insert(Facet { normal, offset });
            } else if values.iter().all(|&v| v <= 0) {
                facets.insert(Facet { normal: normal.iter().map(|c| -c).collect(), offset: -offset });
            }
        }
        let facets: Vec<Facet> = facets.into_iter().collect();

        let vertices: Vec<Vec<i64>> = pts
            .into_iter()
            .filter(|q| {
                let active: Vec<Vec<i64>> =
                    facets.iter().filter(|f| f.eval(q) == 0).map(|f| f.normal.clone()).collect();
                int_rank(&active) == dim
            })
            .collect();

        let max_deg = vertices.iter().map(|v| v.iter().sum::<i64>()).max().unwrap_or(0);
        let degree = match degree {
            Some(p) if p < max_deg => {
                return Err(Error::InvalidInput(format!("p = {p} is below the polytope degree {max_deg}")))
            }
            Some(p) => p,
            None => max_deg,
        };

        let mut poly = LatticePolytope { dim, vertices, facets, degree, faces: Vec::new() };
        poly.faces = poly.compute_faces();
        Ok(poly)
    }

    fn compute_faces(&self) -> Vec<Face> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        sets.insert(all);
        for f in &self.facets {
            let vs: Vec<usize> = (0..self.vertices.len()).filter(|&i| f.eval(&self.vertices[i]) == 0).collect();
            sets.insert(vs);
        }
        loop {
            let current: Vec<Vec<usize>> = sets.iter().cloned().collect();
            let mut grew = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    let meet: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
                    if !meet.is_empty() && sets.insert(meet) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }

        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|vs| {
                let active: Vec<usize> = (0..self.facets.len())
                    .filter(|&i| vs.iter().all(|&v| self.facets[i].eval(&self.vertices[v]) == 0))
                    .collect();
                let base = &self.vertices[vs[0]];
                let mut tangent: Vec<Vec<i64>> = Vec::new();
                for &v in &vs[1..] {
                    let d = sub(&self.vertices[v], base);
                    let mut trial = tangent.clone();
                    trial.push(d.clone());
                    if int_rank(&trial) > tangent.len() {
                        tangent.push(d);
                    }
                }
                let count = vs.len() as i64;
                let interior_point: Vec<Rational> = (0..self.dim)
                    .map(|j| Rational::new(vs.iter().map(|&v| self.vertices[v][j]).sum::<i64>(), count))
                    .collect();
                let normal_cone =
                    active.iter().map(|&i| self.facets[i].normal.iter().map(|c| -c).collect()).collect();
                Face {
                    id: FaceId::from_active(&active),
                    dim: tangent.len(),
                    vertices: vs,
                    tangent,
                    interior_point,
                    active_facets: active,
                    normal_cone,
                }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
        faces
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// The simplex dilation `p` with `P ⊂ pΣ`.
    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Complete open-face decomposition, sorted by dimension.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> Option<&Face> {
        self.faces.iter().find(|f| f.id == id)
    }

    pub fn interior_face(&self) -> &Face {
        self.faces.last().expect("interior face always present")
    }

    pub fn is_delzant(&self) -> DelzantReport {
        for v in &self.vertices {
            let normals: Vec<Vec<i64>> =
                self.facets.iter().filter(|f| f.eval(v) == 0).map(|f| f.normal.clone()).collect();
            if normals.len() != self.dim {
                return DelzantReport {
                    is_delzant: false,
                    failing_vertex: Some(v.clone()),
                    reason: Some(format!("vertex lies on {} facets, expected {}", normals.len(), self.dim)),
                };
            }
            let det = int_det(&normals);
            if det.abs() != 1 {
                return DelzantReport {
                    is_delzant: false,
                    failing_vertex: Some(v.clone()),
                    reason: Some(format!("normal determinant is {det}")),
                };
            }
        }
        DelzantReport { is_delzant: true, failing_vertex: None, reason: None }
    }

    pub fn require_delzant(&self) -> Result<()> {
        match self.is_delzant().failing_vertex {
            None => Ok(()),
            Some(vertex) => Err(Error::NonDelzant { vertex }),
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|f| f.eval(x) >= 0)
    }

    /// `NP ∩ ℤ^m`, lexicographically sorted, with the default enumeration cap.
    pub fn lattice_points(&self, n: i64) -> Result<Vec<Vec<i64>>> {
        self.lattice_points_capped(n, DEFAULT_LATTICE_CAP)
    }

    pub fn lattice_points_capped(&self, n: i64, cap: u64) -> Result<Vec<Vec<i64>>> {
        if n < 1 {
            return Err(Error::InvalidInput(format!("dilation N = {n} must be positive")));
        }
        let lo: Vec<i64> =
            (0..self.dim).map(|j| n * self.vertices.iter().map(|v| v[j]).min().unwrap()).collect();
        let hi: Vec<i64> =
            (0..self.dim).map(|j| n * self.vertices.iter().map(|v| v[j]).max().unwrap()).collect();
        let count: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u128).product();
        if count > u128::from(cap) {
            return Err(Error::Overflow { count, cap });
        }
        let mut out = Vec::new();
        let mut x = lo.clone();
        'scan: loop {
            if self.facets.iter().all(|f| f.eval_scaled(&x, n) >= 0) {
                out.push(x.clone());
            }
            for j in (0..self.dim).rev() {
                if x[j] < hi[j] {
                    x[j] += 1;
                    continue 'scan;
                }
                x[j] = lo[j];
            }
            break;
        }
        Ok(out)
    }

    /// Exact Euclidean volume from a pulling triangulation of the face lattice.
    pub fn volume(&self) -> Rational {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut total = 0i64;
        for simplex in self.triangulate(&all, self.dim) {
            let rows: Vec<Vec<i64>> =
                simplex[1..].iter().map(|&i| sub(&self.vertices[i], &self.vertices[simplex[0]])).collect();
            total += int_det(&rows).abs();
        }
        Rational::new(total, factorial(self.dim as i64))
    }

    fn triangulate(&self, face: &[usize], dim: usize) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![vec![face[0]]];
        }
        let apex = face[0];
        let mut out = Vec::new();
        for sub in self
            .faces
            .iter()
            .filter(|g| g.dim + 1 == dim && !g.vertices.contains(&apex))
            .filter(|g| g.vertices.iter().all(|v| face.contains(v)))
        {
            for mut s in self.triangulate(&sub.vertices, dim - 1) {
                s.push(apex);
                out.push(s);
            }
        }
        out
    }

    /// The unique open face containing `x`.
    pub fn face_containing(&self, x: &[Rational]) -> Result<&Face> {
        let mut active = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            let v = f.eval_rational(x);
            if v.is_negative() {
                return Err(Error::OutsidePolytope);
            }
            if v.is_zero() {
                active.push(i);
            }
        }
        self.faces
            .iter()
            .find(|f| f.active_facets == active)
            .ok_or(Error::OutsidePolytope)
    }

    /// Whether the open face lies inside `∂(pΣ)` (its relative interior touches the simplex boundary).
    pub fn face_on_simplex_boundary(&self, face: &Face) -> bool {
        let p = Rational::from_integer(self.degree);
        face.interior_point.iter().any(|c| c.is_zero())
            || face.interior_point.iter().fold(Rational::zero(), |a, &c| a + c) == p
    }

    /// `∂°P = ∂P ∩ pΣ°` and `∂ᵉP = P ∩ ∂(pΣ)` for planar polytopes.
    pub fn boundary_decomposition(&self) -> Result<BoundaryDecomposition> {
        if self.dim != 2 {
            return Err(Error::DimensionUnsupported { dim: self.dim });
        }
        let interior = self
            .faces
            .iter()
            .filter(|f| !f.is_interior() && !self.face_on_simplex_boundary(f))
            .map(|f| f.id)
            .collect();
        let exterior: Vec<ExteriorPiece> =
            SimplexFacet::ALL.iter().filter_map(|&sf| self.simplex_facet_intersection(sf)).collect();
        let exterior_length = exterior.iter().map(|e| e.lattice_length).sum();
        Ok(BoundaryDecomposition { interior, exterior, exterior_length })
    }

    /// `P ∩ F̄` for a facet `F` of `pΣ` (planar polytopes only); `None` when empty.
    pub fn simplex_facet_intersection(&self, facet: SimplexFacet) -> Option<ExteriorPiece> {
        if self.dim != 2 {
            return None;
        }
        let on: Vec<&Vec<i64>> = self.vertices.iter().filter(|v| facet.contains(v, self.degree)).collect();
        let lo = on.iter().min_by_key(|v| facet.coordinate(v))?;
        let hi = on.iter().max_by_key(|v| facet.coordinate(v))?;
        let d = sub(hi, lo);
        Some(ExteriorPiece {
            facet,
            endpoints: ((*lo).clone(), (*hi).clone()),
            coord_range: (facet.coordinate(lo), facet.coordinate(hi)),
            lattice_length: d[0].gcd(&d[1]),
        })
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn factorial(n: i64) -> i64 {
    (1..=n).product()
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &c| g.gcd(&c));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|c| c / g).collect()
    }
}

/// Vector orthogonal to the `m - 1` rows (cofactor expansion).
fn generalized_cross(rows: &[Vec<i64>], m: usize) -> Vec<i64> {
    (0..m)
        .map(|i| {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &c)| c).collect())
                .collect();
            let d = int_det(&minor);
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Determinant of a small square integer matrix (Laplace expansion; `m ≤ 3`).
fn int_det(rows: &[Vec<i64>]) -> i64 {
    match rows.len() {
        0 => 1,
        1 => rows[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = rows[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &c)| c).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * rows[0][j] * int_det(&minor)
            })
            .sum(),
    }
}

/// Rank of an integer matrix, by elimination over the rationals.
fn int_rank(rows: &[Vec<i64>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut a: Vec<Vec<Ratio<i128>>> =
        rows.iter().map(|r| r.iter().map(|&c| Ratio::from_integer(i128::from(c))).collect()).collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let factor = a[r][col] / a[rank][col];
                for c in col..width {
                    let delta = factor * a[rank][c];
                    a[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    fn trapezoid() -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    fn segment() -> LatticePolytope {
        LatticePolytope::from_vertices(&[vec![1], vec![2]]).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn square_hull() {
        let p = square();
        assert_eq!(p.degree(), 2);
        let expected = vec![
            Facet { normal: vec![-1, 0], offset: 1 },
            Facet { normal: vec![0, -1], offset: 1 },
            Facet { normal: vec![0, 1], offset: 0 },
            Facet { normal: vec![1, 0], offset: 0 },
        ];
        assert_eq!(p.facets(), expected.as_slice());
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn trapezoid_drops_redundant_point() {
        let p = trapezoid();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.vertices(), &[vec![0, 0], vec![0, 1], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn segment_hull() {
        let p = segment();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.faces().len(), 3);
    }

    #[test]
    fn hull_errors() {
        assert!(matches!(
            LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 1], vec![2, 2]]),
            Err(Error::NotFullDimensional { dim: 2, hull_dim: 1 })
        ));
        assert!(matches!(
            LatticePolytope::from_vertices(&[vec![0, 0], vec![-1, 0], vec![0, 1]]),
            Err(Error::NegativeCoordinate { .. })
        ));
        assert!(matches!(
            LatticePolytope::from_vertices(&[vec![0, 0, 0, 0]]),
            Err(Error::DimensionUnsupported { dim: 4 })
        ));
        assert!(LatticePolytope::with_degree(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], 1).is_err());
    }

    #[test]
    fn square_faces() {
        let p = square();
        let faces = p.faces();
        assert_eq!(faces.len(), 9);
        assert_eq!(faces.iter().filter(|f| f.dim == 0).count(), 4);
        assert_eq!(faces.iter().filter(|f| f.dim == 1).count(), 4);
        assert!(p.interior_face().is_interior());
        assert_eq!(p.interior_face().dim, 2);
        let top = p.face_containing(&[r(1, 4), r(1, 1)]).unwrap();
        assert_eq!(top.dim, 1);
        assert_eq!(top.normal_cone, vec![vec![0, 1]]);
    }

    #[test]
    fn face_containing_cases() {
        let p = square();
        assert!(p.face_containing(&[r(1, 2), r(1, 2)]).unwrap().is_interior());
        let corner = p.face_containing(&[r(1, 1), r(1, 1)]).unwrap();
        assert_eq!(corner.dim, 0);
        assert_eq!(p.vertices()[corner.vertices[0]], vec![1, 1]);
        assert_eq!(p.face_containing(&[r(3, 2), r(1, 2)]).unwrap_err(), Error::OutsidePolytope);
    }

    #[test]
    fn face_ids_are_order_independent() {
        let a = square();
        let b = LatticePolytope::from_vertices(&[vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 0]]).unwrap();
        let ids_a: Vec<FaceId> = a.faces().iter().map(|f| f.id).collect();
        let ids_b: Vec<FaceId> = b.faces().iter().map(|f| f.id).collect();
        assert_eq!(ids_a, ids_b);
    }

    #[test]
    fn delzant_checks() {
        assert!(square().is_delzant().is_delzant);
        assert!(trapezoid().is_delzant().is_delzant);
        assert!(LatticePolytope::simplex(2, 3).unwrap().is_delzant().is_delzant);
        let tri = LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![0, 2]]).unwrap();
        let rep = tri.is_delzant();
        assert!(!rep.is_delzant);
        assert_eq!(rep.failing_vertex, Some(vec![1, 0]));
        assert!(rep.reason.unwrap().contains('2'));
    }

    #[test]
    fn lattice_point_examples() {
        assert_eq!(square().lattice_points(2).unwrap().len(), 9);
        assert_eq!(segment().lattice_points(3).unwrap(), vec![vec![3], vec![4], vec![5], vec![6]]);
        assert_eq!(trapezoid().lattice_points(1).unwrap().len(), 5);
        assert!(matches!(square().lattice_points_capped(1000, 1000), Err(Error::Overflow { .. })));
    }

    #[test]
    fn volumes() {
        assert_eq!(square().volume(), r(1, 1));
        assert_eq!(trapezoid().volume(), r(3, 2));
        assert_eq!(segment().volume(), r(1, 1));
        assert_eq!(LatticePolytope::simplex(2, 3).unwrap().volume(), r(9, 2));
        assert_eq!(LatticePolytope::simplex(3, 2).unwrap().volume(), r(8, 6));
        let cube =
            LatticePolytope::from_vertices(&(0..8).map(|i| vec![i & 1, (i >> 1) & 1, (i >> 2) & 1]).collect::<Vec<_>>())
                .unwrap();
        assert_eq!(cube.volume(), r(1, 1));
        assert_eq!(cube.faces().len(), 27);
    }

    #[test]
    fn boundary_decomposition_examples() {
        let sq = square().boundary_decomposition().unwrap();
        assert_eq!(sq.exterior_length, 2);
        assert_eq!(sq.exterior.len(), 3);
        let diag = sq.exterior.iter().find(|e| e.facet == SimplexFacet::Diagonal).unwrap();
        assert_eq!(diag.endpoints, (vec![1, 1], vec![1, 1]));
        assert_eq!(sq.interior.len(), 2);

        let full = LatticePolytope::simplex(2, 2).unwrap().boundary_decomposition().unwrap();
        assert_eq!(full.exterior_length, 6);
        assert!(full.interior.is_empty());

        // Bottom edge (2), left edge (1) and the slanted edge from (2,0) to (1,1),
        // which lies on the diagonal x1 + x2 = 2 (1).
        let tr = trapezoid().boundary_decomposition().unwrap();
        assert_eq!(tr.exterior_length, 4);
        assert!(segment().boundary_decomposition().is_err());
    }

    #[test]
    fn euler_relation() {
        for p in [square(), trapezoid(), LatticePolytope::simplex(3, 2).unwrap()] {
            // The open faces are the cells of a CW structure on a contractible space.
            let chi: i64 = p.faces().iter().map(|f| if f.dim % 2 == 0 { 1 } else { -1 }).sum();
            assert_eq!(chi, 1);
        }
    }

    #[test]
    fn delzant_normal_cones_are_simple() {
        for p in [square(), trapezoid(), LatticePolytope::simplex(3, 2).unwrap()] {
            for f in p.faces() {
                assert_eq!(f.normal_cone.len(), p.dim() - f.dim);
                assert_eq!(int_rank(&f.normal_cone), p.dim() - f.dim);
            }
        }
    }

    /// `α ∈ NP` iff no line through two points of `N·V` strictly separates `α` from all of `N·V`.
    fn brute_force_contains(vertices: &[Vec<i64>], n: i64, a: &[i64]) -> bool {
        let v: Vec<Vec<i64>> = vertices.iter().map(|x| x.iter().map(|c| c * n).collect()).collect();
        let side = |p: &[i64], q: &[i64], x: &[i64]| (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
        for p in &v {
            for q in &v {
                if p == q {
                    continue;
                }
                let sides: Vec<i64> = v.iter().map(|x| side(p, q, x)).collect();
                let s = side(p, q, a);
                if sides.iter().all(|&t| t >= 0) && s < 0 || sides.iter().all(|&t| t <= 0) && s > 0 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn lattice_points_match_brute_force() {
        let tri = LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![0, 2]]).unwrap();
        for p in [square(), trapezoid(), tri, LatticePolytope::simplex(2, 3).unwrap()] {
            for n in 1..=5 {
                let top = n * p.degree();
                let mut expected = Vec::new();
                for a in 0..=top {
                    for b in 0..=top {
                        if brute_force_contains(p.vertices(), n, &[a, b]) {
                            expected.push(vec![a, b]);
                        }
                    }
                }
                assert_eq!(p.lattice_points(n).unwrap(), expected);
            }
        }
    }

    #[test]
    fn lattice_count_tracks_volume() {
        for p in [square(), trapezoid()] {
            let n = 50;
            let count = p.lattice_points(n).unwrap().len() as f64;
            let vol = *p.volume().numer() as f64 / *p.volume().denom() as f64;
            assert!((count / (n * n) as f64 / vol - 1.0).abs() < 0.1);
        }
    }
}
