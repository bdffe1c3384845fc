//! Conditional Szegő kernels, classically allowed and forbidden regions, the decay
//! function `b`, limit zero currents, and Monte Carlo statistics for random
//! polynomials whose Newton polytope is a Delzant lattice polytope `P ⊂ pΣ`.
//!
//! Points of `ℂ^{*m}` enter every torus-invariant function through
//! `s_j = log|z_j|²` (see [`geometry::OrbitPoint`]).

pub mod amoeba;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod oracles;
pub mod polytope;
pub mod region;
pub mod szego;

pub use error::{Error, Result};
pub use geometry::{OrbitPoint, SimplexPoint};
pub use polytope::{Face, FaceId, LatticePolytope, PolytopeSpec, Rational};

pub use region::{PsiHessian, RegionResult, RegionSolver, Tolerances};
pub use szego::{KernelDiag, KernelEvaluator};

/// Library version, echoed into output provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
