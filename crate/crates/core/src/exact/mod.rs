//! Exact arithmetic layer: integer vectors and matrices, polynomials, real
//! algebraic numbers, convex hulls and lattice enumeration.

mod hull;
mod int;
mod interval;
mod lattice;
mod poly;
mod roots;

use thiserror::Error;

pub use hull::{canonical_cycle, hull3d, planar_hull, to_f64_point, MeshFace, Plane, PolyMesh};
pub use int::{cross, det3, det_columns, ivec_content, IntMat3, IntVec3};
pub use interval::{ceil_rat, floor_div, floor_rat, ln_enclosure, ln_interval, round_down, round_up, RatInterval};
pub use lattice::{det_square, hermite_normal_form, integer_kernel, lattice_points, Halfspace, LatticeBox};
pub use poly::{IntPoly, Rat, RatPoly};
pub use roots::{
    cauchy_bound, count_roots_closed, count_roots_half_open, cubic_roots_in_unit_segment, isolate_real_roots, sign_at,
    sturm_sequence, RootInterval, Sign,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("the zero vector has no content")]
    ZeroVector,
    #[error("points are collinear")]
    Collinear,
    #[error("degenerate point set: affine rank {rank} < 3")]
    DegenerateHull { rank: usize },
}
