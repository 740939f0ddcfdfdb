//! Orthant machinery, sail vertices, special polyhedron approximations and
//! heuristic extraction of fundamental-domain candidates.

mod approx;
mod eigen;
mod extract;
mod orbit;
mod vertex;

pub use approx::{seed_hull, special_approximation, ApproxMesh, ExponentRange};
pub use eigen::{
    find_orthant_point, find_orthant_point_from_scale, off_eigenplanes, orthant_cubic, orthant_from_signs, pair_form,
    poly_det3, same_orthant_cubic, EigenData, OrthantRef, PolyVec,
};
pub use extract::{assemble_candidate, extract_candidate, gluing_vocabulary, Assembly, ExtractError, Extraction};
pub use orbit::{orbit_classes, orbit_equivalent_faces, OrbitClasses};
pub use vertex::{find_sail_face, find_sail_vertex, slicing_normal, SailFace, VertexError};
