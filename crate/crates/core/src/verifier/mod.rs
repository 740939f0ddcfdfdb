//! The seven-stage verification of a conjectured fundamental domain.

mod candidate;
mod classify;
mod geometry;
mod report;
mod stages;
mod star;
mod topology;

pub use candidate::{face_plane_of, DomainCandidate, Generator, Gluing, Owned, StructureError, Word};
pub use classify::{
    classify_face, face_equivalence, integer_area, integer_distance, integer_length, pyramid_points, DistanceError,
    FaceClassTable, FaceFamily,
};
pub use geometry::{polygon_contact, proper_contact, Contact, RatPoint};
pub use report::{
    CellRef, DihedralRecord, OpCounter, PyramidRecord, StageResult, StageStatus, Verdict, VerificationReport, Witness,
    STAGE_NAMES,
};
pub use stages::{
    gluing_reverses_boundary, stage1_disk, stage2_torus, stage3_distances, stage4_pyramids, stage5_dihedral,
    stage6_stars, stage7_orthant, verify, Glue, Stage4Mode, VerifyError, VerifyOptions,
};
pub use star::{edge_test, face_test, perturbation, vertex_star, CellTest, Star, StarCell};
pub use topology::{boundary_cycle, closure_euler, component_count, disk_check, edge_incidence, DiskDefect};
