//! The hull `H` seeding special polyhedron approximations, and the
//! approximations themselves.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::exact::{hull3d, lattice_points, ExactError, Halfspace, IntMat3, IntVec3, LatticeBox, PolyMesh};
use crate::units::DirichletPair;

/// Exponent range of the group images in an approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ExponentRange {
    /// `1 <= mᵢ <= m`.
    #[default]
    Positive,
    /// `−m <= mᵢ <= m`.
    Symmetric,
}

impl ExponentRange {
    pub fn bounds(self, m: i64) -> (i64, i64) {
        match self {
            ExponentRange::Positive => (1, m),
            ExponentRange::Symmetric => (-m, m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExponentRange::Positive => "positive",
            ExponentRange::Symmetric => "symmetric",
        }
    }

    pub fn parse(s: &str) -> Option<ExponentRange> {
        match s {
            "positive" | "paper" => Some(ExponentRange::Positive),
            "symmetric" => Some(ExponentRange::Symmetric),
            _ => None,
        }
    }
}

/// Integer points of `H = conv{O, V, B1V, B2V, B1B2V}` other than `O`, hulled;
/// returns the hull vertices (or the points themselves if they span less than
/// three dimensions), sorted.
pub fn seed_hull(v: &IntVec3, pair: &DirichletPair) -> Vec<IntVec3> {
    let b1v = pair.b1.apply(v);
    let b2v = pair.b2.apply(v);
    let b12v = pair.b1.apply(&b2v);
    let generators = vec![IntVec3::zero(), v.clone(), b1v, b2v, b12v];
    let mut corners: Vec<IntVec3> = generators[1..].to_vec();
    corners.sort();
    corners.dedup();
    let Ok(h) = hull3d(&generators) else {
        return corners;
    };
    let halfspaces: Vec<Halfspace> =
        h.faces.iter().map(|f| Halfspace::new(f.plane.normal.clone(), f.plane.offset.clone())).collect();
    let Some(bx) = LatticeBox::bounding(&generators) else {
        return corners;
    };
    let pts: Vec<IntVec3> = lattice_points(&halfspaces, &bx).into_iter().filter(|p| !p.is_zero()).collect();
    match hull3d(&pts) {
        Ok(mesh) => mesh.vertices,
        Err(_) => pts,
    }
}

/// A special polyhedron approximation with per-vertex provenance.
#[derive(Clone, Debug)]
pub struct ApproxMesh {
    pub mesh: PolyMesh,
    pub m: i64,
    pub range: ExponentRange,
    /// Vertex is the image of a seed under some `B1ⁱB2ʲ` with both exponents
    /// strictly inside the range.
    pub trusted_vertex: Vec<bool>,
    /// Face plane separates the hull from the origin (the sail side).
    pub front: Vec<bool>,
}

/// Hull of `B1ⁱB2ʲ(V_r)` over the exponent range.
pub fn special_approximation(
    seeds: &[IntVec3],
    pair: &DirichletPair,
    m: i64,
    range: ExponentRange,
) -> Result<ApproxMesh, ExactError> {
    let (lo, hi) = range.bounds(m);
    let powers1: BTreeMap<i64, IntMat3> = (lo..=hi).map(|i| (i, pair.b1.pow(i).expect("unimodular"))).collect();
    let powers2: BTreeMap<i64, IntMat3> = (lo..=hi).map(|j| (j, pair.b2.pow(j).expect("unimodular"))).collect();
    let mut points: BTreeMap<IntVec3, bool> = BTreeMap::new();
    for (i, p1) in &powers1 {
        for (j, p2) in &powers2 {
            let g = p1.mul(p2);
            let inner = *i > lo && *i < hi && *j > lo && *j < hi;
            for s in seeds {
                let e = points.entry(g.apply(s)).or_insert(false);
                *e |= inner;
            }
        }
    }
    let all: Vec<IntVec3> = points.keys().cloned().collect();
    let mesh = hull3d(&all)?;
    let trusted_vertex = mesh.vertices.iter().map(|v| points[v]).collect();
    let front = mesh.faces.iter().map(|f| f.plane.offset.is_negative()).collect();
    Ok(ApproxMesh { mesh, m, range, trusted_vertex, front })
}
