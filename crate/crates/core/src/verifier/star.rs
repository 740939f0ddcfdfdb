//! Vertex stars in the universal cover of the glued torus, realized in space,
//! and the perturbed-ray test that decides their regularity.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::candidate::DomainCandidate;
use crate::exact::{IntMat3, IntVec3};

/// How to cross a glued boundary edge: the partner edge, and the matrix
/// taking the partner's cells next to this edge.
#[derive(Clone, Debug)]
pub(crate) struct Across {
    pub partner: usize,
    pub transform: IntMat3,
}

/// Crossing data for every glued edge, from `(from, to, g)` with `g(from) = to`.
pub(crate) fn across_map(glue: &[(usize, usize, IntMat3)]) -> HashMap<usize, Across> {
    let mut out = HashMap::new();
    for (from, to, g) in glue {
        let inv = g.inverse().expect("unimodular word");
        out.insert(*from, Across { partner: *to, transform: inv });
        out.insert(*to, Across { partner: *from, transform: g.clone() });
    }
    out
}

/// One cell of a realized star.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarCell {
    Face(Vec<IntVec3>),
    /// Open edge from the star's centre to this endpoint.
    Edge(IntVec3),
}

/// The perturbed ray test on one cell: sign conditions `c₀ + c₁ε` (for an
/// edge, `det(x, y, v̄)` and `(x×v̄)·(x×y)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTest {
    pub cell: StarCell,
    pub conditions: Vec<(BigInt, BigInt)>,
    pub qualifies: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Star {
    pub vertex: usize,
    pub point: IntVec3,
    pub perturbation: IntVec3,
    /// Faces and edges around the vertex in walk order.
    pub cells: Vec<CellTest>,
}

impl Star {
    pub fn qualifying(&self) -> Vec<&CellTest> {
        self.cells.iter().filter(|c| c.qualifies).collect()
    }

    pub fn faces(&self) -> Vec<&Vec<IntVec3>> {
        self.cells
            .iter()
            .filter_map(|c| match &c.cell {
                StarCell::Face(f) => Some(f),
                StarCell::Edge(_) => None,
            })
            .collect()
    }
}

/// Perturbation direction `(1,0,0)`, or `(0,1,0)` on the x-axis.
pub fn perturbation(x: &IntVec3) -> IntVec3 {
    if x.0[1].is_zero() && x.0[2].is_zero() {
        IntVec3::unit(1)
    } else {
        IntVec3::unit(0)
    }
}

/// Whether the ray through `x + εv̄` meets the open cone over the relative
/// interior of the face for all small `ε > 0`.
pub fn face_test(face: &[IntVec3], x: &IntVec3, vbar: &IntVec3) -> (Vec<(BigInt, BigInt)>, bool) {
    let n = face.len();
    let mut conds = Vec::with_capacity(n);
    for i in 0..n {
        let (p, q) = (&face[i], &face[(i + 1) % n]);
        let mut m = p.cross(q).primitive();
        let inside = (0..n).map(|k| m.dot(&face[k])).find(|d| !d.is_zero()).unwrap_or_default();
        if inside.is_negative() {
            m = -&m;
        }
        conds.push((m.dot(x), m.dot(vbar)));
    }
    let ok = conds.iter().all(|(c0, c1)| c0.is_positive() || (c0.is_zero() && c1.is_positive()));
    (conds, ok)
}

/// Whether the ray through `x + εv̄` lies in the open cone spanned by `x`, `y`.
pub fn edge_test(x: &IntVec3, y: &IntVec3, vbar: &IntVec3) -> (Vec<(BigInt, BigInt)>, bool) {
    let xy = x.cross(y);
    let det = xy.dot(vbar);
    let side = x.cross(vbar).dot(&xy);
    let ok = det.is_zero() && side.is_positive();
    (vec![(det, side)], ok)
}

/// Walks the faces around vertex `v` across edges, crossing glued boundary
/// edges with their words, and tests every realized cell.
pub(crate) fn vertex_star_with(c: &DomainCandidate, across: &HashMap<usize, Across>, v: usize) -> Result<Star, String> {
    let edge_faces = c.edge_faces();
    let lookup = c.edge_lookup();
    let index: HashMap<&IntVec3, usize> = c.vertices.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let side = |a: usize, b: usize| lookup.get(&(a.min(b), a.max(b))).copied();
    // The two sides of face `f` at vertex `w`.
    let sides_at = |f: usize, w: usize| -> Option<(usize, usize)> {
        let cyc = &c.faces[f];
        let k = cyc.iter().position(|&u| u == w)?;
        let prev = cyc[(k + cyc.len() - 1) % cyc.len()];
        let next = cyc[(k + 1) % cyc.len()];
        Some((side(prev, w)?, side(w, next)?))
    };
    let f0 = (0..c.faces.len()).find(|&f| c.faces[f].contains(&v)).ok_or("vertex lies on no face")?;
    let (in0, _) = sides_at(f0, v).ok_or("malformed face")?;
    let x = c.vertices[v].clone();
    let vbar = perturbation(&x);
    let budget = 4 * c.faces.iter().map(Vec::len).sum::<usize>() + 4;

    let (mut f, mut w, mut h, mut e_in) = (f0, v, IntMat3::identity(), in0);
    let mut cells = Vec::new();
    for _ in 0..budget {
        let realized: Vec<IntVec3> = c.face_points(f).iter().map(|p| h.apply(p)).collect();
        let (conds, ok) = face_test(&realized, &x, &vbar);
        cells.push(CellTest { cell: StarCell::Face(realized), conditions: conds, qualifies: ok });
        let (a, b) = sides_at(f, w).ok_or("vertex missing from face during walk")?;
        let e_out = if a == e_in { b } else { a };
        let [p, q] = c.edges[e_out];
        let far = if p == w { q } else { p };
        let y = h.apply(&c.vertices[far]);
        let (conds, ok) = edge_test(&x, &y, &vbar);
        cells.push(CellTest { cell: StarCell::Edge(y), conditions: conds, qualifies: ok });

        let faces = &edge_faces[e_out];
        let (nf, nw, nh, ne) = if faces.len() == 2 {
            (if faces[0] == f { faces[1] } else { faces[0] }, w, h.clone(), e_out)
        } else if let Some(acr) = across.get(&e_out) {
            let inv = acr.transform.inverse().expect("unimodular");
            let nw = *index.get(&inv.apply(&c.vertices[w])).ok_or("glued vertex image is not a candidate vertex")?;
            let nf = *edge_faces[acr.partner].first().ok_or("glued edge lies on no face")?;
            (nf, nw, h.mul(&acr.transform), acr.partner)
        } else {
            return Err(format!("edge {e_out} is on the boundary but not glued"));
        };
        (f, w, h, e_in) = (nf, nw, nh, ne);
        if f == f0 && w == v && e_in == in0 && h.is_identity() {
            return Ok(Star { vertex: v, point: x, perturbation: vbar, cells });
        }
    }
    Err(format!("the walk around vertex {v} does not close"))
}

/// The realized star of vertex `v` under the candidate's gluing words.
pub fn vertex_star(c: &DomainCandidate, pair: &crate::units::DirichletPair, v: usize) -> Result<Star, String> {
    let glue: Vec<(usize, usize, IntMat3)> = c.gluing.iter().map(|g| (g.from, g.to, g.word.matrix(pair))).collect();
    vertex_star_with(c, &across_map(&glue), v)
}
