//! The closure cell complex of a conjectured fundamental domain, with
//! ownership flags and boundary gluing words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::exact::{planar_hull, IntMat3, IntVec3, Plane};
use crate::units::DirichletPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    B1,
    B2,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::B1 => "B1",
            Generator::B2 => "B2",
        }
    }

    pub fn parse(s: &str) -> Option<Generator> {
        match s {
            "B1" => Some(Generator::B1),
            "B2" => Some(Generator::B2),
            _ => None,
        }
    }

    fn matrix(self, pair: &DirichletPair) -> &IntMat3 {
        match self {
            Generator::B1 => &pair.b1,
            Generator::B2 => &pair.b2,
        }
    }
}

/// A group word `g₁^e₁ · g₂^e₂ ⋯`, evaluated as a left-to-right matrix product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<(Generator, i64)>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// `B1ⁿ·B2ᵐ` with zero exponents omitted.
    pub fn from_exponents(n: i64, m: i64) -> Word {
        let mut w = Vec::new();
        if n != 0 {
            w.push((Generator::B1, n));
        }
        if m != 0 {
            w.push((Generator::B2, m));
        }
        Word(w)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|(_, e)| *e == 0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    /// Total exponents `(n, m)`; the generators commute.
    pub fn exponents(&self) -> (i64, i64) {
        self.0.iter().fold((0, 0), |(n, m), &(g, e)| match g {
            Generator::B1 => (n + e, m),
            Generator::B2 => (n, m + e),
        })
    }

    pub fn matrix(&self, pair: &DirichletPair) -> IntMat3 {
        self.0.iter().fold(IntMat3::identity(), |acc, &(g, e)| {
            acc.mul(&g.matrix(pair).pow(e).expect("generators are unimodular"))
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "E");
        }
        let parts: Vec<String> = self.0.iter().map(|(g, e)| format!("{}^{}", g.name(), e)).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// `word(from) = to` for two boundary edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub from: usize,
    pub to: usize,
    pub word: Word,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Owned {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
    pub faces: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainCandidate {
    pub vertices: Vec<IntVec3>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<Vec<usize>>,
    pub owned: Owned,
    pub gluing: Vec<Gluing>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("{kind} index {index} out of range in {context}")]
    IndexOutOfRange { kind: &'static str, index: usize, context: String },
    #[error("duplicate vertex {0}")]
    DuplicateVertex(usize),
    #[error("edge {0} is degenerate or duplicated")]
    BadEdge(usize),
    #[error("face {0} has fewer than three distinct vertices")]
    ShortFace(usize),
    #[error("face {face} uses the side ({u}, {v}) which is not a listed edge")]
    MissingEdge { face: usize, u: usize, v: usize },
    #[error("face {0} is degenerate (collinear vertices)")]
    Collinear(usize),
    #[error("face {0} is not planar")]
    NonPlanar(usize),
    #[error("face {0} is not a strictly convex polygon in cyclic order")]
    NonConvex(usize),
    #[error("vertex {0} is the origin")]
    OriginVertex(usize),
}

impl DomainCandidate {
    /// Numbers of owned vertices, edges and faces.
    pub fn p_counts(&self) -> (usize, usize, usize) {
        (self.owned.vertices.len(), self.owned.edges.len(), self.owned.faces.len())
    }

    pub fn p_sum(&self) -> usize {
        let (a, b, c) = self.p_counts();
        a + b + c
    }

    pub fn edge_lookup(&self) -> BTreeMap<(usize, usize), usize> {
        self.edges.iter().enumerate().map(|(i, &[u, v])| ((u.min(v), u.max(v)), i)).collect()
    }

    /// Edge indices of face `f` in cycle order (side `i` joins positions `i` and `i+1`).
    pub fn face_edges(&self, f: usize) -> Vec<usize> {
        let lookup = self.edge_lookup();
        let c = &self.faces[f];
        (0..c.len())
            .map(|i| {
                let (u, v) = (c[i], c[(i + 1) % c.len()]);
                lookup[&(u.min(v), u.max(v))]
            })
            .collect()
    }

    /// For every edge, the faces containing it.
    pub fn edge_faces(&self) -> Vec<Vec<usize>> {
        let lookup = self.edge_lookup();
        let mut out = vec![Vec::new(); self.edges.len()];
        for (f, c) in self.faces.iter().enumerate() {
            for i in 0..c.len() {
                let (u, v) = (c[i], c[(i + 1) % c.len()]);
                if let Some(&e) = lookup.get(&(u.min(v), u.max(v))) {
                    out[e].push(f);
                }
            }
        }
        out
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        self.edge_faces().iter().enumerate().filter(|(_, fs)| fs.len() == 1).map(|(e, _)| e).collect()
    }

    pub fn face_points(&self, f: usize) -> Vec<IntVec3> {
        self.faces[f].iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn edge_points(&self, e: usize) -> [IntVec3; 2] {
        let [u, v] = self.edges[e];
        [self.vertices[u].clone(), self.vertices[v].clone()]
    }

    /// Supporting plane of a face oriented along the cycle (right-hand rule).
    pub fn face_plane(&self, f: usize) -> Plane {
        let pts = self.face_points(f);
        face_plane_of(&pts).expect("validated faces are non-degenerate")
    }

    /// Structural validity: indices, duplicates, face edges, planarity and
    /// strict convexity. Failures here mean malformed input, not a refuted
    /// conjecture.
    pub fn validate(&self) -> Result<(), StructureError> {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        let nf = self.faces.len();
        let mut seen = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.is_zero() {
                return Err(StructureError::OriginVertex(i));
            }
            if seen.insert(v.clone(), i).is_some() {
                return Err(StructureError::DuplicateVertex(i));
            }
        }
        let range = |kind: &'static str, index: usize, limit: usize, context: String| {
            if index >= limit {
                Err(StructureError::IndexOutOfRange { kind, index, context })
            } else {
                Ok(())
            }
        };
        let mut edge_set = BTreeSet::new();
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            range("vertex", u, nv, format!("edge {e}"))?;
            range("vertex", v, nv, format!("edge {e}"))?;
            if u == v || !edge_set.insert((u.min(v), u.max(v))) {
                return Err(StructureError::BadEdge(e));
            }
        }
        for (f, c) in self.faces.iter().enumerate() {
            for &i in c {
                range("vertex", i, nv, format!("face {f}"))?;
            }
            let distinct: BTreeSet<usize> = c.iter().copied().collect();
            if c.len() < 3 || distinct.len() != c.len() {
                return Err(StructureError::ShortFace(f));
            }
            for i in 0..c.len() {
                let (u, v) = (c[i], c[(i + 1) % c.len()]);
                if !edge_set.contains(&(u.min(v), u.max(v))) {
                    return Err(StructureError::MissingEdge { face: f, u, v });
                }
            }
            check_convex_polygon(&self.face_points(f)).map_err(|k| match k {
                PolygonDefect::Collinear => StructureError::Collinear(f),
                PolygonDefect::NonPlanar => StructureError::NonPlanar(f),
                PolygonDefect::NonConvex => StructureError::NonConvex(f),
            })?;
        }
        for &v in &self.owned.vertices {
            range("vertex", v, nv, "owned vertices".into())?;
        }
        for &e in &self.owned.edges {
            range("edge", e, ne, "owned edges".into())?;
        }
        for &f in &self.owned.faces {
            range("face", f, nf, "owned faces".into())?;
        }
        for (k, g) in self.gluing.iter().enumerate() {
            range("edge", g.from, ne, format!("gluing {k}"))?;
            range("edge", g.to, ne, format!("gluing {k}"))?;
        }
        Ok(())
    }

    /// Applies a matrix to every vertex (cells, ownership and gluing unchanged).
    pub fn transformed(&self, g: &IntMat3) -> DomainCandidate {
        DomainCandidate { vertices: self.vertices.iter().map(|v| g.apply(v)).collect(), ..self.clone() }
    }
}

pub(crate) enum PolygonDefect {
    Collinear,
    NonPlanar,
    NonConvex,
}

/// Plane through a polygon with normal from the first non-collinear corner.
pub fn face_plane_of(pts: &[IntVec3]) -> Option<Plane> {
    let n = pts.len();
    (0..n).find_map(|i| Plane::through(&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]).ok())
}

pub(crate) fn check_convex_polygon(pts: &[IntVec3]) -> Result<(), PolygonDefect> {
    let n = pts.len();
    let plane = face_plane_of(pts).ok_or(PolygonDefect::Collinear)?;
    if pts.iter().any(|p| !plane.contains(p)) {
        return Err(PolygonDefect::NonPlanar);
    }
    // Every corner turns the same way around the normal.
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        let c = &pts[(i + 2) % n];
        let t = (b - a).cross(&(c - b)).dot(&plane.normal);
        if t.sign() != num_bigint::Sign::Plus {
            return Err(if t.sign() == num_bigint::Sign::NoSign {
                PolygonDefect::Collinear
            } else {
                PolygonDefect::NonConvex
            });
        }
    }
    // Consistent turning alone allows multiply wound stars; compare with the hull order.
    let idx: Vec<usize> = (0..n).collect();
    let hull = planar_hull(pts, &idx, &plane.normal);
    if hull.len() != n {
        return Err(PolygonDefect::NonConvex);
    }
    let start = hull.iter().position(|&i| i == 0).ok_or(PolygonDefect::NonConvex)?;
    if (0..n).any(|k| hull[(start + k) % n] != k) {
        return Err(PolygonDefect::NonConvex);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> IntVec3 {
        IntVec3::new(x, y, z)
    }

    fn triangle() -> DomainCandidate {
        DomainCandidate {
            vertices: vec![v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)],
            edges: vec![[0, 1], [1, 2], [2, 0]],
            faces: vec![vec![0, 1, 2]],
            owned: Owned::default(),
            gluing: vec![],
        }
    }

    #[test]
    fn valid_triangle() {
        assert_eq!(triangle().validate(), Ok(()));
        assert_eq!(triangle().boundary_edges(), vec![0, 1, 2]);
    }

    #[test]
    fn structural_errors() {
        let mut t = triangle();
        t.faces[0] = vec![0, 1, 7];
        assert!(matches!(t.validate(), Err(StructureError::IndexOutOfRange { .. })));
        let mut t = triangle();
        t.vertices[2] = v(2, -1, 0);
        assert_eq!(t.validate(), Err(StructureError::Collinear(0)));
        let mut t = triangle();
        t.edges.pop();
        assert!(matches!(t.validate(), Err(StructureError::MissingEdge { .. })));
    }

    #[test]
    fn star_pentagon_is_rejected() {
        let pts = [v(2, 0, 1), v(1, 2, 1), v(-1, 1, 1), v(-1, -1, 1), v(1, -2, 1)];
        assert!(check_convex_polygon(&pts).is_ok());
        let star: Vec<IntVec3> = [0, 2, 4, 1, 3].iter().map(|&i| pts[i].clone()).collect();
        assert!(check_convex_polygon(&star).is_err());
    }

    #[test]
    fn words() {
        let w = Word(vec![(Generator::B1, 2), (Generator::B2, -1)]);
        assert_eq!(w.inverse(), Word(vec![(Generator::B2, 1), (Generator::B1, -2)]));
        assert_eq!(w.exponents(), (2, -1));
        assert!(Word::from_exponents(0, 0).is_empty());
    }
}
