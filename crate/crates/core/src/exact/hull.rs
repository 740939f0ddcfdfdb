//! Exact incremental 3D convex hull with coplanar faces merged into maximal
//! convex polygons.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::int::IntVec3;
use super::roots::Sign;
use super::ExactError;

/// Supporting plane `normal · x <= offset` with a primitive outward normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane {
    pub normal: IntVec3,
    pub offset: BigInt,
}

impl Plane {
    /// Plane through three non-collinear points, normal along `(b−a)×(c−a)`.
    pub fn through(a: &IntVec3, b: &IntVec3, c: &IntVec3) -> Result<Plane, ExactError> {
        let n = (b - a).cross(&(c - a));
        if n.is_zero() {
            return Err(ExactError::Collinear);
        }
        let n = n.primitive();
        let offset = n.dot(a);
        Ok(Plane { normal: n, offset })
    }

    /// `normal · x − offset`: negative inside, zero on the plane.
    pub fn eval(&self, x: &IntVec3) -> BigInt {
        self.normal.dot(x) - &self.offset
    }

    pub fn contains(&self, x: &IntVec3) -> bool {
        self.eval(x).is_zero()
    }

    pub fn passes_through_origin(&self) -> bool {
        self.offset.is_zero()
    }

    pub fn flipped(&self) -> Plane {
        Plane { normal: -&self.normal, offset: -&self.offset }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeshFace {
    /// Vertex indices, counterclockwise seen from outside.
    pub cycle: Vec<usize>,
    pub plane: Plane,
}

/// Boundary of a convex polytope with integer vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyMesh {
    pub vertices: Vec<IntVec3>,
    pub faces: Vec<MeshFace>,
}

impl PolyMesh {
    pub fn face_points(&self, f: usize) -> Vec<IntVec3> {
        self.faces[f].cycle.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Sorted vertex coordinates of a face; identifies the face setwise.
    pub fn face_key(&self, f: usize) -> Vec<IntVec3> {
        let mut k = self.face_points(f);
        k.sort();
        k
    }

    pub fn vertex_index(&self, v: &IntVec3) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    /// Undirected edges `(min, max)` mapped to the faces containing them.
    pub fn edge_faces(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, face) in self.faces.iter().enumerate() {
            let n = face.cycle.len();
            for i in 0..n {
                let (u, v) = (face.cycle[i], face.cycle[(i + 1) % n]);
                map.entry((u.min(v), u.max(v))).or_default().push(fi);
            }
        }
        map
    }
}

/// Coordinates prepared for fast exact predicates.
enum Coords {
    Small(Vec<[i128; 3]>),
    Big(Vec<IntVec3>),
}

const SMALL_LIMIT: i64 = 1 << 40;

impl Coords {
    fn new(points: &[IntVec3]) -> Coords {
        let small: Option<Vec<[i128; 3]>> = points
            .iter()
            .map(|p| {
                let v = p.to_i64()?;
                v.iter().all(|c| c.abs() < SMALL_LIMIT).then(|| [v[0] as i128, v[1] as i128, v[2] as i128])
            })
            .collect();
        match small {
            Some(s) => Coords::Small(s),
            None => Coords::Big(points.to_vec()),
        }
    }

    /// Sign of `det(b−a, c−a, d−a)`.
    fn orient(&self, a: usize, b: usize, c: usize, d: usize) -> Sign {
        match self {
            Coords::Small(p) => {
                let (a, b, c, d) = (p[a], p[b], p[c], p[d]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
                let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                    + u[2] * (v[0] * w[1] - v[1] * w[0]);
                Sign::from_i8(det.signum() as i8)
            }
            Coords::Big(p) => {
                let u = &p[b] - &p[a];
                let v = &p[c] - &p[a];
                let w = &p[d] - &p[a];
                Sign::of_int(&u.dot(&v.cross(&w)))
            }
        }
    }

    fn cross_is_zero(&self, a: usize, b: usize, c: usize) -> bool {
        match self {
            Coords::Small(p) => {
                let (a, b, c) = (p[a], p[b], p[c]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                u[1] * v[2] == u[2] * v[1] && u[2] * v[0] == u[0] * v[2] && u[0] * v[1] == u[1] * v[0]
            }
            Coords::Big(p) => (&p[b] - &p[a]).cross(&(&p[c] - &p[a])).is_zero(),
        }
    }
}

/// Exact convex hull of a finite point set.
///
/// Faces are maximal convex polygons listed counterclockwise from outside;
/// vertices are sorted lexicographically, each cycle starts at its smallest
/// index, and faces are sorted by cycle, so the result is canonical.
pub fn hull3d(points: &[IntVec3]) -> Result<PolyMesh, ExactError> {
    let mut pts: Vec<IntVec3> = points.to_vec();
    pts.sort();
    pts.dedup();
    let coords = Coords::new(&pts);
    let n = pts.len();
    if n == 0 {
        return Err(ExactError::DegenerateHull { rank: 0 });
    }
    if n == 1 {
        return Err(ExactError::DegenerateHull { rank: 0 });
    }
    let i0 = 0;
    let i1 = 1;
    let Some(i2) = (2..n).find(|&k| !coords.cross_is_zero(i0, i1, k)) else {
        return Err(ExactError::DegenerateHull { rank: 1 });
    };
    let Some(i3) = (2..n).find(|&k| coords.orient(i0, i1, i2, k) != Sign::Zero) else {
        return Err(ExactError::DegenerateHull { rank: 2 });
    };

    // Orient the initial tetrahedron so that interior points see negative orientation.
    let mut faces: Vec<[usize; 3]> = if coords.orient(i0, i1, i2, i3) == Sign::Negative {
        vec![[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
    } else {
        vec![[i0, i2, i1], [i0, i1, i3], [i1, i2, i3], [i2, i0, i3]]
    };

    for p in 0..n {
        if p == i0 || p == i1 || p == i2 || p == i3 {
            continue;
        }
        let visible: Vec<bool> = faces.iter().map(|f| coords.orient(f[0], f[1], f[2], p) == Sign::Positive).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut vis_edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                vis_edges.insert((f[k], f[(k + 1) % 3]));
            }
        }
        let mut next = Vec::with_capacity(faces.len() + 4);
        for (f, &v) in faces.iter().zip(&visible) {
            if !v {
                next.push(*f);
            }
        }
        for &(u, v) in &vis_edges {
            if !vis_edges.contains(&(v, u)) {
                next.push([u, v, p]);
            }
        }
        faces = next;
    }

    // One representative triangle per distinct supporting plane.
    let mut planes: BTreeMap<Plane, [usize; 3]> = BTreeMap::new();
    for f in &faces {
        let plane = Plane::through(&pts[f[0]], &pts[f[1]], &pts[f[2]])?;
        planes.entry(plane).or_insert(*f);
    }

    let mut polygons: Vec<(Plane, Vec<usize>)> = Vec::with_capacity(planes.len());
    for (plane, tri) in planes {
        let on_plane: Vec<usize> = (0..n).filter(|&k| coords.orient(tri[0], tri[1], tri[2], k) == Sign::Zero).collect();
        let cycle = planar_hull(&pts, &on_plane, &plane.normal);
        polygons.push((plane, cycle));
    }

    let used: BTreeSet<usize> = polygons.iter().flat_map(|(_, c)| c.iter().copied()).collect();
    let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let vertices: Vec<IntVec3> = used.iter().map(|&i| pts[i].clone()).collect();
    let mut mesh_faces: Vec<MeshFace> = polygons
        .into_iter()
        .map(|(plane, cycle)| MeshFace { cycle: canonical_cycle(cycle.iter().map(|i| remap[i]).collect()), plane })
        .collect();
    mesh_faces.sort_by(|a, b| a.cycle.cmp(&b.cycle));
    Ok(PolyMesh { vertices, faces: mesh_faces })
}

/// Rotates a cycle so that it starts at its smallest entry.
pub fn canonical_cycle(mut cycle: Vec<usize>) -> Vec<usize> {
    if let Some(pos) = cycle.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i) {
        cycle.rotate_left(pos);
    }
    cycle
}

/// Strict convex hull of coplanar points, counterclockwise seen from the
/// side `normal` points to. Returns indices into `pts`.
pub fn planar_hull(pts: &[IntVec3], idx: &[usize], normal: &IntVec3) -> Vec<usize> {
    let k = (0..3).max_by_key(|&i| normal.0[i].abs()).unwrap_or(2);
    let (a, b) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    // Projection onto coordinates (a, b) preserves counterclockwise order iff
    // the dropped axis component has sign matching the orientation of (a, b, k).
    let parity_positive = k != 1;
    let flip = normal.0[k].is_negative() == parity_positive;

    let mut proj: Vec<(BigInt, BigInt, usize)> =
        idx.iter().map(|&i| (pts[i].0[a].clone(), pts[i].0[b].clone(), i)).collect();
    proj.sort();
    proj.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
    if proj.len() < 3 {
        return proj.into_iter().map(|p| p.2).collect();
    }
    let turn = |o: &(BigInt, BigInt, usize), p: &(BigInt, BigInt, usize), q: &(BigInt, BigInt, usize)| {
        (&p.0 - &o.0) * (&q.1 - &o.1) - (&p.1 - &o.1) * (&q.0 - &o.0)
    };
    let mut lower: Vec<(BigInt, BigInt, usize)> = Vec::new();
    for p in &proj {
        while lower.len() >= 2 && !turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(BigInt, BigInt, usize)> = Vec::new();
    for p in proj.iter().rev() {
        while upper.len() >= 2 && !turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    let mut cycle: Vec<usize> = lower.into_iter().chain(upper).map(|p| p.2).collect();
    if flip {
        cycle.reverse();
    }
    cycle
}

/// Coordinates of a point converted to `f64` for display and seeding only.
pub fn to_f64_point(p: &IntVec3) -> [f64; 3] {
    [p.0[0].to_f64().unwrap_or(f64::NAN), p.0[1].to_f64().unwrap_or(f64::NAN), p.0[2].to_f64().unwrap_or(f64::NAN)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> IntVec3 {
        IntVec3::new(x, y, z)
    }

    fn check_mesh(mesh: &PolyMesh, input: &[IntVec3]) {
        for face in &mesh.faces {
            for p in input {
                assert!(!face.plane.eval(p).is_positive());
            }
            let pts: Vec<&IntVec3> = face.cycle.iter().map(|&i| &mesh.vertices[i]).collect();
            let n = (pts[1] - pts[0]).cross(&(pts[2] - pts[0]));
            assert!(n.dot(&face.plane.normal).is_positive(), "cycle orientation");
        }
    }

    #[test]
    fn tetrahedron() {
        let pts = vec![v(0, 0, 0), v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)];
        let mesh = hull3d(&pts).unwrap();
        assert_eq!(mesh.faces.len(), 4);
        assert_eq!(mesh.vertices.len(), 4);
        check_mesh(&mesh, &pts);
    }

    #[test]
    fn cube_faces_merge_into_squares() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(v(x, y, z));
                }
            }
        }
        pts.push(v(0, 0, 0));
        pts.push(v(1, 1, 1));
        let mesh = hull3d(&pts).unwrap();
        assert_eq!(mesh.faces.len(), 6);
        assert!(mesh.faces.iter().all(|f| f.cycle.len() == 4));
        check_mesh(&mesh, &pts);
    }

    #[test]
    fn edge_midpoints_are_not_vertices() {
        let pts = vec![v(0, 0, 0), v(2, 0, 0), v(0, 2, 0), v(0, 0, 2), v(1, 0, 0), v(1, 1, 0)];
        let mesh = hull3d(&pts).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        check_mesh(&mesh, &pts);
    }

    #[test]
    fn degenerate_inputs_report_rank() {
        assert_eq!(hull3d(&[v(1, 1, 1)]), Err(ExactError::DegenerateHull { rank: 0 }));
        assert_eq!(hull3d(&[v(0, 0, 0), v(1, 1, 1), v(2, 2, 2)]), Err(ExactError::DegenerateHull { rank: 1 }));
        assert_eq!(
            hull3d(&[v(0, 0, 0), v(1, 0, 0), v(0, 1, 0), v(1, 1, 0)]),
            Err(ExactError::DegenerateHull { rank: 2 })
        );
    }

    #[test]
    fn large_coordinates_use_exact_fallback() {
        let big = BigInt::from(1u64 << 62);
        let pts = vec![
            IntVec3([BigInt::zero(), BigInt::zero(), BigInt::zero()]),
            IntVec3([big.clone(), BigInt::zero(), BigInt::zero()]),
            IntVec3([BigInt::zero(), big.clone(), BigInt::zero()]),
            IntVec3([BigInt::zero(), BigInt::zero(), big.clone()]),
            IntVec3([BigInt::from(1), BigInt::from(1), BigInt::from(1)]),
        ];
        let mesh = hull3d(&pts).unwrap();
        assert_eq!(mesh.faces.len(), 4);
        check_mesh(&mesh, &pts);
    }
}
