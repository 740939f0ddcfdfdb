//! Integer distances and areas, integer-linear equivalence of triangles, the
//! classification of empty pyramids over faces at distance at least two, and
//! the brute-force pyramid enumeration used to cross-check it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::candidate::face_plane_of;
use crate::exact::{det_columns, lattice_points, Halfspace, IntMat3, IntVec3, LatticeBox};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistanceError {
    #[error("the three points are collinear")]
    Collinear,
    #[error("the plane passes through the origin")]
    ThroughOrigin,
}

/// Integer distance from the origin to the plane through three points.
pub fn integer_distance(v1: &IntVec3, v2: &IntVec3, v3: &IntVec3) -> Result<BigInt, DistanceError> {
    let n = (v2 - v1).cross(&(v3 - v1));
    let content = n.content().map_err(|_| DistanceError::Collinear)?;
    let det = det_columns(v1, v2, v3);
    if det.is_zero() {
        return Err(DistanceError::ThroughOrigin);
    }
    let (q, r) = det.abs().div_rem(&content);
    assert!(r.is_zero(), "integer distance must be integral");
    Ok(q)
}

/// Number of lattice steps along a segment.
pub fn integer_length(a: &IntVec3, b: &IntVec3) -> BigInt {
    (b - a).content().unwrap_or_default()
}

/// Twice the area in units of the fundamental lattice triangle, i.e. the
/// index of the lattice spanned by two sides.
pub fn integer_area(v1: &IntVec3, v2: &IntVec3, v3: &IntVec3) -> BigInt {
    (v2 - v1).cross(&(v3 - v1)).content().unwrap_or_default()
}

/// The unimodular integer matrix `M` with `M·t1[i] = t2[i]`, if any.
pub fn face_equivalence(t1: &[IntVec3; 3], t2: &[IntVec3; 3]) -> Option<IntMat3> {
    let m1 = IntMat3::from_columns(&t1[0], &t1[1], &t1[2]);
    let m2 = IntMat3::from_columns(&t2[0], &t2[1], &t2[2]);
    let d = m1.det();
    if d.is_zero() {
        return None;
    }
    let num = m2.mul(&m1.adjugate());
    let mut entries = Vec::with_capacity(9);
    for e in num.entries() {
        let (q, r) = e.div_rem(&d);
        if !r.is_zero() {
            return None;
        }
        entries.push(q);
    }
    let m = IntMat3::from_flat(&entries);
    m.det().abs().is_one().then_some(m)
}

/// A representative triangle of the classification.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FaceFamily {
    /// `(ξ, r−1, −r), (a+ξ, r−1, −r), (ξ, r, −r)`.
    One { xi: BigInt, r: BigInt, a: BigInt },
    /// `(2, 1, b−1), (2, 2, −1), (2, 0, −1)`.
    Two { b: BigInt },
    /// One of the two exceptional triangles (index 0 or 1).
    Three(u8),
}

impl FaceFamily {
    pub fn triangle(&self) -> [IntVec3; 3] {
        let v = |x: BigInt, y: BigInt, z: BigInt| IntVec3([x, y, z]);
        let i = |k: i64| BigInt::from(k);
        match self {
            FaceFamily::One { xi, r, a } => {
                [v(xi.clone(), r - 1, -r), v(a + xi, r - 1, -r), v(xi.clone(), r.clone(), -r)]
            }
            FaceFamily::Two { b } => [v(i(2), i(1), b - 1), v(i(2), i(2), i(-1)), v(i(2), i(0), i(-1))],
            FaceFamily::Three(0) => [IntVec3::new(2, -2, 1), IntVec3::new(2, -1, -1), IntVec3::new(2, 1, 2)],
            FaceFamily::Three(_) => [IntVec3::new(3, 0, 2), IntVec3::new(3, 1, 1), IntVec3::new(3, 2, 3)],
        }
    }

    /// Whether the parameters satisfy the family constraints.
    pub fn is_valid(&self) -> bool {
        match self {
            FaceFamily::One { xi, r, a } => {
                *a >= BigInt::one() && *r >= BigInt::from(2) && xi.is_positive() && xi * 2 <= *r && xi.gcd(r).is_one()
            }
            FaceFamily::Two { b } => *b >= BigInt::from(2),
            FaceFamily::Three(k) => *k < 2,
        }
    }
}

impl std::fmt::Display for FaceFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaceFamily::One { xi, r, a } => write!(f, "family 1 (xi={xi}, r={r}, a={a})"),
            FaceFamily::Two { b } => write!(f, "family 2 (b={b})"),
            FaceFamily::Three(k) => write!(f, "family 3 (triangle {})", k + 1),
        }
    }
}

/// The classification of faces at integer distance `r >= 2` with no integer
/// points strictly between the face and the origin.
#[derive(Clone, Copy, Debug, Default)]
pub struct FaceClassTable;

impl FaceClassTable {
    /// Representatives with integer distance `r` and integer area `area`.
    /// Both quantities are invariant, which pins the parameters down.
    pub fn instances(&self, r: &BigInt, area: &BigInt) -> Vec<FaceFamily> {
        let mut out = Vec::new();
        if *r < BigInt::from(2) {
            return out;
        }
        if let Some(rr) = r.to_u64() {
            for xi in 1..=rr / 2 {
                let xi = BigInt::from(xi);
                let fam = FaceFamily::One { xi, r: r.clone(), a: area.clone() };
                if fam.is_valid() {
                    out.push(fam);
                }
            }
        }
        if *r == BigInt::from(2) && area.is_even() {
            let fam = FaceFamily::Two { b: area / 2 };
            if fam.is_valid() {
                out.push(fam);
            }
        }
        for k in 0..2 {
            let fam = FaceFamily::Three(k);
            let t = fam.triangle();
            if integer_distance(&t[0], &t[1], &t[2]).as_ref() == Ok(r) && integer_area(&t[0], &t[1], &t[2]) == *area {
                out.push(fam);
            }
        }
        out
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Matches a face at integer distance `r >= 2` against the classification;
/// returns the family instance and a matrix taking it onto the face.
pub fn classify_face(face: &[IntVec3], r: &BigInt, table: &FaceClassTable) -> Option<(FaceFamily, IntMat3)> {
    let [p, q, s] = face else {
        return None;
    };
    let area = integer_area(p, q, s);
    for fam in table.instances(r, &area) {
        let t = fam.triangle();
        for perm in PERMUTATIONS {
            let target = [face[perm[0]].clone(), face[perm[1]].clone(), face[perm[2]].clone()];
            if let Some(m) = face_equivalence(&t, &target) {
                return Some((fam, m));
            }
        }
    }
    None
}

/// Integer points of the closed pyramid with apex `O` over the face, other
/// than `O` and the points of the base.
pub fn pyramid_points(face: &[IntVec3]) -> Vec<IntVec3> {
    let Some(mut base) = face_plane_of(face) else {
        return Vec::new();
    };
    if base.offset.is_zero() {
        return Vec::new();
    }
    if base.offset.is_negative() {
        base = base.flipped();
    }
    let n = face.len();
    let mut halfspaces = vec![Halfspace::new(base.normal.clone(), &base.offset - 1)];
    for i in 0..n {
        let (u, v) = (&face[i], &face[(i + 1) % n]);
        let m = u.cross(v);
        let other = (0..n).map(|k| m.dot(&face[k])).find(|d| !d.is_zero()).unwrap_or_default();
        // Keep the side containing the rest of the face.
        let normal = if other.is_positive() { -&m } else { m };
        halfspaces.push(Halfspace::new(normal, 0));
    }
    let mut corners = face.to_vec();
    corners.push(IntVec3::zero());
    let Some(bx) = LatticeBox::bounding(&corners) else {
        return Vec::new();
    };
    lattice_points(&halfspaces, &bx).into_iter().filter(|p| !p.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> IntVec3 {
        IntVec3::new(x, y, z)
    }

    #[test]
    fn distances() {
        assert_eq!(integer_distance(&v(1, 0, 0), &v(0, 1, 0), &v(0, 0, 1)), Ok(BigInt::from(1)));
        assert_eq!(integer_distance(&v(1, 0, 2), &v(0, 0, 1), &v(1, 1, 1)), Ok(BigInt::from(1)));
        assert_eq!(integer_distance(&v(0, 0, 1), &v(1, 1, 1), &v(-1, 1, 0)), Ok(BigInt::from(2)));
        assert_eq!(integer_distance(&v(1, 0, 0), &v(2, 0, 0), &v(3, 0, 0)), Err(DistanceError::Collinear));
        assert_eq!(integer_distance(&v(1, 0, 0), &v(0, 1, 0), &v(-1, -1, 0)), Err(DistanceError::ThroughOrigin));
    }

    #[test]
    fn equivalence_with_known_transition() {
        let bdc = [v(0, 0, 1), v(1, 1, 1), v(-1, 1, 0)];
        let fam = [v(1, 1, -2), v(2, 1, -2), v(1, 2, -2)];
        assert_eq!(face_equivalence(&bdc, &bdc), Some(IntMat3::identity()));
        let m = face_equivalence(&fam, &bdc).unwrap();
        assert_eq!(m, IntMat3::from_i64([[1, -1, 0], [1, 1, 1], [0, -1, -1]]));
        assert_eq!(face_equivalence(&bdc, &fam), m.inverse());
        let big = [v(0, 0, 1), v(2, 2, 1), v(-2, 2, -1)];
        assert_eq!(face_equivalence(&bdc, &big), None);
    }

    #[test]
    fn classification_of_bdc() {
        let bdc = [v(0, 0, 1), v(1, 1, 1), v(-1, 1, 0)];
        let (fam, _) = classify_face(&bdc, &BigInt::from(2), &FaceClassTable).unwrap();
        assert_eq!(fam, FaceFamily::One { xi: 1.into(), r: 2.into(), a: 1.into() });
        assert!(pyramid_points(&bdc).is_empty());
        let square = [v(1, 0, 2), v(1, 1, 2), v(0, 1, 2), v(0, 0, 2)];
        assert_eq!(classify_face(&square, &BigInt::from(2), &FaceClassTable), None);
        assert!(!pyramid_points(&square).is_empty());
    }

    #[test]
    fn family_three_matches_itself() {
        for k in 0..2 {
            let t = FaceFamily::Three(k).triangle();
            let r = integer_distance(&t[0], &t[1], &t[2]).unwrap();
            let (fam, _) = classify_face(&t, &r, &FaceClassTable).unwrap();
            assert_eq!(fam, FaceFamily::Three(k));
            assert!(pyramid_points(&t).is_empty());
        }
    }

    #[test]
    fn doubled_vertex_gives_interior_point() {
        let bdc2 = [v(0, 0, 1), v(2, 2, 2), v(-1, 1, 0)];
        let r = integer_distance(&bdc2[0], &bdc2[1], &bdc2[2]).unwrap();
        assert_eq!(r, BigInt::from(4));
        assert!(classify_face(&bdc2, &r, &FaceClassTable).is_none());
        assert!(pyramid_points(&bdc2).contains(&v(1, 1, 1)));
    }
}
