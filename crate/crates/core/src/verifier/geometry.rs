//! Exact intersection of two closed convex polygons in space.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::candidate::face_plane_of;
use crate::exact::IntVec3;

type Rat = BigRational;
pub type RatPoint = [Rat; 3];

/// The set `P ∩ Q` of two closed convex polygons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contact {
    Empty,
    Point(RatPoint),
    Segment(RatPoint, RatPoint),
    /// A two-dimensional overlap.
    Area,
}

fn lift(p: &IntVec3) -> RatPoint {
    p.0.clone().map(Rat::from_integer)
}

fn dot_r(n: &IntVec3, x: &RatPoint) -> Rat {
    (0..3).map(|k| Rat::from_integer(n.0[k].clone()) * &x[k]).sum()
}

/// `a + s·(b − a)`.
fn lerp(a: &RatPoint, b: &RatPoint, s: &Rat) -> RatPoint {
    std::array::from_fn(|k| &a[k] + s * (&b[k] - &a[k]))
}

/// Points of polygon `p` on the plane `n·x = c`: a convex subset of a line.
fn section(p: &[IntVec3], n: &IntVec3, c: &BigInt) -> Vec<RatPoint> {
    let vals: Vec<BigInt> = p.iter().map(|v| n.dot(v) - c).collect();
    let mut out = Vec::new();
    for i in 0..p.len() {
        let j = (i + 1) % p.len();
        if vals[i].is_zero() {
            out.push(lift(&p[i]));
        }
        if vals[i].is_positive() && vals[j].is_negative() || vals[i].is_negative() && vals[j].is_positive() {
            let s = Rat::new(vals[i].clone(), &vals[i] - &vals[j]);
            out.push(lerp(&lift(&p[i]), &lift(&p[j]), &s));
        }
    }
    out
}

fn extremes(pts: Vec<RatPoint>, dir: &IntVec3) -> Option<((Rat, RatPoint), (Rat, RatPoint))> {
    let mut keyed: Vec<(Rat, RatPoint)> = pts.into_iter().map(|x| (dot_r(dir, &x), x)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let lo = keyed.first()?.clone();
    let hi = keyed.last()?.clone();
    Some((lo, hi))
}

/// Exact intersection of two non-degenerate convex polygons.
pub fn polygon_contact(p: &[IntVec3], q: &[IntVec3]) -> Contact {
    let pp = face_plane_of(p).expect("non-degenerate polygon");
    let pq = face_plane_of(q).expect("non-degenerate polygon");
    let dir = pp.normal.cross(&pq.normal);
    if dir.is_zero() {
        return if q.iter().all(|v| pp.contains(v)) { coplanar_contact(p, q, &pp.normal) } else { Contact::Empty };
    }
    let Some(((lp, xp), (hp, yp))) = extremes(section(p, &pq.normal, &pq.offset), &dir) else {
        return Contact::Empty;
    };
    let Some(((lq, xq), (hq, yq))) = extremes(section(q, &pp.normal, &pp.offset), &dir) else {
        return Contact::Empty;
    };
    let (lo, lo_pt) = if lp >= lq { (lp, xp) } else { (lq, xq) };
    let (hi, hi_pt) = if hp <= hq { (hp, yp) } else { (hq, yq) };
    match lo.cmp(&hi) {
        std::cmp::Ordering::Greater => Contact::Empty,
        std::cmp::Ordering::Equal => Contact::Point(lo_pt),
        std::cmp::Ordering::Less => Contact::Segment(lo_pt, hi_pt),
    }
}

/// Index pair of the coordinates kept when projecting along `n`.
fn projection_axes(n: &IntVec3) -> (usize, usize) {
    let k = (0..3).max_by_key(|&k| n.0[k].abs()).expect("three axes");
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn orient2(a: &RatPoint, b: &RatPoint, c: &RatPoint, (i, j): (usize, usize)) -> Rat {
    (&b[i] - &a[i]) * (&c[j] - &a[j]) - (&b[j] - &a[j]) * (&c[i] - &a[i])
}

fn coplanar_contact(p: &[IntVec3], q: &[IntVec3], n: &IntVec3) -> Contact {
    let axes = projection_axes(n);
    let qr: Vec<RatPoint> = q.iter().map(lift).collect();
    let mut poly: Vec<RatPoint> = p.iter().map(lift).collect();
    // Orientation of q in the projection.
    let area: Rat = (0..qr.len()).map(|i| orient2(&qr[0], &qr[i], &qr[(i + 1) % qr.len()], axes)).sum();
    let flip = area.is_negative();
    for i in 0..qr.len() {
        let (a, b) = (&qr[i], &qr[(i + 1) % qr.len()]);
        let side = |x: &RatPoint| {
            let s = orient2(a, b, x, axes);
            if flip {
                -s
            } else {
                s
            }
        };
        let mut next = Vec::new();
        for k in 0..poly.len() {
            let (u, v) = (&poly[k], &poly[(k + 1) % poly.len()]);
            let (su, sv) = (side(u), side(v));
            if !su.is_negative() {
                next.push(u.clone());
            }
            if su.is_positive() && sv.is_negative() || su.is_negative() && sv.is_positive() {
                let s = &su / (&su - &sv);
                next.push(lerp(u, v, &s));
            }
        }
        poly = next;
        if poly.is_empty() {
            return Contact::Empty;
        }
    }
    poly.sort();
    poly.dedup();
    match poly.len() {
        0 => Contact::Empty,
        1 => Contact::Point(poly.pop().expect("one point")),
        _ => {
            let (a, b) = (&poly[0], &poly[1]);
            if poly.iter().all(|c| orient2(a, b, c, axes).is_zero()) {
                // Collinear: the lexicographic extremes are the segment ends.
                Contact::Segment(poly[0].clone(), poly[poly.len() - 1].clone())
            } else {
                Contact::Area
            }
        }
    }
}

/// Checks that two faces meet in nothing, in exactly their one common
/// vertex, or in exactly their common side.
pub fn proper_contact(p: &[IntVec3], q: &[IntVec3]) -> Result<(), String> {
    let shared: Vec<&IntVec3> = p.iter().filter(|v| q.contains(v)).collect();
    let contact = polygon_contact(p, q);
    let adjacent = |poly: &[IntVec3], a: &IntVec3, b: &IntVec3| {
        let n = poly.len();
        (0..n).any(|i| {
            let (u, v) = (&poly[i], &poly[(i + 1) % n]);
            (u == a && v == b) || (u == b && v == a)
        })
    };
    let ok = match (shared.as_slice(), &contact) {
        ([], Contact::Empty) => true,
        ([s], Contact::Point(x)) => lift(s) == *x,
        ([s, t], Contact::Segment(x, y)) => {
            adjacent(p, s, t) && adjacent(q, s, t) && {
                let (s, t) = (lift(s), lift(t));
                (s == *x && t == *y) || (s == *y && t == *x)
            }
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{} shared vertices but intersection is {}", shared.len(), describe(&contact)))
    }
}

fn describe(c: &Contact) -> String {
    let pt = |p: &RatPoint| format!("({}, {}, {})", p[0], p[1], p[2]);
    match c {
        Contact::Empty => "empty".into(),
        Contact::Point(p) => format!("the point {}", pt(p)),
        Contact::Segment(a, b) => format!("the segment {} - {}", pt(a), pt(b)),
        Contact::Area => "two-dimensional".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> IntVec3 {
        IntVec3::new(x, y, z)
    }

    #[test]
    fn sylvester_faces_share_an_edge() {
        let abd = [v(1, 0, 2), v(0, 0, 1), v(1, 1, 1)];
        let bdc = [v(0, 0, 1), v(1, 1, 1), v(-1, 1, 0)];
        assert!(matches!(polygon_contact(&abd, &bdc), Contact::Segment(..)));
        assert_eq!(proper_contact(&abd, &bdc), Ok(()));
    }

    #[test]
    fn crossing_triangles_are_detected() {
        let t1 = [v(0, 0, 0), v(4, 0, 0), v(0, 4, 0)];
        let t2 = [v(1, 1, -1), v(1, 1, 1), v(5, 5, 1)];
        assert!(matches!(polygon_contact(&t1, &t2), Contact::Segment(..)));
        assert!(proper_contact(&t1, &t2).is_err());
    }

    #[test]
    fn coplanar_overlap_and_touch() {
        let t1 = [v(0, 0, 1), v(4, 0, 1), v(0, 4, 1)];
        let t2 = [v(1, 1, 1), v(5, 1, 1), v(1, 5, 1)];
        assert_eq!(polygon_contact(&t1, &t2), Contact::Area);
        let t3 = [v(4, 0, 1), v(8, 0, 1), v(4, 4, 1)];
        assert_eq!(polygon_contact(&t1, &t3), Contact::Point(lift(&v(4, 0, 1))));
        assert_eq!(proper_contact(&t1, &t3), Ok(()));
        let t4 = [v(4, 0, 1), v(0, 4, 1), v(4, 4, 1)];
        assert_eq!(proper_contact(&t1, &t4), Ok(()));
        let far = [v(10, 10, 1), v(11, 10, 1), v(10, 11, 1)];
        assert_eq!(polygon_contact(&t1, &far), Contact::Empty);
    }

    #[test]
    fn parallel_planes_do_not_meet() {
        let t1 = [v(0, 0, 1), v(4, 0, 1), v(0, 4, 1)];
        let t2 = [v(0, 0, 2), v(4, 0, 2), v(0, 4, 2)];
        assert_eq!(polygon_contact(&t1, &t2), Contact::Empty);
    }
}
