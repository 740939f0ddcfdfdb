//! Finding a sail vertex by slicing the orthant with planes `⟨w, x⟩ = k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use super::eigen::OrthantRef;
use crate::exact::{planar_hull, IntVec3, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VertexError {
    #[error("the start point is not inside the orthant")]
    OutsideOrthant,
    #[error("no slicing normal positive on all three eigen-rays was found")]
    NoNormal,
}

/// A face (or edge, or vertex) of the sail cut out by its supporting plane
/// `⟨w, x⟩ = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SailFace {
    pub w: IntVec3,
    pub k: BigInt,
    /// All orthant integer points on the plane, sorted.
    pub points: Vec<IntVec3>,
    /// Vertices of their convex hull, counterclockwise seen from outside.
    pub vertices: Vec<IntVec3>,
}

/// Largest coordinate bound of the normal search.
const NORMAL_SEARCH_RADIUS: i64 = 24;

/// Does `w` pair positively with all three eigen-rays of the closed orthant?
fn positive_on_rays(r: &OrthantRef, eps: &[Sign; 3], w: &IntVec3) -> bool {
    (0..3).all(|i| r.eigen.ray_sign(i, w).times(eps[i]) == Sign::Positive)
}

/// Integer vectors ordered by sup-norm, then lexicographically.
fn small_vectors(radius: i64) -> impl Iterator<Item = IntVec3> {
    (1..=radius).flat_map(|n| {
        (-n..=n).flat_map(move |x| {
            (-n..=n).flat_map(move |y| {
                (-n..=n).filter(move |z| x.abs().max(y.abs()).max(z.abs()) == n).map(move |z| IntVec3::new(x, y, z))
            })
        })
    })
}

/// An integer normal positive on the closed orthant minus the origin.
pub fn slicing_normal(r: &OrthantRef) -> Result<IntVec3, VertexError> {
    let eps = r.ray_orientation();
    // Cheap float prefilter followed by the exact test.
    let rays: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let v = r.eigen.right_f64(i);
            let s = f64::from(eps[i].to_i8());
            [s * v[0], s * v[1], s * v[2]]
        })
        .collect();
    for w in small_vectors(NORMAL_SEARCH_RADIUS) {
        let wf = w.to_f64();
        let plausible = rays.iter().all(|ray| ray.iter().zip(&wf).map(|(a, b)| a * b).sum::<f64>() > -1e-9);
        if plausible && positive_on_rays(r, &eps, &w) {
            return Ok(w);
        }
    }
    // Fall back to the sum of the orthant's left eigenforms, scaled up until it rounds correctly.
    let mut seed = [0.0f64; 3];
    for i in 0..3 {
        let l = r.eigen.left_f64(i);
        let norm = l.iter().map(|c| c * c).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let s = f64::from(r.sign_vector[i].to_i8());
        for k in 0..3 {
            seed[k] += s * l[k] / norm;
        }
    }
    let mut scale = 1.0;
    while scale < 1e15 {
        let w = IntVec3(seed.map(|c| BigInt::from((c * scale).round() as i64)));
        if !w.is_zero() && positive_on_rays(r, &eps, &w) {
            return Ok(w.primitive());
        }
        scale *= 2.0;
    }
    Err(VertexError::NoNormal)
}

/// `x0` with `⟨w, x0⟩ = 1` for primitive `w`.
fn unit_preimage(w: &IntVec3) -> IntVec3 {
    let [a, b, c] = &w.0;
    let g1 = a.extended_gcd(b);
    let g2 = g1.gcd.extended_gcd(c);
    let x0 = IntVec3([&g2.x * &g1.x, &g2.x * &g1.y, g2.y.clone()]);
    let s = w.dot(&x0);
    if s.is_negative() {
        -&x0
    } else {
        x0
    }
}

/// Integer basis of the lattice `w^⊥`.
fn orthogonal_basis(w: &IntVec3) -> [IntVec3; 2] {
    let rows = vec![w.0.to_vec()];
    let k = crate::exact::integer_kernel(&rows, 3);
    [
        IntVec3([k[0][0].clone(), k[0][1].clone(), k[0][2].clone()]),
        IntVec3([k[1][0].clone(), k[1][1].clone(), k[1][2].clone()]),
    ]
}

/// Orthant integer points on the plane `⟨w, x⟩ = k`.
fn slice_points(r: &OrthantRef, eps: &[Sign; 3], w: &IntVec3, k: &BigInt, frame: &SliceFrame) -> Vec<IntVec3> {
    let kf = k.to_f64().unwrap_or(f64::INFINITY);
    let wf = w.to_f64();
    // Corners of the triangle cut from the orthant cone.
    let corners: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let v = r.eigen.right_f64(i);
            let s = f64::from(eps[i].to_i8());
            let ray = [s * v[0], s * v[1], s * v[2]];
            let d: f64 = ray.iter().zip(&wf).map(|(a, b)| a * b).sum();
            ray.map(|c| c * kf / d)
        })
        .collect();
    let base = frame.x0.scale(k);
    let basef = base.to_f64();
    let (mut smin, mut smax, mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in &corners {
        let rel = [c[0] - basef[0], c[1] - basef[1], c[2] - basef[2]];
        let (s, t) = frame.solve(rel);
        smin = smin.min(s);
        smax = smax.max(s);
        tmin = tmin.min(t);
        tmax = tmax.max(t);
    }
    let margin = 2.0 + 1e-6 * (smax - smin).abs().max((tmax - tmin).abs());
    let (s0, s1) = ((smin - margin).floor() as i64, (smax + margin).ceil() as i64);
    let (t0, t1) = ((tmin - margin).floor() as i64, (tmax + margin).ceil() as i64);
    let mut out = Vec::new();
    for s in s0..=s1 {
        let ps = &base + &frame.u[0].scale(&BigInt::from(s));
        for t in t0..=t1 {
            let p = &ps + &frame.u[1].scale(&BigInt::from(t));
            if r.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

struct SliceFrame {
    x0: IntVec3,
    u: [IntVec3; 2],
    gram_inv: [[f64; 2]; 2],
    uf: [[f64; 3]; 2],
}

impl SliceFrame {
    fn new(w: &IntVec3) -> SliceFrame {
        let u = orthogonal_basis(w);
        let uf = [u[0].to_f64(), u[1].to_f64()];
        let dot = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let g = [[dot(&uf[0], &uf[0]), dot(&uf[0], &uf[1])], [dot(&uf[1], &uf[0]), dot(&uf[1], &uf[1])]];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let gram_inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        SliceFrame { x0: unit_preimage(w), u, gram_inv, uf }
    }

    /// Least-squares coordinates of `rel` in the basis `u`.
    fn solve(&self, rel: [f64; 3]) -> (f64, f64) {
        let dot = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let b = [dot(&self.uf[0], &rel), dot(&self.uf[1], &rel)];
        (
            self.gram_inv[0][0] * b[0] + self.gram_inv[0][1] * b[1],
            self.gram_inv[1][0] * b[0] + self.gram_inv[1][1] * b[1],
        )
    }
}

/// The first nonempty orthant slice below `p`: a face of the sail.
pub fn find_sail_face(r: &OrthantRef, p: &IntVec3) -> Result<SailFace, VertexError> {
    if !r.contains(p) {
        return Err(VertexError::OutsideOrthant);
    }
    let w = slicing_normal(r)?.primitive();
    let eps = r.ray_orientation();
    let frame = SliceFrame::new(&w);
    let top = w.dot(p);
    let mut k = BigInt::one();
    while k <= top {
        let points = slice_points(r, &eps, &w, &k, &frame);
        if !points.is_empty() {
            let idx: Vec<usize> = (0..points.len()).collect();
            // Outside of the sail is the origin side, i.e. direction −w.
            let vertices = planar_hull(&points, &idx, &-&w).into_iter().map(|i| points[i].clone()).collect();
            return Ok(SailFace { w, k, points, vertices });
        }
        k += 1;
    }
    unreachable!("p itself lies on the slice ⟨w, x⟩ = ⟨w, p⟩")
}

/// The lexicographically smallest vertex of [`find_sail_face`].
pub fn find_sail_vertex(r: &OrthantRef, p: &IntVec3) -> Result<IntVec3, VertexError> {
    let face = find_sail_face(r, p)?;
    Ok(face.vertices.iter().min().cloned().expect("nonempty slice"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntMat3;
    use crate::sail::EigenData;

    #[test]
    fn sylvester_vertex_and_face() {
        let a = IntMat3::from_i64([[0, 1, 0], [0, 0, 1], [1, 1, -2]]);
        let e = EigenData::new(&a).unwrap();
        let r = OrthantRef::of_point(&e, &IntVec3::new(0, 0, 1)).unwrap();
        let p = crate::sail::find_orthant_point_from_scale(&r, 16.0);
        let face = find_sail_face(&r, &p).unwrap();
        assert!(face.vertices.contains(&IntVec3::new(0, 0, 1)));
        // supporting plane −x + y + z = 1
        assert_eq!(face.w, IntVec3::new(-1, 1, 1));
        assert_eq!(face.k, BigInt::one());
        let v = find_sail_vertex(&r, &p).unwrap();
        assert!(face.vertices.contains(&v));
        assert!(face.points.iter().all(|q| face.w.dot(q) == face.k));
    }
}
