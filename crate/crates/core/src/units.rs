//! Positive units of the commutant: exact membership test, bounded search
//! over `p₀E + p₁A + p₂A²`, certified logarithm vectors and selection of an
//! independent pair.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::commutant::operator_norm;
use crate::exact::{det_square, isolate_real_roots, ln_interval, sign_at, IntMat3, IntPoly, RatInterval, Sign};
use crate::operator::OperatorError;
use crate::sail::EigenData;

type Rat = BigRational;

/// Depth of the bounded relation scan `B1ⁿ·B2ᵐ = E`.
pub const RELATION_DEPTH: i64 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnitsError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("{name} is not a positive unit commuting with the operator: {reason}")]
    NotPositiveUnit { name: String, reason: String },
    #[error("generators satisfy the relation B1^{n} B2^{m} = E")]
    Relation { n: i64, m: i64 },
    #[error("independence of the generators could not be certified at the finest interval width")]
    Indeterminate,
    #[error("no independent pair found; raise the coefficient bound or supply generators")]
    NoIndependentPair,
    #[error("matrix is not a polynomial in the operator")]
    NotInOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Searched,
    UserSupplied,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletPair {
    pub b1: IntMat3,
    pub b2: IntMat3,
    pub provenance: Provenance,
    pub search_bound: u64,
}

impl DirichletPair {
    /// `B1ⁿ·B2ᵐ`.
    pub fn word(&self, n: i64, m: i64) -> IntMat3 {
        let p = self.b1.pow(n).expect("unimodular");
        p.mul(&self.b2.pow(m).expect("unimodular"))
    }
}

/// Why `B` fails to be a positive unit, if it does.
pub fn positive_unit_defect(b: &IntMat3, a: &IntMat3) -> Option<String> {
    if !b.det().is_one() {
        return Some(format!("determinant is {}", b.det()));
    }
    if !b.commutes_with(a) {
        return Some("does not commute with the operator".into());
    }
    for (factor, _) in b.char_poly().squarefree_decomposition() {
        let deg = factor.degree().unwrap_or(0);
        let roots = isolate_real_roots(&factor);
        if roots.len() != deg {
            return Some(format!("characteristic factor {factor} has non-real roots"));
        }
        if roots.iter().any(|r| sign_at(&IntPoly::x(), r) != Sign::Positive) {
            return Some(format!("characteristic factor {factor} has a non-positive root"));
        }
    }
    None
}

/// `det B = 1`, `BA = AB`, and all eigenvalues of `B` real and positive.
pub fn is_positive_unit(b: &IntMat3, a: &IntMat3) -> bool {
    positive_unit_defect(b, a).is_none()
}

fn sort_key(m: &IntMat3) -> (BigInt, IntMat3) {
    (operator_norm(m), m.clone())
}

/// All positive units `p₀E + p₁A + p₂A²` with `|pᵢ| <= bound`, together with
/// their inverses, sorted by norm then entries.
pub fn unit_search(a: &IntMat3, bound: u64) -> Vec<IntMat3> {
    let b = bound as i64;
    let a2 = a.mul(a);
    let found: BTreeSet<IntMat3> = (-b..=b)
        .into_par_iter()
        .flat_map_iter(|p2| {
            let a = a.clone();
            let a2 = a2.clone();
            (-b..=b).flat_map(move |p1| {
                let a = a.clone();
                let a2 = a2.clone();
                (-b..=b).filter_map(move |p0| {
                    let m = IntMat3::identity()
                        .scale(&BigInt::from(p0))
                        .add(&a.scale(&BigInt::from(p1)))
                        .add(&a2.scale(&BigInt::from(p2)));
                    (m.det().is_one() && is_positive_unit(&m, &a)).then_some(m)
                })
            })
        })
        .flat_map_iter(|m| {
            let inv = m.inverse().expect("det 1");
            [m, inv]
        })
        .collect();
    let mut out: Vec<IntMat3> = found.into_iter().collect();
    out.sort_by_cached_key(sort_key);
    out
}

/// Rational coefficients `p` with `B = p₀E + p₁A + p₂A²`.
pub fn order_coefficients(b: &IntMat3, a: &IntMat3) -> Option<[Rat; 3]> {
    let powers = [IntMat3::identity().to_flat(), a.to_flat(), a.mul(a).to_flat()];
    let target = b.to_flat();
    for p in 0..9 {
        for q in p + 1..9 {
            for r in q + 1..9 {
                let pos = [p, q, r];
                let s: Vec<Vec<BigInt>> = pos.iter().map(|&e| (0..3).map(|k| powers[k][e].clone()).collect()).collect();
                let det = det_square(&s);
                if det.is_zero() {
                    continue;
                }
                // Cramer's rule.
                let coeffs: [Rat; 3] = std::array::from_fn(|k| {
                    let mut sk = s.clone();
                    for (row, &e) in sk.iter_mut().zip(&pos) {
                        row[k] = target[e].clone();
                    }
                    Rat::new(det_square(&sk), det.clone())
                });
                let ok = (0..9).all(|e| {
                    let v: Rat = (0..3).map(|k| &coeffs[k] * Rat::from_integer(powers[k][e].clone())).sum();
                    v == Rat::from_integer(target[e].clone())
                });
                return ok.then_some(coeffs);
            }
        }
    }
    None
}

/// Enclosures of `(ln μ₁, ln μ₂)`, where `μᵢ` is the eigenvalue of `B` on the
/// eigenvector of `A` belonging to its `i`-th smallest eigenvalue. Each
/// interval has width below `width`.
///
/// Using the eigen-embedding order of `A` (rather than sorting the eigenvalues
/// of `B`) makes the map `B ↦ log vector` a group homomorphism, which the
/// independence test relies on.
pub fn certified_log_vector(
    b: &IntMat3,
    a: &IntMat3,
    eigen: &EigenData,
    width: &Rat,
) -> Result<[RatInterval; 2], UnitsError> {
    let p = order_coefficients(b, a).ok_or(UnitsError::NotInOrder)?;
    if p[0].is_one() && p[1].is_zero() && p[2].is_zero() {
        return Ok([RatInterval::point(Rat::zero()), RatInterval::point(Rat::zero())]);
    }
    let half = width / Rat::from_integer(BigInt::from(2));
    let out: [RatInterval; 2] = std::array::from_fn(|i| {
        let mut root = eigen.roots[i].clone();
        let mut root_width = width.clone() / Rat::from_integer(BigInt::from(1024));
        loop {
            root.refine_to(&root_width);
            let iv = root.interval();
            let x2 = iv.mul(&iv);
            let mu = RatInterval::point(p[0].clone()).add(&iv.scale(&p[1])).add(&x2.scale(&p[2]));
            if mu.lo.is_positive() {
                let l = ln_interval(&mu, &half).round_outward(96);
                if &l.width() < width {
                    return l;
                }
            }
            root_width = &root_width / Rat::from_integer(BigInt::from(1u32 << 16));
        }
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Independence {
    Independent,
    Dependent { n: i64, m: i64 },
    Indeterminate,
}

/// Shortest `(n, m)` with `B1ⁿ·B2ᵐ = E` and `0 < max(|n|, |m|) <= depth`,
/// normalized so that the first nonzero exponent is positive.
pub fn relation_scan(b1: &IntMat3, b2: &IntMat3, depth: i64) -> Option<(i64, i64)> {
    let powers_b2: HashMap<i64, IntMat3> = (-depth..=depth).map(|m| Some((m, b2.pow(m)?))).collect::<Option<_>>()?;
    let mut best: Option<(i64, i64)> = None;
    for n in -depth..=depth {
        // B1ⁿ·B2ᵐ = E ⇔ B2ᵐ = B1⁻ⁿ
        let target = b1.pow(-n)?;
        for m in -depth..=depth {
            if (n, m) == (0, 0) || powers_b2[&m] != target {
                continue;
            }
            let (n, m) = if n < 0 || (n == 0 && m < 0) { (-n, -m) } else { (n, m) };
            let key = n.abs().max(m.abs());
            if best.is_none_or(|(bn, bm)| key < bn.abs().max(bm.abs())) {
                best = Some((n, m));
            }
        }
    }
    best
}

/// Widths at which the 2×2 log determinant is tried before giving up.
fn rank_widths() -> [Rat; 3] {
    [
        Rat::new(BigInt::one(), BigInt::from(1_000_000u64)),
        Rat::new(BigInt::one(), BigInt::from(1_000_000_000u64)),
        Rat::new(BigInt::one(), BigInt::from(1_000_000_000_000u64)),
    ]
}

/// Certified rank-2 test on the log vectors.
pub fn log_rank_two(b1: &IntMat3, b2: &IntMat3, a: &IntMat3, eigen: &EigenData) -> Result<Option<bool>, UnitsError> {
    for w in rank_widths() {
        let l1 = certified_log_vector(b1, a, eigen, &w)?;
        let l2 = certified_log_vector(b2, a, eigen, &w)?;
        let det = l1[0].mul(&l2[1]).sub(&l1[1].mul(&l2[0]));
        if !det.contains_zero() {
            return Ok(Some(true));
        }
    }
    Ok(None)
}

pub fn independence(b1: &IntMat3, b2: &IntMat3, a: &IntMat3, eigen: &EigenData) -> Result<Independence, UnitsError> {
    if let Some((n, m)) = relation_scan(b1, b2, RELATION_DEPTH) {
        return Ok(Independence::Dependent { n, m });
    }
    Ok(match log_rank_two(b1, b2, a, eigen)? {
        Some(true) => Independence::Independent,
        _ => Independence::Indeterminate,
    })
}

/// Validates user-supplied generators.
pub fn validate_pair(a: &IntMat3, b1: &IntMat3, b2: &IntMat3) -> Result<DirichletPair, UnitsError> {
    let eigen = EigenData::new(a)?;
    for (name, b) in [("B1", b1), ("B2", b2)] {
        if let Some(reason) = positive_unit_defect(b, a) {
            return Err(UnitsError::NotPositiveUnit { name: name.into(), reason });
        }
    }
    match independence(b1, b2, a, &eigen)? {
        Independence::Independent => {
            Ok(DirichletPair { b1: b1.clone(), b2: b2.clone(), provenance: Provenance::UserSupplied, search_bound: 0 })
        }
        Independence::Dependent { n, m } => Err(UnitsError::Relation { n, m }),
        Independence::Indeterminate => Err(UnitsError::Indeterminate),
    }
}

/// The independent pair of smallest total norm among the candidates.
pub fn select_pair(candidates: &[IntMat3], a: &IntMat3) -> Result<DirichletPair, UnitsError> {
    select_pair_with_bound(candidates, a, 0)
}

pub fn select_pair_with_bound(candidates: &[IntMat3], a: &IntMat3, bound: u64) -> Result<DirichletPair, UnitsError> {
    let eigen = EigenData::new(a)?;
    let norms: Vec<BigInt> = candidates.iter().map(operator_norm).collect();
    let mut pairs: Vec<(BigInt, usize, usize)> = Vec::new();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            pairs.push((&norms[i] + &norms[j], i, j));
        }
    }
    pairs.sort();
    for (_, i, j) in pairs {
        if candidates[i] == candidates[j] {
            continue;
        }
        if independence(&candidates[i], &candidates[j], a, &eigen)? == Independence::Independent {
            return Ok(DirichletPair {
                b1: candidates[i].clone(),
                b2: candidates[j].clone(),
                provenance: Provenance::Searched,
                search_bound: bound,
            });
        }
    }
    Err(UnitsError::NoIndependentPair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sylvester() -> IntMat3 {
        IntMat3::from_i64([[0, 1, 0], [0, 0, 1], [1, 1, -2]])
    }
    fn x() -> IntMat3 {
        IntMat3::from_i64([[3, -1, -1], [-1, 2, 1], [1, 0, 0]])
    }
    fn y() -> IntMat3 {
        IntMat3::from_i64([[4, -3, -2], [-2, 2, 1], [1, -1, 0]])
    }

    #[test]
    fn theorem_generators_are_inverse_powers() {
        let a = sylvester();
        let ai = a.inverse().unwrap();
        assert_eq!(x(), ai.mul(&ai));
        assert_eq!(y(), ai.mul(&ai.sub(&IntMat3::identity())));
    }

    #[test]
    fn positive_units() {
        let a = sylvester();
        assert!(is_positive_unit(&IntMat3::identity(), &a));
        assert!(is_positive_unit(&x(), &a));
        assert!(!is_positive_unit(&IntMat3::identity().scale(&BigInt::from(-1)), &a));
        // A itself has a negative eigenvalue
        assert!(!is_positive_unit(&a, &a));
    }

    #[test]
    fn search_finds_the_generators() {
        let a = sylvester();
        let found = unit_search(&a, 6);
        assert_eq!(found[0], IntMat3::identity());
        assert!(found.contains(&x()));
        assert!(found.contains(&y()));
        assert!(found.iter().all(|m| is_positive_unit(m, &a)));
    }

    #[test]
    fn log_vectors() {
        let a = sylvester();
        let e = EigenData::new(&a).unwrap();
        let w = Rat::new(BigInt::one(), BigInt::from(1_000_000u64));
        let id = certified_log_vector(&IntMat3::identity(), &a, &e, &w).unwrap();
        assert!(id.iter().all(|i| i.contains_zero() && i.width().is_zero()));
        let lx = certified_log_vector(&x(), &a, &e, &w).unwrap();
        let lxi = certified_log_vector(&x().inverse().unwrap(), &a, &e, &w).unwrap();
        for k in 0..2 {
            assert!(lx[k].width() < w);
            assert!(lx[k].add(&lxi[k]).contains_zero());
        }
        assert_eq!(log_rank_two(&x(), &y(), &a, &e).unwrap(), Some(true));
    }

    #[test]
    fn pair_selection() {
        let a = sylvester();
        let p = select_pair(&[IntMat3::identity(), x(), y()], &a).unwrap();
        assert_eq!((p.b1.clone(), p.b2.clone()), (x(), y()));
        assert_eq!(select_pair(&[IntMat3::identity()], &a), Err(UnitsError::NoIndependentPair));
        let x2 = x().mul(&x());
        let p = select_pair(&[x(), x2.clone(), y()], &a).unwrap();
        assert!(!(p.b1 == x() && p.b2 == x2) && !(p.b1 == x2 && p.b2 == x()));
        assert!(validate_pair(&a, &x(), &y()).is_ok());
        assert!(validate_pair(&a, &y(), &x()).is_ok());
        assert_eq!(validate_pair(&a, &x(), &x2), Err(UnitsError::Relation { n: 2, m: -1 }));
    }
}
