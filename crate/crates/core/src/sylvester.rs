//! Sylvester operators and their known two-face fundamental domains.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::exact::{IntMat3, IntVec3};
use crate::units::{DirichletPair, Provenance};
use crate::verifier::{DomainCandidate, Generator, Gluing, Owned, Word};

/// Rows `(0,1,0), (0,0,1), (1,−m,−n)`; characteristic polynomial `λ³ + nλ² + mλ − 1`.
pub fn sylvester(m: i64, n: i64) -> IntMat3 {
    sylvester_big(&BigInt::from(m), &BigInt::from(n))
}

pub fn sylvester_big(m: &BigInt, n: &BigInt) -> IntMat3 {
    let z = || BigInt::from(0);
    let o = || BigInt::from(1);
    IntMat3::from_rows([[z(), o(), z()], [z(), z(), o()], [o(), -m, -n]])
}

/// The operator, generators and candidate of the two-parameter family.
#[derive(Clone, Debug)]
pub struct TheoremCase {
    pub a: BigInt,
    pub b: BigInt,
    pub operator: IntMat3,
    pub pair: DirichletPair,
    pub candidate: DomainCandidate,
}

impl TheoremCase {
    /// Points `A, B, C, D` in this order.
    pub fn points(&self) -> [IntVec3; 4] {
        let v = &self.candidate.vertices;
        [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
    }
}

/// Vertices `A=(1,0,a+2)`, `B=(0,0,1)`, `C=(b−a−1,1,0)`, `D=((b+1)²,b+1,1)`;
/// edges `AB, AD, BD, DC, CB`; faces `ABD, BDC`; owned `{A}, {AB, AD, BD},
/// {ABD, BDC}`; gluing `X: AB → DC` and `Y: AD → CB`.
///
/// Operator `A_{b−a−1,(a+2)(b+1)}` with `X = A⁻²`, `Y = A⁻¹(A⁻¹ − (b+1)E)`.
pub fn sylvester_theorem_case(a: i64, b: i64) -> TheoremCase {
    let (a, b) = (BigInt::from(a), BigInt::from(b));
    let one = BigInt::from(1);
    let m = &b - &a - &one;
    let n = (&a + 2) * (&b + &one);
    let op = sylvester_big(&m, &n);
    let inv = op.inverse().expect("determinant one");
    let x = inv.mul(&inv);
    let y = inv.mul(&inv.sub(&IntMat3::identity().scale(&(&b + &one))));
    let vertices = vec![
        IntVec3([one.clone(), BigInt::from(0), &a + 2]),
        IntVec3::new(0, 0, 1),
        IntVec3([m.clone(), one.clone(), BigInt::from(0)]),
        IntVec3([(&b + &one) * (&b + &one), &b + &one, one.clone()]),
    ];
    let candidate = DomainCandidate {
        vertices,
        edges: vec![[0, 1], [0, 3], [1, 3], [3, 2], [2, 1]],
        faces: vec![vec![0, 1, 3], vec![1, 3, 2]],
        owned: Owned { vertices: BTreeSet::from([0]), edges: BTreeSet::from([0, 1, 2]), faces: BTreeSet::from([0, 1]) },
        gluing: vec![
            Gluing { from: 0, to: 3, word: Word(vec![(Generator::B1, 1)]) },
            Gluing { from: 1, to: 4, word: Word(vec![(Generator::B2, 1)]) },
        ],
    };
    let pair = DirichletPair { b1: x, b2: y, provenance: Provenance::UserSupplied, search_bound: 0 };
    TheoremCase { a, b, operator: op, pair, candidate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPoly;

    #[test]
    fn matrix_and_invariants() {
        assert_eq!(sylvester(-1, 2), IntMat3::from_i64([[0, 1, 0], [0, 0, 1], [1, 1, -2]]));
        for m in -5..=5 {
            for n in -5..=5 {
                let s = sylvester(m, n);
                assert_eq!(s.det(), BigInt::from(1));
                assert_eq!(s.char_poly(), IntPoly::from_i64(&[-1, m, n, 1]));
            }
        }
    }

    #[test]
    fn zero_case_generators_and_points() {
        let t = sylvester_theorem_case(0, 0);
        assert_eq!(t.pair.b1, IntMat3::from_i64([[3, -1, -1], [-1, 2, 1], [1, 0, 0]]));
        assert_eq!(t.pair.b2, IntMat3::from_i64([[4, -3, -2], [-2, 2, 1], [1, -1, 0]]));
        let [pa, pb, pc, pd] = t.points();
        assert_eq!(t.pair.b1.apply(&pa), pd);
        assert_eq!(t.pair.b1.apply(&pb), pc);
        assert_eq!(t.pair.b2.apply(&pa), pb);
        assert_eq!(t.pair.b2.apply(&pd), pc);
        assert_eq!(t.pair.b2.apply(&pb), IntVec3::new(-2, 1, 0));
        t.candidate.validate().unwrap();
    }

    #[test]
    fn figure_case_point_d() {
        let t = sylvester_theorem_case(0, 6);
        assert_eq!(t.points()[3], IntVec3::new(49, 7, 1));
        t.candidate.validate().unwrap();
        for s in 0..3 {
            for u in 0..3 {
                let t = sylvester_theorem_case(s, u);
                let [pa, pb, pc, pd] = t.points();
                assert_eq!(t.pair.b1.apply(&pa), pd);
                assert_eq!(t.pair.b1.apply(&pb), pc);
                assert_eq!(t.pair.b2.apply(&pa), pb);
                assert_eq!(t.pair.b2.apply(&pd), pc);
            }
        }
    }
}
