use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntPoly;
use super::ExactError;

/// An integer point (or vector) of the lattice Z³.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec3(pub [BigInt; 3]);

impl IntVec3 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        IntVec3([x.into(), y.into(), z.into()])
    }

    pub fn zero() -> Self {
        IntVec3::new(0, 0, 0)
    }

    pub fn unit(axis: usize) -> Self {
        let mut v = IntVec3::zero();
        v.0[axis] = BigInt::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVec3) -> BigInt {
        &self.0[0] * &other.0[0] + &self.0[1] * &other.0[1] + &self.0[2] * &other.0[2]
    }

    pub fn cross(&self, other: &IntVec3) -> IntVec3 {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &other.0;
        IntVec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn scale(&self, k: &BigInt) -> IntVec3 {
        IntVec3([&self.0[0] * k, &self.0[1] * k, &self.0[2] * k])
    }

    /// Integer length: gcd of the absolute coordinates.
    pub fn content(&self) -> Result<BigInt, ExactError> {
        if self.is_zero() {
            return Err(ExactError::ZeroVector);
        }
        Ok(self.0[0].gcd(&self.0[1]).gcd(&self.0[2]))
    }

    /// The vector divided by its content. Zero stays zero.
    pub fn primitive(&self) -> IntVec3 {
        match self.content() {
            Ok(g) if !g.is_one() => IntVec3([&self.0[0] / &g, &self.0[1] / &g, &self.0[2] / &g]),
            _ => self.clone(),
        }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [
            self.0[0].to_f64().unwrap_or(f64::NAN),
            self.0[1].to_f64().unwrap_or(f64::NAN),
            self.0[2].to_f64().unwrap_or(f64::NAN),
        ]
    }

    /// Coordinates as `i64` when all of them fit.
    pub fn to_i64(&self) -> Option<[i64; 3]> {
        Some([self.0[0].to_i64()?, self.0[1].to_i64()?, self.0[2].to_i64()?])
    }

    pub fn is_parallel_to(&self, other: &IntVec3) -> bool {
        self.cross(other).is_zero()
    }
}

impl fmt::Display for IntVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for &IntVec3 {
    type Output = IntVec3;
    fn add(self, rhs: &IntVec3) -> IntVec3 {
        IntVec3([&self.0[0] + &rhs.0[0], &self.0[1] + &rhs.0[1], &self.0[2] + &rhs.0[2]])
    }
}

impl Sub for &IntVec3 {
    type Output = IntVec3;
    fn sub(self, rhs: &IntVec3) -> IntVec3 {
        IntVec3([&self.0[0] - &rhs.0[0], &self.0[1] - &rhs.0[1], &self.0[2] - &rhs.0[2]])
    }
}

impl Neg for &IntVec3 {
    type Output = IntVec3;
    fn neg(self) -> IntVec3 {
        IntVec3([-&self.0[0], -&self.0[1], -&self.0[2]])
    }
}

/// Exact cross product.
pub fn cross(u: &IntVec3, v: &IntVec3) -> IntVec3 {
    u.cross(v)
}

/// Integer length of a nonzero vector.
pub fn ivec_content(v: &IntVec3) -> Result<BigInt, ExactError> {
    v.content()
}

/// A 3×3 integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat3 {
    pub rows: [[BigInt; 3]; 3],
}

impl IntMat3 {
    pub fn from_rows(rows: [[BigInt; 3]; 3]) -> Self {
        IntMat3 { rows }
    }

    pub fn from_i64(rows: [[i64; 3]; 3]) -> Self {
        IntMat3 { rows: rows.map(|r| r.map(BigInt::from)) }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(c0: &IntVec3, c1: &IntVec3, c2: &IntVec3) -> Self {
        let col = [c0, c1, c2];
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| col[j].0[i].clone())) }
    }

    pub fn identity() -> Self {
        IntMat3::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn zero() -> Self {
        IntMat3::from_i64([[0; 3]; 3])
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &BigInt> {
        self.rows.iter().flatten()
    }

    /// Entries flattened row by row.
    pub fn to_flat(&self) -> Vec<BigInt> {
        self.entries().cloned().collect()
    }

    pub fn from_flat(flat: &[BigInt]) -> Self {
        assert_eq!(flat.len(), 9, "a 3×3 matrix needs nine entries");
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| flat[3 * i + j].clone())) }
    }

    pub fn column(&self, j: usize) -> IntVec3 {
        IntVec3([self.rows[0][j].clone(), self.rows[1][j].clone(), self.rows[2][j].clone()])
    }

    pub fn row(&self, i: usize) -> IntVec3 {
        IntVec3(self.rows[i].clone())
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMat3::identity()
    }

    pub fn det(&self) -> BigInt {
        let m = &self.rows;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn trace(&self) -> BigInt {
        &self.rows[0][0] + &self.rows[1][1] + &self.rows[2][2]
    }

    pub fn transpose(&self) -> IntMat3 {
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| self.rows[j][i].clone())) }
    }

    pub fn mul(&self, other: &IntMat3) -> IntMat3 {
        IntMat3 {
            rows: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    &self.rows[i][0] * &other.rows[0][j]
                        + &self.rows[i][1] * &other.rows[1][j]
                        + &self.rows[i][2] * &other.rows[2][j]
                })
            }),
        }
    }

    pub fn apply(&self, v: &IntVec3) -> IntVec3 {
        IntVec3(std::array::from_fn(|i| {
            &self.rows[i][0] * &v.0[0] + &self.rows[i][1] * &v.0[1] + &self.rows[i][2] * &v.0[2]
        }))
    }

    pub fn add(&self, other: &IntMat3) -> IntMat3 {
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| &self.rows[i][j] + &other.rows[i][j])) }
    }

    pub fn sub(&self, other: &IntMat3) -> IntMat3 {
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| &self.rows[i][j] - &other.rows[i][j])) }
    }

    pub fn scale(&self, k: &BigInt) -> IntMat3 {
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| &self.rows[i][j] * k)) }
    }

    /// Classical adjoint: `self * adjugate = det * E`.
    pub fn adjugate(&self) -> IntMat3 {
        let m = &self.rows;
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0];
        // cofactor C_ij, adjugate is its transpose
        let cof = |i: usize, j: usize| {
            let rs: Vec<usize> = (0..3).filter(|&r| r != i).collect();
            let cs: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let v = minor(rs[0], rs[1], cs[0], cs[1]);
            if (i + j).is_multiple_of(2) {
                v
            } else {
                -v
            }
        };
        IntMat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i))) }
    }

    /// Integer inverse of a unimodular matrix (determinant ±1).
    pub fn inverse(&self) -> Option<IntMat3> {
        let d = self.det();
        if d.is_one() {
            Some(self.adjugate())
        } else if (-&d).is_one() {
            Some(self.adjugate().scale(&BigInt::from(-1)))
        } else {
            None
        }
    }

    /// Integer power; negative exponents need a unimodular matrix.
    pub fn pow(&self, exp: i64) -> Option<IntMat3> {
        let base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = IntMat3::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Some(acc)
    }

    pub fn commutes_with(&self, other: &IntMat3) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// det(λE − M) as a monic integer polynomial in λ.
    pub fn char_poly(&self) -> IntPoly {
        let m = &self.rows;
        let c2 = m[0][0].clone() * &m[1][1] - &m[0][1] * &m[1][0] + &m[0][0] * &m[2][2] - &m[0][2] * &m[2][0]
            + &m[1][1] * &m[2][2]
            - &m[1][2] * &m[2][1];
        IntPoly::new(vec![-self.det(), c2, -self.trace(), BigInt::one()])
    }

    /// Σ|mᵢⱼ|.
    pub fn abs_sum(&self) -> BigInt {
        self.entries().map(|e| e.abs()).sum()
    }
}

impl fmt::Display for IntMat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.rows;
        write!(
            f,
            "[[{}, {}, {}], [{}, {}, {}], [{}, {}, {}]]",
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2]
        )
    }
}

/// Exact determinant.
pub fn det3(m: &IntMat3) -> BigInt {
    m.det()
}

/// det of the matrix whose columns are `a`, `b`, `c`.
pub fn det_columns(a: &IntVec3, b: &IntVec3, c: &IntVec3) -> BigInt {
    a.dot(&b.cross(c))
}
