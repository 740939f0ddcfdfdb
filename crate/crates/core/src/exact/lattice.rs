//! Lattice-point enumeration in boxes cut by halfspaces, Hermite normal form
//! and integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::int::IntVec3;

/// The closed halfspace `normal · x <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: IntVec3,
    pub bound: BigInt,
}

impl Halfspace {
    pub fn new(normal: IntVec3, bound: impl Into<BigInt>) -> Self {
        Halfspace { normal, bound: bound.into() }
    }

    /// `normal · x >= bound`.
    pub fn at_least(normal: &IntVec3, bound: impl Into<BigInt>) -> Self {
        Halfspace { normal: -normal, bound: -bound.into() }
    }

    /// `normal · x < bound` over the integers.
    pub fn strictly_below(normal: IntVec3, bound: impl Into<BigInt>) -> Self {
        Halfspace { normal, bound: bound.into() - 1 }
    }

    /// The pair of halfspaces cutting out the plane `normal · x = value`.
    pub fn plane(normal: &IntVec3, value: impl Into<BigInt>) -> [Halfspace; 2] {
        let value = value.into();
        [Halfspace::new(normal.clone(), value.clone()), Halfspace::at_least(normal, value)]
    }

    pub fn contains(&self, x: &IntVec3) -> bool {
        self.normal.dot(x) <= self.bound
    }
}

/// Inclusive integer box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl LatticeBox {
    pub fn new(lo: [i64; 3], hi: [i64; 3]) -> Self {
        LatticeBox { lo, hi }
    }

    /// Smallest box containing the given points, or `None` if a coordinate
    /// does not fit in `i64`.
    pub fn bounding(points: &[IntVec3]) -> Option<LatticeBox> {
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        for p in points {
            for k in 0..3 {
                let c = p.0[k].to_i64()?;
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        (!points.is_empty()).then_some(LatticeBox { lo, hi })
    }

    pub fn cell_count(&self) -> u128 {
        (0..3).map(|k| (self.hi[k] as i128 - self.lo[k] as i128 + 1).max(0) as u128).product()
    }
}

/// Every integer point of the box satisfying all halfspaces, sorted.
pub fn lattice_points(halfspaces: &[Halfspace], bx: &LatticeBox) -> Vec<IntVec3> {
    let mut out = Vec::new();
    for z in bx.lo[2]..=bx.hi[2] {
        let bz = BigInt::from(z);
        for y in bx.lo[1]..=bx.hi[1] {
            let by = BigInt::from(y);
            let mut xlo = BigInt::from(bx.lo[0]);
            let mut xhi = BigInt::from(bx.hi[0]);
            let mut feasible = true;
            for h in halfspaces {
                let [nx, ny, nz] = &h.normal.0;
                let rest = &h.bound - ny * &by - nz * &bz;
                if nx.is_zero() {
                    if rest.is_negative() {
                        feasible = false;
                        break;
                    }
                } else if nx.is_positive() {
                    xhi = xhi.min(rest.div_floor(nx));
                } else {
                    xlo = xlo.max(ceil_div(&-rest, &-nx));
                }
            }
            if !feasible || xlo > xhi {
                continue;
            }
            let (lo, hi) = (xlo.to_i64().unwrap(), xhi.to_i64().unwrap());
            for x in lo..=hi {
                out.push(IntVec3::new(x, y, z));
            }
        }
    }
    out.sort();
    out
}

/// `ceil(a / b)` for `b > 0`.
fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Row-style Hermite normal form: zero rows removed, pivots positive, entries
/// above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let pivots = echelonize(&mut m, ncols);
    for (r, &c) in pivots.iter().enumerate() {
        for above in 0..r {
            let q = m[above][c].div_floor(&m[r][c]);
            if !q.is_zero() {
                let pivot_row = m[r].clone();
                for (x, p) in m[above].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
            }
        }
    }
    m.truncate(pivots.len());
    m
}

/// Unimodular row reduction to echelon form on the first `ncols` columns.
/// Returns pivot columns; rows past the pivot count are zero on those columns.
fn echelonize(m: &mut [Vec<BigInt>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= m.len() {
            break;
        }
        loop {
            let best = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by(|&i, &j| m[i][c].abs().cmp(&m[j][c].abs()));
            let Some(best) = best else { break };
            m.swap(r, best);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -&*x;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis (in Hermite normal form) of `{x ∈ Z^n : M x = 0}` for an integer
/// matrix given by rows, each of length `n`.
pub fn integer_kernel(m: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let k = m.len();
    // Rows of [Mᵀ | I].
    let mut aug: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = (0..k).map(|i| m[i][j].clone()).collect();
            row.extend((0..n).map(|t| if t == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = echelonize(&mut aug, k).len();
    let kernel: Vec<Vec<BigInt>> = aug[rank..].iter().map(|row| row[k..].to_vec()).collect();
    hermite_normal_form(&kernel)
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det_square(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let v = (&a[c][c] * &a[i][j] - &a[i][c] * &a[c][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    sign * &a[n - 1][n - 1]
}
