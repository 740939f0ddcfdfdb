//! The ring of integer operators commuting with `A`: an exact Z-basis via the
//! integer kernel of `X ↦ XA − AX`, the norm-ball enumeration used as an
//! independent check, and the parallelepiped lattice-basis construction.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{det_square, hermite_normal_form, integer_kernel, IntMat3};
use crate::operator::{diagnose, OperatorError};

type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CommutantError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("generators are linearly dependent")]
    Dependent,
    #[error("generators have inconsistent dimensions")]
    Dimension,
    #[error("parallelepiped enumeration needs {needed} points, above the limit {limit}")]
    TooLarge { needed: u128, limit: u128 },
}

/// Z-basis of the commutant together with the index of `Z[A]` inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutantBasis {
    pub basis: [IntMat3; 3],
    pub index_over_za: BigInt,
}

impl CommutantBasis {
    /// Integer coordinates of `m` in the basis, or `None` if `m` is outside the lattice.
    pub fn coordinates(&self, m: &IntMat3) -> Option<[BigInt; 3]> {
        let rows: Vec<Vec<BigInt>> = self.basis.iter().map(IntMat3::to_flat).collect();
        let c = lattice_coordinates(&rows, &m.to_flat())?;
        Some([c[0].clone(), c[1].clone(), c[2].clone()])
    }

    pub fn contains(&self, m: &IntMat3) -> bool {
        self.coordinates(m).is_some()
    }
}

/// Sum of the absolute values of all entries.
pub fn operator_norm(m: &IntMat3) -> BigInt {
    m.abs_sum()
}

/// Matrix of the linear map `X ↦ XA − AX` on row-major flattened 3×3 matrices.
fn commutator_map(a: &IntMat3) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); 9]; 9];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut c = BigInt::zero();
                    if k == i {
                        c += a.entry(l, j);
                    }
                    if l == j {
                        c -= a.entry(i, k);
                    }
                    m[3 * i + j][3 * k + l] = c;
                }
            }
        }
    }
    m
}

/// Coordinates of `v` in an echelon basis (each row's first nonzero entry a pivot).
fn lattice_coordinates(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let p = row.iter().position(|x| !x.is_zero())?;
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for (x, b) in rest.iter_mut().zip(row) {
            *x -= &q * b;
        }
        coords.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

/// Hermite-form Z-basis of the integer matrices commuting with `A`.
pub fn commutant_lattice(a: &IntMat3) -> Result<CommutantBasis, CommutantError> {
    diagnose(a).require_hyperbolic()?;
    let kernel = integer_kernel(&commutator_map(a), 9);
    debug_assert_eq!(kernel.len(), 3);
    let basis = [IntMat3::from_flat(&kernel[0]), IntMat3::from_flat(&kernel[1]), IntMat3::from_flat(&kernel[2])];
    let a2 = a.mul(a);
    let coords: Vec<Vec<BigInt>> = [IntMat3::identity(), a.clone(), a2]
        .iter()
        .map(|m| lattice_coordinates(&kernel, &m.to_flat()).expect("powers of A commute with A"))
        .collect();
    let index_over_za = det_square(&coords).abs();
    Ok(CommutantBasis { basis, index_over_za })
}

/// Canonical Hermite normal form of the Z-span of a set of matrices.
pub fn span_hnf(ms: &[IntMat3]) -> Vec<Vec<BigInt>> {
    let rows: Vec<Vec<BigInt>> = ms.iter().map(IntMat3::to_flat).collect();
    hermite_normal_form(&rows)
}

/// `Σ operator_norm(Aⁱ)` for `i = 0, 1, 2`: every lattice basis element of the
/// commutant lies in the ball of this radius.
pub fn ball_bound(a: &IntMat3) -> BigInt {
    operator_norm(&IntMat3::identity()) + operator_norm(a) + operator_norm(&a.mul(a))
}

/// All integer matrices of norm at most `n` commuting with an irreducible `A`,
/// sorted.
///
/// Such matrices are `p₀E + p₁A + p₂A²` with rational `pᵢ`; three entry
/// positions determine the coefficients, so the search runs over the
/// `(2n+1)³` possible values at those positions.
pub fn enumerate_commutant_ball(a: &IntMat3, n: u64) -> Vec<IntMat3> {
    let powers = [IntMat3::identity().to_flat(), a.to_flat(), a.mul(a).to_flat()];
    // Choose three positions where the 3×3 restriction is invertible.
    let mut chosen = None;
    'outer: for p in 0..9 {
        for q in p + 1..9 {
            for r in q + 1..9 {
                let s: Vec<Vec<BigInt>> =
                    [p, q, r].iter().map(|&e| (0..3).map(|k| powers[k][e].clone()).collect()).collect();
                if !det_square(&s).is_zero() {
                    chosen = Some(([p, q, r], s));
                    break 'outer;
                }
            }
        }
    }
    let Some((_, s)) = chosen else {
        return vec![IntMat3::zero()];
    };
    // X_flat = W · t / det with W = Powers · adj(S).
    let s_mat = IntMat3::from_rows([
        [s[0][0].clone(), s[0][1].clone(), s[0][2].clone()],
        [s[1][0].clone(), s[1][1].clone(), s[1][2].clone()],
        [s[2][0].clone(), s[2][1].clone(), s[2][2].clone()],
    ]);
    let det = s_mat.det();
    let adj = s_mat.adjugate();
    let w: Vec<[BigInt; 3]> = (0..9)
        .map(|e| {
            let mut row: [BigInt; 3] = Default::default();
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..3).map(|k| &powers[k][e] * adj.entry(k, j)).sum();
            }
            row
        })
        .collect();
    let ni = n as i64;

    let small =
        w.iter().flatten().chain(std::iter::once(&det)).all(|x| x.abs() < BigInt::from(1i64 << 40)) && ni < (1 << 20);
    let found: Vec<IntMat3> = if small {
        let w: Vec<[i128; 3]> = w.iter().map(|r| [0, 1, 2].map(|k| r[k].to_i128().unwrap())).collect();
        let d = det.to_i128().unwrap();
        let n128 = ni as i128;
        (-ni..=ni)
            .into_par_iter()
            .flat_map_iter(|t0| {
                let w = &w;
                let mut local = Vec::new();
                for t1 in -ni..=ni {
                    'inner: for t2 in -ni..=ni {
                        let t = [t0 as i128, t1 as i128, t2 as i128];
                        let mut flat = [0i128; 9];
                        let mut norm = 0i128;
                        for e in 0..9 {
                            let num = w[e][0] * t[0] + w[e][1] * t[1] + w[e][2] * t[2];
                            if num % d != 0 {
                                continue 'inner;
                            }
                            flat[e] = num / d;
                            norm += flat[e].abs();
                            if norm > n128 {
                                continue 'inner;
                            }
                        }
                        let flat: Vec<BigInt> = flat.iter().map(|&x| BigInt::from(x)).collect();
                        local.push(IntMat3::from_flat(&flat));
                    }
                }
                local
            })
            .collect()
    } else {
        let nb = BigInt::from(n);
        let mut out = Vec::new();
        for t0 in -ni..=ni {
            for t1 in -ni..=ni {
                'big: for t2 in -ni..=ni {
                    let t = [BigInt::from(t0), BigInt::from(t1), BigInt::from(t2)];
                    let mut flat = Vec::with_capacity(9);
                    for row in &w {
                        let num: BigInt = (0..3).map(|k| &row[k] * &t[k]).sum();
                        let (q, r) = num.div_rem(&det);
                        if !r.is_zero() {
                            continue 'big;
                        }
                        flat.push(q);
                    }
                    let m = IntMat3::from_flat(&flat);
                    if m.abs_sum() <= nb {
                        out.push(m);
                    }
                }
            }
        }
        out
    };
    let set: BTreeSet<IntMat3> = found.into_iter().collect();
    set.into_iter().collect()
}

/// Solver for coefficients of points in the real span of a fixed list of
/// integer vectors.
struct SpanSolver {
    gens: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    inv: Vec<Vec<Rat>>,
}

impl SpanSolver {
    fn new(gens: &[Vec<BigInt>]) -> Option<SpanSolver> {
        let k = gens.len();
        let d = gens.first()?.len();
        // Greedily pick k coordinate rows making the k×k restriction invertible.
        let mut pivots: Vec<usize> = Vec::new();
        for e in 0..d {
            let mut trial = pivots.clone();
            trial.push(e);
            let sub: Vec<Vec<BigInt>> =
                (0..trial.len()).map(|i| (0..trial.len()).map(|j| gens[i][trial[j]].clone()).collect()).collect();
            if !det_square(&sub).is_zero() {
                pivots = trial;
                if pivots.len() == k {
                    break;
                }
            }
        }
        if pivots.len() < k {
            return None;
        }
        // Rows: coordinate e of Σ α_j g_j; invert the k×k matrix S[e][j] = g_j[pivot_e].
        let s: Vec<Vec<Rat>> =
            (0..k).map(|e| (0..k).map(|j| Rat::from_integer(gens[j][pivots[e]].clone())).collect()).collect();
        let inv = invert(&s)?;
        Some(SpanSolver { gens: gens.to_vec(), pivots, inv })
    }

    /// Coefficients `α` with `Σ α_j g_j = x`, or `None` if `x` is outside the span.
    fn solve(&self, x: &[BigInt]) -> Option<Vec<Rat>> {
        let k = self.gens.len();
        let rhs: Vec<Rat> = self.pivots.iter().map(|&e| Rat::from_integer(x[e].clone())).collect();
        let alpha: Vec<Rat> = (0..k).map(|i| (0..k).map(|j| &self.inv[i][j] * &rhs[j]).sum()).collect();
        for (e, xe) in x.iter().enumerate() {
            let v: Rat = (0..k).map(|j| &alpha[j] * Rat::from_integer(self.gens[j][e].clone())).sum();
            if v != Rat::from_integer(xe.clone()) {
                return None;
            }
        }
        Some(alpha)
    }
}

fn invert(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::from_integer(1.into()) } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let row = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(&row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Enumeration cap for the default candidate set of [`parallelepiped_basis`].
pub const PARALLELEPIPED_LIMIT: u128 = 10_000_000;

/// Basis of the full integer lattice in the span of `gens`, built by
/// induction: `Bᵢ` is the integer point of the parallelepiped spanned by
/// `A₁..Aᵢ` with the smallest positive `i`-th coefficient (lexicographically
/// smallest on ties). Candidates are all integer points of the bounding box.
pub fn parallelepiped_basis(gens: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, CommutantError> {
    let d = gens.first().map_or(0, Vec::len);
    if gens.iter().any(|g| g.len() != d) {
        return Err(CommutantError::Dimension);
    }
    let mut lo = vec![BigInt::zero(); d];
    let mut hi = vec![BigInt::zero(); d];
    for g in gens {
        for e in 0..d {
            if g[e].is_negative() {
                lo[e] += &g[e];
            } else {
                hi[e] += &g[e];
            }
        }
    }
    let needed = (0..d).try_fold(1u128, |acc, e| {
        let span = (&hi[e] - &lo[e] + 1u32).to_u128()?;
        acc.checked_mul(span)
    });
    let needed = needed.unwrap_or(u128::MAX);
    if needed > PARALLELEPIPED_LIMIT {
        return Err(CommutantError::TooLarge { needed, limit: PARALLELEPIPED_LIMIT });
    }
    let mut candidates: Vec<Vec<BigInt>> = vec![Vec::new()];
    for e in 0..d {
        let mut next = Vec::new();
        for c in &candidates {
            let mut x = lo[e].clone();
            while x <= hi[e] {
                let mut v = c.clone();
                v.push(x.clone());
                next.push(v);
                x += 1;
            }
        }
        candidates = next;
    }
    parallelepiped_basis_within(gens, &candidates)
}

/// As [`parallelepiped_basis`] with an explicit candidate set, which must
/// contain every integer point of the parallelepiped (e.g. a norm ball).
pub fn parallelepiped_basis_within(
    gens: &[Vec<BigInt>],
    candidates: &[Vec<BigInt>],
) -> Result<Vec<Vec<BigInt>>, CommutantError> {
    let d = gens.first().map_or(0, Vec::len);
    if gens.iter().any(|g| g.len() != d) || candidates.iter().any(|c| c.len() != d) {
        return Err(CommutantError::Dimension);
    }
    let mut sorted: Vec<&Vec<BigInt>> = candidates.iter().collect();
    sorted.sort();
    let mut basis = Vec::with_capacity(gens.len());
    for i in 1..=gens.len() {
        let solver = SpanSolver::new(&gens[..i]).ok_or(CommutantError::Dependent)?;
        let mut best: Option<(Rat, &Vec<BigInt>)> = None;
        for c in &sorted {
            let Some(alpha) = solver.solve(c) else { continue };
            let one = Rat::from_integer(1.into());
            if alpha.iter().any(|a| a.is_negative() || a > &one) {
                continue;
            }
            let ai = &alpha[i - 1];
            if !ai.is_positive() {
                continue;
            }
            if best.as_ref().is_none_or(|(b, _)| ai < b) {
                best = Some((ai.clone(), c));
            }
        }
        let (_, b) = best.ok_or(CommutantError::Dependent)?;
        basis.push(b.clone());
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    fn sylvester() -> IntMat3 {
        IntMat3::from_i64([[0, 1, 0], [0, 0, 1], [1, 1, -2]])
    }

    #[test]
    fn norms() {
        assert_eq!(operator_norm(&IntMat3::identity()), BigInt::from(3));
        assert_eq!(operator_norm(&sylvester()), BigInt::from(6));
        assert_eq!(operator_norm(&IntMat3::zero()), BigInt::from(0));
        let a = sylvester();
        assert_eq!(a.mul(&a), IntMat3::from_i64([[0, 0, 1], [1, 1, -2], [-2, -1, 5]]));
        assert_eq!(ball_bound(&a), BigInt::from(22));
    }

    #[test]
    fn sylvester_commutant() {
        let a = sylvester();
        let cb = commutant_lattice(&a).unwrap();
        for m in &cb.basis {
            assert!(m.commutes_with(&a));
        }
        assert!(cb.contains(&IntMat3::identity()));
        assert!(cb.contains(&a));
        assert!(cb.contains(&a.mul(&a)));
        assert!(cb.index_over_za >= BigInt::from(1));
    }

    #[test]
    fn ball_enumeration() {
        let a = sylvester();
        assert_eq!(enumerate_commutant_ball(&a, 0), vec![IntMat3::zero()]);
        assert!(enumerate_commutant_ball(&a, 3).contains(&IntMat3::identity()));
        let ball = enumerate_commutant_ball(&a, 22);
        assert!(ball.iter().all(|m| m.commutes_with(&a) && m.abs_sum() <= BigInt::from(22)));
        let cb = commutant_lattice(&a).unwrap();
        assert_eq!(span_hnf(&ball), span_hnf(&cb.basis));
    }

    #[test]
    fn parallelepiped_examples() {
        assert_eq!(parallelepiped_basis(&[v(&[2, 0]), v(&[0, 2])]).unwrap(), vec![v(&[1, 0]), v(&[0, 1])]);
        let b = parallelepiped_basis(&[v(&[1, 0]), v(&[1, 2])]).unwrap();
        assert_eq!(b[1][1].abs(), BigInt::from(1));
        let b = parallelepiped_basis(&[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(b, vec![v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(parallelepiped_basis(&[v(&[1, 1]), v(&[2, 2])]), Err(CommutantError::Dependent));
    }
}
