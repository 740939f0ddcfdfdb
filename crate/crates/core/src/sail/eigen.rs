//! Exact eigen-structure of a hyperbolic operator: isolated eigenvalues, left
//! and right eigenvector forms from the adjugate of `λE − A`, orthant signs
//! and integer points inside a prescribed orthant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::exact::{
    cubic_roots_in_unit_segment, round_down, round_up, sign_at, IntMat3, IntPoly, IntVec3, RatInterval, RootInterval,
    Sign,
};
use crate::operator::{diagnose, OperatorError};

type Rat = BigRational;

/// Fixed-point scale (bits) of the cached eigenform enclosures.
const CACHE_BITS: u32 = 48;

/// A 3-vector of polynomials in `λ`.
pub type PolyVec = [IntPoly; 3];

#[derive(Clone, Debug)]
pub struct EigenData {
    pub char_poly: IntPoly,
    /// Eigenvalues in ascending order.
    pub roots: [RootInterval; 3],
    /// Left eigenvector forms: a row of `adj(λE − A)` nonzero at the matching root.
    pub left_forms: [PolyVec; 3],
    /// Right eigenvector forms: a column of `adj(λE − A)` nonzero at the matching root.
    pub right_forms: [PolyVec; 3],
    /// Scaled integer enclosures `[lo, hi] · 2^-CACHE_BITS` of the left forms.
    cache: [[(i128, i128); 3]; 3],
}

impl PartialEq for EigenData {
    fn eq(&self, other: &Self) -> bool {
        self.char_poly == other.char_poly && self.left_forms == other.left_forms
    }
}

fn poly_det2(a: &IntPoly, b: &IntPoly, c: &IntPoly, d: &IntPoly) -> IntPoly {
    a.mul(d).sub(&b.mul(c))
}

/// Determinant of a 3×3 matrix of polynomials.
pub fn poly_det3(m: &[PolyVec; 3]) -> IntPoly {
    let t0 = m[0][0].mul(&poly_det2(&m[1][1], &m[1][2], &m[2][1], &m[2][2]));
    let t1 = m[0][1].mul(&poly_det2(&m[1][0], &m[1][2], &m[2][0], &m[2][2]));
    let t2 = m[0][2].mul(&poly_det2(&m[1][0], &m[1][1], &m[2][0], &m[2][1]));
    t0.sub(&t1).add(&t2)
}

/// `adj(λE − A)` with polynomial entries.
fn adjugate_pencil(a: &IntMat3) -> [PolyVec; 3] {
    let m: [PolyVec; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let c = IntPoly::constant(-a.entry(i, j).clone());
            if i == j {
                c.add(&IntPoly::x())
            } else {
                c
            }
        })
    });
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // adj[i][j] = cofactor C[j][i]
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let minor =
                poly_det2(&m[rows[0]][cols[0]], &m[rows[0]][cols[1]], &m[rows[1]][cols[0]], &m[rows[1]][cols[1]]);
            if (i + j) % 2 == 0 {
                minor
            } else {
                minor.scale(&BigInt::from(-1))
            }
        })
    })
}

/// `⟨form, x⟩` as a polynomial in `λ`.
pub fn pair_form(form: &PolyVec, x: &IntVec3) -> IntPoly {
    (0..3).fold(IntPoly::zero(), |acc, k| acc.add(&form[k].scale(&x.0[k])))
}

fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl EigenData {
    pub fn new(a: &IntMat3) -> Result<EigenData, OperatorError> {
        let diag = diagnose(a);
        diag.require_hyperbolic()?;
        let roots: [RootInterval; 3] = [diag.roots[0].clone(), diag.roots[1].clone(), diag.roots[2].clone()];
        let adj = adjugate_pencil(a);
        let nonzero = |v: &PolyVec, r: &RootInterval| v.iter().any(|p| sign_at(p, r) != Sign::Zero);
        let left_forms: [PolyVec; 3] = std::array::from_fn(|i| {
            adj.iter()
                .find(|row| nonzero(row, &roots[i]))
                .cloned()
                .expect("adjugate has rank one at a simple eigenvalue")
        });
        let right_forms: [PolyVec; 3] = std::array::from_fn(|i| {
            (0..3)
                .map(|j| -> PolyVec { std::array::from_fn(|r| adj[r][j].clone()) })
                .find(|col| nonzero(col, &roots[i]))
                .expect("adjugate has rank one at a simple eigenvalue")
        });
        let cache = std::array::from_fn(|i| {
            let fine = roots[i].refined(&Rat::new(BigInt::from(1), BigInt::from(1u64) << 60u32));
            let iv = fine.interval();
            std::array::from_fn(|k| {
                let e = left_forms[i][k].eval_interval(&iv);
                let scale = Rat::from_integer(BigInt::from(1u64) << CACHE_BITS);
                let lo = (round_down(&e.lo, CACHE_BITS) * &scale).to_integer().to_i128().unwrap_or(i128::MIN);
                let hi = (round_up(&e.hi, CACHE_BITS) * &scale).to_integer().to_i128().unwrap_or(i128::MAX);
                (lo, hi)
            })
        });
        Ok(EigenData { char_poly: diag.char_poly, roots, left_forms, right_forms, cache })
    }

    /// Floating approximations of the eigenvalues.
    pub fn eigenvalues_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.roots[i].to_f64())
    }

    fn refined_root(&self, i: usize) -> RootInterval {
        self.roots[i].refined(&Rat::new(BigInt::from(1), BigInt::from(1u64) << 52u32))
    }

    fn form_f64(&self, form: &PolyVec, i: usize) -> [f64; 3] {
        let r = self.refined_root(i).interval();
        std::array::from_fn(|k| {
            let e = form[k].eval_interval(&r);
            (rat_to_f64(&e.lo) + rat_to_f64(&e.hi)) / 2.0
        })
    }

    pub fn left_f64(&self, i: usize) -> [f64; 3] {
        self.form_f64(&self.left_forms[i], i)
    }

    pub fn right_f64(&self, i: usize) -> [f64; 3] {
        self.form_f64(&self.right_forms[i], i)
    }

    /// Exact sign of `⟨ℓᵢ(λᵢ), x⟩`.
    pub fn form_sign(&self, i: usize, x: &IntVec3) -> Sign {
        if let Some(s) = self.cached_sign(i, x) {
            return s;
        }
        sign_at(&pair_form(&self.left_forms[i], x), &self.roots[i])
    }

    fn cached_sign(&self, i: usize, x: &IntVec3) -> Option<Sign> {
        let mut lo: i128 = 0;
        let mut hi: i128 = 0;
        for k in 0..3 {
            let xk = x.0[k].to_i64()? as i128;
            let (a, b) = self.cache[i][k];
            if a == i128::MIN || b == i128::MAX {
                return None;
            }
            let (p, q) = if xk >= 0 { (a, b) } else { (b, a) };
            lo = lo.checked_add(xk.checked_mul(p)?)?;
            hi = hi.checked_add(xk.checked_mul(q)?)?;
        }
        if lo > 0 {
            Some(Sign::Positive)
        } else if hi < 0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    /// Orthant signs `(σ₁, σ₂, σ₃)` of `x`; a zero entry means `x` lies on an eigenplane.
    pub fn orthant_sign_vector(&self, x: &IntVec3) -> [Sign; 3] {
        std::array::from_fn(|i| self.form_sign(i, x))
    }

    /// Exact sign of `⟨w, rᵢ(λᵢ)⟩` for the right eigenform of root `i`.
    pub fn ray_sign(&self, i: usize, w: &IntVec3) -> Sign {
        sign_at(&pair_form(&self.right_forms[i], w), &self.roots[i])
    }

    /// Sign of `⟨ℓᵢ, rᵢ⟩` at `λᵢ`, which is never zero for simple eigenvalues.
    pub fn left_right_sign(&self, i: usize) -> Sign {
        let p = (0..3).fold(IntPoly::zero(), |acc, k| acc.add(&self.left_forms[i][k].mul(&self.right_forms[i][k])));
        sign_at(&p, &self.roots[i])
    }

    /// Exact interval enclosures of the eigenvalues, refined below `width`.
    pub fn eigen_intervals(&self, width: &Rat) -> [RatInterval; 3] {
        std::array::from_fn(|i| self.roots[i].refined(width).interval())
    }
}

/// An orthant (sign pattern of the three eigenforms) with an integer witness.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthantRef {
    pub eigen: EigenData,
    pub sign_vector: [Sign; 3],
    pub witness: IntVec3,
}

impl OrthantRef {
    /// The open orthant containing `x`, or `None` if `x` lies on an eigenplane.
    pub fn of_point(eigen: &EigenData, x: &IntVec3) -> Option<OrthantRef> {
        let s = eigen.orthant_sign_vector(x);
        (!s.contains(&Sign::Zero)).then(|| OrthantRef { eigen: eigen.clone(), sign_vector: s, witness: x.clone() })
    }

    pub fn contains(&self, x: &IntVec3) -> bool {
        self.eigen.orthant_sign_vector(x) == self.sign_vector
    }

    /// Orientation `εᵢ` making `εᵢ·rᵢ` the eigen-ray on the closure of the orthant.
    pub fn ray_orientation(&self) -> [Sign; 3] {
        std::array::from_fn(|i| self.sign_vector[i].times(self.eigen.left_right_sign(i)))
    }
}

/// Sign pattern stated explicitly (for orthants given by signs rather than a point).
pub fn orthant_from_signs(eigen: &EigenData, signs: [Sign; 3]) -> Option<OrthantRef> {
    if signs.contains(&Sign::Zero) {
        return None;
    }
    let proto = OrthantRef { eigen: eigen.clone(), sign_vector: signs, witness: IntVec3::zero() };
    let w = find_orthant_point(&proto);
    Some(OrthantRef { witness: w, ..proto })
}

/// An integer point of the open orthant, found by pushing a unit cube along an
/// approximate interior direction until all eight corners of the integer
/// cell are tried; validated exactly.
pub fn find_orthant_point(r: &OrthantRef) -> IntVec3 {
    find_orthant_point_from_scale(r, 1.0)
}

pub fn find_orthant_point_from_scale(r: &OrthantRef, start: f64) -> IntVec3 {
    let e = &r.eigen;
    let mut dir = [0.0f64; 3];
    for i in 0..3 {
        let v = e.right_f64(i);
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let s = f64::from(r.sign_vector[i].to_i8()) * f64::from(e.left_right_sign(i).to_i8());
        for k in 0..3 {
            dir[k] += s * v[k] / norm;
        }
    }
    let mut scale = start.max(1.0);
    loop {
        let base: [f64; 3] = std::array::from_fn(|k| (dir[k] * scale).floor());
        for corner in 0..8u8 {
            let p: [f64; 3] = std::array::from_fn(|k| base[k] + f64::from((corner >> k) & 1));
            if p.iter().any(|c| !c.is_finite()) {
                continue;
            }
            let x = IntVec3(p.map(|c| BigInt::from(c as i128)));
            if !x.is_zero() && r.contains(&x) {
                return x;
            }
        }
        scale *= 2.0;
        assert!(scale.is_finite(), "orthant point search diverged");
    }
}

/// `det(x(t), Bx(t), B²x(t))` for `x(t) = t·x1 + (1−t)·x2`.
pub fn orthant_cubic(b: &IntMat3, x1: &IntVec3, x2: &IntVec3) -> IntPoly {
    let d = x1 - x2;
    let line = |v: &IntVec3, dv: &IntVec3| -> PolyVec {
        std::array::from_fn(|k| IntPoly::new(vec![v.0[k].clone(), dv.0[k].clone()]))
    };
    let bx2 = b.apply(x2);
    let bd = b.apply(&d);
    let b2x2 = b.apply(&bx2);
    let b2d = b.apply(&bd);
    let cols = [line(x2, &d), line(&bx2, &bd), line(&b2x2, &b2d)];
    // Rows of the determinant are the three vectors; the determinant is transpose-invariant.
    poly_det3(&cols)
}

/// True iff the orthant cubic has no root on `[0, 1]`, i.e. `x1` and `x2` lie in
/// the same open orthant of `B`.
pub fn same_orthant_cubic(b: &IntMat3, x1: &IntVec3, x2: &IntVec3) -> bool {
    let f = orthant_cubic(b, x1, x2);
    !f.is_zero() && cubic_roots_in_unit_segment(&f) == 0
}

/// `x ≠ 0` with all three orthant signs nonzero.
pub fn off_eigenplanes(e: &EigenData, x: &IntVec3) -> bool {
    !x.is_zero() && !e.orthant_sign_vector(x).contains(&Sign::Zero)
}
