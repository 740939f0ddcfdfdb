//! Diagnosis of integer operators: determinant, characteristic polynomial,
//! irreducibility and hyperbolicity.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::exact::{ceil_rat, floor_rat, isolate_real_roots, IntMat3, IntPoly, RootInterval};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("characteristic polynomial {poly} is reducible over Q: it has the rational root {root}")]
    Reducible { poly: String, root: BigInt },
    #[error("characteristic polynomial {poly} has {real_roots} distinct real roots, expected 3")]
    NotHyperbolic { poly: String, real_roots: usize },
    #[error("determinant is {det}, expected 1")]
    NotSpecialLinear { det: BigInt },
}

#[derive(Clone, Debug)]
pub struct OperatorDiagnosis {
    pub det: BigInt,
    pub char_poly: IntPoly,
    pub roots: Vec<RootInterval>,
    /// A rational (hence integer) root of the monic characteristic polynomial, if any.
    pub rational_root: Option<BigInt>,
}

impl OperatorDiagnosis {
    pub fn irreducible(&self) -> bool {
        self.rational_root.is_none()
    }

    pub fn hyperbolic(&self) -> bool {
        self.roots.len() == 3
    }

    pub fn in_sl3(&self) -> bool {
        self.det.is_one()
    }

    /// Ok iff irreducible with three distinct real eigenvalues.
    pub fn require_hyperbolic(&self) -> Result<(), OperatorError> {
        if let Some(root) = &self.rational_root {
            return Err(OperatorError::Reducible { poly: self.char_poly.to_string(), root: root.clone() });
        }
        if !self.hyperbolic() {
            return Err(OperatorError::NotHyperbolic {
                poly: self.char_poly.to_string(),
                real_roots: self.roots.len(),
            });
        }
        Ok(())
    }

    /// As [`require_hyperbolic`](Self::require_hyperbolic), additionally demanding det = 1.
    pub fn require_sl3_hyperbolic(&self) -> Result<(), OperatorError> {
        self.require_hyperbolic()?;
        if !self.in_sl3() {
            return Err(OperatorError::NotSpecialLinear { det: self.det.clone() });
        }
        Ok(())
    }
}

pub fn diagnose(a: &IntMat3) -> OperatorDiagnosis {
    let char_poly = a.char_poly();
    let roots = isolate_real_roots(&char_poly);
    OperatorDiagnosis { det: a.det(), rational_root: integer_root(&char_poly, &roots), char_poly, roots }
}

/// An integer root of a monic polynomial, searched inside its isolating intervals.
///
/// Rational roots of monic integer polynomials are integers, so this decides
/// the existence of a linear factor over Q.
fn integer_root(p: &IntPoly, roots: &[RootInterval]) -> Option<BigInt> {
    debug_assert!(p.leading().is_some_and(|l| l.abs().is_one()));
    for r in roots {
        let mut k = floor_rat(&r.lo);
        let hi = ceil_rat(&r.hi);
        while k <= hi {
            if p.eval_int(&k) == BigInt::from(0) {
                return Some(k);
            }
            k += 1;
        }
    }
    None
}

/// Irreducible hyperbolic check, convenience form.
pub fn is_irreducible_hyperbolic(a: &IntMat3) -> bool {
    diagnose(a).require_hyperbolic().is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sylvester_operator_is_hyperbolic() {
        let a = IntMat3::from_i64([[0, 1, 0], [0, 0, 1], [1, 1, -2]]);
        let d = diagnose(&a);
        assert!(d.irreducible() && d.hyperbolic() && d.in_sl3());
        assert_eq!(d.char_poly, IntPoly::from_i64(&[-1, -1, 2, 1]));
    }

    #[test]
    fn diagonal_and_rotation_rejected() {
        let diag = IntMat3::from_i64([[2, 0, 0], [0, 3, 0], [0, 0, 5]]);
        assert!(matches!(diagnose(&diag).require_hyperbolic(), Err(OperatorError::Reducible { .. })));
        // companion of x³ − 2: one real root
        let c = IntMat3::from_i64([[0, 1, 0], [0, 0, 1], [2, 0, 0]]);
        assert!(matches!(diagnose(&c).require_hyperbolic(), Err(OperatorError::NotHyperbolic { real_roots: 1, .. })));
        // repeated eigenvalues
        assert!(!is_irreducible_hyperbolic(&IntMat3::identity()));
    }
}
