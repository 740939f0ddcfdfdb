use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::RatInterval;

pub type Rat = BigRational;

/// Univariate polynomial with integer coefficients, ascending degree.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has
/// an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The polynomial `λ`.
    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + Rat::from_integer(c.clone()))
    }

    /// Interval enclosure of the polynomial over `[x.lo, x.hi]` (Horner form).
    pub fn eval_interval(&self, x: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::point(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_scalar(&Rat::from_integer(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default() + other.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    /// Square-free part (product of the distinct irreducible factors), primitive.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive_part();
        }
        let p = self.to_rat();
        let g = p.gcd(&p.derivative());
        p.div_exact(&g).to_int_primitive()
    }

    /// Yun's square-free factorization: `(factor, multiplicity)` pairs with
    /// pairwise coprime square-free primitive factors of positive degree.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.to_rat();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0);
        let mut c = df.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.to_int_primitive(), i));
            }
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Polynomial with rational coefficients, ascending degree, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rat::from_integer(BigInt::from(i))).collect(),
        )
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
                        - other.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Euclidean division: `(quotient, remainder)`. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    pub fn div_exact(&self, divisor: &RatPoly) -> RatPoly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.coeffs.last().cloned() {
            Some(l) => RatPoly::new(a.coeffs.iter().map(|c| c / &l).collect()),
            None => a,
        }
    }

    /// Clears denominators and returns the primitive integer polynomial.
    pub fn to_int_primitive(&self) -> IntPoly {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntPoly::new(self.coeffs.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect())
            .primitive_part()
    }
}
