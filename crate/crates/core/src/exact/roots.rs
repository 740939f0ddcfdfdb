//! Real-root isolation (Sturm sequences plus bisection) and exact sign
//! determination of integer polynomials at real algebraic numbers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::RatInterval;
use super::poly::{IntPoly, RatPoly};

type Rat = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_int(x: &BigInt) -> Sign {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn of_rat(x: &Rat) -> Sign {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(s: i8) -> Sign {
        match s.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn negate(self) -> Sign {
        Sign::from_i8(-self.to_i8())
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::from_i8(self.to_i8() * other.to_i8())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        };
        write!(f, "{s}")
    }
}

/// A real algebraic number: the unique root of a square-free integer
/// polynomial inside `[lo, hi]`.
///
/// Either `lo == hi` (the root is rational and known exactly) or the
/// polynomial takes nonzero values of opposite signs at the two endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub poly: IntPoly,
    pub lo: Rat,
    pub hi: Rat,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&Rat> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn interval(&self) -> RatInterval {
        RatInterval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn to_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))).to_f64().unwrap_or(f64::NAN)
    }

    /// Halves the interval once, keeping the root inside.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2));
        let pm = Sign::of_rat(&self.poly.eval(&mid));
        if pm == Sign::Zero {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let plo = Sign::of_rat(&self.poly.eval(&self.lo));
        if plo == pm {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisects until the width is below `w` (or the root is exact).
    pub fn refine_to(&mut self, w: &Rat) {
        while !self.is_exact() && &self.width() >= w {
            self.bisect();
        }
    }

    /// Refined copy of width below `w`.
    pub fn refined(&self, w: &Rat) -> RootInterval {
        let mut r = self.clone();
        r.refine_to(w);
        r
    }
}

impl fmt::Display for RootInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} in [{}, {}]", self.poly, self.lo, self.hi)
    }
}

/// Sturm sequence of a nonconstant polynomial.
pub fn sturm_sequence(p: &IntPoly) -> Vec<RatPoly> {
    let p0 = p.to_rat();
    let p1 = p0.derivative();
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        seq.push(r);
    }
    seq
}

fn sign_variations(seq: &[RatPoly], x: &Rat) -> usize {
    let mut count = 0;
    let mut last = Sign::Zero;
    for p in seq {
        let s = Sign::of_rat(&p.eval(x));
        if s == Sign::Zero {
            continue;
        }
        if last != Sign::Zero && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct real roots of `p` in the half-open interval `(a, b]`.
pub fn count_roots_half_open(seq: &[RatPoly], a: &Rat, b: &Rat) -> usize {
    sign_variations(seq, a).saturating_sub(sign_variations(seq, b))
}

/// Number of distinct real roots of `p` in the closed interval `[a, b]`.
pub fn count_roots_closed(p: &IntPoly, a: &Rat, b: &Rat) -> usize {
    if p.is_zero() || p.degree() == Some(0) || a > b {
        return 0;
    }
    let sf = p.squarefree_part();
    let seq = sturm_sequence(&sf);
    let at_a = usize::from(sf.eval(a).is_zero());
    at_a + count_roots_half_open(&seq, a, b)
}

/// A power of two `M` with every real root strictly inside `(-M, M)`.
pub fn cauchy_bound(p: &IntPoly) -> Rat {
    let lead = Rat::from_integer(p.leading().expect("nonzero polynomial").abs());
    let max =
        p.coeffs()[..p.coeffs().len() - 1].iter().map(|c| Rat::from_integer(c.abs())).max().unwrap_or_else(Rat::zero);
    let bound = Rat::one() + max / lead;
    let mut m = Rat::one();
    while m <= bound {
        m *= Rat::from_integer(BigInt::from(2));
    }
    m
}

/// Isolating intervals of width at most 1 for the distinct real roots of `p`,
/// in ascending order.
pub fn isolate_real_roots(p: &IntPoly) -> Vec<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.squarefree_part();
    if sf.degree() == Some(1) {
        let c = sf.coeffs();
        let root = Rat::new(-c[0].clone(), c[1].clone());
        return vec![RootInterval { poly: sf, lo: root.clone(), hi: root }];
    }
    let seq = sturm_sequence(&sf);
    let m = cauchy_bound(&sf);
    let mut out = Vec::new();
    let mut stack = vec![(-m.clone(), m)];
    let two = Rat::from_integer(BigInt::from(2));
    // Depth-first with the upper half pushed first so results come out ascending.
    while let Some((lo, hi)) = stack.pop() {
        let n = count_roots_half_open(&seq, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && &hi - &lo <= Rat::one() {
            if sf.eval(&hi).is_zero() {
                out.push(RootInterval { poly: sf.clone(), lo: hi.clone(), hi });
                continue;
            }
            if !sf.eval(&lo).is_zero() {
                out.push(RootInterval { poly: sf.clone(), lo, hi });
                continue;
            }
        }
        let mid = (&lo + &hi) / &two;
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out
}

/// Exact sign of `q(α)`.
///
/// The zero case is decided exactly through `gcd(q, α.poly)`; otherwise the
/// interval is refined until the Horner enclosure of `q` excludes zero.
pub fn sign_at(q: &IntPoly, alpha: &RootInterval) -> Sign {
    if let Some(x) = alpha.exact_value() {
        return Sign::of_rat(&q.eval(x));
    }
    if q.is_zero() {
        return Sign::Zero;
    }
    let enclosure = q.eval_interval(&alpha.interval());
    if !enclosure.contains_zero() {
        return Sign::of_rat(&enclosure.lo);
    }
    let g = q.to_rat().gcd(&alpha.poly.to_rat());
    if g.degree().unwrap_or(0) > 0 {
        let glo = Sign::of_rat(&g.eval(&alpha.lo));
        let ghi = Sign::of_rat(&g.eval(&alpha.hi));
        if glo.times(ghi) == Sign::Negative {
            return Sign::Zero;
        }
    }
    let mut a = alpha.clone();
    loop {
        a.bisect();
        if let Some(x) = a.exact_value() {
            return Sign::of_rat(&q.eval(x));
        }
        let e = q.eval_interval(&a.interval());
        if !e.contains_zero() {
            return Sign::of_rat(&e.lo);
        }
    }
}

/// Number of distinct real roots of `f` in `[0, 1]`.
pub fn cubic_roots_in_unit_segment(f: &IntPoly) -> usize {
    count_roots_closed(f, &Rat::zero(), &Rat::one())
}
