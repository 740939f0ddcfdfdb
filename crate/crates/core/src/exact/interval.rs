use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Rat = BigRational;

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval::new(-&self.hi, -&self.lo)
    }

    pub fn add_scalar(&self, c: &Rat) -> RatInterval {
        RatInterval::new(&self.lo + c, &self.hi + c)
    }

    pub fn scale(&self, c: &Rat) -> RatInterval {
        if c.is_negative() {
            RatInterval::new(&self.hi * c, &self.lo * c)
        } else {
            RatInterval::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        if self.lo == self.hi {
            return other.scale(&self.lo);
        }
        if other.lo == other.hi {
            return self.scale(&other.lo);
        }
        let p = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        RatInterval::new(lo, hi)
    }

    /// Widens the endpoints outward onto the grid `2^-bits` to keep sizes bounded.
    pub fn round_outward(&self, bits: u32) -> RatInterval {
        RatInterval::new(round_down(&self.lo, bits), round_up(&self.hi, bits))
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))).to_f64().unwrap_or(f64::NAN)
    }
}

/// Largest multiple of `2^-bits` not above `x`.
pub fn round_down(x: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let scaled = x * Rat::from_integer(scale.clone());
    Rat::new(scaled.floor().to_integer(), scale)
}

/// Smallest multiple of `2^-bits` not below `x`.
pub fn round_up(x: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let scaled = x * Rat::from_integer(scale.clone());
    Rat::new(scaled.ceil().to_integer(), scale)
}

/// Rational enclosure of `2·atanh(s)` for `0 <= s < 1/2`, with absolute error below `tol`.
fn two_atanh(s: &Rat, tol: &Rat) -> RatInterval {
    if s.is_zero() {
        return RatInterval::point(Rat::zero());
    }
    let s2 = s * s;
    let mut term = s.clone(); // s^(2k+1)
    let mut sum = Rat::zero();
    let mut k: u64 = 0;
    let one = Rat::one();
    loop {
        sum += &term / Rat::from_integer(BigInt::from(2 * k + 1));
        term = &term * &s2;
        k += 1;
        // tail = Σ_{j≥k} s^(2j+1)/(2j+1) <= term / ((2k+1)(1 − s²))
        let tail = &term / (Rat::from_integer(BigInt::from(2 * k + 1)) * (&one - &s2));
        let tail2 = &tail * Rat::from_integer(BigInt::from(2));
        if tail2 < *tol {
            let lo = &sum * Rat::from_integer(BigInt::from(2));
            let hi = &lo + tail2;
            return RatInterval::new(lo, hi);
        }
    }
}

/// Rational enclosure of ln(x) for rational `x > 0`, of width below `tol`.
pub fn ln_enclosure(x: &Rat, tol: &Rat) -> RatInterval {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    if x.is_one() {
        return RatInterval::point(Rat::zero());
    }
    // x = 2^k · r with r in [1, 2)
    let k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = Rat::from_integer(BigInt::from(2));
    let mut r = if k >= 0 {
        x / Rat::from_integer(BigInt::one() << k as u64)
    } else {
        x * Rat::from_integer(BigInt::one() << (-k) as u64)
    };
    let mut k = k;
    while r >= two {
        r /= &two;
        k += 1;
    }
    while r < Rat::one() {
        r *= &two;
        k -= 1;
    }
    let kk = Rat::from_integer(BigInt::from(k.unsigned_abs()).max(BigInt::one()));
    let sub_tol = tol / (Rat::from_integer(BigInt::from(4)) * kk);
    // ln r = 2 atanh((r−1)/(r+1)), (r−1)/(r+1) in [0, 1/3)
    let s = (&r - Rat::one()) / (&r + Rat::one());
    let ln_r = two_atanh(&s, &sub_tol);
    let ln2 = two_atanh(&Rat::new(BigInt::one(), BigInt::from(3)), &sub_tol);
    let k_rat = Rat::from_integer(BigInt::from(k));
    ln2.scale(&k_rat).add(&ln_r)
}

/// Enclosure of ln over an interval of positive rationals.
pub fn ln_interval(x: &RatInterval, tol: &Rat) -> RatInterval {
    let half = tol / Rat::from_integer(BigInt::from(2));
    let lo = ln_enclosure(&x.lo, &half).lo;
    let hi = ln_enclosure(&x.hi, &half).hi;
    RatInterval::new(lo, hi)
}

/// `floor` of a rational as a `BigInt`.
pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// `ceil` of a rational as a `BigInt`.
pub fn ceil_rat(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Floor division of integers.
pub fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ln_enclosures_contain_float_values() {
        let tol = rat(1, 1_000_000_000_000);
        for (n, d) in [(2, 1), (1, 3), (10, 1), (7, 5), (1, 1000), (123456, 7)] {
            let x = rat(n, d);
            let enc = ln_enclosure(&x, &tol);
            let f = (n as f64 / d as f64).ln();
            assert!(enc.width() < tol);
            assert!(enc.lo.to_f64().unwrap() <= f + 1e-12, "{n}/{d}");
            assert!(enc.hi.to_f64().unwrap() >= f - 1e-12, "{n}/{d}");
        }
        assert_eq!(ln_enclosure(&rat(1, 1), &tol), RatInterval::point(Rat::zero()));
    }

    #[test]
    fn ln_negates_under_reciprocal() {
        let tol = rat(1, 1 << 40);
        let a = ln_enclosure(&rat(17, 3), &tol);
        let b = ln_enclosure(&rat(3, 17), &tol);
        assert!(a.add(&b).contains_zero());
    }

    #[test]
    fn interval_product_covers_all_corners() {
        let a = RatInterval::new(rat(-1, 1), rat(2, 1));
        let b = RatInterval::new(rat(-3, 1), rat(1, 2));
        let p = a.mul(&b);
        assert_eq!(p, RatInterval::new(rat(-6, 1), rat(3, 1)));
    }

    #[test]
    fn outward_rounding_keeps_containment() {
        let x = RatInterval::new(rat(1, 3), rat(2, 3));
        let r = x.round_outward(8);
        assert!(r.lo <= x.lo && r.hi >= x.hi);
        assert!(r.lo.denom() <= &BigInt::from(256));
    }
}
