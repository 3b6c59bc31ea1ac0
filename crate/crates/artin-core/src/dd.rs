//! Double-double arithmetic: unevaluated sums `hi + lo` of two `f64`s giving
//! roughly 31 significant decimal digits.  Used for the prime sums and the
//! coefficient recursion, where plain `f64` would lose too much to cancel the
//! 10-significant-digit target against millions of terms.
//!
//! The primitives are the classical error-free transformations: `two_sum`
//! (Knuth), `quick_two_sum` (Dekker) and a fused-multiply-add `two_prod`.

#[cfg(test)]
use num::BigInt;
use num::{BigRational, ToPrimitive};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// `a + b` with exact rounding error, no precondition.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `a + b` with exact rounding error, assuming `|a| ≥ |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// `a · b` with exact rounding error.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion (every `u64` is a sum of two `f64`s).
    pub fn from_u64(x: u64) -> Dd {
        let hi = x as f64;
        let lo = if hi >= 9.007_199_254_740_992e15 {
            // x may exceed 2^53: remove the rounded part exactly in i128.
            (x as i128 - hi as i128) as f64
        } else {
            0.0
        };
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// Nearest double-double to an exact rational.
    pub fn from_rational(r: &BigRational) -> Dd {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rest = r - BigRational::from_float(hi).expect("finite f64 converts");
        let lo = rest.to_f64().unwrap_or(0.0);
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// Exact value as a rational (the pair is an unevaluated exact sum).
    #[cfg(test)]
    pub fn to_rational(self) -> BigRational {
        let hi =
            BigRational::from_float(self.hi).unwrap_or_else(|| BigRational::from(BigInt::from(0)));
        let lo =
            BigRational::from_float(self.lo).unwrap_or_else(|| BigRational::from(BigInt::from(0)));
        hi + lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul(Dd::from_f64(q2)));
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Dd {
        let mut result = Dd::ONE;
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        result
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd::add(self, rhs)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd::sub(self, rhs)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd::mul(self, rhs)
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        Dd::div(self, rhs)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::neg(self)
    }
}
