//! Exact univariate polynomials and rational functions in `z` over ℚ.
//!
//! Coefficients are big rationals; rational functions are kept in canonical
//! form (numerator and denominator coprime, denominator monic), so structural
//! equality coincides with mathematical equality.

use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense polynomial in `z` with exact rational coefficients.
///
/// The coefficient vector is trimmed: the zero polynomial is the empty
/// vector, otherwise the last entry is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Polynomial { coeffs: vec![c] }.trimmed()
    }

    /// `c·zᵏ`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Polynomial { coeffs }.trimmed()
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Polynomial::monomial(BigRational::one(), 1)
    }

    /// Polynomial from ascending integer coefficients `[c₀, c₁, …]`.
    pub fn from_integers(coeffs: &[i64]) -> Self {
        Polynomial {
            coeffs: coeffs
                .iter()
                .map(|&c| BigRational::from(BigInt::from(c)))
                .collect(),
        }
        .trimmed()
    }

    /// Polynomial from ascending rational coefficients.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        Polynomial { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `zᵏ` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Ascending coefficients, trimmed.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, z: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from(BigInt::from(k)))
                .collect(),
        }
        .trimmed()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Polynomial { coeffs }.trimmed()
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Polynomial { coeffs }.trimmed()
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial { coeffs }.trimmed()
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
        .trimmed()
    }

    /// Euclidean division: `self = q·div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let d = div.coeffs.len();
        if self.coeffs.len() < d {
            return (Polynomial::zero(), self.clone());
        }
        let lead_inv = BigRational::one() / div.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); rem.len() - d + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d - 1] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, b) in div.coeffs.iter().enumerate() {
                let t = &c * b;
                rem[k + j] -= t;
            }
            quot[k] = c;
        }
        (
            Polynomial { coeffs: quot }.trimmed(),
            Polynomial { coeffs: rem }.trimmed(),
        )
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let inv = BigRational::one() / self.leading();
        self.scale(&inv)
    }

    /// Integer coefficients after clearing denominators and dividing by the
    /// gcd of the numerators; also returns the (positive) rational multiplier
    /// `m` with `m·self` equal to the integer polynomial.
    fn integer_cleared(&self) -> (Vec<BigInt>, BigRational) {
        if self.is_zero() {
            return (Vec::new(), BigRational::one());
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let scaled: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from(lcm.clone())).to_integer())
            .collect();
        let mut content = BigInt::zero();
        for c in &scaled {
            content = content.gcd(c);
        }
        let ints: Vec<BigInt> = scaled.iter().map(|c| c / &content).collect();
        (ints, BigRational::new(lcm, content))
    }
}

fn fmt_integer_poly(coeffs: &[BigInt], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mag = c.abs();
        match k {
            0 => write!(f, "{mag}")?,
            _ => {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if k == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{k}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (ints, m) = self.integer_cleared();
        if !m.is_one() {
            let inv = BigRational::one() / m;
            write!(f, "({inv})·")?;
        }
        fmt_integer_poly(&ints, f)
    }
}

/// Quotient of two [`Polynomial`]s in canonical form: numerator and
/// denominator coprime, denominator monic.  Equality of values is structural
/// equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Canonicalising constructor; errors on a zero denominator.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain(
                "rational function with zero denominator".into(),
            ));
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                num: Polynomial::zero(),
                den: Polynomial::one(),
            });
        }
        let g = num.gcd(&den);
        let (num, r1) = num.divrem(&g);
        let (den, r2) = den.divrem(&g);
        debug_assert!(r1.is_zero() && r2.is_zero());
        let lead_inv = BigRational::one() / den.leading();
        Ok(RationalFunction {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        })
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunction {
            num: Polynomial::one(),
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        RationalFunction {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == Polynomial::one() && self.den == Polynomial::one()
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RationalFunction::new(num, self.den.mul(&other.den)).expect("nonzero denominators")
    }

    pub fn sub(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        RationalFunction::new(num, self.den.mul(&other.den)).expect("nonzero denominators")
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    /// Division; errors when `other` is the zero function.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain(
                "division by the zero rational function".into(),
            ));
        }
        RationalFunction::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Exact value at `z`; [`Error::PoleAtPoint`] when the reduced
    /// denominator vanishes there.
    pub fn evaluate(&self, z: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(format!("z = {z}")));
        }
        Ok(self.num.eval(z) / d)
    }

    /// Exact derivative value at `z` by the quotient rule.
    pub fn derivative_at(&self, z: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(format!("z = {z}")));
        }
        let n = self.num.eval(z);
        let dn = self.num.derivative().eval(z);
        let dd = self.den.derivative().eval(z);
        Ok((dn * &d - n * dd) / (&d * &d))
    }

    /// Exact Taylor coefficients `c₀, …, c_N` at `z = 0` by power-series long
    /// division; [`Error::PoleAtOrigin`] when the denominator vanishes at 0.
    pub fn taylor(&self, n_max: usize) -> Result<Vec<BigRational>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::PoleAtOrigin);
        }
        let mut out = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            let mut acc = self.num.coeff(k);
            for j in 1..=k {
                acc -= self.den.coeff(j) * &out[k - j];
            }
            out.push(acc / &d0);
        }
        Ok(out)
    }
}

impl fmt::Display for RationalFunction {
    /// Prints `num/den` with all coefficients cleared to integers, e.g.
    /// `(7z + 5)/(4z + 8)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            return write!(f, "0");
        }
        // self = (n_ints/n_mul)/(d_ints/d_mul): fold the rational multipliers
        // into the two integer polynomials and strip their common content.
        let (n_ints, n_mul) = self.num.integer_cleared();
        let (d_ints, d_mul) = self.den.integer_cleared();
        let scale = BigRational::new(d_mul.numer() * n_mul.denom(), d_mul.denom() * n_mul.numer());
        let num_scaled: Vec<BigInt> = n_ints.iter().map(|c| c * scale.numer()).collect();
        let den_scaled: Vec<BigInt> = d_ints.iter().map(|c| c * scale.denom()).collect();
        let mut g = BigInt::zero();
        for c in num_scaled.iter().chain(&den_scaled) {
            g = g.gcd(c);
        }
        let num_final: Vec<BigInt> = num_scaled.iter().map(|c| c / &g).collect();
        let den_final: Vec<BigInt> = den_scaled.iter().map(|c| c / &g).collect();
        if den_final == [BigInt::one()] {
            return fmt_integer_poly(&num_final, f);
        }
        if num_final.len() == 1 {
            write!(f, "{}", num_final[0])?;
        } else {
            write!(f, "(")?;
            fmt_integer_poly(&num_final, f)?;
            write!(f, ")")?;
        }
        if den_final.len() == 1 {
            write!(f, "/{}", den_final[0])
        } else {
            write!(f, "/(")?;
            fmt_integer_poly(&den_final, f)?;
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_and_trimming() {
        let p = Polynomial::from_integers(&[1, 2, 1]); // (1+z)²
        let q = Polynomial::from_integers(&[1, 1]);
        assert_eq!(q.mul(&q), p);
        assert_eq!(p.sub(&p), Polynomial::zero());
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Polynomial::zero().degree(), None);
        assert_eq!(p.eval(&rat(2, 1)), rat(9, 1));
        assert_eq!(p.derivative(), Polynomial::from_integers(&[2, 2]));
    }

    #[test]
    fn division_and_gcd() {
        let p = Polynomial::from_integers(&[-1, 0, 1]); // z² − 1
        let q = Polynomial::from_integers(&[1, 1]);
        let (quot, rem) = p.divrem(&q);
        assert_eq!(quot, Polynomial::from_integers(&[-1, 1]));
        assert!(rem.is_zero());
        let g = p.gcd(&Polynomial::from_integers(&[1, 2, 1]));
        assert_eq!(g, q.monic());
        // gcd of coprime polynomials is 1.
        assert_eq!(p.gcd(&Polynomial::from_integers(&[2, 1])).degree(), Some(0));
    }

    #[test]
    fn canonical_form_reduces_and_makes_monic() {
        // (2z² + 2z)/(2z) = z + 1.
        let rf = RationalFunction::new(
            Polynomial::from_integers(&[0, 2, 2]),
            Polynomial::from_integers(&[0, 2]),
        )
        .unwrap();
        assert_eq!(rf.num(), &Polynomial::from_integers(&[1, 1]));
        assert_eq!(rf.den(), &Polynomial::one());

        // Structural equality after independent constructions.
        let a = RationalFunction::new(
            Polynomial::from_integers(&[5, 7]),
            Polynomial::from_integers(&[8, 4]),
        )
        .unwrap();
        let b = RationalFunction::new(
            Polynomial::from_integers(&[15, 21]),
            Polynomial::from_integers(&[24, 12]),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num().gcd(a.den()), Polynomial::one());
    }

    #[test]
    fn evaluation_and_poles() {
        let rf = RationalFunction::new(
            Polynomial::from_integers(&[1, 1]),
            Polynomial::from_integers(&[-4, 1]),
        )
        .unwrap();
        assert_eq!(rf.evaluate(&rat(0, 1)).unwrap(), rat(-1, 4));
        assert!(matches!(
            rf.evaluate(&rat(4, 1)),
            Err(Error::PoleAtPoint(_))
        ));
        // A cancelled pole is not a pole.
        let rf = RationalFunction::new(
            Polynomial::from_integers(&[-4, 1]).mul(&Polynomial::from_integers(&[1, 1])),
            Polynomial::from_integers(&[-4, 1]),
        )
        .unwrap();
        assert_eq!(rf.evaluate(&rat(4, 1)).unwrap(), rat(5, 1));
    }

    #[test]
    fn derivative_at_matches_quotient_rule() {
        // d/dz. [2z/(z+1)] = 2/(z+1)² → 1/2 at z = 1.
        let rf = RationalFunction::new(
            Polynomial::from_integers(&[0, 2]),
            Polynomial::from_integers(&[1, 1]),
        )
        .unwrap();
        assert_eq!(rf.derivative_at(&rat(1, 1)).unwrap(), rat(1, 2));
    }

    #[test]
    fn taylor_series_of_geometric_like_function() {
        // 2z/(1+z) = 2z − 2z² + 2z³ − …
        let rf = RationalFunction::new(
            Polynomial::from_integers(&[0, 2]),
            Polynomial::from_integers(&[1, 1]),
        )
        .unwrap();
        let c = rf.taylor(4).unwrap();
        assert_eq!(
            c,
            vec![rat(0, 1), rat(2, 1), rat(-2, 1), rat(2, 1), rat(-2, 1)]
        );
        // Series times denominator reproduces the numerator mod z⁵.
        let series = Polynomial::from_coeffs(c);
        let back = series.mul(rf.den());
        for k in 0..=4 {
            assert_eq!(back.coeff(k), rf.num().coeff(k), "k = {k}");
        }
        // Pole at the origin is rejected.
        let bad =
            RationalFunction::new(Polynomial::one(), Polynomial::from_integers(&[0, 1])).unwrap();
        assert!(matches!(bad.taylor(3), Err(Error::PoleAtOrigin)));
    }

    #[test]
    fn display_clears_denominators() {
        let rf = RationalFunction::new(
            Polynomial::from_coeffs(vec![rat(5, 4), rat(7, 4)]),
            Polynomial::from_integers(&[2, 1]),
        )
        .unwrap();
        assert_eq!(rf.to_string(), "(7z + 5)/(4z + 8)");
        let p = RationalFunction::from_poly(Polynomial::from_integers(&[-1, 0, 3]));
        assert_eq!(p.to_string(), "3z^2 - 1");
        assert_eq!(RationalFunction::zero().to_string(), "0");
        assert_eq!(RationalFunction::constant(rat(2, 1)).to_string(), "2");
    }
}
