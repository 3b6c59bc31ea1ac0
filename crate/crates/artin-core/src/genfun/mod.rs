//! Correction factors `F_a(z)` and `H_a(z)` for the order-index statistics.
//!
//! For each statistic the density generating function is a universal Euler
//! product over all primes multiplied by the rational correction
//! `F_a(z)·H_a(z)` built here:
//!
//! * `H_a(z)` collects one factor per prime `q | h`, repairing the universal
//!   `q`-factor for the `h`-th-power structure of `a`;
//! * `F_a(z)` repairs the entanglement of the quadratic field `ℚ(√±a₀)` (and
//!   at `q = 2` the fields `ℚ(i)`, `ℚ(√±2a₀)`) with the cyclotomic tower,
//!   through the auxiliary product `I_h(γ, z)` over the odd part `γ` of `b₀`
//!   and a two-adic weight `τ_±(a, z)`.
//!
//! Everything is exact big-rational polynomial arithmetic; `F_a(1) = H_a(1)
//! = 1` for every base, and at `z = 0` the `ω`- and `Ω`-statistic corrections
//! both collapse to the classical primitive-root density factor.

mod poly;

pub use poly::{Polynomial, RationalFunction};

use num::{BigInt, BigRational, BigUint, Integer, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::base::{kernel_and_discriminant, BaseDecomposition};
use crate::error::{Error, Result};

/// Which order-index statistic a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatisticKind {
    /// `ω((p−1)/ord_p(a))`: distinct prime factors of the index.
    #[serde(rename = "omega-quotient")]
    OmegaQuotient,
    /// `Ω((p−1)/ord_p(a))`: prime factors of the index with multiplicity.
    #[serde(rename = "big-omega-quotient")]
    BigOmegaQuotient,
    /// `ω(p−1) − ω(ord_p(a))`: primes of `p−1` missing from the order.
    #[serde(rename = "omega-diff")]
    OmegaDifference,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 3] = [
        StatisticKind::OmegaQuotient,
        StatisticKind::BigOmegaQuotient,
        StatisticKind::OmegaDifference,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::OmegaQuotient => "omega-quotient",
            StatisticKind::BigOmegaQuotient => "big-omega-quotient",
            StatisticKind::OmegaDifference => "omega-diff",
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega-quotient" => Ok(StatisticKind::OmegaQuotient),
            "big-omega-quotient" => Ok(StatisticKind::BigOmegaQuotient),
            "omega-diff" => Ok(StatisticKind::OmegaDifference),
            _ => Err(Error::Domain(format!(
                "unknown statistic {s:?}; expected omega-quotient, big-omega-quotient or omega-diff"
            ))),
        }
    }
}

/// The pair `F_a`, `H_a` and their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionFactors {
    /// Quadratic-entanglement correction `F_a(z)`.
    pub f: RationalFunction,
    /// Power-structure correction `H_a(z)` (one factor per prime `q | h`).
    pub h: RationalFunction,
    /// `F_a(z)·H_a(z)`.
    pub combined: RationalFunction,
}

fn br(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn br_u(u: &BigUint) -> BigRational {
    BigRational::from(BigInt::from(u.clone()))
}

/// `q^e` for signed `e`.
fn pow_signed(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num::pow::pow(q.clone(), e as usize)
    } else {
        BigRational::one() / num::pow::pow(q.clone(), (-e) as usize)
    }
}

fn poly(coeffs: Vec<BigRational>) -> Polynomial {
    Polynomial::from_coeffs(coeffs)
}

fn rf(num: Polynomial, den: Polynomial) -> RationalFunction {
    RationalFunction::new(num, den).expect("denominator is nonzero by construction")
}

/// `(z − 1)^k`.
fn z_minus_one_pow(k: usize) -> Polynomial {
    let mut acc = Polynomial::one();
    let zm1 = Polynomial::from_integers(&[-1, 1]);
    for _ in 0..k {
        acc = acc.mul(&zm1);
    }
    acc
}

/// Prime factors of `2b₀` (always including 2; `b₀` is squarefree).
fn primes_of_2b0(base: &BaseDecomposition) -> Vec<BigUint> {
    let mut qs = vec![BigUint::from(2u32)];
    for q in base.b0_primes() {
        if q != BigUint::from(2u32) {
            qs.push(q);
        }
    }
    qs
}

fn divides_h(base: &BaseDecomposition, q: &BigUint) -> bool {
    q.to_u64()
        .is_some_and(|q| q != 0 && (base.h as u64).is_multiple_of(q))
}

/// `ν_q(h)` for a prime `q`.
fn nu_q_of_h(base: &BaseDecomposition, q: &BigUint) -> u32 {
    match q.to_u64() {
        Some(q) if q >= 2 => {
            let mut h = base.h as u64;
            let mut nu = 0;
            while h.is_multiple_of(q) {
                h /= q;
                nu += 1;
            }
            nu
        }
        _ => 0,
    }
}

/// `sign(a)·b₀ ≡ r (mod 4)`?
fn signed_b0_mod4_is(base: &BaseDecomposition, r: u32) -> bool {
    let m = base.b0_mod4();
    let signed = if base.sign > 0 { m } else { (4 - m) % 4 };
    signed == r
}

/// `H_a(z)` for the `ω`-quotient statistic:
/// `∏_{q | h, q ≠ 2} q(z + q − 2)/(z + q² − q − 1)`.
fn omega_quotient_h(base: &BaseDecomposition) -> RationalFunction {
    let mut acc = RationalFunction::one();
    for q in base.h_primes() {
        if q == 2 {
            continue;
        }
        let q = br(q as i64);
        let num = poly(vec![&q * (&q - br(2)), q.clone()]);
        let den = poly(vec![&q * &q - &q - br(1), BigRational::one()]);
        acc = acc.mul(&rf(num, den));
    }
    acc
}

/// `F_a(z)` for the `ω`-quotient statistic.
fn omega_quotient_f(base: &BaseDecomposition) -> RationalFunction {
    if base.h.is_multiple_of(2) {
        return if base.sign > 0 {
            // a is a perfect square: 2z/(z + 1).
            rf(
                Polynomial::from_integers(&[0, 2]),
                Polynomial::from_integers(&[1, 1]),
            )
        } else {
            RationalFunction::one()
        };
    }
    if !signed_b0_mod4_is(base, 1) {
        return RationalFunction::one();
    }
    // f_a(z) = ∏_{q | 2b₀, q ∤ h} (z−1)/(z + q² − q − 1) ·
    //          ∏_{q | (b₀, h)} (z−1)/(z + q − 2).
    let mut f = RationalFunction::one();
    let zm1 = Polynomial::from_integers(&[-1, 1]);
    for q in primes_of_2b0(base) {
        let qr = br_u(&q);
        if !divides_h(base, &q) {
            let den = poly(vec![&qr * &qr - &qr - br(1), BigRational::one()]);
            f = f.mul(&rf(zm1.clone(), den));
        } else if (&base.b0 % &q).is_zero() {
            let den = poly(vec![&qr - br(2), BigRational::one()]);
            f = f.mul(&rf(zm1.clone(), den));
        }
    }
    RationalFunction::one().add(&f)
}

/// Numerator polynomial of the `Ω`-statistic `q`-factor at 2-adic depth `ν`:
/// `q⁴ − 2q³ + 2qz − z² − (z−1)(q−1)·zᵛ·q^{2−ν}`.
fn big_omega_local_numerator(q: &BigRational, nu: u32) -> Polynomial {
    let base = poly(vec![
        pow_signed(q, 4) - br(2) * pow_signed(q, 3),
        br(2) * q,
        -BigRational::one(),
    ]);
    let c = (q - BigRational::one()) * pow_signed(q, 2 - nu as i64);
    let shift =
        Polynomial::monomial(c.clone(), nu as usize + 1).sub(&Polynomial::monomial(c, nu as usize));
    base.sub(&shift)
}

/// `H_h(z)` for the `Ω` statistic.
fn big_omega_h(base: &BaseDecomposition) -> RationalFunction {
    let mut acc = RationalFunction::one();
    for q in base.h_primes() {
        let nu = nu_q_of_h(base, &BigUint::from(q));
        let q = br(q as i64);
        let num = big_omega_local_numerator(&q, nu);
        // (q − z)(z + q³ − q² − q)
        let den = poly(vec![q.clone(), -BigRational::one()]).mul(&poly(vec![
            pow_signed(&q, 3) - pow_signed(&q, 2) - &q,
            BigRational::one(),
        ]));
        acc = acc.mul(&rf(num, den));
    }
    acc
}

/// `I_h(γ, z)` for the `Ω` statistic; equals 1 when `γ = 1`.
fn big_omega_i(base: &BaseDecomposition) -> RationalFunction {
    if base.gamma.is_one() {
        return RationalFunction::one();
    }
    let gamma_primes: Vec<BigUint> = base
        .b0_primes()
        .into_iter()
        .filter(|q| *q != BigUint::from(2u32))
        .collect();
    let gamma = br_u(&base.gamma);
    let phi_gamma: BigRational = gamma_primes
        .iter()
        .map(|q| br_u(q) - BigRational::one())
        .product();
    let gcd_gamma_h = br_u(&base.gamma.gcd(&BigUint::from(base.h)));
    let mut acc = RationalFunction::from_poly(z_minus_one_pow(gamma_primes.len())).mul(
        &RationalFunction::constant(gcd_gamma_h / (&gamma * &phi_gamma)),
    );
    for q in &gamma_primes {
        let nu_h = nu_q_of_h(base, q);
        let nu_tail = nu_h.saturating_sub(1);
        let qr = br_u(q);
        let c = (&qr - BigRational::one()) * pow_signed(&qr, 1 - nu_tail as i64);
        let num = poly(vec![pow_signed(&qr, 3), -qr.clone()])
            .sub(&Polynomial::monomial(c, nu_tail as usize + 1))
            .scale(&(&qr - BigRational::one()));
        let den = big_omega_local_numerator(&qr, nu_h);
        acc = acc.mul(&rf(num, den));
    }
    acc
}

/// Two-adic weight `τ_±(a, z)` for the `Ω` statistic.
fn big_omega_tau(base: &BaseDecomposition) -> RationalFunction {
    let nu = base.nu2_h();
    let m4 = base.b0_mod4();
    let mono = |c: BigRational, k: usize| RationalFunction::from_poly(Polynomial::monomial(c, k));
    if base.sign > 0 {
        match (m4, nu) {
            (3, 0) => mono(BigRational::new(BigInt::one(), BigInt::from(2)), 1),
            (2, 0) => mono(BigRational::new(BigInt::one(), BigInt::from(8)), 2),
            (2, 1) => mono(BigRational::new(BigInt::one(), BigInt::from(4)), 2),
            _ => mono(pow_signed(&br(2), 1 - nu as i64), nu as usize),
        }
    } else {
        match (m4, nu) {
            (3, 0) => RationalFunction::constant(br(2)),
            (2, 0) => mono(BigRational::new(BigInt::one(), BigInt::from(8)), 2),
            (2, 1) => mono(BigRational::one(), 1),
            _ => mono(pow_signed(&br(2), -(nu as i64) - 1), nu as usize + 1),
        }
    }
}

/// `F_a(h, z)` for the `Ω` statistic.
fn big_omega_f(base: &BaseDecomposition) -> RationalFunction {
    let nu = base.nu2_h() as usize;
    let halfpow = Polynomial::monomial(pow_signed(&br(2), -(nu as i64)), nu);
    // 4z − z² − 4(z−1)(z/2)ᵛ
    let pref_den = poly(vec![BigRational::zero(), br(4), br(-1)])
        .sub(&halfpow.mul(&Polynomial::from_integers(&[-4, 4])));
    let pref_num = Polynomial::from_integers(&[-1, 1])
        .mul(&Polynomial::from_integers(&[-2, 1]))
        .mul(&Polynomial::from_integers(&[-4, 1]));
    let pref = rf(pref_num, pref_den);
    let inv_4_minus_z = rf(Polynomial::one(), Polynomial::from_integers(&[4, -1]));
    let entangled = inv_4_minus_z
        .mul(&big_omega_i(base))
        .mul(&big_omega_tau(base));
    let inner = if base.sign > 0 {
        entangled
    } else {
        let first = rf(
            Polynomial::one().sub(&halfpow),
            Polynomial::from_integers(&[-2, 1]),
        );
        first.add(&entangled)
    };
    RationalFunction::one().add(&pref.mul(&inner))
}

/// `H_h(z)` for the `ω`-difference statistic:
/// `∏_{q | h} (q² − 1 + (z−1)(q + 1 − q^{1−ν_q(h)}))/(z + q² − 2)`.
fn omega_diff_h(base: &BaseDecomposition) -> RationalFunction {
    let mut acc = RationalFunction::one();
    for q in base.h_primes() {
        let nu = nu_q_of_h(base, &BigUint::from(q));
        let q = br(q as i64);
        let t = &q + BigRational::one() - pow_signed(&q, 1 - nu as i64);
        let num = poly(vec![&q * &q - BigRational::one() - &t, t]);
        let den = poly(vec![&q * &q - br(2), BigRational::one()]);
        acc = acc.mul(&rf(num, den));
    }
    acc
}

/// `I_h(γ, z)` for the `ω`-difference statistic.
fn omega_diff_i(base: &BaseDecomposition) -> RationalFunction {
    if base.gamma.is_one() {
        return RationalFunction::one();
    }
    let gamma_primes: Vec<BigUint> = base
        .b0_primes()
        .into_iter()
        .filter(|q| *q != BigUint::from(2u32))
        .collect();
    let gcd_gamma_h = br_u(&base.gamma.gcd(&BigUint::from(base.h)));
    let mut acc = RationalFunction::from_poly(z_minus_one_pow(gamma_primes.len()))
        .mul(&RationalFunction::constant(gcd_gamma_h / br_u(&base.gamma)));
    for q in &gamma_primes {
        let nu_h = nu_q_of_h(base, q);
        let nu_tail = nu_h.saturating_sub(1);
        let qr = br_u(q);
        let num =
            Polynomial::constant(&qr + BigRational::one() - pow_signed(&qr, -(nu_tail as i64)));
        let t = &qr + BigRational::one() - pow_signed(&qr, 1 - nu_h as i64);
        let den = poly(vec![&qr * &qr - BigRational::one() - &t, t]);
        acc = acc.mul(&rf(num, den));
    }
    acc
}

/// Two-adic weight `τ_±(a)` for the `ω`-difference statistic (a constant).
fn omega_diff_tau(base: &BaseDecomposition) -> BigRational {
    let nu = base.nu2_h();
    let m4 = base.b0_mod4();
    if base.sign > 0 {
        match (m4, nu) {
            (3, 0) => BigRational::new(BigInt::from(-1), BigInt::from(2)),
            (2, 0) => BigRational::new(BigInt::from(-1), BigInt::from(8)),
            (2, 1) => BigRational::new(BigInt::from(-1), BigInt::from(4)),
            _ => pow_signed(&br(2), -(nu as i64)),
        }
    } else {
        match (m4, nu) {
            (3, 0) => BigRational::one(),
            (2, 0) => BigRational::new(BigInt::from(-1), BigInt::from(8)),
            (2, 1) => BigRational::new(BigInt::one(), BigInt::from(2)),
            _ => -pow_signed(&br(2), -(nu as i64) - 1),
        }
    }
}

/// `F_a(h, z)` for the `ω`-difference statistic.
fn omega_diff_f(base: &BaseDecomposition) -> RationalFunction {
    let nu = base.nu2_h();
    // 1 + (z−1)(1 − 2^{1−ν}/3)
    let t = BigRational::one() - pow_signed(&br(2), 1 - nu as i64) / br(3);
    let gden = poly(vec![BigRational::one() - &t, t]);
    let pref = rf(Polynomial::from_integers(&[-1, 1]), gden);
    let third = RationalFunction::constant(BigRational::new(BigInt::one(), BigInt::from(3)));
    let entangled = third
        .mul(&omega_diff_i(base))
        .mul(&RationalFunction::constant(omega_diff_tau(base)));
    let inner = if base.sign > 0 {
        entangled
    } else {
        RationalFunction::constant(pow_signed(&br(2), -(nu as i64)) - BigRational::one())
            .add(&entangled)
    };
    RationalFunction::one().add(&pref.mul(&inner))
}

/// The correction pair `(F_a, H_a)` for `statistic`, exactly.
pub fn correction_factors(
    base: &BaseDecomposition,
    statistic: StatisticKind,
) -> Result<CorrectionFactors> {
    let (f, h) = match statistic {
        StatisticKind::OmegaQuotient => (omega_quotient_f(base), omega_quotient_h(base)),
        StatisticKind::BigOmegaQuotient => (big_omega_f(base), big_omega_h(base)),
        StatisticKind::OmegaDifference => (omega_diff_f(base), omega_diff_h(base)),
    };
    let one = BigRational::one();
    if f.evaluate(&one)? != one || h.evaluate(&one)? != one {
        return Err(Error::Internal(format!(
            "correction factors for a = {}, {} do not normalise to 1 at z = 1",
            base.a, statistic
        )));
    }
    let combined = f.mul(&h);
    Ok(CorrectionFactors { f, h, combined })
}

/// `H_h(z)` and `I_h(γ, z)` of the `Ω` statistic, exposed for the exact
/// evaluation of the decay constant at `z = 4`.
pub fn big_omega_parts(base: &BaseDecomposition) -> (RationalFunction, RationalFunction) {
    (big_omega_h(base), big_omega_i(base))
}

/// The classical primitive-root density factor: the constant `F_a·H_a`
/// multiplying Artin's constant in the density of primes for which `a` is a
/// primitive root.  Zero exactly when `a` is a perfect square.
pub fn classical_artin_factor(base: &BaseDecomposition) -> Result<BigRational> {
    let (_, disc) = kernel_and_discriminant(&base.a)?;
    let four = BigInt::from(4);
    let f = if ((&disc % &four) + &four) % &four == BigInt::one() {
        // 𝔡(a) ≡ 1 mod 4 (so 𝔡 is odd and squarefree here).
        let mut prod = BigRational::one();
        for (q, _) in crate::base::factor_biguint(disc.magnitude()) {
            let qr = br_u(&q);
            prod *= if divides_h(base, &q) {
                -BigRational::one() / (&qr - br(2))
            } else {
                -BigRational::one() / (&qr * &qr - &qr - BigRational::one())
            };
        }
        BigRational::one() - prod
    } else {
        BigRational::one()
    };
    let mut h_factor = BigRational::one();
    for q in base.h_primes() {
        if base.sign < 0 && base.h.is_multiple_of(2) && q == 2 {
            continue;
        }
        let q = br(q as i64);
        h_factor *= (&q * &q - br(2) * &q) / (&q * &q - &q - BigRational::one());
    }
    Ok(f * h_factor)
}

/// Exact Taylor coefficients `c₀, …, c_N` of `rf` at `z = 0`.
pub fn taylor_coefficients(rf: &RationalFunction, n_max: usize) -> Result<Vec<BigRational>> {
    rf.taylor(n_max)
}

/// Exact derivative of `rf` at the point `z`.
pub fn derivative_at(rf: &RationalFunction, z: &BigRational) -> Result<BigRational> {
    rf.derivative_at(z)
}

/// Exact value of `rf` at the point `z`.
pub fn evaluate(rf: &RationalFunction, z: &BigRational) -> Result<BigRational> {
    rf.evaluate(z)
}
