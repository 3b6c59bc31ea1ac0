//! Randomised and exhaustive invariants across the public API.

use num::{BigInt, BigRational, One, Signed, Zero};
use proptest::prelude::*;

use artin_core::{
    correction_factors, decompose, epsilon, kernel_and_discriminant, kummer_degree,
    multiplicative_order, prime_factor_counts, primes_up_to_with_spf, rational, DegreeQuery,
    EpsilonValue, Polynomial, RationalFunction, StatisticKind,
};

fn big(n: i64) -> BigRational {
    rational(n)
}

fn pow_signed(base: &BigRational, sign: i32, h: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..h {
        out *= base;
    }
    if sign < 0 {
        -out
    } else {
        out
    }
}

fn euler_phi(mut n: u64) -> u64 {
    let mut phi = 1;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            phi *= q - 1;
            n /= q;
            while n.is_multiple_of(q) {
                phi *= q;
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

proptest! {
    /// Decomposing and recomposing is the identity: `a = sign·a₀ʰ` exactly.
    #[test]
    fn decomposition_recomposes_exactly(num in -1_000_000i64..=1_000_000, den in 1i64..=1_000_000) {
        prop_assume!(num != 0);
        let a = BigRational::new(BigInt::from(num), BigInt::from(den));
        prop_assume!(a.abs() != BigRational::one());
        let base = decompose(&a).unwrap();
        prop_assert_eq!(pow_signed(&base.a0, base.sign, base.h), a.clone());
        prop_assert!(base.a0.is_positive());
        prop_assert!(base.h >= 1);
        // a₀ = b₀·c₀² with b₀ the squarefree kernel.
        let b0 = BigRational::from(BigInt::from(base.b0.clone()));
        prop_assert_eq!(b0 * &base.c0 * &base.c0, base.a0.clone());
    }

    /// `g·s(g)` is the square of a rational and `s(g)` is squarefree.
    #[test]
    fn kernel_makes_squares(num in -100_000i64..=100_000, den in 1i64..=100_000) {
        prop_assume!(num != 0);
        let g = BigRational::new(BigInt::from(num), BigInt::from(den));
        let (s, d) = kernel_and_discriminant(&g).unwrap();
        let product = &g * BigRational::from(s.clone());
        // A rational is a square iff its reduced numerator and denominator are.
        let is_square = |n: &BigInt| n.sqrt().pow(2) == *n;
        prop_assert!(product.is_positive() || product.is_zero());
        prop_assert!(is_square(product.numer()));
        prop_assert!(is_square(product.denom()));
        let mag = s.magnitude();
        for q in 2u32..=316 {
            let q2 = num::BigUint::from(q * q);
            prop_assert!(!(mag % &q2).is_zero() || mag < &q2);
        }
        // 𝔡(g) ≡ 1 (mod 4) as an integer residue, or 𝔡(g) = 4s(g).
        let one_mod_4 = ((&d % 4i32) + 4i32) % 4i32 == BigInt::one();
        prop_assert!(one_mod_4 || d == s * 4);
    }

    /// Orders divide p−1 and no smaller exponent works.
    #[test]
    fn orders_divide_and_are_minimal(a in -50i64..=50, p_index in 0usize..100) {
        prop_assume!(a != 0 && a != 1 && a != -1);
        let table = primes_up_to_with_spf(1000).unwrap();
        let p = table.primes[p_index % table.primes.len()];
        let a_rat = big(a);
        if a % p as i64 == 0 {
            prop_assert!(multiplicative_order(&a_rat, p, &table.factor(p - 1).unwrap()).is_err());
            return Ok(());
        }
        let factors = table.factor(p - 1).unwrap();
        let ord = multiplicative_order(&a_rat, p, &factors).unwrap();
        prop_assert_eq!((p - 1) % ord, 0);
        let a_mod = (((a % p as i64) + p as i64) % p as i64) as u64;
        let mut power = 1u64;
        for k in 1..ord {
            power = power * a_mod % p;
            prop_assert_ne!(power, 1, "a^{} ≡ 1 below the order", k);
        }
        prop_assert_eq!(power * a_mod % p, 1);
    }

    /// Reduction to canonical form is idempotent and quotient-invariant.
    #[test]
    fn rational_function_canonical_form_is_stable(
        num_coeffs in prop::collection::vec(-9i64..=9, 1..5),
        den_coeffs in prop::collection::vec(-9i64..=9, 1..5),
        scale_coeffs in prop::collection::vec(-9i64..=9, 1..3),
    ) {
        let num = Polynomial::from_integers(&num_coeffs);
        let den = Polynomial::from_integers(&den_coeffs);
        let scale = Polynomial::from_integers(&scale_coeffs);
        prop_assume!(!den.is_zero() && !scale.is_zero());
        let reduced = RationalFunction::new(num.clone(), den.clone()).unwrap();
        let scaled = RationalFunction::new(num.mul(&scale), den.mul(&scale)).unwrap();
        prop_assert_eq!(&scaled, &reduced);
        let twice = RationalFunction::new(reduced.num().clone(), reduced.den().clone()).unwrap();
        prop_assert_eq!(&twice, &reduced);
    }

    /// Maclaurin coefficients of F·H, re-multiplied by the denominator,
    /// reproduce the numerator modulo z^{N+1}.
    #[test]
    fn taylor_times_denominator_recovers_numerator(a in -60i64..=60, stat_index in 0usize..3) {
        prop_assume!(a != 0 && a != 1 && a != -1);
        let statistic = StatisticKind::ALL[stat_index];
        let base = decompose(&big(a)).unwrap();
        let combined = correction_factors(&base, statistic).unwrap().combined;
        let n_max = 7usize;
        let taylor = combined.taylor(n_max).unwrap();
        let series = Polynomial::from_coeffs(taylor);
        let product = series.mul(combined.den());
        for k in 0..=n_max {
            prop_assert_eq!(
                product.coeff(k),
                combined.num().coeff(k),
                "coefficient of z^{} for a = {}, {}", k, a, statistic
            );
        }
    }

    /// Kummer degrees: divisibility, the ε-scaled closed form, and the
    /// unentangled positive case.
    #[test]
    fn kummer_degree_matches_epsilon_formula(a in -60i64..=60, ell in 1u64..=30, m in 1u64..=30) {
        prop_assume!(a != 0 && a != 1 && a != -1);
        let base = decompose(&big(a)).unwrap();
        let h = u64::from(base.h);
        let query = DegreeQuery::new(base, ell, m).unwrap();
        let eps = epsilon(&query);
        let degree = kummer_degree(&query).unwrap();
        let ell_prime = ell / num::integer::gcd(ell, h);
        let naive = ell_prime * euler_phi(m * ell);
        match eps {
            EpsilonValue::Half => prop_assert_eq!(degree, 2 * naive),
            EpsilonValue::One => prop_assert_eq!(degree, naive),
            EpsilonValue::Two => {
                prop_assert_eq!(degree * 2, naive);
            }
        }
        prop_assert_eq!(ell * euler_phi(m * ell) % degree, 0, "degree divides ℓ·φ(mℓ)");
        if a > 0 && ell_prime % 2 == 1 {
            prop_assert_eq!(eps, EpsilonValue::One);
        }
    }
}

/// ω and Ω against naive trial division, exhaustively to 10⁵.
#[test]
fn factor_counts_match_naive_recomputation() {
    for n in 1u64..=100_000 {
        let (omega, big_omega) = prime_factor_counts(n).unwrap();
        let mut m = n;
        let mut q = 2;
        let (mut naive_omega, mut naive_big_omega) = (0u32, 0u32);
        while q * q <= m {
            if m % q == 0 {
                naive_omega += 1;
                while m % q == 0 {
                    naive_big_omega += 1;
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            naive_omega += 1;
            naive_big_omega += 1;
        }
        assert_eq!(
            (omega, big_omega),
            (naive_omega, naive_big_omega),
            "n = {n}"
        );
    }
}
