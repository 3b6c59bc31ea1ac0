//! Exact arithmetic on rational bases.
//!
//! A rational `a ∉ {−1, 0, 1}` decomposes uniquely as `a = sign · a₀ʰ` where
//! `a₀ > 0` is not a perfect power and `h` is the gcd of the exponents in the
//! prime factorisation of `|a|`.  Writing `a₀ = b₀·c₀²` with `b₀` squarefree,
//! the quantities `b₀`, `γ = b₀/(2, b₀)` and the discriminants
//! `𝔡(±a₀), 𝔡(2a₀)` of the associated quadratic fields drive every correction
//! factor and field-degree formula in the other modules.
//!
//! The module also provides the shared integer toolkit: deterministic 64-bit
//! primality, factorisation (trial division up to 10⁶, then Brent's variant
//! of Pollard rho), prime sieves, and multiplicative orders computed by
//! descent from `p − 1` through its prime factorisation.

use std::sync::OnceLock;

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division bound used before switching to Pollard rho.
const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Default memory budget for sieve tables (bytes).
const SIEVE_BUDGET_BYTES: usize = 1 << 30;

/// `a = sign · a₀ʰ` together with the derived quadratic data.
///
/// Produced by [`decompose`]; the fields satisfy `a₀ = b₀·c₀²` with `b₀`
/// squarefree, and `γ = b₀/(2, b₀)` is the odd part of `b₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseDecomposition {
    /// The original base, in lowest terms.
    pub a: BigRational,
    /// `+1` or `−1`.
    pub sign: i32,
    /// Positive rational that is not a perfect power.
    pub a0: BigRational,
    /// Largest `h` with `|a| = a₀ʰ`; equivalently the gcd of all prime
    /// exponents of `|a|`.
    pub h: u32,
    /// Squarefree part of `a₀` (product of primes appearing to odd exponent).
    pub b0: BigUint,
    /// Positive rational with `a₀ = b₀·c₀²`.
    pub c0: BigRational,
    /// Odd part `b₀/(2, b₀)` of `b₀`.
    pub gamma: BigUint,
    /// Discriminant `𝔡(a₀)` of `ℚ(√a₀)`.
    pub disc_a0: BigInt,
    /// Discriminant `𝔡(−a₀)` of `ℚ(√−a₀)`.
    pub disc_neg_a0: BigInt,
    /// Discriminant `𝔡(2a₀)` of `ℚ(√2a₀)`.
    pub disc_2a0: BigInt,
}

impl BaseDecomposition {
    /// `ν₂(h)`.
    pub fn nu2_h(&self) -> u32 {
        self.h.trailing_zeros()
    }

    /// Prime factors of `h` in increasing order.
    pub fn h_primes(&self) -> Vec<u64> {
        factor_u64(self.h as u64)
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }

    /// Prime factors of `b₀` in increasing order (`b₀` is squarefree).
    pub fn b0_primes(&self) -> Vec<BigUint> {
        factor_biguint(&self.b0)
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }

    /// `b₀ mod 4` as a small integer (1, 2 or 3; `b₀` is squarefree).
    pub fn b0_mod4(&self) -> u32 {
        (&self.b0 % 4u32).to_u32().unwrap()
    }
}

/// Sorted primes up to `limit`, with an optional smallest-prime-factor table.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    /// Inclusive sieve bound.
    pub limit: u64,
    /// All primes `≤ limit` in increasing order.
    pub primes: Vec<u64>,
    /// `spf[n]` = smallest prime factor of `n` for `2 ≤ n ≤ limit`.
    pub spf: Option<Vec<u32>>,
}

impl PrimeTable {
    /// Membership test via binary search.
    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && self.primes.binary_search(&n).is_ok()
    }

    /// Factorisation of `n ≤ limit` by walking the smallest-prime-factor
    /// table; requires the table to be present.
    pub fn factor(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 || n > self.limit {
            return Err(Error::Domain(format!(
                "{n} outside table range 1..={}",
                self.limit
            )));
        }
        let spf = self
            .spf
            .as_ref()
            .ok_or_else(|| Error::Domain("prime table built without spf".into()))?;
        let mut n = n as usize;
        let mut out = Vec::new();
        while n > 1 {
            let p = spf[n] as u64;
            let mut e = 0u32;
            while (n as u64).is_multiple_of(p) {
                n /= p as usize;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }
}

/// Sieve of Eratosthenes up to `limit` inclusive.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    sieve(limit, false)
}

/// Like [`primes_up_to`], additionally building the smallest-prime-factor
/// table used to factor arbitrary `n ≤ limit`.
pub fn primes_up_to_with_spf(limit: u64) -> Result<PrimeTable> {
    sieve(limit, true)
}

fn sieve(limit: u64, want_spf: bool) -> Result<PrimeTable> {
    let bitmap_bytes = (limit as usize) / 8 + 1;
    let spf_bytes = if want_spf {
        4 * (limit as usize + 1)
    } else {
        0
    };
    if bitmap_bytes + spf_bytes > SIEVE_BUDGET_BYTES {
        return Err(Error::Resource(format!(
            "sieve to {limit} needs {} bytes, budget is {SIEVE_BUDGET_BYTES}",
            bitmap_bytes + spf_bytes
        )));
    }
    if want_spf && limit > u32::MAX as u64 {
        return Err(Error::Resource(format!(
            "spf table limited to 2³²−1, got {limit}"
        )));
    }

    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut spf = if want_spf {
        vec![0u32; n + 1]
    } else {
        Vec::new()
    };
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            if want_spf {
                spf[i] = i as u32;
            }
            let mut j = i * i;
            while j <= n {
                if !composite[j] {
                    composite[j] = true;
                    if want_spf {
                        spf[j] = i as u32;
                    }
                }
                j += i;
            }
        }
    }
    Ok(PrimeTable {
        limit,
        primes,
        spf: want_spf.then_some(spf),
    })
}

/// `base^exp mod m` with 128-bit intermediates; `m ≥ 1`.
pub(crate) fn powmod_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        let mut r = d;
        while r != n - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            r <<= 1;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle variant of Pollard rho; `n` must be odd, composite and not
/// a prime power smaller than the trial bound.
fn rho_u64(n: u64) -> u64 {
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    for c in 1..64u64 {
        let f = |x: u64| (mul(x, x) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("pollard rho exhausted increments on {n}");
}

/// Factorisation of `n ≥ 1` as sorted `(prime, exponent)` pairs.
pub(crate) fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5] {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    // 30-wheel over candidates coprime to 2·3·5.
    let mut p = 7u64;
    let wheel = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut w = 0;
    while p <= TRIAL_DIVISION_BOUND && p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += wheel[w];
        w = (w + 1) % 8;
    }
    let mut stack = Vec::new();
    if n > 1 {
        if p * p > n {
            out.push((n, 1));
        } else {
            stack.push(n);
        }
    }
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            match out.iter_mut().find(|(q, _)| *q == m) {
                Some((_, e)) => *e += 1,
                None => out.push((m, 1)),
            }
            continue;
        }
        let d = rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

fn trial_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        primes_up_to(TRIAL_DIVISION_BOUND)
            .expect("fixed bound")
            .primes
    })
}

/// Miller–Rabin on arbitrary-size naturals; deterministic below 2⁶⁴, and a
/// fixed strong-base test above it.
fn is_prime_biguint(n: &BigUint) -> bool {
    if let Some(n64) = n.to_u64() {
        return is_prime_u64(n64);
    }
    let one = BigUint::one();
    let two = &one + &one;
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [
        2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    ] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_biguint(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    for c in 1u64..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
    }
    unreachable!("pollard rho exhausted increments");
}

/// Factorisation of an arbitrary-size natural `n ≥ 1`.
pub(crate) fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u64)> {
    if let Some(n64) = n.to_u64() {
        return factor_u64(n64)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e as u64))
            .collect();
    }
    let mut out: Vec<(BigUint, u64)> = Vec::new();
    let mut n = n.clone();
    for &p in trial_primes() {
        let pb = BigUint::from(p);
        if (&n % &pb).is_zero() {
            let mut e = 0u64;
            while (&n % &pb).is_zero() {
                n /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
        if n.is_one() {
            break;
        }
    }
    let mut stack = Vec::new();
    if !n.is_one() {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if is_prime_biguint(&m) {
            match out.iter_mut().find(|(q, _)| *q == m) {
                Some((_, e)) => *e += 1,
                None => out.push((m, 1)),
            }
            continue;
        }
        let d = rho_biguint(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort_unstable();
    out
}

/// Signed prime exponents of a nonzero rational, sorted by prime.
fn rational_exponents(a: &BigRational) -> Vec<(BigUint, i64)> {
    let mut exps: Vec<(BigUint, i64)> = factor_biguint(a.numer().magnitude())
        .into_iter()
        .map(|(p, e)| (p, e as i64))
        .collect();
    for (p, e) in factor_biguint(a.denom().magnitude()) {
        match exps.iter_mut().find(|(q, _)| *q == p) {
            Some((_, x)) => *x -= e as i64,
            None => exps.push((p, -(e as i64))),
        }
    }
    exps.retain(|(_, e)| *e != 0);
    exps.sort_unstable();
    exps
}

fn rational_from_exponents(exps: &[(BigUint, i64)]) -> BigRational {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (p, e) in exps {
        if *e > 0 {
            num *= p.pow(*e as u32);
        } else {
            den *= p.pow((-*e) as u32);
        }
    }
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Squarefree kernel `s(g)` and field discriminant `𝔡(g)` of a nonzero
/// rational `g`.
///
/// `s(g)` carries the sign of `g` and the product of the primes appearing to
/// odd exponent, so that `g·s(g)` is a square; `𝔡(g) = s(g)` when
/// `s(g) ≡ 1 mod 4` and `4s(g)` otherwise.
pub fn kernel_and_discriminant(g: &BigRational) -> Result<(BigInt, BigInt)> {
    if g.is_zero() {
        return Err(Error::Domain("kernel of 0 is undefined".into()));
    }
    let mut s = BigInt::one();
    for (p, e) in rational_exponents(g) {
        if e % 2 != 0 {
            s *= BigInt::from(p);
        }
    }
    if g.is_negative() {
        s = -s;
    }
    let four = BigInt::from(4);
    let disc = if ((&s % &four) + &four) % &four == BigInt::one() {
        s.clone()
    } else {
        &four * &s
    };
    Ok((s, disc))
}

/// Decompose `a = sign · a₀ʰ` per the module-level conventions.
///
/// Errors with [`Error::Domain`] for `a ∈ {−1, 0, 1}`.
pub fn decompose(a: &BigRational) -> Result<BaseDecomposition> {
    if a.is_zero() || a.abs().is_one() {
        return Err(Error::Domain(format!(
            "base {} admits no power decomposition",
            a
        )));
    }
    let exps = rational_exponents(a);
    let h = exps.iter().fold(0u64, |g, (_, e)| g.gcd(&e.unsigned_abs()));
    let h = u32::try_from(h).map_err(|_| Error::Resource("exponent gcd exceeds u32".into()))?;

    let root: Vec<(BigUint, i64)> = exps
        .iter()
        .map(|(p, e)| (p.clone(), e / h as i64))
        .collect();
    let a0 = rational_from_exponents(&root);

    let mut b0 = BigUint::one();
    let mut c0_exps = Vec::new();
    for (p, e) in &root {
        let odd = e.rem_euclid(2);
        if odd == 1 {
            b0 *= p;
        }
        let half = (e - odd) / 2;
        if half != 0 {
            c0_exps.push((p.clone(), half));
        }
    }
    let c0 = rational_from_exponents(&c0_exps);
    let gamma = if (&b0 % 2u32).is_zero() {
        &b0 / 2u32
    } else {
        b0.clone()
    };

    let (_, disc_a0) = kernel_and_discriminant(&a0)?;
    let (_, disc_neg_a0) = kernel_and_discriminant(&-a0.clone())?;
    let (_, disc_2a0) = kernel_and_discriminant(&(&a0 * BigRational::from(BigInt::from(2))))?;

    Ok(BaseDecomposition {
        a: a.clone(),
        sign: if a.is_negative() { -1 } else { 1 },
        a0,
        h,
        b0,
        c0,
        gamma,
        disc_a0,
        disc_neg_a0,
        disc_2a0,
    })
}

/// `ν_p(a)`: the (signed) exponent of the prime `p` in `a ≠ 0`.
pub fn nu_p(a: &BigRational, p: u64) -> Result<i64> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("ν_p requires prime p, got {p}")));
    }
    if a.is_zero() {
        return Err(Error::Domain("ν_p(0) is undefined".into()));
    }
    let pb = BigUint::from(p);
    let count = |mut n: BigUint| {
        let mut e = 0i64;
        while !n.is_zero() && (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        e
    };
    Ok(count(a.numer().magnitude().clone()) - count(a.denom().magnitude().clone()))
}

/// `(ω(n), Ω(n))`: distinct and with-multiplicity prime factor counts of
/// `n ≥ 1`.
pub fn prime_factor_counts(n: u64) -> Result<(u32, u32)> {
    if n == 0 {
        return Err(Error::Domain(
            "prime factor counts of 0 are undefined".into(),
        ));
    }
    let f = factor_u64(n);
    Ok((f.len() as u32, f.iter().map(|(_, e)| e).sum()))
}

/// Residue of the rational `a` modulo the prime `p`, via a Fermat inverse of
/// the denominator; errors when `ν_p(a) ≠ 0`.
pub(crate) fn rational_mod_p(a: &BigRational, p: u64) -> Result<u64> {
    let num = (a.numer().magnitude() % BigUint::from(p)).to_u64().unwrap();
    let den = (a.denom().magnitude() % BigUint::from(p)).to_u64().unwrap();
    if den == 0 || num == 0 {
        return Err(Error::Domain(format!(
            "ν_{p}({a}) ≠ 0: base degenerates modulo {p}"
        )));
    }
    let num = if a.numer().sign() == Sign::Minus {
        p - num
    } else {
        num
    };
    Ok(((num as u128 * powmod_u64(den, p - 2, p) as u128) % p as u128) as u64)
}

/// Multiplicative order of `a` modulo the prime `p`, given the factorisation
/// of `p − 1`.
///
/// Starts from `d = p − 1` and, for each prime `q | p − 1`, divides `d` by
/// `q` while `a^{d/q} ≡ 1 mod p`; the surviving `d` is the order.
pub fn multiplicative_order(a: &BigRational, p: u64, p_minus_1: &[(u64, u32)]) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("order modulo composite {p}")));
    }
    let reconstructed: u128 = p_minus_1
        .iter()
        .fold(1u128, |acc, (q, e)| acc * (*q as u128).pow(*e));
    if reconstructed != (p - 1) as u128 {
        return Err(Error::Internal(format!(
            "claimed factorisation does not multiply to {}",
            p - 1
        )));
    }
    let a_mod = rational_mod_p(a, p)?;
    let mut d = p - 1;
    for &(q, e) in p_minus_1 {
        for _ in 0..e {
            if powmod_u64(a_mod, d / q, p) == 1 {
                d /= q;
            } else {
                break;
            }
        }
    }
    Ok(d)
}

/// Parse a rational from `"n"` or `"n/d"` decimal notation.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Domain(format!("cannot parse integer from {t:?}")))
    };
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Domain("zero denominator".into()));
            }
            BigRational::new(parse_int(n)?, den)
        }
        None => BigRational::from(parse_int(s)?),
    };
    Ok(r)
}

/// Canonical `"n"` / `"n/d"` rendering of a rational in lowest terms.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Convenience constructor for integer bases.
pub fn rational(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}
