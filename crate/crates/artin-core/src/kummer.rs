//! Degrees of the cyclotomic–Kummer extensions `ℚ(a^{1/ℓ}, ζ_{mℓ})`.
//!
//! For `a = ±a₀ʰ` and `ℓ′ = ℓ/(ℓ, h)` the degree is
//!
//! ```text
//! [ℚ(a^{1/ℓ}, ζ_{mℓ}) : ℚ] = ℓ′·φ(mℓ) / ε_a(mℓ, ℓ)
//! ```
//!
//! where the entanglement correction `ε_a(mℓ, ℓ) ∈ {1/2, 1, 2}` records
//! whether the quadratic subfield `ℚ(√a₀)` (or, for negative bases, `ℚ(√−a₀)`
//! or `ℚ(√2a₀)`) already lies inside `ℚ(ζ_{mℓ})`, and whether adjoining an
//! even root of a negative number halves the cyclotomic part.  Divisibility
//! tests `𝔡 | mℓ` are performed on `|𝔡|`.

use num::{BigInt, Signed, ToPrimitive};

use crate::base::{factor_u64, BaseDecomposition};
use crate::error::{Error, Result};

/// A degree request for `ℚ(a^{1/ℓ}, ζ_{mℓ})`.
#[derive(Debug, Clone)]
pub struct DegreeQuery {
    /// Decomposition of the base `a`.
    pub base: BaseDecomposition,
    /// Root exponent `ℓ ≥ 1`.
    pub ell: u64,
    /// Extra cyclotomic multiplier `m ≥ 1` (the field contains `ζ_{mℓ}`).
    pub m: u64,
    /// `ℓ′ = ℓ/(ℓ, h)`.
    pub ell_prime: u64,
}

impl DegreeQuery {
    /// Build a query, computing `ℓ′ = ℓ/(ℓ, h)`.
    pub fn new(base: BaseDecomposition, ell: u64, m: u64) -> Result<Self> {
        if ell == 0 || m == 0 {
            return Err(Error::Domain(format!(
                "ℓ = {ell}, m = {m} must be positive"
            )));
        }
        let ell_prime = ell / gcd_u64(ell, base.h as u64);
        Ok(DegreeQuery {
            base,
            ell,
            m,
            ell_prime,
        })
    }
}

/// The entanglement correction `ε_a(mℓ, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonValue {
    /// `ε = 1/2`: the naive degree doubles.
    Half,
    /// `ε = 1`: no entanglement.
    One,
    /// `ε = 2`: the quadratic subfield is already cyclotomic.
    Two,
}

impl std::fmt::Display for EpsilonValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsilonValue::Half => write!(f, "1/2"),
            EpsilonValue::One => write!(f, "1"),
            EpsilonValue::Two => write!(f, "2"),
        }
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn divides(disc: &BigInt, n: u64) -> bool {
    let d = disc.abs().to_u64();
    match d {
        Some(d) if d != 0 => n.is_multiple_of(d),
        _ => false,
    }
}

/// Evaluate `ε_a(mℓ, ℓ)` by the case table on `sign(a)`, the 2-adic
/// valuations of `ℓ` and `h`, the parity of `m`, and the discriminant
/// divisibility tests.
pub fn epsilon(q: &DegreeQuery) -> EpsilonValue {
    let b = &q.base;
    let ml = q.m.saturating_mul(q.ell);
    let nu2_ell = q.ell.trailing_zeros();
    let nu2_ellp = nu2_ell.saturating_sub(b.nu2_h());

    if b.sign > 0 {
        return if nu2_ellp >= 1 && divides(&b.disc_a0, ml) {
            EpsilonValue::Two
        } else {
            EpsilonValue::One
        };
    }

    // a < 0 from here on.
    if q.ell % 2 == 1 {
        return EpsilonValue::One;
    }
    if nu2_ellp == 0 {
        // ℓ even, ℓ′ odd: ζ_{2ℓ'} issues arise only for odd m.
        return if q.m.is_multiple_of(2) {
            EpsilonValue::One
        } else {
            EpsilonValue::Half
        };
    }
    if nu2_ellp == 1 {
        let two = if q.m.is_multiple_of(2) {
            divides(&b.disc_a0, ml)
        } else {
            (q.ell % 8 == 2 && divides(&b.disc_neg_a0, ml))
                || (q.ell % 8 == 4 && divides(&b.disc_2a0, ml))
        };
        return if two {
            EpsilonValue::Two
        } else {
            EpsilonValue::One
        };
    }
    // 4 | ℓ′.
    if divides(&b.disc_a0, ml) {
        EpsilonValue::Two
    } else {
        EpsilonValue::One
    }
}

/// Euler totient of `n ≥ 1`.
fn phi_u64(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `[ℚ(a^{1/ℓ}, ζ_{mℓ}) : ℚ] = ℓ′·φ(mℓ)/ε_a(mℓ, ℓ)` as an exact integer.
pub fn kummer_degree(q: &DegreeQuery) -> Result<u64> {
    let ml =
        q.m.checked_mul(q.ell)
            .ok_or_else(|| Error::Resource(format!("mℓ = {}·{} overflows u64", q.m, q.ell)))?;
    let raw = q
        .ell_prime
        .checked_mul(phi_u64(ml))
        .ok_or_else(|| Error::Resource(format!("ℓ′φ(mℓ) overflows u64 for mℓ = {ml}")))?;
    match epsilon(q) {
        EpsilonValue::Half => raw
            .checked_mul(2)
            .ok_or_else(|| Error::Resource(format!("degree overflows u64 for mℓ = {ml}"))),
        EpsilonValue::One => Ok(raw),
        EpsilonValue::Two => {
            if raw % 2 != 0 {
                return Err(Error::Internal(format!(
                    "ε = 2 but ℓ′φ(mℓ) = {raw} is odd for ℓ = {}, m = {}",
                    q.ell, q.m
                )));
            }
            Ok(raw / 2)
        }
    }
}
