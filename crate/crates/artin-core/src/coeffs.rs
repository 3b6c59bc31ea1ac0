//! Numerical engine for the density coefficients: prime sums `S̃(n)`,
//! uncorrected coefficients `D(n)` (by recursion, with the partition formula
//! as an independent oracle), corrected densities `D_a(n)`, expectations, and
//! the `Ω`-statistic decay constant `R_a`.
//!
//! All prime sums and products are accumulated in double-double precision
//! (roughly 31 significant digits).  The `F_a·H_a` Taylor coefficients stay
//! exact rationals until the single float conversion in the final
//! convolution.  Every returned value carries a conservative upper bound for
//! the contribution of the primes beyond the cutoff.

use num::{BigRational, One, Signed, ToPrimitive};

use crate::base::{primes_up_to, primes_up_to_with_spf, BaseDecomposition};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::genfun::{self, StatisticKind};
use crate::kummer::{kummer_degree, DegreeQuery};

/// Relative double-double accumulation noise folded into error estimates.
const DD_NOISE: f64 = 1e-25;

/// Largest coefficient order served; the tail bounds and the decay checks
/// are validated only up to here.
pub const MAX_COEFFICIENT_ORDER: usize = 12;

/// Prime cutoffs for the truncated sums: one bound for the heavy objects
/// (`D(0)`, `S̃(1)`, expectations) and one for the fast-converging `S̃(n)`,
/// `n ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoffs {
    /// Bound for `D(0)` Euler products, `S̃(1)` and expectation sums.
    pub n_le_1: u64,
    /// Bound for `S̃(n)` with `n ≥ 2`.
    pub n_ge_2: u64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs {
            n_le_1: 1_000_000,
            n_ge_2: 100_000,
        }
    }
}

impl Cutoffs {
    /// The same bound everywhere.
    pub fn uniform(cutoff: u64) -> Self {
        Cutoffs {
            n_le_1: cutoff,
            n_ge_2: cutoff,
        }
    }

    /// Bound used for the order-`n` object.
    pub fn for_n(&self, n: usize) -> u64 {
        if n <= 1 {
            self.n_le_1
        } else {
            self.n_ge_2
        }
    }
}

/// A truncated prime sum `S̃(n)` together with a rigorous tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub statistic: StatisticKind,
    pub n: usize,
    pub cutoff: u64,
    pub value: f64,
    /// Upper bound for the omitted `Σ over q > cutoff`, plus accumulation
    /// noise.  Always positive.
    pub tail_bound: f64,
}

/// Coefficients `D(n)` (uncorrected, `a = None`) or `D_a(n)` with per-entry
/// conservative error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    /// The base, or `None` for the universal (uncorrected) coefficients.
    pub a: Option<BigRational>,
    pub statistic: StatisticKind,
    /// `(value, error_estimate)` indexed by `n = 0, 1, …`.
    pub coefficients: Vec<(f64, f64)>,
    pub cutoffs: Cutoffs,
}

impl CoefficientTable {
    pub fn values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|&(v, _)| v).collect()
    }
}

/// Term of `S̃(n)` at the prime `q`, written exactly as the series demands:
/// `Ω ⇒ 1/q^{2n} − 1/(q+q²−q³)ⁿ`, `ω/ ⇒ −1/(1+q−q²)ⁿ`,
/// `ω− ⇒ −1/(2−q²)ⁿ`.  The negative bases carry the sign alternation.
fn tail_term(statistic: StatisticKind, q: u64, n: u32) -> Dd {
    let q = Dd::from_u64(q);
    let q2 = q * q;
    match statistic {
        StatisticKind::BigOmegaQuotient => {
            let neg = q + q2 - q2 * q;
            q.powi(2 * n).recip() - neg.powi(n).recip()
        }
        StatisticKind::OmegaQuotient => -(Dd::ONE + q - q2).powi(n).recip(),
        StatisticKind::OmegaDifference => -(Dd::from_f64(2.0) - q2).powi(n).recip(),
    }
}

/// Bound for `|Σ_{q > cutoff}|` of the order-`n` terms: every term is at most
/// `2/(q−1)^{2n}` in absolute value (for `Ω` the two summands are each at
/// most `1/q^{2n}` once `q ≥ 3`), and comparison of `Σ_{m ≥ P} m^{−2n}` with
/// `∫_P^∞ t^{−2n} dt` gives
/// `tail ≤ 2(P^{−2n} + P^{1−2n}/(2n−1))`.
fn tail_bound_beyond(cutoff: u64, n: u32) -> f64 {
    let p = cutoff as f64;
    2.0 * (p.powi(-2 * (n as i32)) + p.powi(1 - 2 * (n as i32)) / (2.0 * n as f64 - 1.0))
}

fn prime_sum_dd(statistic: StatisticKind, n: u32, cutoff: u64) -> Result<(Dd, f64)> {
    let table = primes_up_to(cutoff)?;
    let mut sum = Dd::ZERO;
    for &q in &table.primes {
        sum = sum + tail_term(statistic, q, n);
    }
    let bound = tail_bound_beyond(cutoff, n) + sum.to_f64().abs() * DD_NOISE;
    Ok((sum, bound))
}

/// The truncated prime sum `S̃(n)` for `n ≥ 1`.
pub fn tail_sum(statistic: StatisticKind, n: usize, cutoff: u64) -> Result<TailSum> {
    if n < 1 {
        return Err(Error::Domain("prime sums S̃(n) start at n = 1".into()));
    }
    if cutoff < 1 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    let (value, tail_bound) = prime_sum_dd(statistic, n as u32, cutoff)?;
    Ok(TailSum {
        statistic,
        n,
        cutoff,
        value: value.to_f64(),
        tail_bound,
    })
}

/// `D(0)` as a truncated Euler product: `∏(1 − 1/(q(q−1)))` for `ω/` and
/// `Ω`, `∏(1 − 1/(q²−1))` for `ω−`.  The omitted factors multiply the value
/// by `1 − δ` with `δ ≤ Σ_{q>P} 1/(q(q−1)) ≤ 1/P`, so `2·value/P` bounds the
/// truncation error with room to spare.
fn euler_d0_dd(statistic: StatisticKind, cutoff: u64) -> Result<(Dd, f64)> {
    let table = primes_up_to(cutoff)?;
    let mut product = Dd::ONE;
    for &q in &table.primes {
        let q = Dd::from_u64(q);
        let den = match statistic {
            StatisticKind::OmegaQuotient | StatisticKind::BigOmegaQuotient => q * (q - Dd::ONE),
            StatisticKind::OmegaDifference => q * q - Dd::ONE,
        };
        product = product * (Dd::ONE - den.recip());
    }
    let err = product.to_f64().abs() * (2.0 / cutoff as f64 + DD_NOISE);
    Ok((product, err))
}

/// `D(0), …, D(n_max)` with error bounds, in working precision.
fn uncorrected_dd(
    statistic: StatisticKind,
    n_max: usize,
    cutoffs: &Cutoffs,
) -> Result<(Vec<Dd>, Vec<f64>)> {
    if n_max > MAX_COEFFICIENT_ORDER {
        return Err(Error::Resource(format!(
            "coefficients are supported up to n = {MAX_COEFFICIENT_ORDER} (requested {n_max})"
        )));
    }
    let (d0, d0_err) = euler_d0_dd(statistic, cutoffs.n_le_1)?;
    let mut values = vec![d0];
    let mut errors = vec![d0_err];
    let mut sums = vec![(Dd::ZERO, 0.0)];
    for j in 1..=n_max {
        sums.push(prime_sum_dd(statistic, j as u32, cutoffs.for_n(j))?);
    }
    // n·D(n) = Σ_{k<n} D(k)·S̃(n−k), with the error propagated linearly.
    for n in 1..=n_max {
        let mut acc = Dd::ZERO;
        let mut err = 0.0;
        for k in 0..n {
            let (s, s_err) = sums[n - k];
            acc = acc + values[k] * s;
            err += errors[k] * s.to_f64().abs() + values[k].to_f64().abs() * s_err;
        }
        let n_dd = Dd::from_u64(n as u64);
        values.push(acc / n_dd);
        errors.push(err / n as f64 + acc.to_f64().abs() * DD_NOISE);
    }
    Ok((values, errors))
}

fn table_from_dd(
    a: Option<BigRational>,
    statistic: StatisticKind,
    cutoffs: &Cutoffs,
    values: Vec<Dd>,
    errors: Vec<f64>,
) -> CoefficientTable {
    CoefficientTable {
        a,
        statistic,
        coefficients: values
            .iter()
            .zip(&errors)
            .map(|(v, &e)| (v.to_f64(), e))
            .collect(),
        cutoffs: *cutoffs,
    }
}

/// Universal coefficients `D(0), …, D(n_max)` of the plain Euler product,
/// via the logarithmic-derivative recursion.
pub fn uncorrected_coefficients(
    statistic: StatisticKind,
    n_max: usize,
    cutoffs: &Cutoffs,
) -> Result<CoefficientTable> {
    let (values, errors) = uncorrected_dd(statistic, n_max, cutoffs)?;
    Ok(table_from_dd(None, statistic, cutoffs, values, errors))
}

/// All partitions of `n` as multiplicity maps `part → multiplicity`,
/// largest parts first.
fn for_each_partition(n: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    fn descend(
        remaining: usize,
        max_part: usize,
        stack: &mut Vec<(usize, usize)>,
        visit: &mut impl FnMut(&[(usize, usize)]),
    ) {
        if remaining == 0 {
            visit(stack);
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            for mult in (1..=remaining / part).rev() {
                stack.push((part, mult));
                descend(remaining - part * mult, part - 1, stack, visit);
                stack.pop();
            }
        }
    }
    descend(n, n, &mut Vec::new(), &mut visit);
}

/// Universal coefficients by the explicit partition (Bell-polynomial) sum
/// `D(n) = D(0)·Σ_{m₁+2m₂+⋯=n} ∏_i (S̃(i)/i)^{m_i}/m_i!` — the independent
/// oracle for the recursion.
pub fn bell_coefficients(
    statistic: StatisticKind,
    n_max: usize,
    cutoffs: &Cutoffs,
) -> Result<CoefficientTable> {
    if n_max > MAX_COEFFICIENT_ORDER {
        return Err(Error::Resource(format!(
            "partition enumeration is capped at n = {MAX_COEFFICIENT_ORDER} (requested {n_max})"
        )));
    }
    let (d0, d0_err) = euler_d0_dd(statistic, cutoffs.n_le_1)?;
    let mut sums = vec![(Dd::ZERO, 0.0)];
    for j in 1..=n_max {
        sums.push(prime_sum_dd(statistic, j as u32, cutoffs.for_n(j))?);
    }
    let mut values = vec![d0];
    let mut errors = vec![d0_err];
    for n in 1..=n_max {
        let mut acc = Dd::ZERO;
        let mut err = 0.0;
        for_each_partition(n, |parts| {
            // Exact rational weight 1/∏(i^{mᵢ}·mᵢ!), floats substituted last.
            let mut weight = BigRational::one();
            for &(part, mult) in parts {
                let mut den = BigRational::one();
                for k in 1..=mult {
                    den *= BigRational::from_integer((k * part).into());
                }
                weight /= den;
            }
            let mut term = Dd::from_rational(&weight);
            let mut rel_err = 0.0;
            for &(part, mult) in parts {
                let (s, s_err) = sums[part];
                term = term * s.powi(mult as u32);
                rel_err += mult as f64 * s_err / s.to_f64().abs().max(f64::MIN_POSITIVE);
            }
            acc = acc + term;
            err += term.to_f64().abs() * rel_err;
        });
        let with_d0 = d0 * acc;
        values.push(with_d0);
        errors.push(
            d0.to_f64().abs() * err
                + d0_err * acc.to_f64().abs()
                + with_d0.to_f64().abs() * DD_NOISE,
        );
    }
    Ok(table_from_dd(None, statistic, cutoffs, values, errors))
}

/// Corrected densities `D_a(n) = Σ_k c_k·D(n−k)`, convolving the exact
/// Taylor coefficients `c_k` of `F_a·H_a` with the universal coefficients.
pub fn corrected_coefficients(
    base: &BaseDecomposition,
    statistic: StatisticKind,
    n_max: usize,
    cutoffs: &Cutoffs,
) -> Result<CoefficientTable> {
    let (unc, unc_err) = uncorrected_dd(statistic, n_max, cutoffs)?;
    let correction = genfun::correction_factors(base, statistic)?;
    let taylor = correction.combined.taylor(n_max)?;
    let mut values = Vec::with_capacity(n_max + 1);
    let mut errors = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = Dd::ZERO;
        let mut err = 0.0;
        for (k, c) in taylor.iter().enumerate().take(n + 1) {
            let c_abs = c.abs().to_f64().unwrap_or(f64::INFINITY);
            acc = acc + Dd::from_rational(c) * unc[n - k];
            err += c_abs * unc_err[n - k];
        }
        values.push(acc);
        errors.push(err + acc.to_f64().abs() * DD_NOISE);
    }
    Ok(table_from_dd(
        Some(base.a.clone()),
        statistic,
        cutoffs,
        values,
        errors,
    ))
}

/// Conditional expectation of the statistic over primes: the exact
/// derivative `F′(1) + H′(1)` plus the universal prime sum
/// (`ω/ ⇒ Σ 1/(q(q−1))`, `ω− ⇒ Σ 1/(q²−1)`, `Ω ⇒ Σ q/(q³−q²−q+1)`).
/// Every term is below `1/(q−1)²`, so the omitted primes contribute less
/// than `1/(cutoff−1)`.
pub fn expectation(
    base: &BaseDecomposition,
    statistic: StatisticKind,
    cutoff: u64,
) -> Result<(f64, f64)> {
    let correction = genfun::correction_factors(base, statistic)?;
    let one = BigRational::one();
    let shift = correction.f.derivative_at(&one)? + correction.h.derivative_at(&one)?;
    let table = primes_up_to(cutoff)?;
    let mut sum = Dd::from_rational(&shift);
    for &q in &table.primes {
        let q = Dd::from_u64(q);
        let q2 = q * q;
        let term = match statistic {
            StatisticKind::OmegaQuotient => (q2 - q).recip(),
            StatisticKind::OmegaDifference => (q2 - Dd::ONE).recip(),
            StatisticKind::BigOmegaQuotient => q / (q2 * q - q2 - q + Dd::ONE),
        };
        sum = sum + term;
    }
    let value = sum.to_f64();
    let err = 1.0 / (cutoff as f64 - 1.0) + value.abs() * DD_NOISE;
    Ok((value, err))
}

/// Decay constant of the `Ω` densities, `D_a^Ω(n) ~ R_a·4^{−n}`:
/// `R_a = (3/2)·H_h^Ω(4)·(1 + I_h^Ω(γ,4))·∏_{3 ≤ q ≤ cutoff}
/// (1 + 3q/((q−1)(q²−4)))`.  The rational part is evaluated exactly at
/// `z = 4`; the omitted factors of the odd-prime product are within relative
/// `7/(cutoff−1)`.
pub fn decay_constant(base: &BaseDecomposition, cutoff: u64) -> Result<(f64, f64)> {
    let (h, i) = genfun::big_omega_parts(base);
    let four = BigRational::from_integer(4.into());
    let rational_part = BigRational::new(3.into(), 2.into())
        * h.evaluate(&four)?
        * (BigRational::one() + i.evaluate(&four)?);
    let table = primes_up_to(cutoff)?;
    let mut product = Dd::from_rational(&rational_part);
    for &q in &table.primes {
        if q == 2 {
            continue;
        }
        let q = Dd::from_u64(q);
        let three_q = Dd::from_f64(3.0) * q;
        let den = (q - Dd::ONE) * (q * q - Dd::from_f64(4.0));
        product = product * (Dd::ONE + three_q / den);
    }
    let value = product.to_f64();
    let err = value.abs() * (7.0 / (cutoff as f64 - 1.0) + DD_NOISE);
    Ok((value, err))
}

/// Truncated inclusion–exclusion for the primitive-root density:
/// `Σ_{ℓ ≤ l_max} μ(ℓ)/[ℚ(a^{1/ℓ}, ζ_ℓ):ℚ]`.  Converges (conditionally on
/// GRH, but here as a plain series) to `D_a(0)` of the `ω`-quotient
/// statistic.
pub fn artin_inclusion_exclusion(base: &BaseDecomposition, l_max: u64) -> Result<f64> {
    if l_max < 1 {
        return Err(Error::Domain(
            "the inclusion–exclusion sum needs l_max ≥ 1".into(),
        ));
    }
    let table = primes_up_to_with_spf(l_max)?;
    let mut sum = Dd::ONE;
    for ell in 2..=l_max {
        let factors = table.factor(ell)?;
        if factors.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        let degree = kummer_degree(&DegreeQuery::new(base.clone(), ell, 1)?)?;
        let term = Dd::from_u64(degree).recip();
        if factors.len() % 2 == 1 {
            sum = sum - term;
        } else {
            sum = sum + term;
        }
    }
    Ok(sum.to_f64())
}
