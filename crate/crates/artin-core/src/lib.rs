//! Conditional distribution of multiplicative orders modulo primes.
//!
//! For a rational base `a` and primes `p` with `ν_p(a) = 0`, the index
//! `i_p(a) = (p−1)/ord_p(a)` of the subgroup generated by `a` in `𝔽_p^×`
//! concentrates on numbers with very few prime factors.  Under GRH the
//! density of primes attaining a given value `n` of
//!
//! * `ω((p−1)/ord_p(a))` — distinct prime factors of the index,
//! * `Ω((p−1)/ord_p(a))` — prime factors of the index with multiplicity, or
//! * `ω(p−1) − ω(ord_p(a))` — prime factors of `p−1` missing from the order,
//!
//! exists and equals a coefficient `D_a(n)` of an explicit generating
//! function: a universal Euler product over all primes multiplied by a
//! rational correction `F_a(z)·H_a(z)` depending only on the decomposition
//! `a = ±a₀ʰ` and the squarefree part `b₀` of `a₀`.  The value `n = 0`
//! recovers the classical primitive-root densities.
//!
//! The crate computes the corrections exactly (big-rational polynomial
//! arithmetic), extracts the coefficients `D_a(n)` numerically to ten
//! significant digits, evaluates degrees of the Kummer extensions
//! `ℚ(a^{1/ℓ}, ζ_{mℓ})` that underlie the densities, and independently
//! verifies everything against empirical order statistics gathered by a
//! segmented sieve.
//!
//! Modules:
//! * [`base`] — exact decomposition `a = ±a₀ʰ`, kernels, discriminants,
//!   factoring, sieves, multiplicative orders.
//! * [`kummer`] — `ε_a(mℓ, ℓ)` entanglement corrections and degrees of
//!   `ℚ(a^{1/ℓ}, ζ_{mℓ})`.
//! * [`genfun`] — exact rational-function arithmetic and the correction
//!   factors `F_a(z)`, `H_a(z)` for the three statistics.
//! * [`coeffs`] — prime sums, the coefficient recursion, corrected density
//!   coefficients, expectations, and the `Ω`-statistic decay constant.
//! * [`empirical`] — segmented-sieve order statistics, splitting counts, and
//!   predicted-versus-empirical comparison reports.

pub mod base;
pub mod coeffs;
mod dd;
pub mod empirical;
pub mod error;
pub mod genfun;
pub mod kummer;

pub use base::{
    decompose, kernel_and_discriminant, multiplicative_order, nu_p, parse_rational,
    prime_factor_counts, primes_up_to, primes_up_to_with_spf, rational, rational_string,
    BaseDecomposition, PrimeTable,
};
pub use coeffs::{
    artin_inclusion_exclusion, bell_coefficients, corrected_coefficients, decay_constant,
    expectation, tail_sum, uncorrected_coefficients, CoefficientTable, Cutoffs, TailSum,
};
pub use empirical::{
    compare, empirical_densities, order_statistic, splitting_count, splitting_counts,
    stream_orders, CompareCriteria, ComparisonReport, ComparisonRow, EmpiricalTally, OrderRecord,
    OrderStream, SieveOptions,
};
pub use error::{Error, Result};
pub use genfun::{
    classical_artin_factor, correction_factors, derivative_at, evaluate, taylor_coefficients,
    CorrectionFactors, Polynomial, RationalFunction, StatisticKind,
};
pub use kummer::{epsilon, kummer_degree, DegreeQuery, EpsilonValue};
