//! Unconditional verification harness: sieve all primes `p ≤ x`, compute the
//! exact multiplicative order of `a` modulo each, and tally the statistics
//! the density predictions speak about — plus the splitting counts behind
//! the Kummer-degree interpretation.
//!
//! The sieve is segmented.  Within a segment `[lo, hi)` a primality bitmap
//! is produced from the base primes `≤ √x`, and `p − 1` is factored for
//! every prime in the segment by walking even multiples of each odd base
//! prime through the shifted range (the power of two comes from
//! `trailing_zeros`); whatever survives the walks is a single prime
//! `> √x`.  Segments are processed by a worker pool and merged in fixed
//! segment order, so tallies are identical for every thread count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{multiplicative_order, primes_up_to, rational_string, PrimeTable};
use crate::coeffs::{CoefficientTable, Cutoffs};
use crate::error::{Error, Result};
use crate::genfun::StatisticKind;

/// One prime's worth of order data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderRecord {
    pub p: u64,
    /// `ord_p(a)`, always a divisor of `p − 1`.
    pub ord: u64,
    /// Factorisation of `p − 1` as `(prime, exponent)` pairs in increasing
    /// prime order.
    pub p_minus_1_factors: Vec<(u64, u32)>,
}

impl OrderRecord {
    /// The index `(p−1)/ord_p(a)` of the subgroup generated by `a`.
    pub fn index(&self) -> u64 {
        (self.p - 1) / self.ord
    }
}

/// Value of a statistic on one record.  With `xi` set (allowed for the
/// `ω`-quotient statistic only), prime factors of the index larger than `xi`
/// are ignored: `ω_ξ((p−1)/ord)`.
pub fn order_statistic(
    record: &OrderRecord,
    statistic: StatisticKind,
    xi: Option<u64>,
) -> Result<u32> {
    if xi.is_some() && statistic != StatisticKind::OmegaQuotient {
        return Err(Error::Domain(format!(
            "the truncation ξ is defined for the ω-quotient statistic, not {statistic}"
        )));
    }
    let mut value = 0u32;
    for &(q, e) in &record.p_minus_1_factors {
        let mut nu_ord = 0u32;
        let mut d = record.ord;
        while d.is_multiple_of(q) {
            d /= q;
            nu_ord += 1;
        }
        match statistic {
            StatisticKind::OmegaQuotient => {
                if e > nu_ord && xi.is_none_or(|xi| q <= xi) {
                    value += 1;
                }
            }
            StatisticKind::BigOmegaQuotient => value += e - nu_ord,
            StatisticKind::OmegaDifference => {
                if nu_ord == 0 {
                    value += 1;
                }
            }
        }
    }
    Ok(value)
}

/// Statistic counts over all primes `p ≤ x` with `ν_p(a) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTally {
    #[serde(with = "rational_as_string")]
    pub a: BigRational,
    pub statistic: StatisticKind,
    pub x: u64,
    pub xi: Option<u64>,
    /// `counts[n]` = number of primes whose statistic value is `n`
    /// (absent keys are zero).
    pub counts: BTreeMap<u32, u64>,
    /// Total primes tallied; always `Σ_n counts[n]`.
    pub primes_used: u64,
    pub runtime_s: f64,
}

impl EmpiricalTally {
    /// Densities `counts[n]/primes_used` for `n = 0..=max_n`, with the
    /// binomial standard error `√(d(1−d)/primes_used)` as the error field.
    pub fn to_coefficient_table(&self, max_n: usize) -> CoefficientTable {
        let total = self.primes_used.max(1) as f64;
        let coefficients = (0..=max_n)
            .map(|n| {
                let count = self.counts.get(&(n as u32)).copied().unwrap_or(0);
                let d = count as f64 / total;
                (d, (d * (1.0 - d) / total).sqrt())
            })
            .collect();
        CoefficientTable {
            a: Some(self.a.clone()),
            statistic: self.statistic,
            coefficients,
            cutoffs: Cutoffs::uniform(self.x),
        }
    }
}

mod rational_as_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::base::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Sieve tuning knobs.
#[derive(Debug, Clone)]
pub struct SieveOptions {
    /// Numbers per segment.
    pub segment_len: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Where to keep the resumable run state; `None` disables checkpoints.
    pub checkpoint: Option<PathBuf>,
    /// Segments between checkpoint writes (also the parallel chunk size).
    pub checkpoint_interval: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            segment_len: 1 << 22,
            threads: None,
            checkpoint: None,
            checkpoint_interval: 64,
        }
    }
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).is_none_or(|s| s > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= x) {
        r += 1;
    }
    r
}

/// Shared per-run context: base primes to `√x` and the finitely many primes
/// dividing numerator or denominator (the excluded `ν_p(a) ≠ 0` set).
struct SieveContext {
    a: BigRational,
    x: u64,
    base: PrimeTable,
    excluded: Vec<u64>,
    segment_len: u64,
}

impl SieveContext {
    fn new(a: &BigRational, x: u64, options: &SieveOptions) -> Result<SieveContext> {
        if x < 3 {
            return Err(Error::Domain(format!("sieve bound x = {x} below 3")));
        }
        if x > i64::MAX as u64 {
            return Err(Error::Resource(
                "sieve bounds beyond 2⁶³−1 are out of scope".into(),
            ));
        }
        if !(1 << 12..=1 << 26).contains(&options.segment_len) {
            return Err(Error::Domain(format!(
                "segment length {} outside 2¹²..=2²⁶",
                options.segment_len
            )));
        }
        crate::base::decompose(a)?;
        let base = primes_up_to(isqrt(x))?;
        let mut excluded: Vec<u64> = Vec::new();
        for n in [a.numer().magnitude(), a.denom().magnitude()] {
            for (q, _) in crate::base::factor_biguint(n) {
                if let Some(q) = num::ToPrimitive::to_u64(&q) {
                    if q <= x {
                        excluded.push(q);
                    }
                }
            }
        }
        excluded.sort_unstable();
        excluded.dedup();
        Ok(SieveContext {
            a: a.clone(),
            x,
            base,
            excluded,
            segment_len: options.segment_len,
        })
    }

    fn segment_count(&self) -> u64 {
        (self.x - 1).div_ceil(self.segment_len)
    }

    fn segment_bounds(&self, index: u64) -> (u64, u64) {
        let lo = 2 + index * self.segment_len;
        (lo, (lo + self.segment_len).min(self.x + 1))
    }

    /// All order records for primes in `[lo, hi)`, in increasing `p`.
    fn segment_records(&self, index: u64) -> Result<Vec<OrderRecord>> {
        let (lo, hi) = self.segment_bounds(index);
        let len = (hi - lo) as usize;
        let mut composite = vec![false; len];
        for &q in &self.base.primes {
            if q * q >= hi {
                break;
            }
            let start = (q * q).max(lo.div_ceil(q) * q);
            let mut m = start;
            while m < hi {
                composite[(m - lo) as usize] = true;
                m += q;
            }
        }

        struct Partial {
            p: u64,
            factors: Vec<(u64, u32)>,
            residual: u64,
        }
        let mut partials: Vec<Partial> = Vec::with_capacity(len / 8 + 8);
        const NONE: u32 = u32::MAX;
        let mut slot_to_partial = vec![NONE; len];
        for (slot, &is_composite) in composite.iter().enumerate() {
            let p = lo + slot as u64;
            if is_composite || p < 2 || self.excluded.binary_search(&p).is_ok() {
                continue;
            }
            let mut factors = Vec::with_capacity(6);
            let mut residual = p - 1;
            if p > 2 {
                let nu2 = residual.trailing_zeros();
                factors.push((2, nu2));
                residual >>= nu2;
            }
            slot_to_partial[slot] = partials.len() as u32;
            partials.push(Partial {
                p,
                factors,
                residual,
            });
        }

        // Factor every p−1 by walking the even multiples of each odd base
        // prime through the segment's shifted range.
        for &q in &self.base.primes {
            if q == 2 {
                continue;
            }
            let stride = 2 * q;
            let v_lo = (lo - 1).max(stride);
            let mut v = v_lo.div_ceil(stride) * stride;
            while v < hi - 1 {
                let slot = (v + 1 - lo) as usize;
                let id = slot_to_partial[slot];
                if id != NONE {
                    let partial = &mut partials[id as usize];
                    let mut e = 0u32;
                    while partial.residual.is_multiple_of(q) {
                        partial.residual /= q;
                        e += 1;
                    }
                    if e > 0 {
                        partial.factors.push((q, e));
                    }
                }
                v += stride;
            }
        }

        partials
            .into_iter()
            .map(|mut partial| {
                if partial.residual > 1 {
                    partial.factors.push((partial.residual, 1));
                }
                let ord = multiplicative_order(&self.a, partial.p, &partial.factors)?;
                Ok(OrderRecord {
                    p: partial.p,
                    ord,
                    p_minus_1_factors: partial.factors,
                })
            })
            .collect()
    }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Resource(format!("worker pool: {e}")))?
            .install(job)),
    }
}

/// Lazily yields an [`OrderRecord`] for every prime `p ≤ x` with
/// `ν_p(a) = 0`, in increasing `p`.  Single-threaded; the aggregating
/// operations below share its segment machinery but run segments in
/// parallel.
pub fn stream_orders(a: &BigRational, x: u64) -> Result<OrderStream> {
    let context = SieveContext::new(a, x, &SieveOptions::default())?;
    Ok(OrderStream {
        context,
        next_segment: 0,
        buffer: Vec::new(),
        buffer_pos: 0,
    })
}

pub struct OrderStream {
    context: SieveContext,
    next_segment: u64,
    buffer: Vec<OrderRecord>,
    buffer_pos: usize,
}

impl Iterator for OrderStream {
    type Item = Result<OrderRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.buffer_pos < self.buffer.len() {
                let record = self.buffer[self.buffer_pos].clone();
                self.buffer_pos += 1;
                return Some(Ok(record));
            }
            if self.next_segment >= self.context.segment_count() {
                return None;
            }
            match self.context.segment_records(self.next_segment) {
                Ok(records) => {
                    self.next_segment += 1;
                    self.buffer = records;
                    self.buffer_pos = 0;
                }
                Err(e) => {
                    self.next_segment = self.context.segment_count();
                    return Some(Err(e));
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    a: String,
    statistic: StatisticKind,
    x: u64,
    xi: Option<u64>,
    segment_len: u64,
    next_segment: u64,
    counts: BTreeMap<u32, u64>,
    primes_used: u64,
    elapsed_s: f64,
}

fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let json = serde_json::to_string_pretty(checkpoint)
        .map_err(|e| Error::Internal(format!("checkpoint encoding: {e}")))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, json)
        .and_then(|()| std::fs::rename(&tmp, path))
        .map_err(|e| Error::Resource(format!("writing checkpoint {}: {e}", path.display())))
}

fn load_checkpoint(path: &Path) -> Result<Option<Checkpoint>> {
    match std::fs::read_to_string(path) {
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::Resource(format!(
            "reading checkpoint {}: {e}",
            path.display()
        ))),
        Ok(json) => serde_json::from_str(&json).map(Some).map_err(|e| {
            Error::Mismatch(format!("checkpoint {} is unreadable: {e}", path.display()))
        }),
    }
}

/// Drives a tally run, resuming from and writing checkpoints when
/// configured.  `max_chunks` limits how many checkpoint intervals are
/// processed (used to exercise resumption); the returned flag says whether
/// the run reached `x`.
fn densities_run(
    a: &BigRational,
    statistic: StatisticKind,
    x: u64,
    xi: Option<u64>,
    options: &SieveOptions,
    max_chunks: Option<u64>,
) -> Result<(EmpiricalTally, bool)> {
    if xi.is_some() && statistic != StatisticKind::OmegaQuotient {
        return Err(Error::Domain(format!(
            "the truncation ξ is defined for the ω-quotient statistic, not {statistic}"
        )));
    }
    let context = SieveContext::new(a, x, options)?;
    let a_string = rational_string(a);

    let mut next_segment = 0u64;
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut primes_used = 0u64;
    let mut elapsed_before = 0.0;
    if let Some(path) = &options.checkpoint {
        if let Some(checkpoint) = load_checkpoint(path)? {
            let matches = checkpoint.a == a_string
                && checkpoint.statistic == statistic
                && checkpoint.x == x
                && checkpoint.xi == xi
                && checkpoint.segment_len == options.segment_len;
            if !matches {
                return Err(Error::Mismatch(format!(
                    "checkpoint {} belongs to a different run (a = {}, {}, x = {})",
                    path.display(),
                    checkpoint.a,
                    checkpoint.statistic,
                    checkpoint.x
                )));
            }
            next_segment = checkpoint.next_segment;
            counts = checkpoint.counts;
            primes_used = checkpoint.primes_used;
            elapsed_before = checkpoint.elapsed_s;
        }
    }

    let started = Instant::now();
    let total_segments = context.segment_count();
    let chunk = options.checkpoint_interval.max(1);
    let mut chunks_done = 0u64;
    while next_segment < total_segments {
        if max_chunks.is_some_and(|limit| chunks_done >= limit) {
            break;
        }
        let chunk_end = (next_segment + chunk).min(total_segments);
        let segment_tallies: Vec<(BTreeMap<u32, u64>, u64)> = with_pool(options.threads, || {
            (next_segment..chunk_end)
                .into_par_iter()
                .map(|index| {
                    let records = context.segment_records(index)?;
                    let mut counts = BTreeMap::new();
                    for record in &records {
                        let n = order_statistic(record, statistic, xi)?;
                        *counts.entry(n).or_insert(0) += 1;
                    }
                    Ok((counts, records.len() as u64))
                })
                .collect::<Result<Vec<_>>>()
        })??;
        for (segment_counts, used) in segment_tallies {
            for (n, c) in segment_counts {
                *counts.entry(n).or_insert(0) += c;
            }
            primes_used += used;
        }
        next_segment = chunk_end;
        chunks_done += 1;
        if let Some(path) = &options.checkpoint {
            save_checkpoint(
                path,
                &Checkpoint {
                    a: a_string.clone(),
                    statistic,
                    x,
                    xi,
                    segment_len: options.segment_len,
                    next_segment,
                    counts: counts.clone(),
                    primes_used,
                    elapsed_s: elapsed_before + started.elapsed().as_secs_f64(),
                },
            )?;
        }
    }

    let finished = next_segment >= total_segments;
    if finished {
        if let Some(path) = &options.checkpoint {
            let _ = std::fs::remove_file(path);
        }
    }
    let tally = EmpiricalTally {
        a: a.clone(),
        statistic,
        x,
        xi,
        counts,
        primes_used,
        runtime_s: elapsed_before + started.elapsed().as_secs_f64(),
    };
    Ok((tally, finished))
}

/// Tallies the statistic over all primes `p ≤ x` with `ν_p(a) = 0` and
/// returns both the raw tally and its density table for `n = 0..=max_n`
/// (binomial standard errors).
pub fn empirical_densities(
    a: &BigRational,
    statistic: StatisticKind,
    x: u64,
    max_n: usize,
    xi: Option<u64>,
    options: &SieveOptions,
) -> Result<(EmpiricalTally, CoefficientTable)> {
    let (tally, _) = densities_run(a, statistic, x, xi, options, None)?;
    let table = tally.to_coefficient_table(max_n);
    Ok((tally, table))
}

/// Counts of primes `p ≤ x` with `ν_p(a) = 0`, `ℓ ∣ (p−1)/ord_p(a)` and
/// `mℓ ∣ p−1`, for each `(ℓ, m)` pair in one sieve pass.  These are the
/// prime counts whose densities are `1/[ℚ(a^{1/ℓ}, ζ_{mℓ}):ℚ]`.
pub fn splitting_counts(
    a: &BigRational,
    pairs: &[(u64, u64)],
    x: u64,
    options: &SieveOptions,
) -> Result<Vec<u64>> {
    for &(ell, m) in pairs {
        if ell < 1 || m < 1 {
            return Err(Error::Domain(format!(
                "splitting parameters (ℓ, m) = ({ell}, {m}) must be ≥ 1"
            )));
        }
    }
    let context = SieveContext::new(a, x, options)?;
    let totals = with_pool(options.threads, || {
        (0..context.segment_count())
            .into_par_iter()
            .map(|index| {
                let records = context.segment_records(index)?;
                let mut counts = vec![0u64; pairs.len()];
                for record in &records {
                    let index_value = record.index();
                    let p_minus_1 = record.p - 1;
                    for (k, &(ell, m)) in pairs.iter().enumerate() {
                        if index_value.is_multiple_of(ell)
                            && m.checked_mul(ell)
                                .is_some_and(|me| p_minus_1.is_multiple_of(me))
                        {
                            counts[k] += 1;
                        }
                    }
                }
                Ok(counts)
            })
            .try_reduce(
                || vec![0u64; pairs.len()],
                |mut acc, counts| {
                    for (a, c) in acc.iter_mut().zip(counts) {
                        *a += c;
                    }
                    Ok(acc)
                },
            )
    })??;
    Ok(totals)
}

/// Single-pair convenience form of [`splitting_counts`].
pub fn splitting_count(a: &BigRational, ell: u64, m: u64, x: u64) -> Result<u64> {
    Ok(splitting_counts(a, &[(ell, m)], x, &SieveOptions::default())?[0])
}

/// Acceptance thresholds for predicted-versus-empirical comparison:
/// pass when `|difference| ≤ slack + sigma_multiple·σ + predicted_error`,
/// the slack absorbing the `O(log log x / log x)` model error.
#[derive(Debug, Clone, Copy)]
pub struct CompareCriteria {
    pub sigma_multiple: f64,
    pub slack: f64,
}

impl Default for CompareCriteria {
    fn default() -> Self {
        CompareCriteria {
            sigma_multiple: 4.0,
            slack: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub predicted: f64,
    pub predicted_error: f64,
    pub empirical: f64,
    pub empirical_sigma: f64,
    pub difference: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub a: String,
    pub statistic: StatisticKind,
    pub rows: Vec<ComparisonRow>,
    pub all_pass: bool,
}

/// Per-`n` comparison of a predicted density table against an empirical
/// one over their common range.
pub fn compare(
    predicted: &CoefficientTable,
    empirical: &CoefficientTable,
    criteria: &CompareCriteria,
) -> Result<ComparisonReport> {
    if predicted.a != empirical.a {
        return Err(Error::Mismatch(format!(
            "tables describe different bases ({:?} versus {:?})",
            predicted.a.as_ref().map(rational_string),
            empirical.a.as_ref().map(rational_string)
        )));
    }
    if predicted.statistic != empirical.statistic {
        return Err(Error::Mismatch(format!(
            "tables describe different statistics ({} versus {})",
            predicted.statistic, empirical.statistic
        )));
    }
    let overlap = predicted
        .coefficients
        .len()
        .min(empirical.coefficients.len());
    if overlap == 0 {
        return Err(Error::Mismatch("tables have no common n range".into()));
    }
    let mut rows = Vec::with_capacity(overlap);
    let mut all_pass = true;
    for n in 0..overlap {
        let (p, p_err) = predicted.coefficients[n];
        let (e, sigma) = empirical.coefficients[n];
        let difference = (p - e).abs();
        let threshold = criteria.slack + criteria.sigma_multiple * sigma + p_err;
        let pass = difference <= threshold;
        all_pass &= pass;
        rows.push(ComparisonRow {
            n,
            predicted: p,
            predicted_error: p_err,
            empirical: e,
            empirical_sigma: sigma,
            difference,
            threshold,
            pass,
        });
    }
    Ok(ComparisonReport {
        a: predicted
            .a
            .as_ref()
            .map(rational_string)
            .unwrap_or_else(|| "universal".into()),
        statistic: predicted.statistic,
        rows,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{decompose, parse_rational, rational};
    use StatisticKind::*;

    fn counts_of(pairs: &[(u32, u64)]) -> BTreeMap<u32, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn first_order_records_match_hand_computation() {
        let records: Vec<OrderRecord> = stream_orders(&rational(2), 10)
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        let pairs: Vec<(u64, u64)> = records.iter().map(|r| (r.p, r.ord)).collect();
        assert_eq!(pairs, vec![(3, 2), (5, 4), (7, 3)]);

        let records: Vec<OrderRecord> = stream_orders(&rational(2), 17)
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert!(records.iter().any(|r| r.p == 17 && r.ord == 8));

        let records: Vec<OrderRecord> = stream_orders(&rational(10), 10)
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        let primes: Vec<u64> = records.iter().map(|r| r.p).collect();
        assert_eq!(primes, vec![3, 7], "p = 2 and p = 5 divide the base");
    }

    /// Orders and factorisations versus a naive scan, exhaustively to 10⁴.
    #[test]
    fn records_match_naive_orders_to_ten_thousand() {
        for a in [rational(2), rational(-3), parse_rational("5/4").unwrap()] {
            let mut checked = 0;
            for record in stream_orders(&a, 10_000).unwrap() {
                let record = record.unwrap();
                let p = record.p;
                let reconstructed: u64 = record
                    .p_minus_1_factors
                    .iter()
                    .map(|&(q, e)| q.pow(e))
                    .product();
                assert_eq!(reconstructed, p - 1, "factors of p−1 at p = {p}");
                assert_eq!((p - 1) % record.ord, 0);
                // Naive: first power that is ≡ 1.
                let a_mod = {
                    let num = ((a.numer() % num::BigInt::from(p)) + num::BigInt::from(p))
                        % num::BigInt::from(p);
                    let den = ((a.denom() % num::BigInt::from(p)) + num::BigInt::from(p))
                        % num::BigInt::from(p);
                    let num = num::ToPrimitive::to_u64(&num).unwrap();
                    let den = num::ToPrimitive::to_u64(&den).unwrap();
                    let mut den_inv = 1u64;
                    for _ in 0..p - 2 {
                        den_inv = den_inv * den % p;
                    }
                    num * den_inv % p
                };
                let mut t = a_mod;
                let mut naive = 1;
                while t != 1 {
                    t = (t as u128 * a_mod as u128 % p as u128) as u64;
                    naive += 1;
                }
                assert_eq!(record.ord, naive, "order of {a} modulo {p}");
                checked += 1;
            }
            assert!(checked > 1000);
        }
    }

    /// Frozen tallies from an independent implementation (symbolic order
    /// computation, primes to 1000).
    #[test]
    fn tallies_match_frozen_references() {
        let options = SieveOptions {
            segment_len: 1 << 12,
            ..SieveOptions::default()
        };
        type Case = (
            &'static str,
            StatisticKind,
            Option<u64>,
            u64,
            &'static [(u32, u64)],
        );
        let cases: [Case; 11] = [
            ("2", OmegaQuotient, None, 167, &[(0, 67), (1, 83), (2, 17)]),
            (
                "2",
                BigOmegaQuotient,
                None,
                167,
                &[(0, 67), (1, 69), (2, 22), (3, 5), (4, 4)],
            ),
            ("2", OmegaDifference, None, 167, &[(0, 97), (1, 61), (2, 9)]),
            ("2", OmegaQuotient, Some(2), 167, &[(0, 87), (1, 80)]),
            (
                "2",
                OmegaQuotient,
                Some(5),
                167,
                &[(0, 69), (1, 84), (2, 14)],
            ),
            (
                "5/4",
                OmegaQuotient,
                None,
                166,
                &[(0, 72), (1, 68), (2, 25), (3, 1)],
            ),
            (
                "5/4",
                BigOmegaQuotient,
                None,
                166,
                &[(0, 72), (1, 55), (2, 29), (3, 10)],
            ),
            (
                "5/4",
                OmegaDifference,
                None,
                166,
                &[(0, 93), (1, 55), (2, 18)],
            ),
            (
                "-8",
                OmegaQuotient,
                None,
                167,
                &[(0, 41), (1, 82), (2, 40), (3, 4)],
            ),
            (
                "-8",
                BigOmegaQuotient,
                None,
                167,
                &[(0, 41), (1, 69), (2, 40), (3, 15), (4, 2)],
            ),
            (
                "-8",
                OmegaDifference,
                None,
                167,
                &[(0, 76), (1, 70), (2, 19), (3, 2)],
            ),
        ];
        for (a, stat, xi, used, expected) in cases {
            let a = parse_rational(a).unwrap();
            let (tally, table) = empirical_densities(&a, stat, 1000, 3, xi, &options).unwrap();
            assert_eq!(tally.primes_used, used, "a = {a}, {stat}, ξ = {xi:?}");
            assert_eq!(
                tally.counts,
                counts_of(expected),
                "a = {a}, {stat}, ξ = {xi:?}"
            );
            assert_eq!(tally.counts.values().sum::<u64>(), tally.primes_used);
            assert_eq!(table.coefficients.len(), 4);
            assert!((table.coefficients[0].0 - expected[0].1 as f64 / used as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn truncation_is_rejected_off_the_quotient_statistic() {
        let err = empirical_densities(
            &rational(2),
            BigOmegaQuotient,
            1000,
            3,
            Some(10),
            &SieveOptions::default(),
        );
        assert!(matches!(err, Err(Error::Domain(_))));
        let record = OrderRecord {
            p: 7,
            ord: 3,
            p_minus_1_factors: vec![(2, 1), (3, 1)],
        };
        assert!(order_statistic(&record, OmegaDifference, Some(10)).is_err());
    }

    /// Larger ξ sees more factors, so cumulative counts below any level can
    /// only shrink.
    #[test]
    fn truncated_tallies_are_monotone_in_xi() {
        let a = rational(2);
        let options = SieveOptions::default();
        let grids = [2u64, 10, 100, 1000];
        let tallies: Vec<EmpiricalTally> = grids
            .iter()
            .map(|&xi| {
                empirical_densities(&a, OmegaQuotient, 100_000, 6, Some(xi), &options)
                    .unwrap()
                    .0
            })
            .collect();
        let full = empirical_densities(&a, OmegaQuotient, 100_000, 6, None, &options)
            .unwrap()
            .0;
        let cumulative = |tally: &EmpiricalTally, k: u32| -> u64 {
            tally
                .counts
                .iter()
                .filter(|&(&n, _)| n <= k)
                .map(|(_, &c)| c)
                .sum()
        };
        for k in 0..8 {
            for pair in tallies.windows(2) {
                assert!(
                    cumulative(&pair[1], k) <= cumulative(&pair[0], k),
                    "cumulative counts must shrink as ξ grows (k = {k})"
                );
            }
            assert!(cumulative(&full, k) <= cumulative(&tallies[3], k));
        }
    }

    /// Identical tallies for any thread count and segment size.
    #[test]
    fn tallies_are_deterministic_across_workers() {
        let a = parse_rational("-8").unwrap();
        let reference = empirical_densities(
            &a,
            OmegaQuotient,
            300_000,
            6,
            None,
            &SieveOptions {
                segment_len: 1 << 16,
                threads: Some(1),
                ..SieveOptions::default()
            },
        )
        .unwrap()
        .0;
        for (threads, segment_len) in [(4, 1 << 16), (3, 1 << 14), (2, 1 << 20)] {
            let other = empirical_densities(
                &a,
                OmegaQuotient,
                300_000,
                6,
                None,
                &SieveOptions {
                    segment_len,
                    threads: Some(threads),
                    ..SieveOptions::default()
                },
            )
            .unwrap()
            .0;
            assert_eq!(other.counts, reference.counts);
            assert_eq!(other.primes_used, reference.primes_used);
        }
    }

    /// Frozen splitting counts from the independent implementation, plus the
    /// trivial (ℓ, m) = (1, 1) case.
    #[test]
    fn splitting_counts_match_frozen_references() {
        assert_eq!(splitting_count(&rational(2), 2, 1, 10_000).unwrap(), 603);
        assert_eq!(splitting_count(&rational(2), 3, 2, 10_000).unwrap(), 200);
        assert_eq!(
            splitting_count(&parse_rational("-4").unwrap(), 2, 1, 10_000).unwrap(),
            609
        );
        assert_eq!(splitting_count(&rational(5), 2, 5, 10_000).unwrap(), 306);
        assert_eq!(splitting_count(&rational(12), 4, 3, 10_000).unwrap(), 147);
        // Empty condition: every tallied prime qualifies; π(100) = 25 and
        // p = 2 divides the base.
        assert_eq!(splitting_count(&rational(2), 1, 1, 100).unwrap(), 24);
        assert!(splitting_count(&rational(2), 0, 1, 100).is_err());
        let batch = splitting_counts(
            &rational(2),
            &[(2, 1), (3, 2), (1, 1)],
            10_000,
            &SieveOptions::default(),
        )
        .unwrap();
        assert_eq!(batch, vec![603, 200, 1228]);
    }

    #[test]
    fn comparison_flags_and_mismatches() {
        let base = decompose(&rational(3)).unwrap();
        let predicted =
            crate::coeffs::corrected_coefficients(&base, OmegaQuotient, 4, &Cutoffs::default())
                .unwrap();
        let (_, empirical) = empirical_densities(
            &rational(3),
            OmegaQuotient,
            200_000,
            4,
            None,
            &SieveOptions::default(),
        )
        .unwrap();
        let report = compare(&predicted, &empirical, &CompareCriteria::default()).unwrap();
        assert!(
            report.all_pass,
            "order statistics at 2·10⁵ match predictions: {report:?}"
        );
        assert_eq!(report.rows.len(), 5);

        let identical = compare(&predicted, &predicted, &CompareCriteria::default()).unwrap();
        assert!(identical.all_pass);
        assert!(identical.rows.iter().all(|r| r.difference == 0.0));

        let mut corrupted = empirical.clone();
        corrupted.coefficients[2].0 += 0.2;
        let report = compare(&predicted, &corrupted, &CompareCriteria::default()).unwrap();
        assert!(!report.all_pass);
        assert!(!report.rows[2].pass);

        let other = crate::coeffs::corrected_coefficients(
            &decompose(&rational(5)).unwrap(),
            OmegaQuotient,
            4,
            &Cutoffs::default(),
        )
        .unwrap();
        assert!(matches!(
            compare(&other, &empirical, &CompareCriteria::default()),
            Err(Error::Mismatch(_))
        ));
    }

    /// A run interrupted mid-way resumes from its checkpoint and produces
    /// the same tally as an uninterrupted one; the checkpoint is removed on
    /// completion.
    #[test]
    fn checkpointed_runs_resume_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.checkpoint.json");
        let a = rational(2);
        let x = 200_000;
        let full = empirical_densities(
            &a,
            OmegaQuotient,
            x,
            6,
            None,
            &SieveOptions {
                segment_len: 1 << 14,
                ..SieveOptions::default()
            },
        )
        .unwrap()
        .0;

        let options = SieveOptions {
            segment_len: 1 << 14,
            threads: Some(2),
            checkpoint: Some(path.clone()),
            checkpoint_interval: 3,
        };
        let (partial, finished) =
            densities_run(&a, OmegaQuotient, x, None, &options, Some(2)).unwrap();
        assert!(!finished);
        assert!(path.exists(), "interrupted run must leave its checkpoint");
        assert!(partial.primes_used < full.primes_used);

        // Resuming under a different configuration is refused.
        assert!(matches!(
            densities_run(&rational(3), OmegaQuotient, x, None, &options, None),
            Err(Error::Mismatch(_))
        ));

        let (resumed, finished) =
            densities_run(&a, OmegaQuotient, x, None, &options, None).unwrap();
        assert!(finished);
        assert_eq!(resumed.counts, full.counts);
        assert_eq!(resumed.primes_used, full.primes_used);
        assert!(!path.exists(), "completed run must clean its checkpoint up");
    }

    #[test]
    fn tally_snapshots_round_trip_as_json() {
        let (tally, _) = empirical_densities(
            &parse_rational("5/4").unwrap(),
            OmegaDifference,
            1000,
            3,
            None,
            &SieveOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_string(&tally).unwrap();
        assert!(json.contains("\"5/4\""));
        assert!(json.contains("omega-diff"));
        assert!(json.contains("runtime_s"));
        let back: EmpiricalTally = serde_json::from_str(&json).unwrap();
        assert_eq!(back.counts, tally.counts);
        assert_eq!(back.a, tally.a);
        assert_eq!(back.xi, None);
    }

    #[test]
    fn sieve_rejects_out_of_range_requests() {
        assert!(matches!(
            stream_orders(&rational(2), 2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            stream_orders(&rational(1), 100),
            Err(Error::Domain(_))
        ));
        let options = SieveOptions {
            segment_len: 1 << 4,
            ..SieveOptions::default()
        };
        assert!(matches!(
            empirical_densities(&rational(2), OmegaQuotient, 1000, 3, None, &options),
            Err(Error::Domain(_))
        ));
    }
}
