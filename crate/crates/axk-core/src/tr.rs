//! Rank and order formulas for the TR-summands of the relative K-groups,
//! and their assembly degree by degree.
//!
//! The torsion of K_{2i+1}(Z\[x,y\]/(xy), (x,y)) decomposes over pairs
//! (p, d) with p prime and d ≥ 1 coprime to p. Each pair contributes the
//! group TR^r_{2i+1−λ_{p^{r−1}d}}(Z;p) at the unique level r with
//! p^{r−1}d ≤ i < p^r d, of order
//!
//! ```text
//!   p^{r(r−1)/2} · ∏_{j=0}^{r−1} (i + 1 − p^j d)
//! ```
//!
//! Taking p-parts and multiplying over d recovers the p-primary part of
//! (i!)^2; multiplying over p recovers (i!)^2 itself. In even degrees 2i
//! every prime contributes a single free summand of rank one, witnessed by
//! the unique way of writing i = p^s d with p ∤ d.
//!
//! Pairs with d > i admit no level and contribute trivially; truncating the
//! product over d at d = i is therefore exact.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::rep::{self, Prime};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrError {
    #[error("d = {d} must be coprime to p = {p}")]
    NotCoprime { p: u64, d: u64 },
}

fn check_coprime(p: Prime, d: u64) -> Result<(), TrError> {
    // d = 0 is rejected too: gcd(p, 0) = p.
    if d == 0 || d.is_multiple_of(p.get()) {
        return Err(TrError::NotCoprime { p: p.get(), d });
    }
    Ok(())
}

/// The unique level r ≥ 1 with p^{r−1}·d ≤ i < p^r·d, or `None` when d > i
/// (no such level exists and the contribution is trivial).
pub fn unique_level(i: u64, p: Prime, d: u64) -> Result<Option<u32>, TrError> {
    check_coprime(p, d)?;
    if d > i {
        return Ok(None);
    }
    let p = p.get();
    let mut r = 1u32;
    let mut bound = d; // p^{r-1}·d
    while bound <= i / p && bound * p <= i {
        bound *= p;
        r += 1;
    }
    Ok(Some(r))
}

/// Order of the odd-degree summand at (i, p, d):
/// p^{r(r−1)/2} · ∏_{j=0}^{r−1}(i+1−p^j d) with r the unique level, or 1
/// when no level exists. Every factor is ≥ 1 by the level condition.
pub fn tr_odd_order(i: u64, p: Prime, d: u64) -> Result<BigUint, TrError> {
    let Some(r) = unique_level(i, p, d)? else {
        return Ok(BigUint::from(1u32));
    };
    let mut order = BigUint::from(p.get()).pow(r * (r - 1) / 2);
    let mut power = d; // p^j·d
    for _ in 0..r {
        debug_assert!(power <= i);
        order *= i + 1 - power;
        power *= p.get();
    }
    Ok(order)
}

/// 1 iff i = p^s·d for some s ≥ 0, else 0: the rank of the limit group in
/// even degree 2i at the pair (p, d).
pub fn lim_even_rank(i: u64, p: Prime, d: u64) -> Result<u32, TrError> {
    check_coprime(p, d)?;
    if d > i || i == 0 {
        return Ok(0);
    }
    let p = p.get();
    let mut t = d;
    while t < i && t <= i / p {
        t *= p;
    }
    Ok(u32::from(t == i))
}

/// Rank of the level-r group in even degree 2i at (p, d): the number of
/// 0 ≤ s < r with i = dim_C(λ_{p^{r−1}d}^{C_{p^s}}). Always 0 or 1, since
/// the fixed dimensions p^{r−1−s}·d are strictly decreasing in s.
pub fn tr_even_rank(i: u64, p: Prime, d: u64, r: u32) -> Result<u32, TrError> {
    check_coprime(p, d)?;
    let mut count = 0u32;
    for s in 0..r {
        // dim_C of the C_{p^s}-fixed subspace of λ_{p^{r-1}d} is p^{r-1-s}·d;
        // compute with overflow care since r is caller-supplied.
        let Some(power) = (p.get() as u128).checked_pow(r - 1 - s) else {
            continue;
        };
        let Some(dim) = power.checked_mul(d as u128) else {
            continue;
        };
        if dim == i as u128 {
            count += 1;
        }
    }
    Ok(count)
}

/// The p-primary part of the full odd-degree torsion at level i: the
/// product over all d ≤ i coprime to p of the p-parts of [`tr_odd_order`].
/// Equals p^{2·ν_p(i!)}.
pub fn k_odd_order_p(i: u64, p: Prime) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for d in 1..=i {
        if d % p.get() == 0 {
            continue;
        }
        let order = tr_odd_order(i, p, d).expect("d coprime to p by construction");
        acc *= rep::p_part(&order, p).expect("order is positive");
    }
    acc
}

/// How a summand contributes to its K-group: finite torsion in odd
/// degrees, a free rank in even degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contribution {
    Torsion {
        order_raw: BigUint,
        order_p_part: BigUint,
        p_part_exp: u32,
    },
    Free {
        rank: u32,
    },
}

/// One factor TR^r_{q−λ_{p^{r−1}d}}(Z;p) of a K-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrSummand {
    pub p: Prime,
    pub d: u64,
    pub r: u32,
    pub q: u64,
    pub lambda_index: u64,
    pub contribution: Contribution,
}

impl TrSummand {
    pub fn index_triple(&self) -> (u64, u64, u32) {
        (self.p.get(), self.d, self.r)
    }
}

impl fmt::Display for TrSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TR^{}_{{{}-λ_{}}}(Z;{})",
            self.r, self.q, self.lambda_index, self.p
        )
    }
}

/// The odd-degree summand at (i, p, d) with its raw order and p-part, or
/// `None` when the contribution is trivial (no level, or p-part 1).
/// `q = 2i + 1` is recorded on the summand.
pub fn tr_summand(i: u64, p: Prime, d: u64) -> Result<Option<TrSummand>, TrError> {
    let Some(r) = unique_level(i, p, d)? else {
        return Ok(None);
    };
    let order_raw = tr_odd_order(i, p, d)?;
    let p_part_exp = rep::p_valuation(&order_raw, p).expect("order is positive");
    Ok(Some(TrSummand {
        p,
        d,
        r,
        q: 2 * i + 1,
        lambda_index: p.get().pow(r - 1) * d,
        contribution: Contribution::Torsion {
            order_p_part: BigUint::from(p.get()).pow(p_part_exp),
            order_raw,
            p_part_exp,
        },
    }))
}

/// Rank, torsion order, and summand decomposition of one relative K-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGroupReport {
    pub q: u64,
    pub rank: u32,
    pub torsion_order: BigUint,
    /// p-primary part of the torsion, per contributing prime.
    pub per_prime: BTreeMap<u64, BigUint>,
    /// Nontrivial summands, sorted by (p, d).
    pub summands: Vec<TrSummand>,
    pub note: Option<String>,
}

/// Assemble K_q(Z\[x,y\]/(xy), (x,y)).
///
/// Even q = 2i: free of rank one, trivial torsion; the summand list names
/// the rank-one witness i = p^s·d at each prime p ≤ max(i, 2), placed at
/// the first level r = s + 1 where the fixed-point count is one. Odd
/// q = 2i+1: rank zero and torsion of order (i!)^2, listed as every
/// summand with nontrivial p-part over primes p ≤ i.
pub fn k_group(q: u64) -> KGroupReport {
    let i = q / 2;
    if q.is_multiple_of(2) {
        let mut summands = Vec::new();
        if i > 0 {
            for p in rep::primes_up_to(i.max(2)) {
                let s = rep::p_valuation_u64(i, p).expect("i > 0");
                let d = i / p.get().pow(s);
                debug_assert_eq!(lim_even_rank(i, p, d), Ok(1));
                summands.push(TrSummand {
                    p,
                    d,
                    r: s + 1,
                    q,
                    lambda_index: p.get().pow(s) * d,
                    contribution: Contribution::Free { rank: 1 },
                });
            }
        }
        let note = (i == 0).then(|| {
            "rank 1 holds by the even-degree order law; the summand enumeration is empty at i = 0"
                .to_string()
        });
        return KGroupReport {
            q,
            rank: 1,
            torsion_order: BigUint::from(1u32),
            per_prime: BTreeMap::new(),
            summands,
            note,
        };
    }

    let mut per_prime = BTreeMap::new();
    let mut torsion_order = BigUint::from(1u32);
    let mut summands = Vec::new();
    for p in rep::primes_up_to(i) {
        let mut part = BigUint::from(1u32);
        for d in 1..=i {
            if d % p.get() == 0 {
                continue;
            }
            if let Some(summand) = tr_summand(i, p, d).expect("d coprime to p") {
                let Contribution::Torsion {
                    ref order_p_part, ..
                } = summand.contribution
                else {
                    unreachable!()
                };
                part *= order_p_part;
                if *order_p_part > BigUint::from(1u32) {
                    summands.push(summand);
                }
            }
        }
        torsion_order *= &part;
        per_prime.insert(p.get(), part);
    }
    KGroupReport {
        q,
        rank: 0,
        torsion_order,
        per_prime,
        summands,
        note: None,
    }
}

/// Result of re-checking one degree pair (2i, 2i+1) in [`verify_orders`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyEntry {
    pub i: u64,
    pub even_rank: u32,
    pub even_torsion: BigUint,
    pub odd_order: BigUint,
    pub expected_odd: BigUint,
    /// Each per-prime aggregate equals p^{2·ν_p(i!)}.
    pub per_prime_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub max_i: u64,
    pub entries: Vec<VerifyEntry>,
    pub first_failure: Option<u64>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Recompute K_{2i} and K_{2i+1} for 0 ≤ i ≤ max_i and check rank one,
/// trivial even torsion, odd torsion (i!)^2, and the per-prime aggregates
/// against the factorial-valuation oracle. A discrepancy is a report
/// outcome, not an error.
pub fn verify_orders(max_i: u64) -> VerifyReport {
    let start = Instant::now();
    let mut entries = Vec::with_capacity(max_i as usize + 1);
    let mut first_failure = None;
    for i in 0..=max_i {
        let even = k_group(2 * i);
        let odd = k_group(2 * i + 1);
        let fact = rep::factorial(i);
        let expected_odd = &fact * &fact;
        let per_prime_ok = odd.per_prime.iter().all(|(&p, part)| {
            let p = Prime::new(p).expect("per_prime keys are prime");
            let legendre = 2 * rep::factorial_p_valuation(i, p);
            *part == BigUint::from(p.get()).pow(legendre as u32)
        });
        let pass = even.rank == 1
            && even.torsion_order == BigUint::from(1u32)
            && odd.rank == 0
            && odd.torsion_order == expected_odd
            && per_prime_ok;
        if !pass && first_failure.is_none() {
            first_failure = Some(i);
        }
        entries.push(VerifyEntry {
            i,
            even_rank: even.rank,
            even_torsion: even.torsion_order,
            odd_order: odd.torsion_order,
            expected_odd,
            per_prime_ok,
            pass,
        });
    }
    VerifyReport {
        max_i,
        entries,
        first_failure,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn unique_level_examples() {
        assert_eq!(unique_level(5, p(2), 1), Ok(Some(3)));
        assert_eq!(unique_level(5, p(2), 7), Ok(None));
        assert_eq!(unique_level(4, p(3), 2), Ok(Some(1)));
        assert_eq!(
            unique_level(4, p(3), 6),
            Err(TrError::NotCoprime { p: 3, d: 6 })
        );
        assert_eq!(
            unique_level(4, p(3), 0),
            Err(TrError::NotCoprime { p: 3, d: 0 })
        );
    }

    #[test]
    fn level_is_unique_when_it_exists() {
        for i in 1..=1000u64 {
            for q in [2u64, 3, 5, 7] {
                for d in 1..=i {
                    if d % q == 0 {
                        continue;
                    }
                    let mut witnesses = Vec::new();
                    for r in 1..=40u32 {
                        let lo = (q as u128).pow(r - 1) * d as u128;
                        let hi = (q as u128).pow(r) * d as u128;
                        if lo <= i as u128 && (i as u128) < hi {
                            witnesses.push(r);
                        }
                    }
                    assert_eq!(witnesses.len(), 1, "i={i} p={q} d={d}");
                    assert_eq!(unique_level(i, p(q), d), Ok(Some(witnesses[0])));
                }
            }
        }
    }

    #[test]
    fn odd_order_examples() {
        // 2^3 · (6-1)(6-2)(6-4) = 320, whose 2-part is 2^6.
        assert_eq!(tr_odd_order(5, p(2), 1), Ok(big(320)));
        assert_eq!(
            rep::p_part(&big(320), p(2)),
            Ok(big(64)),
            "the 2-part of the level-3 order at i = 5 is 2^6"
        );
        assert_eq!(tr_odd_order(3, p(3), 1), Ok(big(9)));
        assert_eq!(tr_odd_order(5, p(2), 7), Ok(big(1)));
    }

    #[test]
    fn odd_order_factors_are_positive() {
        for i in 0..=200u64 {
            for q in [2u64, 3, 5] {
                for d in 1..=i {
                    if d % q == 0 {
                        continue;
                    }
                    if let Some(r) = unique_level(i, p(q), d).unwrap() {
                        let mut power = d;
                        for _ in 0..r {
                            assert!(i + 1 > power, "factor must be >= 1");
                            power *= q;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn even_rank_examples() {
        assert_eq!(lim_even_rank(4, p(2), 1), Ok(1));
        assert_eq!(lim_even_rank(4, p(2), 3), Ok(0));
        assert_eq!(lim_even_rank(6, p(5), 6), Ok(1));
        assert_eq!(lim_even_rank(0, p(2), 1), Ok(0));
    }

    #[test]
    fn even_rank_matches_power_search() {
        for i in 0..=500u64 {
            for q in [2u64, 3, 5] {
                for d in 1..=i.max(1) {
                    if d % q == 0 {
                        continue;
                    }
                    let brute = (0..=10u32)
                        .any(|s| (q as u128).pow(s) * d as u128 == i as u128);
                    assert_eq!(lim_even_rank(i, p(q), d), Ok(u32::from(brute)));
                }
            }
        }
    }

    #[test]
    fn level_rank_examples() {
        assert_eq!(tr_even_rank(2, p(2), 1, 3), Ok(1));
        assert_eq!(tr_even_rank(5, p(2), 1, 3), Ok(0));
        for (n, q) in [(1u64, 2u64), (3, 2), (4, 3), (6, 5)] {
            assert_eq!(tr_even_rank(n, p(q), n, 1), Ok(1));
        }
    }

    #[test]
    fn level_rank_is_zero_or_one() {
        for i in 0..=100u64 {
            for q in [2u64, 3] {
                for d in 1..=20u64 {
                    if d % q == 0 {
                        continue;
                    }
                    for r in 1..=8u32 {
                        let rank = tr_even_rank(i, p(q), d, r).unwrap();
                        assert!(rank <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn per_prime_aggregate_examples() {
        assert_eq!(k_odd_order_p(5, p(2)), big(64));
        for q in [2u64, 3, 11] {
            assert_eq!(k_odd_order_p(0, p(q)), big(1));
        }
        assert_eq!(k_odd_order_p(3, p(3)), big(9));
    }

    #[test]
    fn per_prime_aggregate_matches_factorial_valuation() {
        for i in 0..=100u64 {
            for q in rep::primes_up_to(i) {
                let expected =
                    BigUint::from(q.get()).pow(2 * rep::factorial_p_valuation(i, q) as u32);
                assert_eq!(k_odd_order_p(i, q), expected, "i={i} p={q}");
            }
        }
    }

    #[test]
    fn truncating_divisor_enumeration_at_i_is_exact() {
        // Contributions with d > i are trivial: extending to 2i changes nothing.
        for i in 1..=60u64 {
            for q in [2u64, 3, 5] {
                let q = p(q);
                let mut extended = BigUint::from(1u32);
                for d in 1..=2 * i {
                    if d % q.get() == 0 {
                        continue;
                    }
                    let order = tr_odd_order(i, q, d).unwrap();
                    extended *= rep::p_part(&order, q).unwrap();
                }
                assert_eq!(extended, k_odd_order_p(i, q));
            }
        }
    }

    #[test]
    fn degree_five_group() {
        let report = k_group(5);
        assert_eq!(report.rank, 0);
        assert_eq!(report.torsion_order, big(4));
        assert_eq!(
            report.summands.iter().map(TrSummand::index_triple).collect::<Vec<_>>(),
            vec![(2, 1, 2)]
        );
        assert_eq!(report.summands[0].to_string(), "TR^2_{5-λ_2}(Z;2)");
    }

    #[test]
    fn degree_eleven_group() {
        let report = k_group(11);
        assert_eq!(report.torsion_order, big(14400));
        assert_eq!(
            report.summands.iter().map(TrSummand::index_triple).collect::<Vec<_>>(),
            vec![(2, 1, 3), (3, 1, 2), (5, 1, 2)]
        );
        assert_eq!(report.per_prime[&2], big(64));
        assert_eq!(report.per_prime[&3], big(9));
        assert_eq!(report.per_prime[&5], big(25));
    }

    #[test]
    fn degree_one_group_is_trivial() {
        let report = k_group(1);
        assert_eq!(report.torsion_order, big(1));
        assert!(report.summands.is_empty());
        assert!(report.per_prime.is_empty());
    }

    #[test]
    fn degree_nine_group() {
        let report = k_group(9);
        assert_eq!(
            report.summands.iter().map(TrSummand::index_triple).collect::<Vec<_>>(),
            vec![(2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]
        );
    }

    #[test]
    fn even_degrees_have_rank_one_and_trivial_torsion() {
        for i in 0..=60u64 {
            let report = k_group(2 * i);
            assert_eq!(report.rank, 1);
            assert_eq!(report.torsion_order, big(1));
            assert!(report.per_prime.is_empty());
            if i > 0 {
                assert_eq!(report.summands.len(), rep::primes_up_to(i.max(2)).len());
                for s in &report.summands {
                    assert!(matches!(s.contribution, Contribution::Free { rank: 1 }));
                    assert_eq!(lim_even_rank(i, s.p, s.d), Ok(1));
                }
            } else {
                assert!(report.note.is_some());
            }
        }
    }

    #[test]
    fn odd_degrees_have_rank_zero_and_factored_torsion() {
        for i in 0..=60u64 {
            let report = k_group(2 * i + 1);
            assert_eq!(report.rank, 0);
            let product = report
                .per_prime
                .values()
                .fold(big(1), |acc, part| acc * part);
            assert_eq!(report.torsion_order, product);
        }
    }

    #[test]
    fn summands_are_sorted_and_nontrivial() {
        for q in [9u64, 11, 13, 21, 41] {
            let report = k_group(q);
            let triples: Vec<_> = report
                .summands
                .iter()
                .map(|s| (s.p.get(), s.d))
                .collect();
            let mut sorted = triples.clone();
            sorted.sort();
            assert_eq!(triples, sorted);
            for s in &report.summands {
                let Contribution::Torsion {
                    ref order_p_part,
                    ref order_raw,
                    ..
                } = s.contribution
                else {
                    panic!("odd summand must be torsion")
                };
                assert!(*order_p_part > big(1));
                assert_eq!(rep::p_part(order_raw, s.p).unwrap(), *order_p_part);
                assert_eq!(s.lambda_index, s.p.get().pow(s.r - 1) * s.d);
            }
        }
    }

    #[test]
    fn verify_small_sweeps() {
        let report = verify_orders(2);
        assert!(report.all_pass());
        let orders: Vec<_> = report.entries.iter().map(|e| e.odd_order.clone()).collect();
        assert_eq!(orders, vec![big(1), big(1), big(4)]);

        let report = verify_orders(3);
        assert!(report.all_pass());
        assert_eq!(report.entries[3].odd_order, big(36));

        assert!(verify_orders(40).all_pass());
    }
}
