//! Fixed-point dimensions of the circle representations λ_n and the p-adic
//! arithmetic every order formula runs on.
//!
//! λ_n = C(1) ⊕ … ⊕ C(n) enters the calculations only through the complex
//! dimensions of its fixed subspaces under the cyclic subgroups of S^1, so
//! this whole layer reduces to integer arithmetic:
//!
//! - [`fixed_dim`]: dim_C of the C_m-fixed subspace of λ_n, i.e. ⌊n/m⌋
//! - [`p_valuation`], [`p_part`]: ν_p and the p-primary part
//! - [`factorial_p_valuation`]: ν_p(i!) by the floor-sum formula, without
//!   computing i!
//!
//! Primality is checked by deterministic trial division; inputs here are
//! small even when the orders they produce are not.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("subgroup order must be positive")]
    ZeroSubgroup,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p-adic valuation of zero is undefined")]
    ValuationOfZero,
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// A prime number, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(ArithError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// All primes up to and including `bound`, in increasing order.
pub fn primes_up_to(bound: u64) -> Vec<Prime> {
    (2..=bound).filter(|&n| is_prime(n)).map(Prime).collect()
}

/// A prime power p^e.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub p: Prime,
    pub e: u32,
}

impl PrimePower {
    pub fn new(p: Prime, e: u32) -> Self {
        PrimePower { p, e }
    }

    pub fn value(&self) -> BigUint {
        BigUint::from(self.p.get()).pow(self.e)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.e {
            0 => write!(f, "1"),
            1 => write!(f, "{}", self.p),
            e => write!(f, "{}^{}", self.p, e),
        }
    }
}

/// The real S^1-representation λ_n = C(1) ⊕ … ⊕ C(n).
///
/// Only dimension counting survives into this crate: λ_n has complex
/// dimension n, and its C_m-fixed subspace has complex dimension ⌊n/m⌋
/// (the summands C(j) with m | j). λ_0 is the zero representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lambda(pub u64);

impl Lambda {
    pub fn dim_complex(self) -> u64 {
        self.0
    }

    /// Complex dimension of the C_m-fixed subspace.
    pub fn fixed_dim(self, m: u64) -> Result<u64, ArithError> {
        fixed_dim(self.0, m)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ_{}", self.0)
    }
}

/// dim_C of the C_m-fixed subspace of λ_n: the number of 1 ≤ j ≤ n
/// divisible by m, i.e. ⌊n/m⌋. The trivial subgroup (m = 1) fixes
/// everything; m = 0 is not a subgroup order.
pub fn fixed_dim(n: u64, m: u64) -> Result<u64, ArithError> {
    if m == 0 {
        return Err(ArithError::ZeroSubgroup);
    }
    Ok(n / m)
}

/// ν_p(n): the largest e with p^e | n. Undefined (infinite) for n = 0.
pub fn p_valuation(n: &BigUint, p: Prime) -> Result<u32, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ValuationOfZero);
    }
    let p = BigUint::from(p.get());
    let mut cur = n.clone();
    let mut v = 0u32;
    while (&cur % &p).is_zero() {
        cur /= &p;
        v += 1;
    }
    Ok(v)
}

/// ν_p(n) for machine-word n.
pub fn p_valuation_u64(n: u64, p: Prime) -> Result<u32, ArithError> {
    if n == 0 {
        return Err(ArithError::ValuationOfZero);
    }
    let p = p.get();
    let mut cur = n;
    let mut v = 0u32;
    while cur.is_multiple_of(p) {
        cur /= p;
        v += 1;
    }
    Ok(v)
}

/// The p-primary part p^{ν_p(n)} of n.
pub fn p_part(n: &BigUint, p: Prime) -> Result<BigUint, ArithError> {
    Ok(BigUint::from(p.get()).pow(p_valuation(n, p)?))
}

/// ν_p(i!) = Σ_{k≥1} ⌊i/p^k⌋.
pub fn factorial_p_valuation(i: u64, p: Prime) -> u64 {
    let p = p.get();
    let mut sum = 0u64;
    let mut pk = p;
    while pk <= i {
        sum += i / pk;
        if pk > i / p {
            break;
        }
        pk *= p;
    }
    sum
}

/// i! as an arbitrary-precision integer.
pub fn factorial(i: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for k in 2..=i {
        acc *= k;
    }
    acc
}
