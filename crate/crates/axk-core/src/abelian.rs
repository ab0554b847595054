//! Finite abelian p-groups as exponent partitions, and the mod-p^v order
//! discrimination that pins down group structures.
//!
//! A finite abelian p-group is stored as the non-increasing list of its
//! cyclic exponents: Z/2 ⊕ Z/32 is (5, 1) at p = 2. Knowing the order p^N
//! and the summand count m leaves the partitions of N into m parts as
//! candidates; the order of G/p^v G (equivalently of the p^v-torsion
//! subgroup) cuts the list down, often to a single group.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::rep::Prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("mod-p^v orders are only supported with a torsion-free adjacent degree")]
    AdjacentTorsionUnsupported,
}

/// A finite abelian p-group as a partition of cyclic exponents,
/// non-increasing; the empty partition is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbelianPGroup {
    p: Prime,
    exponents: Vec<u32>,
}

impl AbelianPGroup {
    /// Canonicalizes: sorts exponents non-increasing and drops zeros.
    pub fn new(p: Prime, mut exponents: Vec<u32>) -> Self {
        exponents.retain(|&e| e > 0);
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        AbelianPGroup { p, exponents }
    }

    pub fn trivial(p: Prime) -> Self {
        AbelianPGroup {
            p,
            exponents: Vec::new(),
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn summand_count(&self) -> usize {
        self.exponents.len()
    }

    pub fn total_exponent(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p.get()).pow(self.total_exponent())
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    /// |G / p^v G| = p^{Σ_j min(e_j, v)}.
    pub fn quotient_order(&self, v: u32) -> BigUint {
        let exp: u32 = self.exponents.iter().map(|&e| e.min(v)).sum();
        BigUint::from(self.p.get()).pow(exp)
    }

    /// |G\[p^v\]|, the p^v-torsion subgroup; same count as [`Self::quotient_order`].
    pub fn torsion_order(&self, v: u32) -> BigUint {
        self.quotient_order(v)
    }

    /// Cyclic factor orders in ascending order, as the group is printed.
    pub fn cyclic_orders(&self) -> Vec<BigUint> {
        self.exponents
            .iter()
            .rev()
            .map(|&e| BigUint::from(self.p.get()).pow(e))
            .collect()
    }
}

impl fmt::Display for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .cyclic_orders()
            .iter()
            .map(|o| format!("Z/{o}"))
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Render a CRT list of p-groups across primes in the canonical form, with
/// factors sorted by prime and then by ascending order; "0" when trivial.
pub fn display_group_list(groups: &[AbelianPGroup]) -> String {
    let mut sorted: Vec<&AbelianPGroup> = groups.iter().filter(|g| !g.is_trivial()).collect();
    sorted.sort_by_key(|g| g.prime().get());
    if sorted.is_empty() {
        return "0".to_string();
    }
    sorted
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(" ⊕ ")
}

/// All abelian p-groups of order p^total_exponent with exactly `summands`
/// cyclic factors: the partitions of total_exponent into that many positive
/// parts, in descending lexicographic order. Empty when summands exceeds
/// the total exponent (no candidates, not an error).
pub fn enumerate_candidates(total_exponent: u32, summands: u32, p: Prime) -> Vec<AbelianPGroup> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(summands as usize);
    fn go(
        remaining: u32,
        parts_left: u32,
        max_part: u32,
        current: &mut Vec<u32>,
        p: Prime,
        out: &mut Vec<AbelianPGroup>,
    ) {
        if parts_left == 0 {
            if remaining == 0 {
                out.push(AbelianPGroup {
                    p,
                    exponents: current.clone(),
                });
            }
            return;
        }
        // Each remaining part is >= 1 and <= max_part; keep non-increasing.
        let hi = max_part.min(remaining.saturating_sub(parts_left - 1));
        for part in (1..=hi).rev() {
            current.push(part);
            go(remaining - part, parts_left - 1, part, current, p, out);
            current.pop();
        }
    }
    if summands == 0 {
        if total_exponent == 0 {
            out.push(AbelianPGroup::trivial(p));
        }
        return out;
    }
    if summands <= total_exponent {
        go(total_exponent, summands, total_exponent, &mut current, p, &mut out);
    }
    out
}

/// Order of the mod-p^v homotopy in a degree whose group is `g` when the
/// adjacent degree below is torsion-free (so contributes nothing):
/// |G/p^v G|. Any other adjacent behavior is out of scope here.
pub fn mod_coeff_order(
    g: &AbelianPGroup,
    adjacent_torsion_free: bool,
    v: u32,
) -> Result<BigUint, AbelianError> {
    if !adjacent_torsion_free {
        return Err(AbelianError::AdjacentTorsionUnsupported);
    }
    Ok(g.quotient_order(v))
}

/// Candidates of order p^total_exponent in `summands` factors whose mod-p^v
/// order matches the observation. A singleton means the structure is
/// determined; an empty list signals inconsistent constraints.
pub fn discriminate(
    total_exponent: u32,
    summands: u32,
    p: Prime,
    v: u32,
    observed_mod_order: &BigUint,
) -> Vec<AbelianPGroup> {
    enumerate_candidates(total_exponent, summands, p)
        .into_iter()
        .filter(|g| g.quotient_order(v) == *observed_mod_order)
        .collect()
}
