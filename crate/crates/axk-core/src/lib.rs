//! Exact calculator for the relative algebraic K-groups of the coordinate
//! axes, K_q(Z\[x,y\]/(xy), (x,y)).
//!
//! In even degrees 2i the group is free abelian of rank one; in odd degrees
//! 2i+1 it is finite of order (i!)^2, assembled prime by prime from
//! RO(S^1)-graded TR-groups of Z. Everything in this crate is exact, finite
//! bookkeeping on top of those order formulas:
//!
//! - [`rep`]: fixed-point dimensions of the representations λ_n, p-adic
//!   valuations and p-parts, and the factorial valuation formula.
//! - [`tr`]: the rank and order formulas for the TR-summands indexed by
//!   (p, d, r), and their assembly into K-group reports.
//! - [`abelian`]: finite abelian p-groups as exponent partitions, with the
//!   mod-p^v order discrimination that pins down group structures.
//! - [`registry`]: the table of known group structures in low degrees,
//!   shipped as a data file shared by the library and its tests.
//! - [`chart`]: bigraded spectral-sequence chart bookkeeping: load,
//!   validate, run to the final page, truncate to the fixed-point range,
//!   and audit total-degree orders against the TR engine.
//!
//! All orders are arbitrary-precision integers; (i!)^2 outgrows 64-bit
//! machine words around i = 10 and the order sweep runs to i = 40 and
//! beyond.

pub mod abelian;
pub mod chart;
pub mod registry;
pub mod rep;
pub mod tr;

use std::fmt;
use std::str::FromStr;

/// Whether a recorded fact is proven or conjectural.
///
/// Conjectural inputs taint everything derived from them; reports carry the
/// flag transitively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Status {
    #[default]
    Proven,
    Conjectural,
}

impl Status {
    pub fn is_conjectural(self) -> bool {
        matches!(self, Status::Conjectural)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Proven => write!(f, "proven"),
            Status::Conjectural => write!(f, "conjectural"),
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proven" => Ok(Status::Proven),
            "conjectural" => Ok(Status::Conjectural),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}
