//! Bigraded spectral-sequence chart bookkeeping.
//!
//! A chart is supplied as data: classes carrying cyclic p-groups at a
//! (filtration, total degree) position, differentials indexed by page, and
//! hidden extensions. The engine validates charts, runs the differentials
//! to the final page, truncates to the homotopy-fixed-point range, reads
//! off total-degree orders, and assembles surviving classes into abelian
//! p-groups. It derives nothing: differentials are propagated and audited,
//! never discovered.
//!
//! Conventions (fixed by the bundled data):
//!
//! - A page-r differential lowers filtration by r and total degree by 1.
//!   The Tate class t has filtration −2 per power, so t^{-k} sits at
//!   filtration 2k and the fixed-point range is a *left* truncation:
//!   [`Chart::truncate`] keeps filtration ≤ bound, a differential entering
//!   the range from above leaves its target alive as an extra class.
//! - A differential record means "p^j·source hits an image of order p^l"
//!   (`source_mult_exp` = j, `image_exp` = l); running it divides both the
//!   source's and the target's surviving order by p^l, so the product of
//!   all orders times (image order)^2 per differential is conserved.
//! - With integral coefficients every differential goes from even to odd
//!   total degree; class orders divide p^n (and p^min(n,v) mod p^v).
//!
//! Monomial names like `t^-1 la1 mu1` are opaque identifiers; positions and
//! orders are always explicit per class, never inferred from the name.

mod bundled;
mod format;

pub use bundled::{bundled_chart, bundled_chart_names, load_bundled};
pub use format::{load_path, load_str};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::abelian::AbelianPGroup;
use crate::rep::Prime;
use crate::Status;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid chart:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error("page {page} differential {source_class} -> {target_class}: {msg}")]
    InconsistentDifferential {
        page: u32,
        source_class: String,
        target_class: String,
        msg: String,
    },
    #[error("degree {degree}: {msg}")]
    Assemble { degree: i64, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Which record a validation issue points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum IssueSubject {
    Class(usize),
    Differential(usize),
    Extension(usize),
}

/// One chart class: a cyclic group of order p^order_exp at a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartClass {
    pub name: String,
    pub filtration: i64,
    /// Total degree; the class contributes to the homotopy in this degree.
    pub degree: i64,
    pub order_exp: u32,
    pub status: Status,
}

/// A differential supported on the subgroup generated by p^j·source, with
/// image of order p^image_exp inside the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartDifferential {
    pub page: u32,
    pub source: String,
    pub source_mult_exp: u32,
    pub target: String,
    pub image_exp: u32,
    pub status: Status,
}

/// A multiplication-by-p relation between final-page classes in one total
/// degree, invisible on the page itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenExtension {
    pub lower: String,
    pub upper: String,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Integral,
    /// Mod p^v coefficients.
    ModPPower(u32),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integral => write!(f, "integral"),
            Coefficients::ModPPower(v) => write!(f, "mod p^{v}"),
        }
    }
}

/// A bigraded chart for the C_{p^n}-Tate construction shifted by λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub p: Prime,
    /// n in C_{p^n}.
    pub subgroup_exp: u32,
    pub coefficients: Coefficients,
    /// dim_C of the shifting representation λ.
    pub lambda_shift: u64,
    /// Per-chart override of the fixed-point truncation bound.
    pub truncation_default: Option<i64>,
    pub notes: Vec<String>,
    pub classes: Vec<ChartClass>,
    pub differentials: Vec<ChartDifferential>,
    pub extensions: Vec<HiddenExtension>,
}

/// Result of running a chart to its final page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// The final page: surviving classes with reduced orders, no
    /// differentials left, extensions carried over.
    pub chart: Chart,
    /// A conjectural differential fired during the run.
    pub fired_conjectural: bool,
    pub differentials_applied: usize,
}

/// Result of truncating a chart to the fixed-point range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncateOutcome {
    pub chart: Chart,
    pub dropped_classes: usize,
    /// Differentials entering the kept range from outside; each leaves its
    /// target alive as an extra surviving class.
    pub entering: usize,
    /// One of the entering differentials was conjectural, so the extra
    /// classes (and everything downstream) are conjectural.
    pub entering_conjectural: bool,
}

/// A group assembled from the survivors of one total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembled {
    pub group: AbelianPGroup,
    pub conjectural: bool,
}

/// Comparison of a chart's total-degree order against an expected value
/// from the TR engine or the registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub degree: i64,
    pub computed: BigUint,
    pub expected: BigUint,
    pub matched: bool,
    pub conjectural: bool,
}

impl Chart {
    /// Order cap per class: p^n integrally, p^min(n,v) mod p^v.
    fn max_order_exp(&self) -> u32 {
        match self.coefficients {
            Coefficients::Integral => self.subgroup_exp,
            Coefficients::ModPPower(v) => self.subgroup_exp.min(v),
        }
    }

    /// Default fixed-point truncation bound: twice the λ-shift unless the
    /// chart overrides it.
    pub fn truncation_bound(&self) -> i64 {
        self.truncation_default
            .unwrap_or(2 * self.lambda_shift as i64)
    }

    fn class(&self, name: &str) -> Option<&ChartClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Check every structural invariant, collecting all violations.
    pub fn validate(&self) -> Result<(), ChartError> {
        let issues = self.validation_issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ChartError::Invalid(
                issues.into_iter().map(|(_, msg)| msg).collect(),
            ))
        }
    }

    /// All structural violations, tagged with the record that caused each
    /// so the loader can report file locations.
    pub(crate) fn validation_issues(&self) -> Vec<(IssueSubject, String)> {
        let mut issues: Vec<(IssueSubject, String)> = Vec::new();
        let mut seen = HashMap::new();
        for (idx, c) in self.classes.iter().enumerate() {
            let mut push = |msg: String| issues.push((IssueSubject::Class(idx), msg));
            if seen.insert(c.name.clone(), ()).is_some() {
                push(format!("class `{}` declared twice", c.name));
            }
            if c.order_exp == 0 {
                push(format!("class `{}` has order exponent 0", c.name));
            }
            if c.order_exp > self.max_order_exp() {
                push(format!(
                    "class `{}` has order {}^{} exceeding the coefficient bound {}^{}",
                    c.name,
                    self.p,
                    c.order_exp,
                    self.p,
                    self.max_order_exp()
                ));
            }
        }
        for (idx, d) in self.differentials.iter().enumerate() {
            let mut push = |msg: String| issues.push((IssueSubject::Differential(idx), msg));
            if d.page < 2 {
                push(format!(
                    "differential `{}` -> `{}` has page {} < 2",
                    d.source, d.target, d.page
                ));
            }
            if d.image_exp == 0 {
                push(format!(
                    "differential `{}` -> `{}` has trivial image",
                    d.source, d.target
                ));
            }
            let (Some(src), Some(tgt)) = (self.class(&d.source), self.class(&d.target)) else {
                if self.class(&d.source).is_none() {
                    push(format!("differential source `{}` is not a class", d.source));
                }
                if self.class(&d.target).is_none() {
                    push(format!("differential target `{}` is not a class", d.target));
                }
                continue;
            };
            if tgt.degree != src.degree - 1 {
                push(format!(
                    "differential `{}` -> `{}`: target degree {} is not source degree {} minus 1",
                    d.source, d.target, tgt.degree, src.degree
                ));
            }
            if tgt.filtration != src.filtration - i64::from(d.page) {
                push(format!(
                    "differential `{}` -> `{}`: target filtration {} is not source filtration {} minus page {}",
                    d.source, d.target, tgt.filtration, src.filtration, d.page
                ));
            }
            if d.source_mult_exp + d.image_exp > src.order_exp {
                push(format!(
                    "differential `{}` -> `{}`: image order {}^{} exceeds the subgroup generated by p^{}·source, of order {}^{}",
                    d.source,
                    d.target,
                    self.p,
                    d.image_exp,
                    d.source_mult_exp,
                    self.p,
                    src.order_exp.saturating_sub(d.source_mult_exp)
                ));
            }
            if d.image_exp > tgt.order_exp {
                push(format!(
                    "differential `{}` -> `{}`: image order {}^{} exceeds the target order {}^{}",
                    d.source, d.target, self.p, d.image_exp, self.p, tgt.order_exp
                ));
            }
            if self.coefficients == Coefficients::Integral && src.degree % 2 != 0 {
                push(format!(
                    "integral differential `{}` -> `{}` starts in odd total degree {}",
                    d.source, d.target, src.degree
                ));
            }
        }
        for (idx, e) in self.extensions.iter().enumerate() {
            let mut push = |msg: String| issues.push((IssueSubject::Extension(idx), msg));
            let (Some(lower), Some(upper)) = (self.class(&e.lower), self.class(&e.upper)) else {
                if self.class(&e.lower).is_none() {
                    push(format!("extension endpoint `{}` is not a class", e.lower));
                }
                if self.class(&e.upper).is_none() {
                    push(format!("extension endpoint `{}` is not a class", e.upper));
                }
                continue;
            };
            if lower.degree != upper.degree {
                push(format!(
                    "extension `{}` -> `{}` links total degrees {} and {}",
                    e.lower, e.upper, lower.degree, upper.degree
                ));
            }
        }
        issues
    }

    /// Product of all class orders; divided by (image order)^2 per fired
    /// differential as the pages turn.
    pub fn total_order(&self) -> BigUint {
        let exp: u32 = self.classes.iter().map(|c| c.order_exp).sum();
        BigUint::from(self.p.get()).pow(exp)
    }

    /// Apply the differentials in increasing page order and return the
    /// final page. Each differential checks its image against the current
    /// surviving orders; a failure signals inconsistent chart data.
    pub fn run_to_final(&self) -> Result<RunOutcome, ChartError> {
        self.validate()?;
        let mut current: BTreeMap<&str, u32> = self
            .classes
            .iter()
            .map(|c| (c.name.as_str(), c.order_exp))
            .collect();
        let original: HashMap<&str, u32> = self
            .classes
            .iter()
            .map(|c| (c.name.as_str(), c.order_exp))
            .collect();

        let mut order: Vec<&ChartDifferential> = self.differentials.iter().collect();
        order.sort_by_key(|d| d.page);

        let mut fired_conjectural = false;
        for d in &order {
            let fail = |msg: String| ChartError::InconsistentDifferential {
                page: d.page,
                source_class: d.source.clone(),
                target_class: d.target.clone(),
                msg,
            };
            let src_cur = current[d.source.as_str()];
            let tgt_cur = current[d.target.as_str()];
            // Surviving order of the subgroup generated by p^j·source.
            let subgroup = src_cur.min(original[d.source.as_str()] - d.source_mult_exp);
            if d.image_exp > subgroup {
                return Err(fail(format!(
                    "image p^{} exceeds the surviving source subgroup p^{subgroup}",
                    d.image_exp
                )));
            }
            if d.image_exp > tgt_cur {
                return Err(fail(format!(
                    "image p^{} exceeds the surviving target order p^{tgt_cur}",
                    d.image_exp
                )));
            }
            *current.get_mut(d.source.as_str()).unwrap() = src_cur - d.image_exp;
            *current.get_mut(d.target.as_str()).unwrap() = tgt_cur - d.image_exp;
            fired_conjectural |= d.status.is_conjectural();
        }

        let classes: Vec<ChartClass> = self
            .classes
            .iter()
            .filter_map(|c| {
                let left = current[c.name.as_str()];
                (left > 0).then(|| ChartClass {
                    order_exp: left,
                    ..c.clone()
                })
            })
            .collect();

        // Order conservation: start = final × (image order)^2 per differential.
        let spent: u32 = order.iter().map(|d| 2 * d.image_exp).sum();
        let final_exp: u32 = classes.iter().map(|c| c.order_exp).sum();
        debug_assert_eq!(
            self.total_order(),
            BigUint::from(self.p.get()).pow(final_exp + spent)
        );

        Ok(RunOutcome {
            chart: Chart {
                classes,
                differentials: Vec::new(),
                ..self.clone()
            },
            fired_conjectural,
            differentials_applied: order.len(),
        })
    }

    /// Restrict to the fixed-point range: drop classes with filtration
    /// above the bound, keep differentials lying entirely inside, and drop
    /// differentials entering from outside; their targets stay as the
    /// extra surviving classes of the truncated chart.
    pub fn truncate(&self, max_filtration: i64) -> TruncateOutcome {
        let keep = |name: &str| {
            self.class(name)
                .map(|c| c.filtration <= max_filtration)
                .unwrap_or(false)
        };
        let classes: Vec<ChartClass> = self
            .classes
            .iter()
            .filter(|c| c.filtration <= max_filtration)
            .cloned()
            .collect();
        let mut entering = 0;
        let mut entering_conjectural = false;
        let mut differentials = Vec::new();
        for d in &self.differentials {
            match (keep(&d.source), keep(&d.target)) {
                (true, true) => differentials.push(d.clone()),
                (false, true) => {
                    entering += 1;
                    entering_conjectural |= d.status.is_conjectural();
                }
                // A differential lowers filtration, so source-inside /
                // target-outside cannot happen; fully outside is dropped.
                _ => {}
            }
        }
        let extensions: Vec<HiddenExtension> = self
            .extensions
            .iter()
            .filter(|e| keep(&e.lower) && keep(&e.upper))
            .cloned()
            .collect();
        let dropped_classes = self.classes.len() - classes.len();
        TruncateOutcome {
            chart: Chart {
                classes,
                differentials,
                extensions,
                ..self.clone()
            },
            dropped_classes,
            entering,
            entering_conjectural,
        }
    }

    /// Product of the class orders in one total degree (1 if empty).
    pub fn degree_order(&self, degree: i64) -> BigUint {
        let exp: u32 = self
            .classes
            .iter()
            .filter(|c| c.degree == degree)
            .map(|c| c.order_exp)
            .sum();
        BigUint::from(self.p.get()).pow(exp)
    }

    /// Any class in the degree is itself conjectural.
    pub fn degree_conjectural(&self, degree: i64) -> bool {
        self.classes
            .iter()
            .any(|c| c.degree == degree && c.status.is_conjectural())
    }

    /// Merge the survivors of one total degree into an abelian p-group:
    /// classes chained by hidden extensions fuse into a single cyclic
    /// summand whose order is the product along the chain; loose classes
    /// stay separate. Only extensions with both endpoints surviving in the
    /// degree apply. Call on a final page.
    pub fn assemble(&self, degree: i64) -> Result<Assembled, ChartError> {
        let survivors: Vec<&ChartClass> =
            self.classes.iter().filter(|c| c.degree == degree).collect();
        let index: HashMap<&str, usize> = survivors
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.as_str(), i))
            .collect();

        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut has_incoming = vec![false; survivors.len()];
        let mut conjectural = survivors.iter().any(|c| c.status.is_conjectural());
        for e in &self.extensions {
            let (Some(&lo), Some(&up)) = (index.get(e.lower.as_str()), index.get(e.upper.as_str()))
            else {
                continue;
            };
            if next.insert(lo, up).is_some() || has_incoming[up] {
                return Err(ChartError::Assemble {
                    degree,
                    msg: format!(
                        "extension chains branch at `{}` / `{}`",
                        e.lower, e.upper
                    ),
                });
            }
            has_incoming[up] = true;
            conjectural |= e.status.is_conjectural();
        }

        let mut exponents = Vec::new();
        let mut visited = vec![false; survivors.len()];
        for start in 0..survivors.len() {
            if has_incoming[start] || visited[start] {
                continue;
            }
            let mut exp = 0u32;
            let mut at = start;
            loop {
                if visited[at] {
                    return Err(ChartError::Assemble {
                        degree,
                        msg: "extension chain forms a cycle".to_string(),
                    });
                }
                visited[at] = true;
                exp += survivors[at].order_exp;
                match next.get(&at) {
                    Some(&n) => at = n,
                    None => break,
                }
            }
            exponents.push(exp);
        }
        if visited.iter().any(|v| !v) {
            return Err(ChartError::Assemble {
                degree,
                msg: "extension chain forms a cycle".to_string(),
            });
        }

        Ok(Assembled {
            group: AbelianPGroup::new(self.p, exponents),
            conjectural,
        })
    }

    /// Compare one total-degree order against an expected value;
    /// `extra_conjectural` carries taint from earlier stages (run,
    /// truncation). A mismatch is a report, not an error.
    pub fn audit_degree(
        &self,
        degree: i64,
        expected: &BigUint,
        extra_conjectural: bool,
    ) -> AuditReport {
        let computed = self.degree_order(degree);
        AuditReport {
            degree,
            matched: computed == *expected,
            conjectural: extra_conjectural || self.degree_conjectural(degree),
            computed,
            expected: expected.clone(),
        }
    }

    /// Canonical text form; `load_str` of the output reproduces the chart.
    pub fn save_string(&self) -> String {
        format::save_string(self)
    }
}
