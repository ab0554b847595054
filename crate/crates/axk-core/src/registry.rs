//! Registry of known group structures: the low-degree K-groups and the
//! TR-summands whose cyclic decompositions are on record.
//!
//! The registry ships as a human-readable data file
//! (`data/known_groups.txt`) so the library, the tests, and the docs read
//! one source of truth. Entries are proven or conjectural; the conjectural
//! ones rest on the unresolved long differentials in the integral charts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::Num;
use thiserror::Error;

use crate::abelian::AbelianPGroup;
use crate::rep::{is_prime, Prime};
use crate::Status;

const BUNDLED: &str = include_str!("../data/known_groups.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> RegistryError {
    RegistryError::Parse {
        line,
        msg: msg.into(),
    }
}

/// What a registry entry describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryLabel {
    /// The K-group in odd degree q.
    K { q: u64 },
    /// The summand TR^r_{q−λ_n}(Z;p).
    Tr { r: u32, q: u64, lambda_index: u64, p: u64 },
}

impl fmt::Display for EntryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EntryLabel::K { q } => write!(f, "K_{q}"),
            EntryLabel::Tr {
                r,
                q,
                lambda_index,
                p,
            } => write!(f, "TR^{r}_{{{q}-λ_{lambda_index}}}(Z;{p})"),
        }
    }
}

/// A recorded group structure with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownGroupEntry {
    pub label: EntryLabel,
    /// Primary components, one group per prime (CRT decomposition).
    pub groups: Vec<AbelianPGroup>,
    pub order: BigUint,
    pub summand_counts: BTreeMap<u64, u32>,
    pub status: Status,
    pub source: String,
}

impl KnownGroupEntry {
    /// Canonical "Z/a ⊕ Z/b" rendering, "0" when trivial.
    pub fn group_string(&self) -> String {
        crate::abelian::display_group_list(&self.groups)
    }
}

/// The bundled registry, parsed once.
pub fn known_structures() -> &'static [KnownGroupEntry] {
    static REGISTRY: OnceLock<Vec<KnownGroupEntry>> = OnceLock::new();
    REGISTRY.get_or_init(|| parse_registry(BUNDLED).expect("bundled registry parses"))
}

/// Look up the K-group entry in degree q.
pub fn known_k_group(q: u64) -> Option<&'static KnownGroupEntry> {
    known_structures()
        .iter()
        .find(|e| e.label == EntryLabel::K { q })
}

/// Look up a TR-summand entry by its full index.
pub fn known_tr(r: u32, q: u64, lambda_index: u64, p: u64) -> Option<&'static KnownGroupEntry> {
    known_structures().iter().find(|e| {
        e.label
            == EntryLabel::Tr {
                r,
                q,
                lambda_index,
                p,
            }
    })
}

/// Load a registry from a file in the bundled format.
pub fn load_registry(path: &Path) -> Result<Vec<KnownGroupEntry>, RegistryError> {
    let text = std::fs::read_to_string(path).map_err(|e| RegistryError::Io(e.to_string()))?;
    parse_registry(&text)
}

/// Parse the pipe-separated registry format.
pub fn parse_registry(text: &str) -> Result<Vec<KnownGroupEntry>, RegistryError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(parse_err(
                lineno,
                format!("expected 7 fields separated by `|`, found {}", fields.len()),
            ));
        }
        let indices = parse_indices(fields[1], lineno)?;
        let label = match fields[0] {
            "K" => EntryLabel::K {
                q: *indices
                    .get("q")
                    .ok_or_else(|| parse_err(lineno, "K entry needs q="))?,
            },
            "TR" => {
                let get = |key: &str| {
                    indices
                        .get(key)
                        .copied()
                        .ok_or_else(|| parse_err(lineno, format!("TR entry needs {key}=")))
                };
                EntryLabel::Tr {
                    r: get("r")? as u32,
                    q: get("q")?,
                    lambda_index: get("n")?,
                    p: get("p")?,
                }
            }
            other => return Err(parse_err(lineno, format!("unknown entry kind `{other}`"))),
        };
        let groups = parse_group_list(fields[2], lineno)?;
        let order = BigUint::from_str_radix(fields[3], 10)
            .map_err(|_| parse_err(lineno, format!("bad order `{}`", fields[3])))?;
        let summand_counts = parse_counts(fields[4], lineno)?;
        let status: Status = fields[5]
            .parse()
            .map_err(|e| parse_err(lineno, e))?;
        let entry = KnownGroupEntry {
            label,
            groups,
            order,
            summand_counts,
            status,
            source: fields[6].to_string(),
        };
        validate_entry(&entry, lineno)?;
        entries.push(entry);
    }
    Ok(entries)
}

fn parse_indices(field: &str, lineno: usize) -> Result<BTreeMap<String, u64>, RegistryError> {
    let mut map = BTreeMap::new();
    for tok in field.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(lineno, format!("bad index token `{tok}`")))?;
        let value: u64 = value
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad index value `{tok}`")))?;
        map.insert(key.to_string(), value);
    }
    Ok(map)
}

fn parse_counts(field: &str, lineno: usize) -> Result<BTreeMap<u64, u32>, RegistryError> {
    let mut map = BTreeMap::new();
    if field == "-" {
        return Ok(map);
    }
    for tok in field.split(',') {
        let (p, count) = tok
            .trim()
            .split_once(':')
            .ok_or_else(|| parse_err(lineno, format!("bad count token `{tok}`")))?;
        let p: u64 = p
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad prime in `{tok}`")))?;
        let count: u32 = count
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad count in `{tok}`")))?;
        map.insert(p, count);
    }
    Ok(map)
}

/// Parse "Z/2 ⊕ Z/32 ⊕ Z/9" into one group per prime; "0" is trivial.
fn parse_group_list(field: &str, lineno: usize) -> Result<Vec<AbelianPGroup>, RegistryError> {
    if field == "0" {
        return Ok(Vec::new());
    }
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for factor in field.split('⊕') {
        let factor = factor.trim();
        let order: u64 = factor
            .strip_prefix("Z/")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(lineno, format!("bad cyclic factor `{factor}`")))?;
        if order < 2 {
            return Err(parse_err(lineno, format!("bad cyclic order `{order}`")));
        }
        let p = (2..=order).find(|&f| order.is_multiple_of(f)).expect("order >= 2");
        if !is_prime(p) {
            return Err(parse_err(lineno, format!("{p} is not prime in `{factor}`")));
        }
        let mut e = 0u32;
        let mut rest = order;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(parse_err(
                lineno,
                format!("`{factor}` is not a prime power"),
            ));
        }
        per_prime.entry(p).or_default().push(e);
    }
    Ok(per_prime
        .into_iter()
        .map(|(p, exps)| AbelianPGroup::new(Prime::new(p).expect("validated"), exps))
        .collect())
}

fn validate_entry(entry: &KnownGroupEntry, lineno: usize) -> Result<(), RegistryError> {
    let product: BigUint = entry
        .groups
        .iter()
        .fold(BigUint::from(1u32), |acc, g| acc * g.order());
    if product != entry.order {
        return Err(parse_err(
            lineno,
            format!(
                "declared order {} does not match group order {product}",
                entry.order
            ),
        ));
    }
    let counts: BTreeMap<u64, u32> = entry
        .groups
        .iter()
        .filter(|g| !g.is_trivial())
        .map(|g| (g.prime().get(), g.summand_count() as u32))
        .collect();
    if counts != entry.summand_counts {
        return Err(parse_err(
            lineno,
            "summand counts do not match the group list",
        ));
    }
    Ok(())
}
