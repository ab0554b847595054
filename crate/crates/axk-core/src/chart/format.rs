//! The chart file format: line-oriented records with explicit keys.
//!
//! ```text
//! # comment
//! chart "c4-mod4-lambda4-deg11"
//! prime 2
//! subgroup_exp 2
//! coefficients mod 4            (or: coefficients integral)
//! lambda_shift 4
//! truncation_default 8          (optional)
//! note "free text"              (repeatable)
//! class "t^-6" filtration 12 degree 12 order_exp 2 status proven
//! differential page 12 source "t^-6" mult 0 target "la1 mu1^2" image 1 status proven
//! extension lower "t^-1 la1 mu1" upper "t^3 la1 mu1^3" status conjectural
//! ```
//!
//! Tokens are whitespace-separated; double quotes delimit names that
//! contain spaces. `status` defaults to proven when omitted. Saving always
//! writes every field in the order above, so save ∘ load is the identity
//! on saved files and load ∘ save is the identity on charts.

use std::path::Path;

use super::{
    Chart, ChartClass, ChartDifferential, ChartError, Coefficients, HiddenExtension, IssueSubject,
};
use crate::rep::Prime;
use crate::Status;

pub fn load_path(path: &Path) -> Result<Chart, ChartError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChartError::Io(e.to_string()))?;
    load_str(&text)
}

/// Parse and fully validate a chart document. Syntax errors carry their
/// line; semantic violations are collected per record with its line.
pub fn load_str(text: &str) -> Result<Chart, ChartError> {
    let parser = Parser::parse(text)?;
    let chart = parser.chart;
    let all = chart.validation_issues();
    if !all.is_empty() {
        let issues = all
            .into_iter()
            .map(|(subject, msg)| {
                let line = match subject {
                    IssueSubject::Class(i) => parser.class_lines.get(i),
                    IssueSubject::Differential(i) => parser.diff_lines.get(i),
                    IssueSubject::Extension(i) => parser.ext_lines.get(i),
                };
                match line {
                    Some(line) => format!("line {line}: {msg}"),
                    None => msg,
                }
            })
            .collect();
        return Err(ChartError::Invalid(issues));
    }
    Ok(chart)
}

struct Parser {
    chart: Chart,
    class_lines: Vec<usize>,
    diff_lines: Vec<usize>,
    ext_lines: Vec<usize>,
}

enum RawCoefficients {
    Integral,
    /// Modulus as written, with the line for error reporting.
    Mod(u64, usize),
}

impl Parser {
    fn parse(text: &str) -> Result<Self, ChartError> {
        let mut name = None;
        let mut prime = None;
        let mut subgroup_exp = None;
        let mut coefficients = None;
        let mut lambda_shift = None;
        let mut truncation_default = None;
        let mut notes = Vec::new();
        let mut classes = Vec::new();
        let mut differentials = Vec::new();
        let mut extensions = Vec::new();
        let mut class_lines = Vec::new();
        let mut diff_lines = Vec::new();
        let mut ext_lines = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens = tokenize(line, lineno)?;
            let err = |msg: String| ChartError::Parse { line: lineno, msg };
            match tokens[0].as_str() {
                "chart" => name = Some(expect_one(&tokens, lineno)?),
                "prime" => {
                    let p: u64 = expect_one(&tokens, lineno)?
                        .parse()
                        .map_err(|_| err("bad prime".into()))?;
                    prime = Some(Prime::new(p).map_err(|e| err(e.to_string()))?);
                }
                "subgroup_exp" => {
                    subgroup_exp = Some(
                        expect_one(&tokens, lineno)?
                            .parse()
                            .map_err(|_| err("bad subgroup exponent".into()))?,
                    )
                }
                "coefficients" => {
                    coefficients = Some(match tokens.get(1).map(String::as_str) {
                        Some("integral") if tokens.len() == 2 => RawCoefficients::Integral,
                        Some("mod") if tokens.len() == 3 => {
                            let modulus: u64 = tokens[2]
                                .parse()
                                .map_err(|_| err("bad modulus".into()))?;
                            if modulus < 2 {
                                return Err(err("mod coefficients need a modulus >= 2".into()));
                            }
                            RawCoefficients::Mod(modulus, lineno)
                        }
                        _ => return Err(err("expected `integral` or `mod <p^v>`".into())),
                    })
                }
                "lambda_shift" => {
                    lambda_shift = Some(
                        expect_one(&tokens, lineno)?
                            .parse()
                            .map_err(|_| err("bad lambda shift".into()))?,
                    )
                }
                "truncation_default" => {
                    truncation_default = Some(
                        expect_one(&tokens, lineno)?
                            .parse()
                            .map_err(|_| err("bad truncation bound".into()))?,
                    )
                }
                "note" => notes.push(expect_one(&tokens, lineno)?),
                "class" => {
                    let mut fields = Fields::new(&tokens[1..], lineno)?;
                    let class = ChartClass {
                        name: fields.take("name-first")?,
                        filtration: fields.int("filtration")?,
                        degree: fields.int("degree")?,
                        order_exp: fields.uint("order_exp")?,
                        status: fields.status()?,
                    };
                    fields.finish()?;
                    class_lines.push(lineno);
                    classes.push(class);
                }
                "differential" => {
                    let mut fields = Fields::new(&tokens[1..], lineno)?;
                    let d = ChartDifferential {
                        page: fields.keyed_uint("page")?,
                        source: fields.keyed_name("source")?,
                        source_mult_exp: fields.keyed_uint("mult")?,
                        target: fields.keyed_name("target")?,
                        image_exp: fields.keyed_uint("image")?,
                        status: fields.status()?,
                    };
                    fields.finish()?;
                    diff_lines.push(lineno);
                    differentials.push(d);
                }
                "extension" => {
                    let mut fields = Fields::new(&tokens[1..], lineno)?;
                    let e = HiddenExtension {
                        lower: fields.keyed_name("lower")?,
                        upper: fields.keyed_name("upper")?,
                        status: fields.status()?,
                    };
                    fields.finish()?;
                    ext_lines.push(lineno);
                    extensions.push(e);
                }
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }

        let missing = |what: &str| ChartError::Parse {
            line: 0,
            msg: format!("missing `{what}` header"),
        };
        let p = prime.ok_or_else(|| missing("prime"))?;
        // The modulus is written as the actual power of p; convert to the
        // exponent once the prime is known.
        let coefficients = match coefficients.ok_or_else(|| missing("coefficients"))? {
            RawCoefficients::Integral => Coefficients::Integral,
            RawCoefficients::Mod(modulus, line) => {
                let mut v = 0u32;
                let mut rest = modulus;
                while rest % p.get() == 0 {
                    rest /= p.get();
                    v += 1;
                }
                if rest != 1 || v == 0 {
                    return Err(ChartError::Parse {
                        line,
                        msg: format!("modulus {modulus} is not a power of the prime {p}"),
                    });
                }
                Coefficients::ModPPower(v)
            }
        };
        Ok(Parser {
            chart: Chart {
                name: name.ok_or_else(|| missing("chart"))?,
                p,
                subgroup_exp: subgroup_exp.ok_or_else(|| missing("subgroup_exp"))?,
                coefficients,
                lambda_shift: lambda_shift.ok_or_else(|| missing("lambda_shift"))?,
                truncation_default,
                notes,
                classes,
                differentials,
                extensions,
            },
            class_lines,
            diff_lines,
            ext_lines,
        })
    }
}

/// Whitespace tokenizer; a double-quoted stretch is one token.
fn tokenize(line: &str, lineno: usize) -> Result<Vec<String>, ChartError> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(c) => tok.push(c),
                    None => {
                        return Err(ChartError::Parse {
                            line: lineno,
                            msg: "unterminated quote".to_string(),
                        })
                    }
                }
            }
            tokens.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                tok.push(c);
                chars.next();
            }
            tokens.push(tok);
        }
    }
    if tokens.is_empty() {
        return Err(ChartError::Parse {
            line: lineno,
            msg: "empty record".to_string(),
        });
    }
    Ok(tokens)
}

fn expect_one(tokens: &[String], lineno: usize) -> Result<String, ChartError> {
    if tokens.len() != 2 {
        return Err(ChartError::Parse {
            line: lineno,
            msg: format!("`{}` takes exactly one value", tokens[0]),
        });
    }
    Ok(tokens[1].clone())
}

/// Cursor over a record's tokens after the keyword: a leading name, then
/// `key value` pairs.
struct Fields<'a> {
    tokens: &'a [String],
    at: usize,
    lineno: usize,
}

impl<'a> Fields<'a> {
    fn new(tokens: &'a [String], lineno: usize) -> Result<Self, ChartError> {
        Ok(Fields { tokens, at: 0, lineno })
    }

    fn err(&self, msg: String) -> ChartError {
        ChartError::Parse {
            line: self.lineno,
            msg,
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ChartError> {
        let tok = self
            .tokens
            .get(self.at)
            .ok_or_else(|| self.err(format!("missing {what}")))?;
        self.at += 1;
        Ok(tok)
    }

    /// The record's leading (possibly quoted) name.
    fn take(&mut self, what: &str) -> Result<String, ChartError> {
        Ok(self.next(what)?.to_string())
    }

    fn key(&mut self, key: &str) -> Result<(), ChartError> {
        let tok = self.next(&format!("`{key}`"))?;
        if tok != key {
            return Err(self.err(format!("expected `{key}`, found `{tok}`")));
        }
        Ok(())
    }

    fn int(&mut self, key: &str) -> Result<i64, ChartError> {
        self.key(key)?;
        self.next(&format!("{key} value"))?
            .parse()
            .map_err(|_| self.err(format!("bad {key} value")))
    }

    fn uint(&mut self, key: &str) -> Result<u32, ChartError> {
        self.key(key)?;
        self.next(&format!("{key} value"))?
            .parse()
            .map_err(|_| self.err(format!("bad {key} value")))
    }

    fn keyed_uint(&mut self, key: &str) -> Result<u32, ChartError> {
        self.uint(key)
    }

    fn keyed_name(&mut self, key: &str) -> Result<String, ChartError> {
        self.key(key)?;
        self.take(&format!("{key} value"))
    }

    /// Optional trailing `status <proven|conjectural>`; proven by default.
    fn status(&mut self) -> Result<Status, ChartError> {
        if self.tokens.get(self.at).map(String::as_str) == Some("status") {
            self.at += 1;
            let value = self.next("status value")?;
            value.parse().map_err(|e: String| self.err(e))
        } else {
            Ok(Status::Proven)
        }
    }

    fn finish(self) -> Result<(), ChartError> {
        if self.at != self.tokens.len() {
            return Err(self.err(format!("unexpected trailing `{}`", self.tokens[self.at])));
        }
        Ok(())
    }
}

fn quoted(name: &str) -> String {
    format!("\"{name}\"")
}

/// Canonical serialization; every field explicit, records in stored order.
pub fn save_string(chart: &Chart) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("chart {}", quoted(&chart.name)));
    line(format!("prime {}", chart.p));
    line(format!("subgroup_exp {}", chart.subgroup_exp));
    match chart.coefficients {
        Coefficients::Integral => line("coefficients integral".to_string()),
        Coefficients::ModPPower(v) => line(format!("coefficients mod {}", chart.p.get().pow(v))),
    }
    line(format!("lambda_shift {}", chart.lambda_shift));
    if let Some(bound) = chart.truncation_default {
        line(format!("truncation_default {bound}"));
    }
    for note in &chart.notes {
        line(format!("note {}", quoted(note)));
    }
    for c in &chart.classes {
        line(format!(
            "class {} filtration {} degree {} order_exp {} status {}",
            quoted(&c.name),
            c.filtration,
            c.degree,
            c.order_exp,
            c.status
        ));
    }
    for d in &chart.differentials {
        line(format!(
            "differential page {} source {} mult {} target {} image {} status {}",
            d.page,
            quoted(&d.source),
            d.source_mult_exp,
            quoted(&d.target),
            d.image_exp,
            d.status
        ));
    }
    for e in &chart.extensions {
        line(format!(
            "extension lower {} upper {} status {}",
            quoted(&e.lower),
            quoted(&e.upper),
            e.status
        ));
    }
    out
}
