//! `axk`: exact calculator for the relative K-groups of the coordinate
//! axes over Z, their TR-summand orders, abelian p-group discrimination,
//! and Tate chart audits.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 verification mismatch,
//! 3 mismatch that rests on conjectural data only.

mod render;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use axk_core::abelian::{self, AbelianPGroup};
use axk_core::chart::{self, Chart};
use axk_core::registry;
use axk_core::rep::{self, Prime, PrimePower};
use axk_core::tr::{self, Contribution};
use axk_core::Status;

const EXIT_MISMATCH: u8 = 2;
const EXIT_CONJECTURAL_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(
    name = "axk",
    version,
    about = "Exact K-group, TR-order, and Tate-chart calculator for Z[x,y]/(xy) relative to (x,y)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Records,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderKind {
    Grid,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, torsion order, and summand decomposition of K_q
    K {
        /// Total degree q
        q: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Recompute every degree pair up to 2·max_i+1 and check the order law
    Verify {
        #[arg(long, default_value_t = 40)]
        max_i: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// One TR summand: level, lambda index, raw order, p-part
    Tr {
        #[arg(long)]
        i: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Enumerate abelian p-group candidates, optionally filtered by an
    /// observed mod p^v order
    Discriminate {
        /// Total exponent: the group has order p^order_exp
        #[arg(long)]
        order_exp: u32,
        /// Number of cyclic summands
        #[arg(long)]
        summands: u32,
        #[arg(long)]
        p: u64,
        /// Coefficient exponent v of the mod p^v observation
        #[arg(long, requires = "observed")]
        v: Option<u32>,
        /// Observed order of the group mod p^v
        #[arg(long, requires = "v")]
        observed: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Load a chart file, run it to the final page, audit and render
    Chart {
        /// Path to a chart file, or the name of a bundled chart
        /// (searched in $AXK_DATA_DIR first)
        file: String,
        /// Truncate to the fixed-point range before running; without a
        /// value the chart's default bound (twice the lambda shift) is used
        #[arg(long, num_args = 0..=1, default_missing_value = "chart-default", value_name = "FILTRATION")]
        truncate: Option<String>,
        /// Total degree to report on
        #[arg(long)]
        degree: Option<i64>,
        /// Expected order of the reported degree (audit)
        #[arg(long, requires = "degree")]
        expect: Option<String>,
        #[arg(long, value_enum)]
        render: Option<RenderKind>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (e.g. `axk k 13 | head`), like other
    // line-oriented tools.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::K { q, format } => cmd_k(q, format),
        Command::Verify { max_i, format } => cmd_verify(max_i, format),
        Command::Tr { i, p, d, format } => cmd_tr(i, p, d, format),
        Command::Discriminate {
            order_exp,
            summands,
            p,
            v,
            observed,
            format,
        } => cmd_discriminate(order_exp, summands, p, v, observed, format),
        Command::Chart {
            file,
            truncate,
            degree,
            expect,
            render,
            format,
        } => cmd_chart(file, truncate, degree, expect, render, format),
    }
}

fn parse_prime(p: u64) -> Result<Prime> {
    Prime::new(p).map_err(|e| anyhow!("{e}"))
}

fn parse_biguint(s: &str) -> Result<BigUint> {
    s.parse()
        .map_err(|_| anyhow!("`{s}` is not a non-negative integer"))
}

fn print_record(command: &str, inputs: Value, results: Value, status: Option<Status>) {
    let record = json!({
        "command": command,
        "inputs": inputs,
        "results": results,
        "status": status.map(|s| s.to_string()),
    });
    println!("{}", serde_json::to_string_pretty(&record).expect("serializable"));
}

fn summand_json(s: &tr::TrSummand) -> Value {
    match &s.contribution {
        Contribution::Torsion {
            order_raw,
            order_p_part,
            p_part_exp,
        } => json!({
            "p": s.p.get(),
            "d": s.d,
            "r": s.r,
            "lambda_index": s.lambda_index,
            "kind": "torsion",
            "order_raw": order_raw.to_string(),
            "order_p_part": order_p_part.to_string(),
            "p_part_exp": p_part_exp,
        }),
        Contribution::Free { rank } => json!({
            "p": s.p.get(),
            "d": s.d,
            "r": s.r,
            "lambda_index": s.lambda_index,
            "kind": "free",
            "rank": rank,
        }),
    }
}

fn cmd_k(q: u64, format: Format) -> Result<ExitCode> {
    let report = tr::k_group(q);
    let known = registry::known_k_group(q);
    match format {
        Format::Text => {
            if report.rank == 1 {
                println!("K_{q}(Z[x,y]/(xy), (x,y)) ≅ Z: free of rank 1");
            } else if report.torsion_order == BigUint::from(1u32) {
                println!("K_{q}(Z[x,y]/(xy), (x,y)) = 0 (trivial)");
            } else {
                println!(
                    "K_{q}(Z[x,y]/(xy), (x,y)): finite of order {}",
                    report.torsion_order
                );
            }
            if let Some(note) = &report.note {
                println!("  note: {note}");
            }
            for (p, part) in &report.per_prime {
                let exp = rep::p_valuation(part, Prime::new(*p).expect("prime key"))
                    .expect("positive part");
                println!("  {p}-part: {part} = {}", PrimePower::new(Prime::new(*p).unwrap(), exp));
            }
            if !report.summands.is_empty() {
                println!("summands:");
                for s in &report.summands {
                    match &s.contribution {
                        Contribution::Torsion {
                            order_raw,
                            p_part_exp,
                            ..
                        } => println!(
                            "  {s}: raw order {order_raw}, p-part {}",
                            PrimePower::new(s.p, *p_part_exp)
                        ),
                        Contribution::Free { .. } => {
                            println!("  {s}: free of rank 1 (i = {}^{}·{})", s.p, s.r - 1, s.d)
                        }
                    }
                }
            }
            match known {
                Some(entry) => println!(
                    "known structure: {} ({} — {})",
                    entry.group_string(),
                    entry.status,
                    entry.source
                ),
                None if report.rank == 0 && report.torsion_order > BigUint::from(1u32) => {
                    println!("known structure: not recorded (group structure open in general)")
                }
                None => {}
            }
        }
        Format::Records => {
            let results = json!({
                "rank": report.rank,
                "torsion_order": report.torsion_order.to_string(),
                "per_prime": report
                    .per_prime
                    .iter()
                    .map(|(p, v)| (p.to_string(), Value::String(v.to_string())))
                    .collect::<serde_json::Map<_, _>>(),
                "summands": report.summands.iter().map(summand_json).collect::<Vec<_>>(),
                "note": report.note,
                "known_structure": known.map(|e| json!({
                    "group": e.group_string(),
                    "status": e.status.to_string(),
                    "source": e.source,
                })),
            });
            print_record("k", json!({ "q": q }), results, known.map(|e| e.status));
        }
        Format::Csv => {
            println!("q,rank,torsion_order,p,d,r,lambda_index,order_raw,order_p_part");
            if report.summands.is_empty() {
                println!("{q},{},{},,,,,,", report.rank, report.torsion_order);
            }
            for s in &report.summands {
                let (raw, part) = match &s.contribution {
                    Contribution::Torsion {
                        order_raw,
                        order_p_part,
                        ..
                    } => (order_raw.to_string(), order_p_part.to_string()),
                    Contribution::Free { .. } => (String::new(), String::new()),
                };
                println!(
                    "{q},{},{},{},{},{},{},{raw},{part}",
                    report.rank,
                    report.torsion_order,
                    s.p.get(),
                    s.d,
                    s.r,
                    s.lambda_index
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(max_i: u64, format: Format) -> Result<ExitCode> {
    let report = tr::verify_orders(max_i);
    match format {
        Format::Text => {
            for entry in &report.entries {
                let mark = if entry.pass { "ok" } else { "MISMATCH" };
                println!(
                    "i = {:>3}: K_{} rank {}, K_{} order {} (expected {}) {mark}",
                    entry.i,
                    2 * entry.i,
                    entry.even_rank,
                    2 * entry.i + 1,
                    entry.odd_order,
                    entry.expected_odd,
                );
            }
            match report.first_failure {
                None => println!(
                    "verified 0 <= i <= {} in {:.2?}: ranks 1, torsion orders (i!)^2, per-prime parts match the factorial valuation",
                    max_i, report.elapsed
                ),
                Some(i) => println!("FIRST DISCREPANCY at i = {i}"),
            }
        }
        Format::Records => {
            let results = json!({
                "all_pass": report.all_pass(),
                "first_failure": report.first_failure,
                "entries": report.entries.iter().map(|e| json!({
                    "i": e.i,
                    "even_degree": 2 * e.i,
                    "odd_degree": 2 * e.i + 1,
                    "even_rank": e.even_rank,
                    "even_torsion": e.even_torsion.to_string(),
                    "odd_order": e.odd_order.to_string(),
                    "expected_odd": e.expected_odd.to_string(),
                    "per_prime_ok": e.per_prime_ok,
                    "pass": e.pass,
                })).collect::<Vec<_>>(),
            });
            print_record("verify", json!({ "max_i": max_i }), results, None);
        }
        Format::Csv => {
            println!("q,order");
            for entry in &report.entries {
                println!("{},{}", 2 * entry.i, entry.even_torsion);
                println!("{},{}", 2 * entry.i + 1, entry.odd_order);
            }
        }
    }
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    })
}

fn cmd_tr(i: u64, p: u64, d: u64, format: Format) -> Result<ExitCode> {
    let p = parse_prime(p)?;
    let summand = tr::tr_summand(i, p, d).map_err(|e| anyhow!("{e}"))?;
    match format {
        Format::Text => match &summand {
            None => println!("TR summand at i={i}, p={p}, d={d}: trivial (d > i, no level)"),
            Some(s) => {
                let Contribution::Torsion {
                    order_raw,
                    order_p_part,
                    p_part_exp,
                } = &s.contribution
                else {
                    unreachable!("odd summands are torsion")
                };
                println!("TR summand at i={i} (degree {}), p={p}, d={d}", s.q);
                println!("  level r = {}, lambda index {}", s.r, s.lambda_index);
                println!(
                    "  {s}: raw order {order_raw}, p-part {order_p_part} = {}",
                    PrimePower::new(s.p, *p_part_exp)
                );
                if let Some(entry) = registry::known_tr(s.r, s.q, s.lambda_index, s.p.get()) {
                    println!(
                        "  known structure: {} ({} — {})",
                        entry.group_string(),
                        entry.status,
                        entry.source
                    );
                }
            }
        },
        Format::Records => {
            let results = match &summand {
                None => json!({ "trivial": true }),
                Some(s) => {
                    let mut value = summand_json(s);
                    value["trivial"] = json!(false);
                    value["degree"] = json!(s.q);
                    value
                }
            };
            print_record("tr", json!({ "i": i, "p": p.get(), "d": d }), results, None);
        }
        Format::Csv => {
            println!("i,p,d,r,lambda_index,order_raw,order_p_part");
            match &summand {
                None => println!("{i},{p},{d},,,1,1"),
                Some(s) => {
                    let Contribution::Torsion {
                        order_raw,
                        order_p_part,
                        ..
                    } = &s.contribution
                    else {
                        unreachable!()
                    };
                    println!(
                        "{i},{p},{d},{},{},{order_raw},{order_p_part}",
                        s.r, s.lambda_index
                    );
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_discriminate(
    order_exp: u32,
    summands: u32,
    p: u64,
    v: Option<u32>,
    observed: Option<String>,
    format: Format,
) -> Result<ExitCode> {
    let p = parse_prime(p)?;
    let candidates = abelian::enumerate_candidates(order_exp, summands, p);
    let observed_value = observed.as_deref().map(parse_biguint).transpose()?;
    let filtered = match (&observed_value, v) {
        (Some(obs), Some(v)) => Some(abelian::discriminate(order_exp, summands, p, v, obs)),
        _ => None,
    };
    let shown = filtered.as_ref().unwrap_or(&candidates);
    let determined = shown.len() == 1;

    match format {
        Format::Text => {
            let list = |groups: &[AbelianPGroup]| {
                groups
                    .iter()
                    .map(AbelianPGroup::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            println!(
                "candidates of order {} in {summands} summands: {}",
                PrimePower::new(p, order_exp),
                list(&candidates)
            );
            if let (Some(filtered), Some(v)) = (&filtered, v) {
                println!(
                    "consistent with order {} mod {}: {}",
                    observed_value.as_ref().expect("observed parsed"),
                    PrimePower::new(p, v),
                    if filtered.is_empty() {
                        "none".to_string()
                    } else {
                        list(filtered)
                    }
                );
            }
            match shown.len() {
                0 => println!("no candidate is consistent with the constraints"),
                1 => println!("structure determined: {}", shown[0]),
                n => println!("{n} candidates remain"),
            }
        }
        Format::Records => {
            let results = json!({
                "candidates": candidates.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "filtered": filtered
                    .as_ref()
                    .map(|f| f.iter().map(|g| g.to_string()).collect::<Vec<_>>()),
                "exponents": shown.iter().map(|g| g.exponents().to_vec()).collect::<Vec<_>>(),
                "determined": determined,
            });
            print_record(
                "discriminate",
                json!({
                    "order_exp": order_exp,
                    "summands": summands,
                    "p": p.get(),
                    "v": v,
                    "observed": observed,
                }),
                results,
                None,
            );
        }
        Format::Csv => {
            println!("group,exponents");
            for g in shown {
                let exps = g
                    .exponents()
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{g},{exps}");
            }
        }
    }
    Ok(if shown.is_empty() {
        ExitCode::from(EXIT_MISMATCH)
    } else {
        ExitCode::SUCCESS
    })
}

/// Resolve a chart argument: an existing path, a file under $AXK_DATA_DIR,
/// or a bundled chart name.
fn resolve_chart(file: &str) -> Result<Chart> {
    let path = Path::new(file);
    if path.exists() {
        return chart::load_path(path).map_err(|e| anyhow!("{file}: {e}"));
    }
    if let Ok(dir) = std::env::var("AXK_DATA_DIR") {
        for candidate in [
            PathBuf::from(&dir).join(file),
            PathBuf::from(&dir).join(format!("{file}.chart")),
        ] {
            if candidate.exists() {
                return chart::load_path(&candidate)
                    .map_err(|e| anyhow!("{}: {e}", candidate.display()));
            }
        }
    }
    let name = file.strip_suffix(".chart").unwrap_or(file);
    if let Some(loaded) = chart::load_bundled(name) {
        return loaded.map_err(|e| anyhow!("bundled {name}: {e}"));
    }
    bail!(
        "chart `{file}` not found: not a path, not in $AXK_DATA_DIR, and not one of the bundled charts ({})",
        chart::bundled_chart_names().join(", ")
    );
}

fn cmd_chart(
    file: String,
    truncate: Option<String>,
    degree: Option<i64>,
    expect: Option<String>,
    render: Option<RenderKind>,
    format: Format,
) -> Result<ExitCode> {
    if format == Format::Csv {
        bail!("csv output is not available for `chart`; use text or records");
    }
    let loaded = resolve_chart(&file)?;
    let expect_value = expect.as_deref().map(parse_biguint).transpose()?;

    let bound = match truncate.as_deref() {
        None => None,
        Some("chart-default") => Some(loaded.truncation_bound()),
        Some(raw) => Some(
            raw.parse::<i64>()
                .with_context(|| format!("bad truncation bound `{raw}`"))?,
        ),
    };

    let (working, truncation) = match bound {
        None => (loaded.clone(), None),
        Some(b) => {
            let outcome = loaded.truncate(b);
            (outcome.chart.clone(), Some(outcome))
        }
    };
    let run = working.run_to_final().map_err(|e| anyhow!("{e}"))?;
    let taint = run.fired_conjectural
        || truncation
            .as_ref()
            .is_some_and(|t| t.entering_conjectural);

    let survivors: HashSet<String> = run.chart.classes.iter().map(|c| c.name.clone()).collect();
    let degree_report = degree.map(|n| {
        let order = run.chart.degree_order(n);
        let assembled = run.chart.assemble(n);
        (n, order, assembled)
    });
    let audit = match (&degree_report, &expect_value) {
        (Some((n, _, _)), Some(expected)) => Some(run.chart.audit_degree(*n, expected, taint)),
        _ => None,
    };

    match format {
        Format::Text => {
            // With an SVG render the figure owns stdout (so it can be
            // redirected into a .svg file); the summary moves to stderr.
            let svg_owns_stdout = render == Some(RenderKind::Svg);
            macro_rules! info {
                ($($arg:tt)*) => {
                    if svg_owns_stdout {
                        eprintln!($($arg)*);
                    } else {
                        println!($($arg)*);
                    }
                };
            }
            let coeffs = match loaded.coefficients {
                chart::Coefficients::Integral => "integral".to_string(),
                chart::Coefficients::ModPPower(v) => {
                    format!("mod {}", loaded.p.get().pow(v))
                }
            };
            info!(
                "chart {}: prime {}, C_{} level, {coeffs} coefficients, lambda shift {}",
                loaded.name,
                loaded.p,
                loaded.p.get().pow(loaded.subgroup_exp),
                loaded.lambda_shift
            );
            info!(
                "  {} classes, {} differentials, {} extensions — validated",
                loaded.classes.len(),
                loaded.differentials.len(),
                loaded.extensions.len()
            );
            if let Some(t) = &truncation {
                info!(
                    "truncated at filtration <= {}: dropped {} classes, {} differentials entering from outside{}",
                    bound.expect("bound set"),
                    t.dropped_classes,
                    t.entering,
                    if t.entering_conjectural {
                        " (conjectural)"
                    } else {
                        ""
                    }
                );
            }
            info!(
                "final page after applying {} differentials: {} survivors{}",
                run.differentials_applied,
                run.chart.classes.len(),
                if run.fired_conjectural {
                    " (conjectural differentials fired)"
                } else {
                    ""
                }
            );
            if let Some((n, order, assembled)) = &degree_report {
                info!("degree {n}: order {order}");
                match assembled {
                    Ok(a) if !a.group.is_trivial() => info!(
                        "degree {n} assembles to {}{}",
                        a.group,
                        if a.conjectural || taint {
                            " (conjectural)"
                        } else {
                            ""
                        }
                    ),
                    Ok(_) => {}
                    Err(e) => info!("degree {n} does not assemble: {e}"),
                }
            }
            if let Some(a) = &audit {
                info!(
                    "audit: computed {}, expected {} — {}{}",
                    a.computed,
                    a.expected,
                    if a.matched { "match" } else { "MISMATCH" },
                    if a.conjectural { " (conjectural)" } else { "" }
                );
            }
            match render {
                Some(RenderKind::Grid) => {
                    println!();
                    print!("{}", render::grid(&working, Some(&survivors)));
                }
                Some(RenderKind::Svg) => {
                    print!("{}", render::svg(&working, Some(&survivors)));
                }
                None => {}
            }
        }
        Format::Records => {
            let results = json!({
                "chart": loaded.name,
                "p": loaded.p.get(),
                "subgroup_exp": loaded.subgroup_exp,
                "coefficients": loaded.coefficients.to_string(),
                "lambda_shift": loaded.lambda_shift,
                "classes": loaded.classes.len(),
                "differentials": loaded.differentials.len(),
                "extensions": loaded.extensions.len(),
                "truncated_at": bound,
                "dropped_classes": truncation.as_ref().map(|t| t.dropped_classes),
                "entering_differentials": truncation.as_ref().map(|t| t.entering),
                "survivors": run.chart.classes.iter().map(|c| json!({
                    "name": c.name,
                    "filtration": c.filtration,
                    "degree": c.degree,
                    "order_exp": c.order_exp,
                })).collect::<Vec<_>>(),
                "conjectural": taint,
                "degree": degree_report.as_ref().map(|(n, order, assembled)| json!({
                    "degree": n,
                    "order": order.to_string(),
                    "assembled": assembled.as_ref().ok().map(|a| a.group.to_string()),
                    "assembled_conjectural": assembled.as_ref().ok().map(|a| a.conjectural || taint),
                })),
                "audit": audit.as_ref().map(|a| json!({
                    "computed": a.computed.to_string(),
                    "expected": a.expected.to_string(),
                    "matched": a.matched,
                    "conjectural": a.conjectural,
                })),
            });
            let status = if taint {
                Some(Status::Conjectural)
            } else {
                Some(Status::Proven)
            };
            print_record(
                "chart",
                json!({
                    "file": file,
                    "truncate": bound,
                    "degree": degree,
                    "expect": expect,
                }),
                results,
                status,
            );
        }
        Format::Csv => unreachable!("rejected above"),
    }

    Ok(match &audit {
        Some(a) if !a.matched && a.conjectural => ExitCode::from(EXIT_CONJECTURAL_MISMATCH),
        Some(a) if !a.matched => ExitCode::from(EXIT_MISMATCH),
        _ => ExitCode::SUCCESS,
    })
}
