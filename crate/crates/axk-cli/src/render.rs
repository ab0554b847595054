//! Chart renderings: a text grid and a static SVG figure, both laid out
//! with total degree on the horizontal axis and filtration on the
//! vertical. Survivors of the run are circled.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use axk_core::chart::Chart;

fn cell_label(chart: &Chart, name: &str, order_exp: u32, survivors: Option<&HashSet<String>>) -> String {
    let base = format!("{name}[{}^{}]", chart.p, order_exp);
    match survivors {
        Some(s) if s.contains(name) => format!("({base})"),
        _ => base,
    }
}

/// Plain-text grid: one row per filtration (descending), one column per
/// total degree (ascending).
pub fn grid(chart: &Chart, survivors: Option<&HashSet<String>>) -> String {
    if chart.classes.is_empty() {
        return "(empty chart)\n".to_string();
    }
    let degrees: BTreeSet<i64> = chart.classes.iter().map(|c| c.degree).collect();
    let filtrations: BTreeSet<i64> = chart.classes.iter().map(|c| c.filtration).collect();

    let mut cells: BTreeMap<(i64, i64), Vec<String>> = BTreeMap::new();
    for c in &chart.classes {
        cells
            .entry((c.filtration, c.degree))
            .or_default()
            .push(cell_label(chart, &c.name, c.order_exp, survivors));
    }

    let row_header = "filtration";
    let mut col_widths: BTreeMap<i64, usize> = BTreeMap::new();
    for &n in &degrees {
        let mut w = format!("deg {n}").len();
        for &s in &filtrations {
            if let Some(parts) = cells.get(&(s, n)) {
                w = w.max(parts.join("; ").len());
            }
        }
        col_widths.insert(n, w);
    }
    let head_w = row_header.len().max(
        filtrations
            .iter()
            .map(|s| s.to_string().len())
            .max()
            .unwrap_or(0),
    );

    let mut out = String::new();
    out.push_str(&format!("{row_header:>head_w$}"));
    for &n in &degrees {
        out.push_str(&format!(" | {:>w$}", format!("deg {n}"), w = col_widths[&n]));
    }
    out.push('\n');
    let total = head_w + degrees.iter().map(|n| col_widths[n] + 3).sum::<usize>();
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for &s in filtrations.iter().rev() {
        out.push_str(&format!("{s:>head_w$}"));
        for &n in &degrees {
            let text = cells
                .get(&(s, n))
                .map(|parts| parts.join("; "))
                .unwrap_or_default();
            out.push_str(&format!(" | {:>w$}", text, w = col_widths[&n]));
        }
        out.push('\n');
    }
    out
}

/// Static SVG figure: class labels on a degree/filtration grid with
/// differential arrows; survivors are circled.
pub fn svg(chart: &Chart, survivors: Option<&HashSet<String>>) -> String {
    const CELL_W: i64 = 170;
    const CELL_H: i64 = 44;
    const MARGIN: i64 = 70;

    let mut out = String::new();
    if chart.classes.is_empty() {
        out.push_str(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"240\" height=\"80\">\n",
        );
        out.push_str(&format!(
            "  <text x=\"20\" y=\"40\" font-size=\"13\">{} (empty chart)</text>\n</svg>\n",
            chart.name
        ));
        return out;
    }

    let min_deg = chart.classes.iter().map(|c| c.degree).min().unwrap();
    let max_deg = chart.classes.iter().map(|c| c.degree).max().unwrap();
    let min_filt = chart.classes.iter().map(|c| c.filtration).min().unwrap();
    let max_filt = chart.classes.iter().map(|c| c.filtration).max().unwrap();

    let x = |deg: i64| MARGIN + (deg - min_deg) * CELL_W + CELL_W / 2;
    let y = |filt: i64| MARGIN + (max_filt - filt) * CELL_H / 2 + CELL_H / 2;

    let width = MARGIN * 2 + (max_deg - min_deg + 1) * CELL_W;
    let height = MARGIN * 2 + (max_filt - min_filt + 1) * CELL_H / 2 + CELL_H;

    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str("  <defs>\n    <marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"3\" orient=\"auto\">\n      <path d=\"M0,0 L7,3 L0,6 z\" fill=\"#444\"/>\n    </marker>\n  </defs>\n");
    out.push_str(&format!(
        "  <text x=\"{MARGIN}\" y=\"28\" font-size=\"15\" font-weight=\"bold\">{}</text>\n",
        chart.name
    ));

    // Axis labels.
    for deg in min_deg..=max_deg {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#666\" text-anchor=\"middle\">deg {deg}</text>\n",
            x(deg),
            height - 18
        ));
    }
    out.push_str(&format!(
        "  <text x=\"14\" y=\"{}\" font-size=\"11\" fill=\"#666\">filt {max_filt}</text>\n",
        y(max_filt)
    ));
    out.push_str(&format!(
        "  <text x=\"14\" y=\"{}\" font-size=\"11\" fill=\"#666\">filt {min_filt}</text>\n",
        y(min_filt)
    ));

    // Differential arrows underneath the labels.
    for d in &chart.differentials {
        let (Some(src), Some(tgt)) = (
            chart.classes.iter().find(|c| c.name == d.source),
            chart.classes.iter().find(|c| c.name == d.target),
        ) else {
            continue;
        };
        let (x1, y1) = (x(src.degree), y(src.filtration));
        let (x2, y2) = (x(tgt.degree), y(tgt.filtration));
        let dash = if d.status.is_conjectural() {
            " stroke-dasharray=\"5,4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#444\" stroke-width=\"1\" marker-end=\"url(#arrow)\"{dash}/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#444\">d{}</text>\n",
            (x1 + x2) / 2 + 4,
            (y1 + y2) / 2 - 4,
            d.page
        ));
    }

    // Classes, stacked when several share a position.
    let mut offsets: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    for c in &chart.classes {
        let slot = offsets.entry((c.filtration, c.degree)).or_insert(0);
        let cy = y(c.filtration) + *slot * 14;
        *slot += 1;
        let cx = x(c.degree);
        let label = format!("{}[{}^{}]", c.name, chart.p, c.order_exp);
        if let Some(s) = survivors {
            if s.contains(&c.name) {
                let rx = 10 + 3 * label.len() as i64;
                out.push_str(&format!(
                    "  <ellipse cx=\"{cx}\" cy=\"{}\" rx=\"{rx}\" ry=\"11\" fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\"/>\n",
                    cy - 4
                ));
            }
        }
        out.push_str(&format!(
            "  <text x=\"{cx}\" y=\"{cy}\" font-size=\"12\" text-anchor=\"middle\">{label}</text>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}
