//! Text and JSON rendering of analysis results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::entanglement::{Bipartition, EntanglementReport, EntanglementVerdict};
use crate::fixtures::Reproduction;
use crate::pipeline::PipelineOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// `x` with `digits` significant figures, switching to exponent notation
/// outside `[1e-3, 1e4)`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    // round once in scientific form so a carry (9.9996 → 1.000e1) moves
    // the exponent before the fixed-point width is chosen
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let exponent: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if !(-3..4).contains(&exponent) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn sig4(x: f64) -> String {
    format_significant(x, 4)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn side(tags: &[String], idx: &[usize]) -> String {
    let names: Vec<&str> = idx
        .iter()
        .map(|&k| tags.get(k).map_or("?", String::as_str))
        .collect();
    format!("{{{}}}", names.join(","))
}

fn split_name(tags: &[String], b: &Bipartition) -> String {
    format!("{}|{}", side(tags, b.side_a()), side(tags, b.side_b()))
}

fn verdict_line(v: &EntanglementVerdict) -> String {
    let mut line = format!("{:<12} {:<9}", v.status.to_string(), v.method.to_string());
    if let Some(w) = v.witness {
        let _ = write!(line, " witness {}", sig4(w));
    }
    if v.log_negativity > 0.0 {
        let _ = write!(line, "  E_N {}", sig4(v.log_negativity));
    }
    if let Some(n) = v.iterations {
        let _ = write!(line, "  ({n} iter)");
    }
    line
}

fn report_text(report: &EntanglementReport, out: &mut String) {
    let tags = &report.modes;
    if report.pairwise.is_none() && report.bipartitions.is_empty() {
        out.push_str("no entanglement analyses\n");
        return;
    }
    if let Some(table) = &report.pairwise {
        let width = tags.iter().map(String::len).max().unwrap_or(1).max(2);
        out.push_str("pairwise (two-mode marginals):\n");
        let _ = write!(out, "  {:width$}", "");
        for t in tags {
            let _ = write!(out, " {t:>width$}");
        }
        out.push('\n');
        for (i, ti) in tags.iter().enumerate() {
            let _ = write!(out, "  {ti:width$}");
            for j in 0..tags.len() {
                let cell = table.get(i, j).map_or('.', |v| v.status.letter());
                let _ = write!(out, " {cell:>width$}");
            }
            out.push('\n');
        }
        for (i, j, v) in table.pairs() {
            let name = format!("{}-{}", tags[i], tags[j]);
            let _ = writeln!(out, "  {name:<10} {}", verdict_line(v));
        }
    }
    if !report.bipartitions.is_empty() {
        out.push_str("bipartitions (full state):\n");
        let names: Vec<String> = report
            .bipartitions
            .iter()
            .map(|bv| split_name(tags, &bv.bipartition))
            .collect();
        let width = names.iter().map(|n| n.chars().count()).max().unwrap_or(0);
        for (name, bv) in names.iter().zip(&report.bipartitions) {
            let pad = width - name.chars().count();
            let _ = writeln!(out, "  {name}{:pad$} {}", "", verdict_line(&bv.verdict));
        }
    }
}

/// Renders an entanglement report. JSON output is deterministic for a given
/// report.
pub fn emit_report(report: &EntanglementReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Text => {
            let mut out = String::new();
            report_text(report, &mut out);
            out
        }
    }
}

/// Renders a full pipeline run: per-step diagnostics, the requested scalar
/// analyses and the entanglement report.
pub fn emit_outcome(outcome: &PipelineOutcome, format: Format) -> String {
    if format == Format::Json {
        return json(outcome);
    }
    let mut out = String::from("steps:\n");
    for d in &outcome.diagnostics {
        let _ = writeln!(
            out,
            "  {:>2} {:<15} modes {}  photons {}  purity {}  min eig(Σ+iΩ/2) {:.3e}",
            d.index,
            d.name,
            d.modes,
            sig4(d.total_photons),
            sig4(d.purity),
            d.min_heisenberg_eigenvalue
        );
    }
    if let Some(v) = outcome.validity {
        let _ = writeln!(
            out,
            "validity: symmetric {}  physical {}  min eig(Σ+iΩ/2) {:.3e}",
            v.symmetric, v.physical, v.min_heisenberg_eigenvalue
        );
    }
    if let Some(p) = outcome.purity {
        let _ = writeln!(out, "purity: {}", sig4(p));
    }
    if let Some(photons) = &outcome.photons {
        let tags = &outcome.report.modes;
        let cells: Vec<String> = photons
            .iter()
            .enumerate()
            .map(|(k, n)| format!("{}={}", tags.get(k).map_or("?", String::as_str), sig4(*n)))
            .collect();
        let _ = writeln!(out, "photons: {}", cells.join(" "));
    }
    if outcome.report.pairwise.is_some() || !outcome.report.bipartitions.is_empty() {
        report_text(&outcome.report, &mut out);
    }
    out
}

pub fn emit_reproduction(r: &Reproduction, format: Format) -> String {
    if format == Format::Json {
        return json(r);
    }
    let mut out = emit_outcome(&r.outcome, Format::Text);
    let _ = writeln!(out, "matrix check:");
    let _ = writeln!(
        out,
        "  max |Σ4 − closed form|           {:.3e}",
        r.closed_form_deviation
    );
    let _ = writeln!(
        out,
        "  max |Σ4 − printed| (typo excl.)  {:.3e}",
        r.printed.max_deviation
    );
    let _ = writeln!(
        out,
        "  |Σ4| at printed typo cell        {:.3e}",
        r.printed.typo_cell_deviation
    );
    out
}
