//! CSV and aligned-text output of result tables.

use std::io::Write;

use crate::experiment::{SweepRow, TableRow};
use crate::BenchError;

pub const CSV_HEADER: &str = "level,elements,dof,l2_error,eoc,iters,kappa";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn sci(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn cells(row: &TableRow, diagnostics: bool) -> Vec<String> {
    let mut c = vec![
        row.level.to_string(),
        row.elements.to_string(),
        row.dofs.to_string(),
        sci(row.l2_error),
        opt(row.eoc),
        opt(row.iters),
        opt(row.kappa),
    ];
    if diagnostics {
        c.push(row.inner_capped.to_string());
        c.push(if row.failed() { "1".into() } else { "0".into() });
    }
    c
}

fn header(diagnostics: bool) -> Vec<String> {
    let mut h: Vec<String> = CSV_HEADER.split(',').map(String::from).collect();
    if diagnostics {
        h.push("inner_capped".into());
        h.push("failed".into());
    }
    h
}

fn write_aligned<W: Write>(mut w: W, header: &[String], body: &[Vec<String>]) -> Result<(), BenchError> {
    let widths: Vec<usize> = (0..header.len())
        .map(|j| body.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    for line in std::iter::once(header).chain(body.iter().map(|r| r.as_slice())) {
        let parts: Vec<String> = line.iter().zip(&widths).map(|(c, &wd)| format!("{c:>wd$}")).collect();
        writeln!(w, "{}", parts.join("  ").trim_end())?;
    }
    Ok(())
}

/// Write a convergence table. With `diagnostics`, two extra columns report
/// capped inner solves and failed rows.
pub fn emit<W: Write>(rows: &[TableRow], format: Format, diagnostics: bool, mut w: W) -> Result<(), BenchError> {
    if rows.is_empty() {
        return Err(BenchError::Config("no rows to write".into()));
    }
    let body: Vec<Vec<String>> = rows.iter().map(|r| cells(r, diagnostics)).collect();
    match format {
        Format::Csv => {
            writeln!(w, "{}", header(diagnostics).join(","))?;
            for r in &body {
                writeln!(w, "{}", r.join(","))?;
            }
        }
        Format::Text => write_aligned(w, &header(diagnostics), &body)?,
    }
    Ok(())
}

/// Write an iteration matrix with one column per weight.
pub fn emit_sweep<W: Write>(taus: &[f64], rows: &[SweepRow], format: Format, mut w: W) -> Result<(), BenchError> {
    if rows.is_empty() {
        return Err(BenchError::Config("no rows to write".into()));
    }
    let mut head = vec!["level".to_string()];
    head.extend(taus.iter().map(|t| format!("{t:e}")));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| std::iter::once(r.level.to_string()).chain(r.iters.iter().map(|i| opt(*i))).collect())
        .collect();
    match format {
        Format::Csv => {
            writeln!(w, "{}", head.join(","))?;
            for r in &body {
                writeln!(w, "{}", r.join(","))?;
            }
        }
        Format::Text => write_aligned(w, &head, &body)?,
    }
    Ok(())
}
