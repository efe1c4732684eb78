//! Machine-readable result and network emitters.
//!
//! The CSV schema is bit-exact: header
//! `case,wholesaler_dist,retailer_dist,retailer_mean,rho,mean_ofr,std_error,replications,rejected`,
//! numeric fields with six decimals, rows sorted lexicographically by the
//! first five columns. The same rows and ordering back the JSON format.
//! Both are deterministic: a repeated run with the same seed produces a
//! byte-identical file.

use crate::error::Result;
use crate::experiment::CellResult;
use crate::network::SupplyNetwork;
use std::io::Write;

/// Output format of the result emitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// The exact CSV header.
pub const CSV_HEADER: &str =
    "case,wholesaler_dist,retailer_dist,retailer_mean,rho,mean_ofr,std_error,replications,rejected";

/// The five sort-key columns of a row, as printed.
fn sort_key(row: &CellResult) -> (String, String, String, String, String) {
    (
        row.case.clone(),
        row.wholesaler_dist.token().to_string(),
        row.retailer_dist.token().to_string(),
        format!("{:.6}", row.retailer_mean),
        format!("{:.6}", row.rho),
    )
}

fn sorted(rows: &[CellResult]) -> Vec<&CellResult> {
    let mut v: Vec<&CellResult> = rows.iter().collect();
    v.sort_by_key(|r| sort_key(r));
    v
}

/// Write a result grid in the requested format.
pub fn emit_results<W: Write>(rows: &[CellResult], format: OutputFormat, out: &mut W) -> Result<()> {
    match format {
        OutputFormat::Csv => emit_csv(rows, out),
        OutputFormat::Json => emit_json(rows, out),
    }
}

fn emit_csv<W: Write>(rows: &[CellResult], out: &mut W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in sorted(rows) {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
            row.case,
            row.wholesaler_dist.token(),
            row.retailer_dist.token(),
            row.retailer_mean,
            row.rho,
            row.stats.mean_ofr,
            row.stats.std_error,
            row.stats.replications_used,
            row.stats.rejected_samples,
        )?;
    }
    Ok(())
}

fn emit_json<W: Write>(rows: &[CellResult], out: &mut W) -> Result<()> {
    #[derive(serde::Serialize)]
    struct JsonRow<'a> {
        case: &'a str,
        wholesaler_dist: &'a str,
        retailer_dist: &'a str,
        retailer_mean: f64,
        rho: f64,
        mean_ofr: f64,
        std_error: f64,
        replications: usize,
        rejected: u64,
    }
    let json_rows: Vec<JsonRow> = sorted(rows)
        .into_iter()
        .map(|row| JsonRow {
            case: &row.case,
            wholesaler_dist: row.wholesaler_dist.token(),
            retailer_dist: row.retailer_dist.token(),
            retailer_mean: row.retailer_mean,
            rho: row.rho,
            mean_ofr: row.stats.mean_ofr,
            std_error: row.stats.std_error,
            replications: row.stats.replications_used,
            rejected: row.stats.rejected_samples,
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &json_rows)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::Other, e))?;
    writeln!(out)?;
    Ok(())
}

/// Dump a network as an edge list: one `layer<TAB>src<TAB>dst` line per edge
/// (layers `sw` and `wr`), then one `group<TAB>wholesaler<TAB>group_id` line
/// per wholesaler.
pub fn dump_network<W: Write>(network: &SupplyNetwork, out: &mut W) -> Result<()> {
    for &(s, w) in &network.layer_sw.edges {
        writeln!(out, "sw\t{s}\t{w}")?;
    }
    for &(w, r) in &network.layer_wr.edges {
        writeln!(out, "wr\t{w}\t{r}")?;
    }
    for (w, &g) in network.horizontal_groups.iter().enumerate() {
        writeln!(out, "group\t{w}\t{g}")?;
    }
    Ok(())
}
