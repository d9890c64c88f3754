//! Relative-error tables for the two-sided `2F3` bound and the table of
//! supremum constants, with CSV and JSON serialisation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{corollary_bounds, corollary_middle};
use crate::dconst::{d_constant_with, SupremumConfig};
use crate::error::{parse_error, Error, Result};
use crate::format::{fixed, label, round_to};
use crate::series::series_config;

/// Orders of the corollary tables.
pub const TABLE_NU: [f64; 5] = [1.0, 2.5, 5.0, 7.5, 10.0];
/// Arguments of the corollary tables.
pub const TABLE_X: [f64; 7] = [0.5, 5.0, 10.0, 25.0, 50.0, 100.0, 250.0];
/// Orders of the supremum-constant table (all with `n = 0`).
pub const DCONST_NU: [f64; 5] = [0.0, 1.0, 3.0, 5.0, 10.0];
/// Decimal places of every table entry.
pub const TABLE_DECIMALS: usize = 4;

const DCONST_COLUMNS: [&str; 3] = ["D", "argmax_x", "upper_limit"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// Relative error of the corollary lower bound.
    Table1,
    /// Relative error of the corollary upper bound.
    Table2,
    Dconstants,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Table1 => "table1",
            TableKind::Table2 => "table2",
            TableKind::Dconstants => "dconstants",
        }
    }

    fn expected_shape(self) -> (usize, usize) {
        match self {
            TableKind::Table1 | TableKind::Table2 => (TABLE_NU.len(), TABLE_X.len()),
            TableKind::Dconstants => (DCONST_NU.len(), DCONST_COLUMNS.len()),
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(TableKind::Table1),
            "table2" => Ok(TableKind::Table2),
            "dconstants" => Ok(TableKind::Dconstants),
            other => Err(parse_error(format!("unknown table kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableMeta {
    pub tolerances: BTreeMap<String, f64>,
}

/// A labelled matrix of values rounded to [`TABLE_DECIMALS`] places.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableArtifact {
    pub kind: TableKind,
    pub rows: Vec<Vec<f64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    #[serde(default)]
    pub meta: TableMeta,
}

/// Relative errors `((F - L) / F, (U - F) / F)` of the corollary bounds,
/// unrounded.
pub fn corollary_rel_errors(nu: f64, x: f64) -> Result<(f64, f64)> {
    let middle = corollary_middle(nu, x)?;
    let (lower, upper) = corollary_bounds(nu, x)?;
    Ok((
        ((middle - lower) / middle).abs(),
        ((upper - middle) / middle).abs(),
    ))
}

fn corollary_table(kind: TableKind) -> Result<TableArtifact> {
    let cells: Vec<(f64, f64)> = TABLE_NU
        .iter()
        .flat_map(|&nu| TABLE_X.iter().map(move |&x| (nu, x)))
        .collect();
    let errs = cells
        .par_iter()
        .map(|&(nu, x)| corollary_rel_errors(nu, x))
        .collect::<Result<Vec<_>>>()?;
    let pick = |(lo, up): (f64, f64)| if kind == TableKind::Table1 { lo } else { up };
    let rows = errs
        .chunks(TABLE_X.len())
        .map(|row| {
            row.iter()
                .map(|&e| round_to(pick(e), TABLE_DECIMALS as i32))
                .collect()
        })
        .collect();
    let cfg = series_config();
    let mut tolerances = BTreeMap::new();
    tolerances.insert("series_max_terms".to_string(), cfg.max_terms as f64);
    tolerances.insert("series_term_tol".to_string(), cfg.term_tol);
    Ok(TableArtifact {
        kind,
        rows,
        row_labels: TABLE_NU.iter().map(|&v| label(v)).collect(),
        col_labels: TABLE_X.iter().map(|&v| label(v)).collect(),
        meta: TableMeta { tolerances },
    })
}

fn dconstant_table() -> Result<TableArtifact> {
    let sup = SupremumConfig::default();
    let ds = DCONST_NU
        .par_iter()
        .map(|&nu| d_constant_with(nu, 0.0, &sup))
        .collect::<Result<Vec<_>>>()?;
    let d = TABLE_DECIMALS as i32;
    let rows = ds
        .iter()
        .map(|c| {
            vec![
                round_to(c.value, d),
                round_to(c.argmax_x, d),
                round_to(c.upper_limit(), d),
            ]
        })
        .collect();
    let mut tolerances = BTreeMap::new();
    tolerances.insert("scan_x_min".to_string(), sup.x_min);
    tolerances.insert("scan_x_max".to_string(), sup.x_max);
    tolerances.insert("scan_grid_points".to_string(), sup.grid_points as f64);
    tolerances.insert("golden_section_x_tol".to_string(), sup.x_tol);
    Ok(TableArtifact {
        kind: TableKind::Dconstants,
        rows,
        row_labels: DCONST_NU.iter().map(|&v| label(v)).collect(),
        col_labels: DCONST_COLUMNS.iter().map(|s| s.to_string()).collect(),
        meta: TableMeta { tolerances },
    })
}

impl TableArtifact {
    pub fn generate(kind: TableKind) -> Result<Self> {
        match kind {
            TableKind::Table1 | TableKind::Table2 => corollary_table(kind),
            TableKind::Dconstants => dconstant_table(),
        }
    }

    /// Checks dimensions against the labels and the kind, and that every
    /// entry is finite.
    pub fn validate(&self) -> Result<()> {
        let (nr, nc) = self.kind.expected_shape();
        if self.row_labels.len() != nr || self.col_labels.len() != nc {
            return Err(parse_error(format!(
                "{} table must be {nr}x{nc}, labels give {}x{}",
                self.kind,
                self.row_labels.len(),
                self.col_labels.len()
            )));
        }
        if self.rows.len() != nr || self.rows.iter().any(|r| r.len() != nc) {
            return Err(parse_error(format!(
                "{} table rows do not match a {nr}x{nc} shape",
                self.kind
            )));
        }
        if self.rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(parse_error("table entries must be finite"));
        }
        Ok(())
    }

    /// Entry at row label `row` and column label `col`, if present.
    pub fn entry(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.row_labels.iter().position(|l| l == row)?;
        let j = self.col_labels.iter().position(|l| l == col)?;
        self.rows.get(i)?.get(j).copied()
    }

    /// CSV with a header row `nu,<col labels>` and entries to four decimals.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        let header = std::iter::once("nu").chain(self.col_labels.iter().map(String::as_str));
        w.write_record(header).map_err(csv_err)?;
        for (lab, row) in self.row_labels.iter().zip(&self.rows) {
            let cells =
                std::iter::once(lab.clone()).chain(row.iter().map(|&v| fixed(v, TABLE_DECIMALS)));
            w.write_record(cells).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| parse_error(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| parse_error(e.to_string()))
    }

    /// Parses CSV written by [`TableArtifact::to_csv`]. CSV carries no
    /// metadata, so `meta` comes back empty.
    pub fn from_csv(kind: TableKind, text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = r.headers().map_err(csv_err)?.clone();
        if header.get(0) != Some("nu") {
            return Err(parse_error("first header cell must be 'nu'"));
        }
        let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut row_labels = Vec::new();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(csv_err)?;
            let mut cells = record.iter();
            row_labels.push(cells.next().unwrap_or_default().to_string());
            let row = cells
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| parse_error(format!("bad entry '{c}': {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let table = TableArtifact {
            kind,
            rows,
            row_labels,
            col_labels,
            meta: TableMeta::default(),
        };
        table.validate()?;
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| parse_error(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: TableArtifact =
            serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;
        table.validate()?;
        Ok(table)
    }
}

fn csv_err(e: csv::Error) -> Error {
    parse_error(e.to_string())
}
