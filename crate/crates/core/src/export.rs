//! Deterministic CSV/JSON serialization of matrices and result tables.
//!
//! Floats are written with the shortest representation that round-trips,
//! capped at 12 significant digits; repeated runs of the same computation
//! produce byte-identical files.

use crate::covariance::CovarianceMatrix;
use nalgebra::DMatrix;
use serde_json::{json, Value};
use std::io::{self, Write};

/// Shortest round-trip formatting, at most 12 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let shortest = format!("{x}");
    if significant_digits(&shortest) <= 12 {
        shortest
    } else {
        format!("{:.11e}", x)
    }
}

fn significant_digits(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or(s);
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    trimmed.len()
}

/// Write a table of float columns as CSV with a header row.
pub fn write_csv<W: Write>(w: &mut W, headers: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(w, "{}", headers.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Covariance matrix as CSV: a header row with quadrature labels, then the
/// matrix in row-major order.
pub fn write_covariance_csv<W: Write>(w: &mut W, cov: &CovarianceMatrix) -> io::Result<()> {
    writeln!(w, "{}", cov.quadrature_labels().join(","))?;
    for i in 0..cov.dim() {
        let cells: Vec<String> = (0..cov.dim()).map(|j| fmt_f64(cov.data[(i, j)])).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Covariance matrix as a JSON object with dimension, ordering, labels and
/// row-major data.
pub fn covariance_to_json(cov: &CovarianceMatrix) -> Value {
    json!({
        "dim": cov.dim(),
        "ordering": format!("{:?}", cov.ordering).to_lowercase(),
        "labels": cov.quadrature_labels(),
        "data": matrix_rows(&cov.data),
    })
}

/// Table as a JSON object with named columns and row-major data.
pub fn table_to_json(headers: &[&str], rows: &[Vec<f64>]) -> Value {
    json!({
        "columns": headers,
        "rows": rows,
    })
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
