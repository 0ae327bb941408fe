//! Plain-text matrix fixtures.
//!
//! First line `rows cols`, then one line per column holding that column's
//! entries separated by spaces, each printed with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, MatRef};

pub fn write_matrix(a: MatRef<'_>) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", a.rows(), a.cols()).unwrap();
    for j in 0..a.cols() {
        let line: Vec<String> = (0..a.rows()).map(|i| format!("{:.16e}", a.get(i, j))).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: hline + 1,
            msg: format!("bad header: {e}"),
        })?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse {
            line: hline + 1,
            msg: "header must be 'rows cols'".into(),
        });
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_cols = 0;
    for (lno, line) in lines {
        let start = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lno + 1,
                msg: format!("bad number '{tok}'"),
            })?;
            data.push(v);
        }
        if data.len() - start != rows {
            return Err(Error::Parse {
                line: lno + 1,
                msg: format!("expected {rows} entries, found {}", data.len() - start),
            });
        }
        seen_cols += 1;
    }
    // a matrix with zero rows has no column lines to read
    if rows > 0 && seen_cols != cols {
        return Err(Error::Parse {
            line: hline + 1,
            msg: format!("expected {cols} columns, found {seen_cols}"),
        });
    }
    DenseMatrix::from_col_major(rows, cols, data)
}

pub fn read_matrix_file(path: &Path) -> Result<DenseMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix_file(path: &Path, a: MatRef<'_>) -> Result<()> {
    std::fs::write(path, write_matrix(a))?;
    Ok(())
}
