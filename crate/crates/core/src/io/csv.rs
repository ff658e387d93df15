//! Numeric CSV tables.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `header` followed by pre-formatted rows; the file ends with a newline.
pub fn write_table(path: impl AsRef<Path>, header: &str, rows: &[String]) -> Result<()> {
    let mut s = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// A parsed numeric table; non-numeric cells become NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let bad = |e: ::csv::Error| Error::InvalidArgument(format!("{}: {e}", path.display()));
    let mut rd = ::csv::Reader::from_path(path).map_err(bad)?;
    let columns: Vec<String> = rd.headers().map_err(bad)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(bad)?;
        rows.push(rec.iter().map(|c| c.trim().parse().unwrap_or(f64::NAN)).collect());
    }
    Ok(Table { columns, rows })
}

/// Long format `series,x,value` with `x_col` as abscissa, one block per other column.
pub fn write_long(path: impl AsRef<Path>, table: &Table, x_col: &str) -> Result<usize> {
    let xj = table
        .columns
        .iter()
        .position(|c| c == x_col)
        .ok_or_else(|| Error::InvalidArgument(format!("column '{x_col}' not found")))?;
    let mut wr = ::csv::Writer::from_path(path).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let io = |e: ::csv::Error| Error::InvalidArgument(e.to_string());
    wr.write_record(["series", x_col, "value"]).map_err(io)?;
    let mut n = 0;
    for (j, name) in table.columns.iter().enumerate() {
        if j == xj {
            continue;
        }
        for r in &table.rows {
            if r[j].is_finite() {
                wr.write_record([name.clone(), format!("{:e}", r[xj]), format!("{:e}", r[j])]).map_err(io)?;
                n += 1;
            }
        }
    }
    wr.flush()?;
    Ok(n)
}
