//! Plot-ready series output: CSV (RFC-4180-style, `\n` newlines, header row)
//! or JSON, with floats printed at 17 significant digits so regression
//! baselines round-trip losslessly.

use std::io::Write;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<(), CliError> {
        if row.len() != self.columns.len() {
            return Err(CliError::Numerical(format!(
                "row has {} cells, expected {}",
                row.len(),
                self.columns.len()
            )));
        }
        for cell in &row {
            if let Cell::Float(x) = cell {
                if !x.is_finite() {
                    return Err(CliError::Numerical(format!("non-finite value {x} in output")));
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    write!(out, ",")?;
                }
                first = false;
                match cell {
                    Cell::Float(x) => write!(out, "{}", format_float(*x))?,
                    Cell::Int(x) => write!(out, "{x}")?,
                    Cell::Text(s) => write!(out, "{s}")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell {
                        Cell::Float(x) => serde_json::json!(x),
                        Cell::Int(x) => serde_json::json!(x),
                        Cell::Text(s) => serde_json::json!(s),
                    })
                    .collect()
            })
            .collect();
        let value = serde_json::json!({
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer(out, &value)?;
        Ok(())
    }
}

/// 17 significant digits: lossless f64 round-trip.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
