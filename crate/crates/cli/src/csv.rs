//! Fixed-column CSV with 9-significant-digit decimal cells.

use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("non-finite value {value} in column `{column}` of row {row}")]
pub struct NonFinite {
    pub column: String,
    pub row: usize,
    pub value: f64,
}

/// Decimal rendering with 9 significant digits and no exponent.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

/// Accumulates rows under a fixed header.
#[derive(Debug)]
pub struct CsvTable {
    header: Vec<&'static str>,
    body: String,
    rows: usize,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        CsvTable {
            header: header.to_vec(),
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, cells: &[Cell]) -> Result<(), NonFinite> {
        assert_eq!(
            cells.len(),
            self.header.len(),
            "row width must match header"
        );
        self.rows += 1;
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            match *cell {
                Cell::Int(v) => {
                    let _ = write!(line, "{v}");
                }
                Cell::Real(v) if v.is_finite() => line.push_str(&format_sig9(v)),
                Cell::Real(value) => {
                    return Err(NonFinite {
                        column: self.header[i].to_string(),
                        row: self.rows,
                        value,
                    });
                }
            }
        }
        self.body.push_str(&line);
        self.body.push('\n');
        Ok(())
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}
