//! Fixed-schema CSV output shared by every study.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const HEADER: &str = "alpha,beta,eps,p,tau,N,t_final,e1,e1_max,order,energy_dev,iters_max";

/// One output row. Missing values are written as `nan`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsvRow {
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub p: u32,
    pub tau: f64,
    pub n: usize,
    pub t_final: f64,
    pub e1: Option<f64>,
    pub e1_max: Option<f64>,
    pub order: Option<f64>,
    pub energy_dev: Option<f64>,
    pub iters_max: Option<usize>,
}

/// Scientific notation with 6 significant digits, or round-trip precision.
pub fn format_number(x: f64, full_precision: bool) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if full_precision {
        format!("{x:e}")
    } else {
        format!("{x:.5e}")
    }
}

fn opt(x: Option<f64>, full: bool) -> String {
    x.map(|v| format_number(v, full)).unwrap_or_else(|| "nan".into())
}

impl CsvRow {
    pub fn to_line(&self, full: bool) -> String {
        let f = |x: f64| format_number(x, full);
        [
            f(self.alpha),
            f(self.beta),
            f(self.eps),
            self.p.to_string(),
            f(self.tau),
            self.n.to_string(),
            f(self.t_final),
            opt(self.e1, full),
            opt(self.e1_max, full),
            opt(self.order, full),
            opt(self.energy_dev, full),
            self.iters_max.map(|i| i.to_string()).unwrap_or_else(|| "nan".into()),
        ]
        .join(",")
    }
}

pub fn render(rows: &[CsvRow], full_precision: bool) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_line(full_precision));
    }
    out
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn write_rows(path: &Path, rows: &[CsvRow], full_precision: bool) -> Result<()> {
    write_text(path, &render(rows, full_precision))
}

pub(crate) fn io_error(path: &Path, err: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}

/// A gnuplot script plotting `y_column` against `x_column` of a CSV that
/// sits next to it.
pub fn plot_script(csv_name: &str, x_column: usize, y_column: usize, logscale: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset logscale {logscale}\n\
         set title '{title}'\nplot '{csv_name}' using {x_column}:{y_column} with linespoints\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_fixed() {
        let text = render(&[], false);
        assert_eq!(text, format!("{HEADER}\n"));
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_number(0.0111, false), "1.11000e-2");
        assert_eq!(format_number(1234567.0, false), "1.23457e6");
        assert_eq!(format_number(f64::NAN, false), "nan");
        let full = format_number(0.1 + 0.2, true);
        assert_eq!(full.parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn row_layout() {
        let row = CsvRow {
            alpha: 2.0,
            beta: 1.0,
            eps: 0.5,
            p: 1,
            tau: 0.05,
            n: 128,
            t_final: 1.0,
            e1: Some(1.11e-2),
            iters_max: Some(3),
            ..Default::default()
        };
        assert_eq!(
            row.to_line(false),
            "2.00000e0,1.00000e0,5.00000e-1,1,5.00000e-2,128,1.00000e0,1.11000e-2,nan,nan,nan,3"
        );
    }
}
