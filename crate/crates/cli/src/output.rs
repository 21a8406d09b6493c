//! CSV assembly and number formatting.
//!
//! CSV rules are fixed so output is byte-stable across runs: UTF-8, comma
//! separators, a header row always present, '.' radix, shortest round-trip
//! decimals, '\n' line ends.

use std::fmt::Write as _;

#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Self {
            buf: String::new(),
            columns: header.len(),
        };
        csv.buf.push_str(&header.join(","));
        csv.buf.push('\n');
        csv
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "ragged CSV row");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// Shortest decimal that round-trips to the same binary64.
pub fn fmt_roundtrip(x: f64) -> String {
    format!("{x}")
}

/// `x` with `digits` significant digits, plain decimal notation when the
/// exponent allows it (the `%.Ng` convention).
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if exp >= -4 && exp < digits as i32 {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let mut s = format!("{x:.decimals$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        let mut s = format!("{:.*e}", digits - 1, x);
        // Trim trailing zeros in the mantissa: 1.2300e-8 -> 1.23e-8.
        if let Some(epos) = s.find('e') {
            let (mant, exp_part) = s.split_at(epos);
            let mut mant = mant.to_string();
            if mant.contains('.') {
                while mant.ends_with('0') {
                    mant.pop();
                }
                if mant.ends_with('.') {
                    mant.pop();
                }
            }
            s = format!("{mant}{exp_part}");
        }
        s
    }
}

/// One verified table cell: `got` must sit within `tol` of `want`.
#[derive(Debug, Clone)]
pub struct CellCheck {
    pub row: String,
    pub col: String,
    pub got: f64,
    pub want: f64,
    pub tol: f64,
}

impl CellCheck {
    pub fn passed(&self) -> bool {
        (self.got - self.want).abs() <= self.tol
    }
}

/// A rendered table plus its verification against the golden values.
#[derive(Debug)]
pub struct TableReport {
    pub csv: String,
    pub checks: Vec<CellCheck>,
}

impl TableReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CellCheck::passed)
    }

    /// Diagnostic lines for every failing cell: (row, col, got, want, tol).
    pub fn failures(&self) -> String {
        let mut out = String::new();
        for c in self.checks.iter().filter(|c| !c.passed()) {
            let _ = writeln!(
                out,
                "FAIL row={} col={} got={} want={} tol={}",
                c.row, c.col, c.got, c.want, c.tol
            );
        }
        out
    }
}
