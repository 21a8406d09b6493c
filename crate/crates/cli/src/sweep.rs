//! Spot-price sweep comparing the closed form against fixed diagonal
//! truncations, plus the convergence-window search behind the figure-style
//! claim: a wider truncation keeps the error small over a strictly wider
//! spot range.

use bsseries::closed_form::call_closed_from_derived;
use bsseries::market::derive;
use bsseries::series::{call_series_diagonal, TruncationConfig};

use crate::output::{fmt_roundtrip, Csv};
use crate::tables::config;

#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub spot: f64,
    pub closed: f64,
    pub series_j5: f64,
    pub series_j10: f64,
    pub abs_err_j5: f64,
    pub abs_err_j10: f64,
}

/// Evaluate one spot of the sweep grid.
pub fn sweep_point(spot: f64) -> SweepRow {
    let d = derive(config(spot)).expect("grid spot is valid");
    let closed = call_closed_from_derived(d, spot);
    let j5 = call_series_diagonal(d, spot, TruncationConfig::FixedDiagonal { j_max: 5 })
        .expect("Z > 0")
        .price;
    let j10 = call_series_diagonal(d, spot, TruncationConfig::FixedDiagonal { j_max: 10 })
        .expect("Z > 0")
        .price;
    SweepRow {
        spot,
        closed,
        series_j5: j5,
        series_j10: j10,
        abs_err_j5: (j5 - closed).abs(),
        abs_err_j10: (j10 - closed).abs(),
    }
}

/// Sweep `[s_min, s_max]` in steps of `s_step`. Equal endpoints produce an
/// empty grid (header-only CSV).
pub fn sweep_rows(s_min: f64, s_max: f64, s_step: f64) -> Vec<SweepRow> {
    if s_min == s_max {
        return Vec::new();
    }
    let n = ((s_max - s_min) / s_step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| sweep_point(s_min + i as f64 * s_step))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut csv = Csv::new(&[
        "s",
        "closed",
        "series_j5",
        "series_j10",
        "abs_err_j5",
        "abs_err_j10",
    ]);
    for r in rows {
        csv.row(&[
            fmt_roundtrip(r.spot),
            fmt_roundtrip(r.closed),
            fmt_roundtrip(r.series_j5),
            fmt_roundtrip(r.series_j10),
            fmt_roundtrip(r.abs_err_j5),
            fmt_roundtrip(r.abs_err_j10),
        ]);
    }
    csv.into_string()
}

/// Largest contiguous spot interval around the strike on which the truncated
/// series stays within `threshold` of the closed form. Scanned on a wide
/// grid so both windows close inside it.
pub fn convergence_window(j_max: u32, threshold: f64) -> (f64, f64) {
    let (lo, hi, step) = (1200.0, 9800.0, 10.0);
    let n = ((hi - lo) / step) as usize;
    let err_at = |s: f64| {
        let d = derive(config(s)).expect("grid spot is valid");
        let closed = call_closed_from_derived(d, s);
        let series = call_series_diagonal(d, s, TruncationConfig::FixedDiagonal { j_max })
            .expect("Z > 0")
            .price;
        (series - closed).abs()
    };
    let anchor = crate::tables::STRIKE;
    let mut left = anchor;
    let mut right = anchor;
    let mut s = anchor;
    while s >= lo && err_at(s) <= threshold {
        left = s;
        s -= step;
    }
    s = anchor + step;
    while s <= lo + (n as f64) * step && err_at(s) <= threshold {
        right = s;
        s += step;
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_has_no_rows() {
        let rows = sweep_rows(4000.0, 4000.0, 10.0);
        assert!(rows.is_empty());
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn near_money_series_is_tight() {
        let r = sweep_point(4000.0);
        assert!(r.abs_err_j10 <= 1e-6);
        assert!(r.abs_err_j5 <= 1e-3);
    }

    #[test]
    fn deeper_truncation_improves_monotonically_at_the_edge() {
        let r = sweep_point(2500.0);
        assert!(r.abs_err_j5 > r.abs_err_j10);
        assert!(r.abs_err_j10 >= 0.0);
    }
}
