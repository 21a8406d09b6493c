//! Golden-table builders: each reproduces one golden reference table from the same
//! fixed market configuration (K = 4000, r = 1%, σ = 20%, τ = 1Y) and checks
//! every cell against the printed value at the print's own precision.

use bsseries::closed_form::call_closed_from_derived;
use bsseries::market::{derive, DerivedQuantities, MarketParams};
use bsseries::series::{
    alpha, bound_term, call_series_diagonal, call_series_rect, term, TermIndex, TruncationConfig,
};

use crate::output::{fmt_roundtrip, CellCheck, Csv, TableReport};

pub const STRIKE: f64 = 4000.0;
pub const RATE: f64 = 0.01;
pub const VOL: f64 = 0.2;
pub const TAU: f64 = 1.0;

/// Exact ATM-forward spot `K·e^{−rτ}` at full precision, not a rounded quote.
pub fn atm_forward_spot() -> f64 {
    STRIKE * (-RATE * TAU).exp()
}

pub fn config(spot: f64) -> MarketParams {
    MarketParams::new(spot, STRIKE, RATE, VOL, TAU).expect("fixed configuration is valid")
}

fn derived(spot: f64) -> DerivedQuantities {
    derive(config(spot)).expect("fixed configuration derives")
}

// Printed convergence table: closed form against three rectangular
// truncations, to the seven decimals of the print.
const TABLE1_GOLDEN: [(&str, f64, [f64; 4]); 5] = [
    (
        "deep_otm_3000",
        3000.0,
        [25.8385546, 14.6150001, 25.9147783, 25.8385533],
    ),
    (
        "otm_3800",
        3800.0,
        [235.5135954, 235.5112726, 235.5135954, 235.5135954],
    ),
    (
        "atm_forward",
        -1.0,
        [315.4523494, 315.4501517, 315.4523494, 315.4523494],
    ),
    (
        "itm_4200",
        4200.0,
        [458.7930654, 458.7883563, 458.7930654, 458.7930654],
    ),
    (
        "deep_itm_5000",
        5000.0,
        [1093.1653246, 1091.3521829, 1093.1662581, 1093.1653246],
    ),
];

const TABLE1_TOL: f64 = 1e-7;

pub fn table1() -> TableReport {
    let mut csv = Csv::new(&[
        "config",
        "closed_form",
        "rect_5_5",
        "rect_10_10",
        "rect_20_20",
    ]);
    let mut checks = Vec::new();
    for (name, spot, golden) in TABLE1_GOLDEN {
        let spot = if spot < 0.0 { atm_forward_spot() } else { spot };
        let d = derived(spot);
        let closed = call_closed_from_derived(d, spot);
        let values = [
            closed,
            call_series_rect(d, 5, 5).expect("Z > 0"),
            call_series_rect(d, 10, 10).expect("Z > 0"),
            call_series_rect(d, 20, 20).expect("Z > 0"),
        ];
        let cols = ["closed_form", "rect_5_5", "rect_10_10", "rect_20_20"];
        for i in 0..4 {
            checks.push(CellCheck {
                row: name.to_string(),
                col: cols[i].to_string(),
                got: values[i],
                want: golden[i],
                tol: TABLE1_TOL,
            });
        }
        csv.row(&[
            name.to_string(),
            fmt_roundtrip(values[0]),
            fmt_roundtrip(values[1]),
            fmt_roundtrip(values[2]),
            fmt_roundtrip(values[3]),
        ]);
    }
    TableReport {
        csv: csv.into_string(),
        checks,
    }
}

// Printed decrease of the per-term bound M with the attained-precision
// decade, at S = 4200 (the caption says S = 3800 but the printed M values
// are only consistent with the in-text S = 4200).
const TABLE2_GOLDEN: [(u32, f64, f64); 6] = [
    (2, 0.0002258, 1e-2),
    (3, 0.0000170, 1e-3),
    (4, 4.27e-7, 1e-6),
    (5, 3.21e-8, 1e-7),
    (6, 6.03e-10, 1e-9),
    (7, 4.54e-11, 1e-10),
];

const TABLE2_M_REL_TOL: f64 = 0.02;
// The attained-precision column prints bare decades; allow half a decade.
const HALF_DECADE: f64 = 3.1622776601683795;

pub fn table2() -> TableReport {
    let spot = 4200.0;
    let d = derived(spot);
    let a = alpha(d).expect("Z > 0");
    let closed = call_closed_from_derived(d, spot);
    let mut csv = Csv::new(&[
        "j_eps",
        "m_bound",
        "attained_precision_check",
        "total_terms",
    ]);
    let mut checks = Vec::new();
    for (j, m_want, eps) in TABLE2_GOLDEN {
        let m = bound_term(j, a, d.norm_vol);
        let series = call_series_diagonal(d, spot, TruncationConfig::FixedDiagonal { j_max: j })
            .expect("Z > 0");
        let attained = (series.price - closed).abs();
        checks.push(CellCheck {
            row: format!("j={j}"),
            col: "m_bound".into(),
            got: m,
            want: m_want,
            tol: TABLE2_M_REL_TOL * m_want,
        });
        checks.push(CellCheck {
            row: format!("j={j}"),
            col: "attained_precision".into(),
            got: attained,
            want: 0.0,
            tol: eps * HALF_DECADE,
        });
        let attained_ok = attained <= eps * HALF_DECADE;
        checks.push(CellCheck {
            row: format!("j={j}"),
            col: "total_terms".into(),
            got: series.terms_evaluated as f64,
            want: ((j + 1) * (j + 1)) as f64,
            tol: 0.0,
        });
        csv.row(&[
            j.to_string(),
            fmt_roundtrip(m),
            if attained_ok {
                "pass".into()
            } else {
                "fail".into()
            },
            series.terms_evaluated.to_string(),
        ]);
    }
    TableReport {
        csv: csv.into_string(),
        checks,
    }
}

// Printed (j, n)-term matrix at S = 4200: four diagonal lines and the
// column-cumulative price row. The reference price row's first cumulative
// cell prints 440.2125, which is inconsistent with the matrix's own cells
// (they sum to 440.125, as does the series); the verified value is used.
const TABLE3_LINES: [&[f64]; 4] = [
    &[315.978],
    &[4.213, 12.257, 5.943],
    &[0.034, 0.163, 0.238, 0.077, -0.019],
    &[0.000, 0.001, 0.003, 0.003, 0.001, -0.000, 0.000],
];

const TABLE3_LEADING: f64 = 119.900;
const TABLE3_PRICE_ROW: [f64; 8] = [
    440.125, 452.546, 458.73, 458.81, 458.792, 458.792, 458.792, 458.792,
];
const TABLE3_CELL_TOL: f64 = 5e-4;
const TABLE3_PRICE_TOL: f64 = 1e-3;

pub fn table3() -> TableReport {
    let spot = 4200.0;
    let d = derived(spot);
    let leading = 0.5 * (spot - d.forward);

    let header = [
        "j", "leading", "n0", "n1", "n2", "n3", "n4", "n5", "n6", "n7",
    ];
    let mut csv = Csv::new(&header);
    let mut checks = vec![CellCheck {
        row: "leading".into(),
        col: "leading".into(),
        got: leading,
        want: TABLE3_LEADING,
        tol: TABLE3_CELL_TOL,
    }];

    let mut cells = [[0.0f64; 8]; 4];
    for (j, golden_line) in TABLE3_LINES.iter().enumerate() {
        for n in 0..=(2 * j).min(7) {
            let t = term(TermIndex::new(j as u32, n as u32).unwrap(), d).expect("Z > 0");
            cells[j][n] = t;
            checks.push(CellCheck {
                row: format!("j={j}"),
                col: format!("n={n}"),
                got: t,
                want: golden_line[n],
                tol: TABLE3_CELL_TOL,
            });
        }
    }

    let mut first = vec!["".to_string(), fmt_roundtrip(leading)];
    first.extend(std::iter::repeat_n("".to_string(), 8));
    csv.row(&first);
    for (j, row) in cells.iter().enumerate() {
        let mut out = vec![j.to_string(), "".to_string()];
        for (n, cell) in row.iter().enumerate() {
            out.push(if n <= 2 * j {
                fmt_roundtrip(*cell)
            } else {
                "0".to_string()
            });
        }
        csv.row(&out);
    }

    // Cumulative price by column. The reference row accumulates the
    // three-decimal prints of the cells (exact-term accumulation lands
    // ~1.0e-3 away at two columns), so the reproduction uses the same
    // construction; the true convergence of the series is checked against
    // the closed form elsewhere.
    let round3 = |x: f64| (x * 1000.0).round() / 1000.0;
    let mut price_cells = vec!["price".to_string(), fmt_roundtrip(round3(leading))];
    let mut running = round3(leading);
    for c in 0..8usize {
        for (j, row) in cells.iter().enumerate() {
            if c <= 2 * j {
                running += round3(row[c]);
            }
        }
        checks.push(CellCheck {
            row: "price".into(),
            col: format!("n={c}"),
            got: running,
            want: TABLE3_PRICE_ROW[c],
            tol: TABLE3_PRICE_TOL,
        });
        price_cells.push(fmt_roundtrip(running));
    }
    csv.row(&price_cells);

    TableReport {
        csv: csv.into_string(),
        checks,
    }
}
