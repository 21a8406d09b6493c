//! End-to-end tests of the installed binary: flag surface, exit codes,
//! output formats.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bsseries"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const ITM: [&str; 10] = [
    "--spot", "4200", "--strike", "4000", "--rate", "0.01", "--vol", "0.2", "--tau", "1",
];

#[test]
fn price_series_matches_reference_value() {
    let out = run(&[
        &["price"],
        &ITM[..],
        &["--method", "series", "--tol", "1e-10"],
    ]
    .concat());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "458.7930654\n");
}

#[test]
fn price_methods_agree() {
    for method in ["closed", "series"] {
        let out = run(&[&["price"], &ITM[..], &["--method", method]].concat());
        assert!(out.status.success());
        assert_eq!(stdout(&out), "458.7930654\n", "method {method}");
    }
    let out = run(&[
        &["price"],
        &ITM[..],
        &["--method", "rect", "--nmax", "20", "--mmax", "20"],
    ]
    .concat());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "458.7930654\n");
}

#[test]
fn put_price_via_parity() {
    let out = run(&[&["price"], &ITM[..], &["--put"]].concat());
    assert!(out.status.success());
    let got: f64 = stdout(&out).trim().parse().unwrap();
    assert!((got - 218.9924004).abs() < 1e-6);
}

#[test]
fn zero_vol_prices_intrinsic_with_success() {
    let out = run(&[
        "price", "--spot", "4200", "--strike", "4000", "--rate", "0.01", "--vol", "0", "--tau", "1",
    ]);
    assert!(out.status.success());
    let got: f64 = stdout(&out).trim().parse().unwrap();
    assert!((got - 239.80066500332781).abs() < 1e-6);

    let out = run(&[
        "price", "--put", "--spot", "3000", "--strike", "4000", "--rate", "0.01", "--vol", "0.2",
        "--tau", "0",
    ]);
    assert!(out.status.success());
    let got: f64 = stdout(&out).trim().parse().unwrap();
    assert_eq!(got, 1000.0);
}

#[test]
fn zero_vol_greeks_exit_domain_error() {
    let out = run(&[
        "greeks", "--spot", "4200", "--strike", "4000", "--rate", "0.01", "--vol", "0", "--tau",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn greeks_theta_conventions() {
    let base = run(&[&["greeks"], &ITM[..]].concat());
    assert!(base.status.success());
    let text = stdout(&base);
    assert!(text.contains("delta 0.65319132"));
    assert!(text.contains("theta_tau "));
    let cal = run(&[&["greeks"], &ITM[..], &["--theta-calendar"]].concat());
    let cal_text = stdout(&cal);
    assert!(cal_text.contains("theta_calendar -"));
}

#[test]
fn bound_reports_selected_order() {
    let out = run(&[&["bound"], &ITM[..], &["--eps", "1e-10"]].concat());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("j_eps 7"), "{text}");
    assert!(text.contains("total_terms 64"), "{text}");
}

#[test]
fn conflicting_truncation_flags_are_usage_errors() {
    let out = run(&[&["price"], &ITM[..], &["--tol", "1e-8", "--jmax", "5"]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_market_input_is_usage_error() {
    let out = run(&[
        "price", "--spot", "-1", "--strike", "4000", "--rate", "0.01", "--vol", "0.2", "--tau", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_sweep_grids_are_usage_errors() {
    for args in [
        ["sweep", "--s-min", "-5", "--s-max", "100", "--s-step", "10"],
        ["sweep", "--s-min", "200", "--s-max", "100", "--s-step", "10"],
        ["sweep", "--s-min", "100", "--s-max", "200", "--s-step", "0"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn truncation_cap_exit_code_with_best_effort() {
    let out = run(&[
        "price", "--spot", "3000", "--strike", "4000", "--rate", "0.01", "--vol", "0.2", "--tau",
        "1", "--tol", "1e-12", "--jcap", "8",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // Best-effort price still printed.
    let text = stdout(&out);
    let first: f64 = text.lines().next().unwrap().parse().unwrap();
    assert!(first.is_finite());
    assert!(text.contains("tail_bound"));
}

#[test]
fn tables_pass_and_are_bit_stable() {
    for cmd in ["table1", "table2", "table3"] {
        let a = run(&[cmd]);
        assert!(a.status.success(), "{cmd} failed");
        let b = run(&[cmd]);
        assert_eq!(stdout(&a), stdout(&b), "{cmd} output not stable");
        let text = stdout(&a);
        let header = text.lines().next().unwrap();
        assert!(header.contains(','));
        assert!(text.ends_with('\n'));
    }
}

#[test]
fn sweep_degenerate_grid_is_header_only() {
    let out = run(&["sweep", "--s-min", "4000", "--s-max", "4000"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "s,closed,series_j5,series_j10,abs_err_j5,abs_err_j10\n"
    );
}

#[test]
fn sweep_writes_csv_file() {
    let path = std::env::temp_dir().join(format!("bsseries_sweep_{}.csv", std::process::id()));
    let out = run(&[
        "sweep",
        "--s-min",
        "3900",
        "--s-max",
        "4100",
        "--s-step",
        "100",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let content = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(content.lines().count(), 4); // header + 3 grid points
    assert!(content.starts_with("s,closed"));
    // Ranges are reported on the diagnostic stream.
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("window j_max=5"));
    assert!(err.contains("window j_max=10"));
}

#[test]
fn oracle_command_cross_checks() {
    let out = run(&[
        "oracle",
        "--spot",
        "3800",
        "--strike",
        "4000",
        "--rate",
        "0.01",
        "--vol",
        "0.2",
        "--tau",
        "1",
        "--half-width",
        "20",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("contour 235.5135954"), "{text}");
    assert!(text.contains("closed 235.5135954"));

    let itm = run(&[&["oracle"], &ITM[..]].concat());
    assert_eq!(itm.status.code(), Some(3));
}

#[test]
fn price_csv_is_machine_readable() {
    let path = std::env::temp_dir().join(format!("bsseries_price_{}.csv", std::process::id()));
    let out = run(&[&["price"], &ITM[..], &["--csv", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    let content = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = content.lines();
    assert_eq!(
        lines.next().unwrap(),
        "price,method,j_used,terms_evaluated,tail_bound,converged"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("458.79306"));
    assert!(row.contains(",series,"));
    assert!(row.ends_with("true"));
}
