use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bsseries::closed_form::{call_closed_form, put_closed_form};
use bsseries::contour::{price_via_contour, ContourSpec};
use bsseries::error::PricerError;
use bsseries::greeks::greeks_bundle;
use bsseries::market::{derive, put_from_call, MarketParams};
use bsseries::series::{
    alpha, bound_term, call_series_diagonal, call_series_rect, put_series, select_truncation,
    TruncationConfig,
};
use bsseries_cli::output::{fmt_roundtrip, fmt_sig, Csv, TableReport};
use bsseries_cli::sweep::{convergence_window, sweep_csv, sweep_rows};
use bsseries_cli::tables;

#[derive(Parser)]
#[command(
    name = "bsseries",
    version,
    about = "European option pricing through residue series, with closed-form and contour cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price a European option.
    Price(PriceArgs),
    /// Delta, Rho, Vega and Theta from the differentiated series.
    Greeks(GreeksArgs),
    /// Adaptive truncation order for a requested per-term tolerance.
    Bound(BoundArgs),
    /// Reproduce the series-vs-formula convergence table.
    Table1(TableArgs),
    /// Reproduce the truncation-bound decrease table.
    Table2(TableArgs),
    /// Reproduce the (j,n) term matrix with its cumulative price row.
    Table3(TableArgs),
    /// Sweep spot prices, comparing fixed truncations against the formula.
    Sweep(SweepArgs),
    /// Price through the Mellin-Barnes contour quadrature and cross-check.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct MarketOpts {
    /// Spot price of the underlying.
    #[arg(long)]
    spot: f64,
    /// Strike.
    #[arg(long)]
    strike: f64,
    /// Risk-free rate per year.
    #[arg(long)]
    rate: f64,
    /// Volatility per sqrt-year.
    #[arg(long)]
    vol: f64,
    /// Time to expiry in years.
    #[arg(long)]
    tau: f64,
}

impl MarketOpts {
    fn params(&self) -> Result<MarketParams, PricerError> {
        MarketParams::new(self.spot, self.strike, self.rate, self.vol, self.tau)
    }
}

#[derive(Args)]
struct TruncOpts {
    /// Adaptive per-term tolerance (series methods).
    #[arg(long, conflicts_with = "jmax")]
    tol: Option<f64>,
    /// Fixed diagonal truncation order.
    #[arg(long)]
    jmax: Option<u32>,
    /// Cap on the adaptive diagonal order.
    #[arg(long, default_value_t = TruncationConfig::DEFAULT_J_CAP)]
    jcap: u32,
}

impl TruncOpts {
    fn config(&self) -> TruncationConfig {
        match (self.tol, self.jmax) {
            (_, Some(j_max)) => TruncationConfig::FixedDiagonal { j_max },
            (Some(epsilon), None) => TruncationConfig::Adaptive {
                epsilon,
                j_cap: self.jcap,
            },
            (None, None) => TruncationConfig::Adaptive {
                epsilon: 1e-10,
                j_cap: self.jcap,
            },
        }
    }
}

#[derive(Args)]
struct ContourOpts {
    /// Real part of the t1 anchor.
    #[arg(long, default_value_t = 1.25)]
    c1: f64,
    /// Real part of the t2 anchor.
    #[arg(long, default_value_t = 0.5)]
    c2: f64,
    /// Imaginary-axis truncation of the quadrature window.
    #[arg(long, default_value_t = 40.0)]
    half_width: f64,
    /// Quadrature step.
    #[arg(long, default_value_t = 0.05)]
    step: f64,
}

impl ContourOpts {
    fn spec(&self) -> ContourSpec {
        ContourSpec {
            c1: self.c1,
            c2: self.c2,
            half_width: self.half_width,
            step: self.step,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Series,
    Rect,
    Contour,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    market: MarketOpts,
    /// Pricing route.
    #[arg(long, value_enum, default_value_t = Method::Series)]
    method: Method,
    /// Price the put instead of the call.
    #[arg(long)]
    put: bool,
    #[command(flatten)]
    trunc: TruncOpts,
    /// Rectangular truncation: n summation limit.
    #[arg(long)]
    nmax: Option<u32>,
    /// Rectangular truncation: m summation limit.
    #[arg(long)]
    mmax: Option<u32>,
    #[command(flatten)]
    contour: ContourOpts,
    /// Write a machine-readable CSV alongside the printed price.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GreeksArgs {
    #[command(flatten)]
    market: MarketOpts,
    #[command(flatten)]
    trunc: TruncOpts,
    /// Report calendar-time theta (the negation of the tau derivative).
    #[arg(long)]
    theta_calendar: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    market: MarketOpts,
    /// Requested per-term tolerance.
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = TruncationConfig::DEFAULT_J_CAP)]
    jcap: u32,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Write the table CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    s_min: f64,
    #[arg(long)]
    s_max: f64,
    #[arg(long, default_value_t = 10.0)]
    s_step: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    market: MarketOpts,
    #[command(flatten)]
    contour: ContourOpts,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn exit_for(err: &PricerError) -> u8 {
    match err {
        PricerError::InvalidInput(_) => 2,
        PricerError::TruncationCapExceeded { .. } => 4,
        _ => 3,
    }
}

fn emit_csv(content: &str, path: Option<&PathBuf>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_table(report: TableReport, args: &TableArgs) -> u8 {
    if emit_csv(&report.csv, args.csv.as_ref()).is_err() {
        eprintln!("error: cannot write {:?}", args.csv);
        return 2;
    }
    if report.all_passed() {
        0
    } else {
        eprint!("{}", report.failures());
        1
    }
}

fn run_price(args: &PriceArgs) -> Result<u8, PricerError> {
    let params = args.market.params()?;
    let d = derive(params)?;
    let mut j_used = String::new();
    let mut terms = String::new();
    let mut tail = String::new();
    let mut converged = String::new();
    let method_name;
    let price = match args.method {
        Method::Closed => {
            method_name = "closed";
            if args.put {
                put_closed_form(params)?
            } else {
                call_closed_form(params)?
            }
        }
        Method::Series => {
            method_name = "series";
            let cfg = args.trunc.config();
            let res = if args.put {
                put_series(d, params.spot, cfg)
            } else {
                call_series_diagonal(d, params.spot, cfg)
            };
            match res {
                Ok(r) => {
                    j_used = r.j_used.to_string();
                    terms = r.terms_evaluated.to_string();
                    tail = fmt_roundtrip(r.tail_bound);
                    converged = r.converged.to_string();
                    r.price
                }
                Err(PricerError::TruncationCapExceeded {
                    j_cap,
                    best_price: Some(best),
                    tail_bound,
                }) => {
                    // Still print the best effort, then fail with code 4.
                    eprintln!(
                        "truncation cap {j_cap} exceeded; best-effort price and tail bound follow"
                    );
                    println!("{}", fmt_sig(best, 10));
                    if let Some(t) = tail_bound {
                        println!("tail_bound {}", fmt_sig(t, 4));
                    }
                    return Ok(4);
                }
                Err(e) => return Err(e),
            }
        }
        Method::Rect => {
            method_name = "rect";
            let (n_max, m_max) = match (args.nmax, args.mmax) {
                (Some(n), Some(m)) => (n, m),
                _ => {
                    return Err(PricerError::InvalidInput(
                        "--method rect needs --nmax and --mmax".into(),
                    ))
                }
            };
            let call = call_series_rect(d, n_max, m_max)?;
            if args.put {
                put_from_call(call, d, params.spot)?
            } else {
                call
            }
        }
        Method::Contour => {
            method_name = "contour";
            let res = price_via_contour(d, args.contour.spec())?;
            if args.put {
                put_from_call(res.price, d, params.spot)?
            } else {
                res.price
            }
        }
    };
    println!("{}", fmt_sig(price, 10));
    if args.csv.is_some() {
        let mut csv = Csv::new(&[
            "price",
            "method",
            "j_used",
            "terms_evaluated",
            "tail_bound",
            "converged",
        ]);
        csv.row(&[
            fmt_roundtrip(price),
            method_name.to_string(),
            j_used,
            terms,
            tail,
            converged,
        ]);
        emit_csv(&csv.into_string(), args.csv.as_ref())
            .map_err(|e| PricerError::InvalidInput(e.to_string()))?;
    }
    Ok(0)
}

fn run_greeks(args: &GreeksArgs) -> Result<u8, PricerError> {
    let params = args.market.params()?;
    let g = greeks_bundle(params, args.trunc.config())?;
    let theta = if args.theta_calendar {
        -g.theta_tau
    } else {
        g.theta_tau
    };
    let theta_label = if args.theta_calendar {
        "theta_calendar"
    } else {
        "theta_tau"
    };
    println!("delta {}", fmt_sig(g.delta, 10));
    println!("rho {}", fmt_sig(g.rho, 10));
    println!("vega {}", fmt_sig(g.vega, 10));
    println!("{theta_label} {}", fmt_sig(theta, 10));
    if args.csv.is_some() {
        let mut csv = Csv::new(&["delta", "rho", "vega", theta_label, "j_used", "converged"]);
        csv.row(&[
            fmt_roundtrip(g.delta),
            fmt_roundtrip(g.rho),
            fmt_roundtrip(g.vega),
            fmt_roundtrip(theta),
            g.j_used.to_string(),
            g.converged.to_string(),
        ]);
        emit_csv(&csv.into_string(), args.csv.as_ref())
            .map_err(|e| PricerError::InvalidInput(e.to_string()))?;
    }
    Ok(0)
}

fn run_bound(args: &BoundArgs) -> Result<u8, PricerError> {
    let params = args.market.params()?;
    let d = derive(params)?;
    let a = alpha(d)?;
    let j = select_truncation(args.eps, a, d.norm_vol, args.jcap)?;
    let m = bound_term(j, a, d.norm_vol);
    println!("j_eps {j}");
    println!("total_terms {}", (j + 1) * (j + 1));
    println!("m_bound {}", fmt_sig(m, 10));
    if args.csv.is_some() {
        let mut csv = Csv::new(&["j_eps", "m_bound", "total_terms"]);
        csv.row(&[
            j.to_string(),
            fmt_roundtrip(m),
            ((j + 1) * (j + 1)).to_string(),
        ]);
        emit_csv(&csv.into_string(), args.csv.as_ref())
            .map_err(|e| PricerError::InvalidInput(e.to_string()))?;
    }
    Ok(0)
}

fn run_sweep(args: &SweepArgs) -> Result<u8, PricerError> {
    let grid_ok =
        args.s_min > 0.0 && args.s_min <= args.s_max && args.s_step > 0.0 && args.s_max.is_finite();
    if !grid_ok {
        return Err(PricerError::InvalidInput(
            "sweep needs 0 < s_min <= s_max and a positive step".into(),
        ));
    }
    let rows = sweep_rows(args.s_min, args.s_max, args.s_step);
    emit_csv(&sweep_csv(&rows), args.csv.as_ref())
        .map_err(|e| PricerError::InvalidInput(e.to_string()))?;
    // Convergence-window report: where each truncation keeps the absolute
    // error below half a currency unit.
    let w5 = convergence_window(5, 0.5);
    let w10 = convergence_window(10, 0.5);
    eprintln!("window j_max=5: err <= 0.5 on [{}, {}]", w5.0, w5.1);
    eprintln!("window j_max=10: err <= 0.5 on [{}, {}]", w10.0, w10.1);
    Ok(0)
}

fn run_oracle(args: &OracleArgs) -> Result<u8, PricerError> {
    let params = args.market.params()?;
    let d = derive(params)?;
    let res = price_via_contour(d, args.contour.spec())?;
    let closed = call_closed_form(params)?;
    let series = call_series_diagonal(
        d,
        params.spot,
        TruncationConfig::Adaptive {
            epsilon: 1e-10,
            j_cap: 256,
        },
    )?;
    println!("contour {}", fmt_sig(res.price, 10));
    println!("closed {}", fmt_sig(closed, 10));
    println!("series {}", fmt_sig(series.price, 10));
    println!("imag_ratio {}", fmt_sig(res.imag_ratio, 3));
    println!("refinement_change {}", fmt_sig(res.refinement_change, 3));
    if args.csv.is_some() {
        let mut csv = Csv::new(&[
            "contour",
            "closed",
            "series",
            "imag_ratio",
            "refinement_change",
        ]);
        csv.row(&[
            fmt_roundtrip(res.price),
            fmt_roundtrip(closed),
            fmt_roundtrip(series.price),
            fmt_roundtrip(res.imag_ratio),
            fmt_roundtrip(res.refinement_change),
        ]);
        emit_csv(&csv.into_string(), args.csv.as_ref())
            .map_err(|e| PricerError::InvalidInput(e.to_string()))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Price(a) => run_price(a),
        Command::Greeks(a) => run_greeks(a),
        Command::Bound(a) => run_bound(a),
        Command::Table1(a) => return ExitCode::from(run_table(tables::table1(), a)),
        Command::Table2(a) => return ExitCode::from(run_table(tables::table2(), a)),
        Command::Table3(a) => return ExitCode::from(run_table(tables::table3(), a)),
        Command::Sweep(a) => run_sweep(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
