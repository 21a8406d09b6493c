//! European option pricing in the Black-Scholes model via rapidly convergent
//! residue series.
//!
//! The classical closed form prices a call as `S·N(d1) − F·N(d2)`. This crate
//! additionally implements the price as a double series in the normalized
//! volatility `Z = σ√τ/√2` and the log-forward moneyness `k = ln(S/F)`:
//!
//! ```text
//! C = (S − F)/2 + (F/2) Σ_{j≥0} Σ_{n≤2j} Z^{2j+1} (−1)^n / (n! Γ(3/2+j−n)) (1 − k/Z²)^n
//! ```
//!
//! together with a per-term truncation bound that selects the diagonal order
//! needed for a requested precision, term-wise differentiated series for the
//! Greeks, and two independent oracles: the closed form ([`closed_form`]) and
//! a direct numerical evaluation of the underlying Mellin-Barnes integral in
//! ℂ² ([`contour`]).
//!
//! Entry points:
//! - [`market::derive()`] turns raw contract inputs into the reduced variables
//!   all pricers consume;
//! - [`series::call_series_diagonal`] / [`series::put_series`] price with a
//!   fixed or adaptive truncation and return a tail certificate;
//! - [`greeks::greeks_bundle`] computes Delta, Rho, Vega and Theta in one pass;
//! - [`contour::price_via_contour`] cross-checks everything against the ℂ²
//!   integral representation.

pub mod closed_form;
pub mod contour;
pub mod error;
pub mod greeks;
pub mod kahan;
pub mod market;
pub mod series;
pub mod special;

pub use error::{PricerError, Result};
pub use market::{derive, put_from_call, DerivedQuantities, MarketParams};
pub use series::{SeriesResult, TermIndex, TruncationConfig};
