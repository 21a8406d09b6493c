//! Reference Black-Scholes pricer and the at-the-money-forward
//! approximations. This is oracle #1 for the series machinery.

use crate::error::Result;
use crate::market::{derive, DerivedQuantities, MarketParams};
use crate::special::{norm_cdf, norm_pdf};

/// Call price `S·N(k/z + z/2) − F·N(k/z − z/2)`. For `z = 0` the normal
/// arguments saturate and the price collapses to the intrinsic limit
/// `max(S − F, 0)`.
pub fn call_closed_form(params: MarketParams) -> Result<f64> {
    let d = derive(params)?;
    Ok(call_closed_from_derived(d, params.spot))
}

/// Same as [`call_closed_form`] but from precomputed reduced variables.
pub fn call_closed_from_derived(d: DerivedQuantities, spot: f64) -> f64 {
    let z = d.total_vol;
    if z == 0.0 {
        return (spot - d.forward).max(0.0);
    }
    let m = d.log_moneyness / z;
    spot * norm_cdf(m + 0.5 * z) - d.forward * norm_cdf(m - 0.5 * z)
}

/// Put price via the closed form and parity; `z = 0` gives `max(F − S, 0)`.
pub fn put_closed_form(params: MarketParams) -> Result<f64> {
    let d = derive(params)?;
    if d.total_vol == 0.0 {
        return Ok((d.forward - params.spot).max(0.0));
    }
    Ok(call_closed_from_derived(d, params.spot) - (params.spot - d.forward))
}

/// Closed-form Delta `N(k/z + z/2)`; intrinsic step at `z = 0`.
pub fn delta_closed_form(d: DerivedQuantities) -> f64 {
    let z = d.total_vol;
    if z == 0.0 {
        return if d.log_moneyness > 0.0 { 1.0 } else { 0.0 };
    }
    norm_cdf(d.log_moneyness / z + 0.5 * z)
}

/// Closed-form Rho `τF·N(k/z − z/2)`.
pub fn rho_closed_form(d: DerivedQuantities, tau: f64) -> f64 {
    let z = d.total_vol;
    if z == 0.0 {
        return if d.log_moneyness > 0.0 {
            tau * d.forward
        } else {
            0.0
        };
    }
    tau * d.forward * norm_cdf(d.log_moneyness / z - 0.5 * z)
}

/// Closed-form Vega `S√τ·N′(k/z + z/2)`.
pub fn vega_closed_form(d: DerivedQuantities, spot: f64, tau: f64) -> f64 {
    let z = d.total_vol;
    if z == 0.0 {
        return 0.0;
    }
    spot * tau.sqrt() * norm_pdf(d.log_moneyness / z + 0.5 * z)
}

/// Which at-the-money-forward approximation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtmApproxMode {
    /// Exact leading term of the ATMF expansion, `S·σ√τ/√(2π)`.
    ExactLeading,
    /// The Brenner-Subrahmanyam rule of thumb `0.4·S·σ√τ`.
    Brenner04,
}

/// Leading-order ATM-forward price approximations. The moneyness is ignored;
/// the caller asserts the ATM-forward intent.
pub fn atm_forward_approx(params: MarketParams, mode: AtmApproxMode) -> f64 {
    const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;
    let total_vol = params.vol * params.tau.sqrt();
    match mode {
        AtmApproxMode::ExactLeading => params.spot * total_vol * FRAC_1_SQRT_2PI,
        AtmApproxMode::Brenner04 => 0.4 * params.spot * total_vol,
    }
}
