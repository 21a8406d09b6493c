//! Contract/market inputs and the reduced variables every pricer consumes.

use std::f64::consts::SQRT_2;

use crate::error::{PricerError, Result};

/// Raw European option inputs. `rate` is a continuously compounded annual
/// rate and may take either sign; `vol` and `tau` may be zero (degenerate
/// handling is delegated to the pricers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Spot price of the underlying, strictly positive.
    pub spot: f64,
    /// Strike, strictly positive.
    pub strike: f64,
    /// Risk-free rate per year.
    pub rate: f64,
    /// Volatility per square-root year, nonnegative.
    pub vol: f64,
    /// Time to expiry in years, nonnegative.
    pub tau: f64,
}

impl MarketParams {
    pub fn new(spot: f64, strike: f64, rate: f64, vol: f64, tau: f64) -> Result<Self> {
        let p = Self {
            spot,
            strike,
            rate,
            vol,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| -> Result<()> {
            if !v.is_finite() {
                return Err(PricerError::InvalidInput(format!(
                    "{name} must be finite, got {v}"
                )));
            }
            Ok(())
        };
        check("spot", self.spot)?;
        check("strike", self.strike)?;
        check("rate", self.rate)?;
        check("vol", self.vol)?;
        check("tau", self.tau)?;
        if self.spot <= 0.0 {
            return Err(PricerError::InvalidInput(format!(
                "spot must be positive, got {}",
                self.spot
            )));
        }
        if self.strike <= 0.0 {
            return Err(PricerError::InvalidInput(format!(
                "strike must be positive, got {}",
                self.strike
            )));
        }
        if self.vol < 0.0 {
            return Err(PricerError::InvalidInput(format!(
                "vol must be nonnegative, got {}",
                self.vol
            )));
        }
        if self.tau < 0.0 {
            return Err(PricerError::InvalidInput(format!(
                "tau must be nonnegative, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Reduced variables of the pricing problem. Computed once by [`derive()`] and
/// passed by value; every downstream formula is expressed in these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// Total volatility `z = σ√τ`.
    pub total_vol: f64,
    /// Normalized volatility `Z = z/√2`, the expansion variable of the series.
    pub norm_vol: f64,
    /// Forward strike `F = K·e^{−rτ}`.
    pub forward: f64,
    /// Log-forward moneyness `k = ln(S/F) = ln(S/K) + rτ`.
    pub log_moneyness: f64,
}

impl DerivedQuantities {
    /// Build directly from reduced variables, bypassing a `MarketParams`.
    /// Useful for tests and sweeps parameterized in `(Z, k, F)` space.
    pub fn from_reduced(total_vol: f64, forward: f64, log_moneyness: f64) -> Self {
        Self {
            total_vol,
            norm_vol: total_vol / SQRT_2,
            forward,
            log_moneyness,
        }
    }

    /// The spot implied by the reduced variables, `S = F·e^k`.
    pub fn spot(&self) -> f64 {
        self.forward * self.log_moneyness.exp()
    }
}

/// Compute the reduced variables from raw inputs.
pub fn derive(params: MarketParams) -> Result<DerivedQuantities> {
    params.validate()?;
    let total_vol = params.vol * params.tau.sqrt();
    let forward = params.strike * (-params.rate * params.tau).exp();
    let log_moneyness = (params.spot / params.strike).ln() + params.rate * params.tau;
    Ok(DerivedQuantities {
        total_vol,
        norm_vol: total_vol / SQRT_2,
        forward,
        log_moneyness,
    })
}

/// Put price from a call price via parity `C − P = S − F`.
pub fn put_from_call(call_price: f64, d: DerivedQuantities, spot: f64) -> Result<f64> {
    if !call_price.is_finite() {
        return Err(PricerError::InvalidInput(format!(
            "call price must be finite, got {call_price}"
        )));
    }
    Ok(call_price - (spot - d.forward))
}
