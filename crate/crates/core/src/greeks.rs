//! Hedge parameters from term-wise differentiation of the diagonal series.
//!
//! The series converges normally, so Delta, Rho, Vega and Theta are obtained
//! by differentiating summand by summand. Each differentiated term is first
//! restructured so the `(1 − k/Z²)^{n−1}` factor only ever appears multiplied
//! by `n`: at `n = 0` the coefficients `P`/`Q` carry a factor of
//! `(Z² − k)` that cancels the negative power, and distributing it before
//! evaluation means no division by a vanishing base can occur.
//!
//! Theta is `∂C/∂τ`, the derivative with respect to time-to-expiry, not
//! calendar time; negate it for a trader's clock-time theta.

use crate::error::{PricerError, Result};
use crate::kahan::KahanSum;
use crate::market::{derive, DerivedQuantities, MarketParams};
use crate::series::{alpha, inv_factorial, select_truncation, TruncationConfig};
use crate::special::{
    ln_abs_gamma_half, log_factorial, rgamma_lattice, sign_gamma_half, HalfIntegerArg,
};

/// All four sensitivities from one shared truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreeksResult {
    /// dC/dS.
    pub delta: f64,
    /// dC/dr (currency · years).
    pub rho: f64,
    /// dC/dσ (currency · √years).
    pub vega: f64,
    /// dC/dτ (currency / year): time-to-expiry convention.
    pub theta_tau: f64,
    pub j_used: u32,
    pub converged: bool,
}

const LOG_SPACE_J: u32 = 30;

// (−1)^n / (n! Γ(1/2 + gamma_p)) · β^count · Z^z_exp, log-space for large j.
fn summand(j: u32, n: u32, gamma_p: i64, count: u32, z_exp: i32, beta: f64, z_norm: f64) -> f64 {
    if beta == 0.0 && count > 0 {
        return 0.0;
    }
    let n_sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    if j <= LOG_SPACE_J {
        let rg = rgamma_lattice(HalfIntegerArg::half_plus(gamma_p as i32));
        n_sign * (z_norm.powi(z_exp) * beta.powi(count as i32)) * rg * inv_factorial(n)
    } else {
        let mut sign = n_sign * sign_gamma_half(gamma_p);
        if beta < 0.0 && count % 2 == 1 {
            sign = -sign;
        }
        let ln_beta = if count == 0 {
            0.0
        } else {
            count as f64 * beta.abs().ln()
        };
        let ln =
            z_exp as f64 * z_norm.ln() + ln_beta - log_factorial(n) - ln_abs_gamma_half(gamma_p);
        sign * ln.exp()
    }
}

fn delta_sum(d: DerivedQuantities, spot: f64, j_max: u32) -> f64 {
    let z_norm = d.norm_vol;
    let beta = 1.0 - d.log_moneyness / (z_norm * z_norm);
    let mut acc = KahanSum::new();
    for j in 1..=j_max {
        for n in 0..2 * j {
            acc.add(summand(
                j,
                n,
                j as i64 - n as i64,
                n,
                2 * j as i32 - 1,
                beta,
                z_norm,
            ));
        }
    }
    0.5 + 0.5 * d.forward / spot * acc.value()
}

fn rho_sum(d: DerivedQuantities, tau: f64, j_max: u32) -> f64 {
    let z_norm = d.norm_vol;
    let beta = 1.0 - d.log_moneyness / (z_norm * z_norm);
    let mut acc = KahanSum::new();
    for j in 0..=j_max {
        for n in 0..=2 * j {
            let p = j as i64 - n as i64 + 1;
            acc.add(summand(j, n, p, n, 2 * j as i32 + 1, beta, z_norm));
            if n > 0 {
                acc.add(n as f64 * summand(j, n, p, n - 1, 2 * j as i32 - 1, beta, z_norm));
            }
        }
    }
    0.5 * tau * d.forward * (1.0 - acc.value())
}

fn vega_sum(d: DerivedQuantities, tau: f64, j_max: u32) -> f64 {
    let z_norm = d.norm_vol;
    let k = d.log_moneyness;
    let beta = 1.0 - k / (z_norm * z_norm);
    let mut acc = KahanSum::new();
    for j in 0..=j_max {
        for n in 0..=2 * j {
            let p = j as i64 - n as i64 + 1;
            let line = (1 + 2 * j) as f64;
            acc.add(line * summand(j, n, p, n, 2 * j as i32, beta, z_norm));
            if n > 0 {
                acc.add(
                    2.0 * n as f64 * k * summand(j, n, p, n - 1, 2 * (j as i32 - 1), beta, z_norm),
                );
            }
        }
    }
    0.5 * d.forward * (0.5 * tau).sqrt() * acc.value()
}

fn theta_sum(d: DerivedQuantities, rate: f64, tau: f64, j_max: u32) -> f64 {
    let z_norm = d.norm_vol;
    let k = d.log_moneyness;
    let beta = 1.0 - k / (z_norm * z_norm);
    let sigma_sq = 2.0 * z_norm * z_norm / tau;
    let rt = rate * tau;
    let mut acc = KahanSum::new();
    for j in 0..=j_max {
        for n in 0..=2 * j {
            let p = j as i64 - n as i64 + 1;
            let c1 = (1.0 + 2.0 * j as f64 - 2.0 * rt) / 8.0;
            acc.add(c1 * summand(j, n, p, n, 2 * j as i32 - 1, beta, z_norm));
            if n > 0 {
                let c2 = 2.0 * n as f64 * (k - rt) / 8.0;
                acc.add(c2 * summand(j, n, p, n - 1, 2 * j as i32 - 3, beta, z_norm));
            }
        }
    }
    0.5 * rate * d.forward + sigma_sq * d.forward * acc.value()
}

// Greeks tighten the adaptive tolerance by one order of magnitude: the
// differentiated terms pick up O(j) factors relative to the price summands.
fn resolve_truncation(d: DerivedQuantities, cfg: TruncationConfig) -> Result<u32> {
    cfg.validate()?;
    match cfg {
        TruncationConfig::FixedRect { .. } => Err(PricerError::InvalidInput(
            "greeks are diagonal-series only; use FixedDiagonal or Adaptive".into(),
        )),
        TruncationConfig::FixedDiagonal { j_max } => Ok(j_max),
        TruncationConfig::Adaptive { epsilon, j_cap } => {
            let a = alpha(d)?;
            select_truncation(epsilon / 10.0, a, d.norm_vol, j_cap)
        }
    }
}

fn require_live_vol(d: DerivedQuantities) -> Result<()> {
    if d.norm_vol == 0.0 {
        return Err(PricerError::DegenerateVolatility);
    }
    Ok(())
}

/// Series Delta `∂C/∂S`.
pub fn delta_series(d: DerivedQuantities, spot: f64, cfg: TruncationConfig) -> Result<f64> {
    require_live_vol(d)?;
    let j_max = resolve_truncation(d, cfg)?;
    Ok(delta_sum(d, spot, j_max))
}

/// Series Rho `∂C/∂r`.
pub fn rho_series(d: DerivedQuantities, tau: f64, cfg: TruncationConfig) -> Result<f64> {
    require_live_vol(d)?;
    let j_max = resolve_truncation(d, cfg)?;
    Ok(rho_sum(d, tau, j_max))
}

/// Series Vega `∂C/∂σ`.
pub fn vega_series(d: DerivedQuantities, tau: f64, cfg: TruncationConfig) -> Result<f64> {
    require_live_vol(d)?;
    let j_max = resolve_truncation(d, cfg)?;
    Ok(vega_sum(d, tau, j_max))
}

/// Series Theta `∂C/∂τ` (time-to-expiry convention).
pub fn theta_series(
    d: DerivedQuantities,
    rate: f64,
    tau: f64,
    cfg: TruncationConfig,
) -> Result<f64> {
    require_live_vol(d)?;
    if tau <= 0.0 {
        return Err(PricerError::DegenerateVolatility);
    }
    let j_max = resolve_truncation(d, cfg)?;
    Ok(theta_sum(d, rate, tau, j_max))
}

/// All four Greeks in one pass, sharing a single resolved truncation; each
/// field is bitwise identical to the corresponding standalone operation.
pub fn greeks_bundle(params: MarketParams, cfg: TruncationConfig) -> Result<GreeksResult> {
    let d = derive(params)?;
    require_live_vol(d)?;
    if params.tau <= 0.0 {
        return Err(PricerError::DegenerateVolatility);
    }
    let j_max = resolve_truncation(d, cfg)?;
    Ok(GreeksResult {
        delta: delta_sum(d, params.spot, j_max),
        rho: rho_sum(d, params.tau, j_max),
        vega: vega_sum(d, params.tau, j_max),
        theta_tau: theta_sum(d, params.rate, params.tau, j_max),
        j_used: j_max,
        // Adaptive selection either lands within its cap or errors out.
        converged: true,
    })
}
