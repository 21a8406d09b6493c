//! Residue-series pricers: the rectangular double series, the diagonal
//! `Z`-ordered series, the per-term truncation bound and adaptive order
//! selection.
//!
//! The diagonal series prices a call as
//!
//! ```text
//! C = (S − F)/2 + (F/2) Σ_{j≥0} Σ_{n≤2j} Z^{2j+1} (−1)^n / (n! Γ(3/2+j−n)) (1 − k/Z²)^n
//! ```
//!
//! with `(j_max+1)²` terms through diagonal `j_max`. Each summand is bounded
//! uniformly in `n` by `(Z/√π)·(αZ)^{2j}/(⌊j/2⌋+1)!` with
//! `α = max(1, |1 − k/Z²|)`, which both certifies the truncation error and
//! drives the adaptive order selection.
//!
//! Summation order is fixed (`j` ascending, `n` ascending within each line,
//! `m` innermost for the rectangular sum) and compensated, so printed digits
//! are reproducible run to run.

use std::sync::OnceLock;

use crate::error::{PricerError, Result};
use crate::kahan::KahanSum;
use crate::market::DerivedQuantities;
use crate::special::{
    ln_abs_gamma_half, log_factorial, rgamma_lattice, sign_gamma_half, HalfIntegerArg,
};

const SQRT_PI: f64 = 1.772453850905516;
/// Diagonal index above which term magnitudes are assembled in log space.
const LOG_SPACE_J: u32 = 30;
/// Number of majorant terms summed for the reported tail certificate.
const TAIL_MAJORANT_TERMS: u32 = 64;
/// Compensated-sum mass ratio beyond which binary64 cannot certify digits.
const CANCELLATION_GUARD: f64 = 1e12;

/// Truncation policy for the series pricers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationConfig {
    /// Rectangular truncation of the double series: `n = 0..=n_max`,
    /// `m = 1..=m_max`.
    FixedRect { n_max: u32, m_max: u32 },
    /// Diagonal truncation: sum the lines `j = 0..=j_max`.
    FixedDiagonal { j_max: u32 },
    /// Pick the smallest diagonal order whose per-term bound falls below
    /// `epsilon` (a tolerance on the F/2-scaled summands), refusing past
    /// `j_cap`.
    Adaptive { epsilon: f64, j_cap: u32 },
}

impl TruncationConfig {
    pub const DEFAULT_J_CAP: u32 = 64;

    /// Adaptive truncation with the default cap of 64 diagonal lines.
    pub fn adaptive(epsilon: f64) -> Self {
        Self::Adaptive {
            epsilon,
            j_cap: Self::DEFAULT_J_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FixedRect { m_max, .. } => {
                if m_max < 1 {
                    return Err(PricerError::InvalidInput(
                        "rectangular truncation needs m_max >= 1".into(),
                    ));
                }
            }
            Self::FixedDiagonal { .. } => {}
            Self::Adaptive { epsilon, j_cap } => {
                if epsilon.is_nan() || epsilon <= 0.0 {
                    return Err(PricerError::InvalidInput(format!(
                        "adaptive epsilon must be positive, got {epsilon}"
                    )));
                }
                if j_cap < 1 {
                    return Err(PricerError::InvalidInput("j_cap must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Priced output with the truncation bookkeeping and tail certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub price: f64,
    /// Last diagonal line summed.
    pub j_used: u32,
    /// Always `(j_used + 1)²` in diagonal mode.
    pub terms_evaluated: u64,
    /// `F/2` times a 64-term sum of the per-term bound past `j_used`: the
    /// scale of the omitted tail. Single-term bounds understate the lowest
    /// lines by at most 8/3 and ignore the `2j+1` line multiplicity, so this
    /// is a decay estimate rather than a hard error bracket.
    pub tail_bound: f64,
    pub converged: bool,
    /// Set when the accumulated term mass exceeded the cancellation guard,
    /// meaning binary64 cannot certify the printed digits.
    pub precision_loss: bool,
}

/// Index of one summand of the diagonal series; `n <= 2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermIndex {
    j: u32,
    n: u32,
}

impl TermIndex {
    pub fn new(j: u32, n: u32) -> Result<Self> {
        if n > 2 * j {
            return Err(PricerError::InvalidInput(format!(
                "term index needs n <= 2j, got j={j} n={n}"
            )));
        }
        Ok(Self { j, n })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

fn inv_factorial_table() -> &'static [f64; 171] {
    static TABLE: OnceLock<[f64; 171]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0f64; 171];
        let mut fact = 1.0f64;
        for (i, slot) in t.iter_mut().enumerate().skip(1) {
            fact *= i as f64;
            *slot = 1.0 / fact;
        }
        t
    })
}

#[inline]
pub(crate) fn inv_factorial(n: u32) -> f64 {
    let t = inv_factorial_table();
    if (n as usize) < t.len() {
        t[n as usize]
    } else {
        (-log_factorial(n)).exp()
    }
}

/// `α = max(1, |1 − k/Z²|)`, the moneyness factor of the convergence bound.
pub fn alpha(d: DerivedQuantities) -> Result<f64> {
    let z_norm = d.norm_vol;
    if z_norm == 0.0 {
        return Err(PricerError::DegenerateVolatility);
    }
    Ok((1.0 - d.log_moneyness / (z_norm * z_norm)).abs().max(1.0))
}

// One summand of the diagonal series including the F/2 prefactor.
// `beta = 1 − k/Z²`; sign tracking keeps the log-space path exact.
fn term_value(j: u32, n: u32, f_half: f64, z_norm: f64, beta: f64) -> f64 {
    debug_assert!(n <= 2 * j);
    if beta == 0.0 && n > 0 {
        return 0.0;
    }
    let p = j as i64 + 1 - n as i64; // Γ(3/2+j−n) = Γ(1/2 + p)
    if j <= LOG_SPACE_J {
        let zpow = z_norm.powi(2 * j as i32 + 1);
        let bpow = (-beta).powi(n as i32); // (−1)^n (1−k/Z²)^n
        let rg = rgamma_lattice(HalfIntegerArg::half_plus(p as i32));
        ((zpow * bpow) * rg) * inv_factorial(n) * f_half
    } else {
        let mut sign = sign_gamma_half(p);
        if n % 2 == 1 && beta > 0.0 {
            sign = -sign;
        }
        let ln_beta = if n == 0 {
            0.0
        } else {
            n as f64 * beta.abs().ln()
        };
        let ln_mag = f_half.ln() + (2.0 * j as f64 + 1.0) * z_norm.ln() + ln_beta
            - log_factorial(n)
            - ln_abs_gamma_half(p);
        sign * ln_mag.exp()
    }
}

/// The `(j, n)` summand of the diagonal series, `F/2` prefactor included.
pub fn term(idx: TermIndex, d: DerivedQuantities) -> Result<f64> {
    let z_norm = d.norm_vol;
    if z_norm == 0.0 {
        return Err(PricerError::DegenerateVolatility);
    }
    let beta = 1.0 - d.log_moneyness / (z_norm * z_norm);
    Ok(term_value(idx.j, idx.n, 0.5 * d.forward, z_norm, beta))
}

/// Rectangular truncation of the double series,
/// `F/2 Σ_{n,m} (−1)^n/(n! Γ(1+(m−n)/2)) (Z²−k)^n Z^{m−n}`, summed with `m`
/// innermost ascending. Terms where Γ sits at a nonpositive integer vanish
/// through [`rgamma_lattice`].
pub fn call_series_rect(d: DerivedQuantities, n_max: u32, m_max: u32) -> Result<f64> {
    if d.norm_vol == 0.0 {
        return Err(PricerError::DegenerateVolatility);
    }
    if m_max < 1 {
        return Err(PricerError::InvalidInput(
            "rectangular truncation needs m_max >= 1".into(),
        ));
    }
    let z_norm = d.norm_vol;
    let zsq_minus_k = z_norm * z_norm - d.log_moneyness;
    let f_half = 0.5 * d.forward;
    let mut acc = KahanSum::new();
    for n in 0..=n_max {
        // (−1)^n (Z²−k)^n / n!
        let coef = (-zsq_minus_k).powi(n as i32) * inv_factorial(n);
        for m in 1..=m_max {
            let diff = m as i32 - n as i32;
            let rg = rgamma_lattice(HalfIntegerArg::from_two_x(2 + diff));
            if rg == 0.0 {
                continue;
            }
            acc.add(coef * z_norm.powi(diff) * rg * f_half);
        }
    }
    Ok(acc.value())
}

/// The oblique-line functions `φ_J(x) = Σ_{n<J} (−1)^n/(n! Γ(1+J/2−n)) (1−x)^n`.
pub fn phi(j_line: u32, x: f64) -> f64 {
    debug_assert!(j_line >= 1);
    let mut acc = KahanSum::new();
    let base = 1.0 - x;
    for n in 0..j_line {
        let rg = rgamma_lattice(HalfIntegerArg::from_two_x(2 + j_line as i32 - 2 * n as i32));
        if rg == 0.0 {
            continue;
        }
        acc.add((-base).powi(n as i32) * inv_factorial(n) * rg);
    }
    acc.value()
}

/// Per-term bound `(Z/√π)·(αZ)^{2j}/(⌊j/2⌋+1)!`, evaluated in log space.
pub fn bound_term(j: u32, alpha: f64, z_norm: f64) -> f64 {
    let ln = z_norm.ln() - SQRT_PI.ln() + 2.0 * j as f64 * (alpha * z_norm).ln()
        - log_factorial(j / 2 + 1);
    ln.exp()
}

/// Smallest diagonal order from which the per-term bound stays below
/// `epsilon`. For `αZ ≤ 1` the bound decreases monotonically and this is
/// exactly the first `j` with `bound_term(j) < epsilon`; for `αZ > 1` the
/// bound zig-zags while the factorial catches up, and selection waits until
/// it has dropped below `epsilon` for good.
pub fn select_truncation(epsilon: f64, alpha: f64, z_norm: f64, j_cap: u32) -> Result<u32> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(PricerError::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let domain_ok = alpha >= 1.0 && z_norm > 0.0;
    if !domain_ok {
        return Err(PricerError::InvalidInput(format!(
            "selection needs alpha >= 1 and Z > 0, got alpha={alpha} Z={z_norm}"
        )));
    }
    // Past j_mono consecutive bound pairs strictly decrease, so once the last
    // two inspected bounds sit below epsilon nothing later can rebound.
    let az = alpha * z_norm;
    let j_mono = (2.0 * az.powi(4)).ceil().min(1e7) as u64 + 2;
    let horizon = j_mono.max(j_cap as u64 + 2);
    let mut last_bad: Option<u64> = None;
    for j in 0..=horizon {
        if bound_term(j as u32, alpha, z_norm) >= epsilon {
            last_bad = Some(j);
        }
    }
    let j_first = last_bad.map_or(0, |b| b + 1);
    if j_first > j_cap as u64 {
        return Err(PricerError::TruncationCapExceeded {
            j_cap,
            best_price: None,
            tail_bound: None,
        });
    }
    Ok(j_first as u32)
}

struct DiagonalSum {
    value: f64,
    mass: f64,
    terms: u64,
}

fn diagonal_sum(leading: f64, f_half: f64, z_norm: f64, beta: f64, j_max: u32) -> DiagonalSum {
    let mut acc = KahanSum::new();
    let mut mass = 0.0f64;
    let mut terms = 0u64;
    acc.add(leading);
    mass += leading.abs();
    for j in 0..=j_max {
        for n in 0..=2 * j {
            let t = term_value(j, n, f_half, z_norm, beta);
            acc.add(t);
            mass += t.abs();
            terms += 1;
        }
    }
    DiagonalSum {
        value: acc.value(),
        mass,
        terms,
    }
}

fn tail_majorant(f_half: f64, alpha: f64, z_norm: f64, j_used: u32) -> f64 {
    let mut acc = KahanSum::new();
    for j in (j_used + 1)..=(j_used + TAIL_MAJORANT_TERMS) {
        acc.add(bound_term(j, alpha, z_norm));
    }
    f_half * acc.value()
}

/// Price a call through the diagonal series under `cfg`. `Z = 0`
/// short-circuits to the intrinsic value (the limit is forced).
pub fn call_series_diagonal(
    d: DerivedQuantities,
    spot: f64,
    cfg: TruncationConfig,
) -> Result<SeriesResult> {
    cfg.validate()?;
    let z_norm = d.norm_vol;
    if z_norm == 0.0 {
        return Ok(SeriesResult {
            price: (spot - d.forward).max(0.0),
            j_used: 0,
            terms_evaluated: 1,
            tail_bound: 0.0,
            converged: true,
            precision_loss: false,
        });
    }
    let a = alpha(d)?;
    let f_half = 0.5 * d.forward;
    let beta = 1.0 - d.log_moneyness / (z_norm * z_norm);
    let leading = 0.5 * (spot - d.forward);

    let (j_used, eps_requested) = match cfg {
        TruncationConfig::FixedRect { .. } => {
            return Err(PricerError::InvalidInput(
                "diagonal pricer cannot run a rectangular truncation; use call_series_rect".into(),
            ))
        }
        TruncationConfig::FixedDiagonal { j_max } => (j_max, None),
        TruncationConfig::Adaptive { epsilon, j_cap } => {
            match select_truncation(epsilon, a, z_norm, j_cap) {
                Ok(j) => (j, Some(epsilon)),
                Err(PricerError::TruncationCapExceeded { .. }) => {
                    let best = diagonal_sum(leading, f_half, z_norm, beta, j_cap);
                    return Err(PricerError::TruncationCapExceeded {
                        j_cap,
                        best_price: Some(best.value),
                        tail_bound: Some(tail_majorant(f_half, a, z_norm, j_cap)),
                    });
                }
                Err(e) => return Err(e),
            }
        }
    };

    let sum = diagonal_sum(leading, f_half, z_norm, beta, j_used);
    let tail_bound = tail_majorant(f_half, a, z_norm, j_used);
    let precision_loss = sum.mass > CANCELLATION_GUARD * sum.value.abs();
    let converged = !precision_loss
        && match eps_requested {
            Some(eps) => tail_bound <= eps * f_half,
            None => true,
        };
    debug_assert_eq!(sum.terms, (j_used as u64 + 1) * (j_used as u64 + 1));
    Ok(SeriesResult {
        price: sum.value,
        j_used,
        terms_evaluated: sum.terms,
        tail_bound,
        converged,
        precision_loss,
    })
}

/// Put price: the identical series with leading term `(F − S)/2`, realized as
/// `call − (S − F)` so the shared tail cancels exactly term for term.
pub fn put_series(d: DerivedQuantities, spot: f64, cfg: TruncationConfig) -> Result<SeriesResult> {
    let parity = spot - d.forward;
    match call_series_diagonal(d, spot, cfg) {
        Ok(mut res) => {
            if d.norm_vol == 0.0 {
                res.price = (d.forward - spot).max(0.0);
            } else {
                res.price -= parity;
            }
            Ok(res)
        }
        Err(PricerError::TruncationCapExceeded {
            j_cap,
            best_price,
            tail_bound,
        }) => Err(PricerError::TruncationCapExceeded {
            j_cap,
            best_price: best_price.map(|p| p - parity),
            tail_bound,
        }),
        Err(e) => Err(e),
    }
}
