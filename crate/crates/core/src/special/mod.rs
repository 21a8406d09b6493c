//! Normal CDF, exact half-integer Gamma values, reciprocal Gamma on the
//! half-integer lattice, and log-factorials.
//!
//! Everything here is exact-as-possible binary64: the closed-form pricer is
//! the primary oracle of the test suite and must be trusted to more digits
//! than the series tolerances under test.

mod erf;
mod half_gamma;

pub use erf::{erf, erfc};
pub use half_gamma::{gamma_half_integer, rgamma_lattice, HalfIntegerArg};
pub(crate) use half_gamma::{ln_abs_gamma_half, sign_gamma_half};

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

/// Standard normal cumulative distribution function, absolute error below
/// 1e-15. Negative arguments are evaluated through the complementary tail so
/// that `norm_cdf(-x) + norm_cdf(x) = 1` holds to the last place.
pub fn norm_cdf(x: f64) -> f64 {
    if x < 0.0 {
        0.5 * erfc(-x * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * erfc(x * FRAC_1_SQRT_2)
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

const LOG_FACTORIAL_TABLE_LEN: usize = 257;

fn log_factorial_table() -> &'static [f64; LOG_FACTORIAL_TABLE_LEN] {
    static TABLE: OnceLock<[f64; LOG_FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0f64; LOG_FACTORIAL_TABLE_LEN];
        let mut acc = crate::kahan::KahanSum::new();
        for (i, slot) in t.iter_mut().enumerate().skip(2) {
            acc.add((i as f64).ln());
            *slot = acc.value();
        }
        t
    })
}

/// `ln(n!)` to relative error below 1e-14; table-backed for `n <= 256`,
/// Stirling's series above.
pub fn log_factorial(n: u32) -> f64 {
    let n = n as usize;
    if n < LOG_FACTORIAL_TABLE_LEN {
        return log_factorial_table()[n];
    }
    // Stirling for ln Γ(n+1); the 1/n^5 term already sits below 1e-19
    // relative at n = 257.
    let x = (n as f64) + 1.0;
    let ln_2pi = 1.8378770664093455;
    (x - 0.5) * x.ln() - x + 0.5 * ln_2pi + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Taylor-series oracle for the normal CDF near the origin, summed in
    // compensated arithmetic. Independent of the erfc rational approximation.
    fn norm_cdf_taylor_oracle(x: f64) -> f64 {
        assert!(x.abs() < 4.0);
        let mut sum = crate::kahan::KahanSum::new();
        let mut term = x;
        let mut n = 0u32;
        while term.abs() > 1e-22 && n < 200 {
            sum.add(term / (2.0 * n as f64 + 1.0));
            n += 1;
            term *= -x * x / (2.0 * n as f64);
        }
        0.5 + sum.value() * norm_pdf(0.0)
    }

    // Asymptotic-tail oracle N(-a) = phi(a)/a * (1 - 1/a^2 + 3/a^4 - ...).
    fn norm_cdf_tail_oracle(a: f64) -> f64 {
        assert!(a >= 6.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        for i in 1..8 {
            term *= -(2.0 * i as f64 - 1.0) / (a * a);
            sum += term;
        }
        norm_pdf(a) / a * sum
    }

    #[test]
    fn norm_cdf_center_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        let want = norm_cdf_taylor_oracle(0.1);
        assert!((want - 0.539827837277029).abs() < 1e-15);
        assert!((norm_cdf(0.1) - want).abs() < 1e-15);
        for &x in &[0.01, 0.3, 0.5, 1.0, 1.7, 2.5, 3.3] {
            assert!(
                (norm_cdf(x) - norm_cdf_taylor_oracle(x)).abs() < 1e-15,
                "x = {x}"
            );
        }
    }

    #[test]
    fn norm_cdf_deep_tail() {
        let got = norm_cdf(-8.0);
        let want = norm_cdf_tail_oracle(8.0);
        assert!((want - 6.22096e-16).abs() < 1e-20);
        // The 7-term asymptotic oracle itself carries ~3e-8 relative
        // truncation at a = 8; the implementation sits well inside that.
        assert!((got - want).abs() / want < 5e-8, "got {got} want {want}");
    }

    #[test]
    fn norm_cdf_symmetry_and_monotonicity() {
        let n = 10_000;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=n {
            let x = -10.0 + 20.0 * (i as f64) / (n as f64);
            let v = norm_cdf(x);
            assert!((v + norm_cdf(-x) - 1.0).abs() <= 1e-15, "x = {x}");
            assert!(v >= prev, "not monotone at x = {x}");
            prev = v;
        }
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        // ln(20!) summed at high precision.
        let mut acc = 0.0f64;
        for i in 2..=20u32 {
            acc += (i as f64).ln();
        }
        assert!((log_factorial(20) - 42.335616460753485).abs() < 1e-12);
        assert!((log_factorial(20) - acc).abs() < 1e-12);
        // Table/Stirling seam.
        let by_sum: f64 = (2..=300u32).map(|i| (i as f64).ln()).sum();
        assert!(((log_factorial(300) - by_sum) / by_sum).abs() < 1e-14);
    }
}
