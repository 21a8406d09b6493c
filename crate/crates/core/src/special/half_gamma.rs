//! Gamma and reciprocal Gamma restricted to the half-integer lattice ℤ/2.
//!
//! The series summands only ever evaluate Γ at `3/2 + j − n` and
//! `1 + (m − n)/2`, so the lattice is all that is needed, and it admits
//! closed forms:
//!
//! ```text
//! Γ(1/2 + p) = (2p)! / (4^p p!) · √π                 (p ≥ 0)
//! Γ(1/2 + p) = (−4)^|p| |p|! / (2|p|)! · √π          (p < 0)
//! ```
//!
//! Both are accumulated as a multiplicative recurrence instead of literal
//! factorials, which keeps them inside binary64 range to |p| ≈ 170.

use crate::error::{PricerError, Result};

const SQRT_PI: f64 = 1.772453850905516;
const LN_PI: f64 = 1.1447298858494002;

/// An argument on the lattice ℤ/2, stored as `2x` so no rounding of the
/// argument ever occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfIntegerArg {
    two_x: i32,
}

impl HalfIntegerArg {
    /// Lattice point `x = two_x / 2`.
    pub fn from_two_x(two_x: i32) -> Self {
        Self { two_x }
    }

    /// Integer lattice point `x = n`.
    pub fn from_int(n: i32) -> Self {
        Self { two_x: 2 * n }
    }

    /// Strict half-integer `x = 1/2 + p`.
    pub fn half_plus(p: i32) -> Self {
        Self { two_x: 2 * p + 1 }
    }

    pub fn two_x(&self) -> i32 {
        self.two_x
    }

    pub fn is_integer(&self) -> bool {
        self.two_x % 2 == 0
    }

    pub fn as_f64(&self) -> f64 {
        self.two_x as f64 / 2.0
    }
}

/// Γ on the half-integer lattice. Strict half-integers of any sign are
/// computed from the closed forms above; positive integers via factorial.
/// Nonpositive integers are poles.
pub fn gamma_half_integer(arg: HalfIntegerArg) -> Result<f64> {
    if arg.is_integer() {
        let n = arg.two_x / 2;
        if n <= 0 {
            return Err(PricerError::GammaPole);
        }
        let mut acc = 1.0f64;
        for i in 2..n as i64 {
            acc *= i as f64;
        }
        return Ok(acc);
    }
    let p = (arg.two_x - 1) / 2; // x = 1/2 + p
    if p >= 0 {
        let mut acc = SQRT_PI;
        for i in 1..=p as i64 {
            acc *= i as f64 - 0.5;
        }
        Ok(acc)
    } else {
        let mut acc = SQRT_PI;
        for i in 1..=(-p) as i64 {
            acc /= 0.5 - i as f64;
        }
        Ok(acc)
    }
}

/// `1/Γ` on the lattice, total: nonpositive integers map to exactly 0, which
/// is what makes the pole terms of the series vanish.
pub fn rgamma_lattice(arg: HalfIntegerArg) -> f64 {
    if arg.is_integer() {
        let n = arg.two_x / 2;
        if n <= 0 {
            return 0.0;
        }
        if n <= 171 {
            let mut acc = 1.0f64;
            for i in 2..n as i64 {
                acc *= i as f64;
            }
            return 1.0 / acc;
        }
        return (-crate::special::log_factorial(n as u32 - 1)).exp();
    }
    let p = ((arg.two_x - 1) / 2) as i64;
    if (-150..=150).contains(&p) {
        // Representable directly; gamma_half_integer cannot pole here.
        1.0 / gamma_half_integer(arg).expect("half-integer has no pole")
    } else {
        sign_gamma_half(p) * (-ln_abs_gamma_half(p)).exp()
    }
}

/// Sign of Γ(1/2 + p). Negative p alternate via the reflection
/// Γ(1/2+p)Γ(1/2−p) = (−1)^p π.
pub(crate) fn sign_gamma_half(p: i64) -> f64 {
    if p >= 0 || p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// ln |Γ(1/2 + p)| for any integer p.
pub(crate) fn ln_abs_gamma_half(p: i64) -> f64 {
    if p >= 0 {
        ln_gamma_half_nonneg(p)
    } else {
        // |Γ(1/2 − q)| = π / Γ(1/2 + q)
        LN_PI - ln_gamma_half_nonneg(-p)
    }
}

fn ln_gamma_half_nonneg(p: i64) -> f64 {
    debug_assert!(p >= 0);
    // ln Γ(1/2 + p) = ln Γ(p+1) + ln[(2p)! / (4^p (p!)^2)] ... simpler and
    // accurate enough: ln √π + Σ ln(i − 1/2) for moderate p, Stirling above.
    if p <= 300 {
        let mut acc = crate::kahan::KahanSum::new();
        acc.add(SQRT_PI.ln());
        for i in 1..=p {
            acc.add((i as f64 - 0.5).ln());
        }
        acc.value()
    } else {
        let x = p as f64 + 0.5;
        let ln_2pi = 1.8378770664093455;
        (x - 0.5) * x.ln() - x + 0.5 * ln_2pi + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_small_half_integers() {
        // Γ(3/2) = √π/2, Γ(1/2) = √π, Γ(−1/2) = −2√π.
        let g32 = gamma_half_integer(HalfIntegerArg::half_plus(1)).unwrap();
        assert!((g32 - SQRT_PI / 2.0).abs() < 1e-16);
        let g12 = gamma_half_integer(HalfIntegerArg::half_plus(0)).unwrap();
        assert_eq!(g12, SQRT_PI);
        let gm12 = gamma_half_integer(HalfIntegerArg::half_plus(-1)).unwrap();
        assert!((gm12 + 2.0 * SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn gamma_at_positive_integers() {
        assert_eq!(
            gamma_half_integer(HalfIntegerArg::from_int(1)).unwrap(),
            1.0
        );
        assert_eq!(
            gamma_half_integer(HalfIntegerArg::from_int(3)).unwrap(),
            2.0
        );
        assert_eq!(
            gamma_half_integer(HalfIntegerArg::from_int(7)).unwrap(),
            720.0
        );
    }

    #[test]
    fn poles_signal() {
        assert_eq!(
            gamma_half_integer(HalfIntegerArg::from_int(0)),
            Err(PricerError::GammaPole)
        );
        assert_eq!(
            gamma_half_integer(HalfIntegerArg::from_int(-4)),
            Err(PricerError::GammaPole)
        );
    }

    #[test]
    fn rgamma_examples() {
        assert_eq!(rgamma_lattice(HalfIntegerArg::from_int(0)), 0.0);
        assert_eq!(rgamma_lattice(HalfIntegerArg::from_int(-7)), 0.0);
        assert_eq!(rgamma_lattice(HalfIntegerArg::from_int(3)), 0.5);
        let want = -1.0 / (2.0 * SQRT_PI);
        assert!((rgamma_lattice(HalfIntegerArg::half_plus(-1)) - want).abs() < 1e-16);
    }

    #[test]
    fn reflection_identity_across_lattice() {
        // Γ(1/2+p)·Γ(1/2−p) = (−1)^p π
        for p in -80..=80i32 {
            let a = gamma_half_integer(HalfIntegerArg::half_plus(p)).unwrap();
            let b = gamma_half_integer(HalfIntegerArg::half_plus(-p)).unwrap();
            let want = if p % 2 == 0 {
                std::f64::consts::PI
            } else {
                -std::f64::consts::PI
            };
            assert!(
                ((a * b - want) / want).abs() <= 1e-12,
                "p = {p}: {a} * {b} != {want}"
            );
        }
    }

    #[test]
    fn recurrence_across_lattice() {
        // Γ(x+1) = x·Γ(x) over half-integers and positive integers.
        for two_x in (-321..=321i32).step_by(2) {
            let x = two_x as f64 / 2.0;
            let g = gamma_half_integer(HalfIntegerArg::from_two_x(two_x)).unwrap();
            let g1 = gamma_half_integer(HalfIntegerArg::from_two_x(two_x + 2)).unwrap();
            if g1.is_finite() && g.is_finite() {
                assert!(
                    ((g1 - x * g) / g1).abs() <= 1e-13,
                    "recurrence failed at x = {x}"
                );
            }
        }
        for n in 1..=170i32 {
            let g = gamma_half_integer(HalfIntegerArg::from_int(n)).unwrap();
            let g1 = gamma_half_integer(HalfIntegerArg::from_int(n + 1)).unwrap();
            assert!(((g1 - n as f64 * g) / g1).abs() <= 1e-13, "n = {n}");
        }
    }

    #[test]
    fn log_form_agrees_with_direct() {
        for p in -140..=140i64 {
            let direct = gamma_half_integer(HalfIntegerArg::half_plus(p as i32)).unwrap();
            let via_log = sign_gamma_half(p) * ln_abs_gamma_half(p).exp();
            assert!(
                ((via_log - direct) / direct).abs() < 1e-12,
                "p = {p}: {via_log} vs {direct}"
            );
        }
    }

    #[test]
    fn rgamma_matches_reciprocal_in_log_range() {
        // Exercise the log-space branch beyond |p| = 150.
        for p in [160i32, 165, -160, -165] {
            let r = rgamma_lattice(HalfIntegerArg::half_plus(p));
            let g = gamma_half_integer(HalfIntegerArg::half_plus(p)).unwrap();
            assert!(((r * g) - 1.0).abs() < 1e-11, "p = {p}");
        }
    }
}
