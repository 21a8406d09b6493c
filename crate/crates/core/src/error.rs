//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PricerError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricerError {
    /// A raw input violated its domain (non-finite, wrong sign, bad flag
    /// combination).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The series machinery was asked to price with `Z = σ√τ/√2 = 0`; the
    /// expansion variable is degenerate and only intrinsic-value limits exist.
    #[error("degenerate volatility: sigma*sqrt(tau) is zero")]
    DegenerateVolatility,

    /// Adaptive truncation could not push the per-term bound below the
    /// requested tolerance within `j_cap` diagonal lines. `best_price` and
    /// `tail_bound` carry the best effort at `j_cap` when a sum was attempted.
    #[error(
        "truncation cap {j_cap} exceeded (best price {best_price:?}, tail bound {tail_bound:?})"
    )]
    TruncationCapExceeded {
        j_cap: u32,
        best_price: Option<f64>,
        tail_bound: Option<f64>,
    },

    /// Gamma evaluated at a nonpositive integer, where it has a pole.
    #[error("gamma pole at nonpositive integer argument")]
    GammaPole,

    /// The contour oracle requires `z²/2 − k > 0`; the power kernel
    /// `(z²/2 − k)^s` has no real branch otherwise.
    #[error("branch domain violated: z^2/2 - k must be positive for the contour oracle")]
    BranchDomain,

    /// A contour grid point fell within 1e-8 of a pole of one of the Gamma
    /// factors of the integrand.
    #[error("contour integrand evaluated too close to a gamma pole")]
    PoleProximity,

    /// Doubling the quadrature resolution moved the contour price by more
    /// than the trusted threshold.
    #[error("quadrature unresolved: refinement changed the price by {rel_change:e} (relative)")]
    QuadratureUnresolved { rel_change: f64 },
}
