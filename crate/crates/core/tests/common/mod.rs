//! Shared helpers for the integration suites: a deterministic PRNG and
//! draw utilities for market configurations with a bounded moneyness factor.

use bsseries::market::{derive, DerivedQuantities, MarketParams};
use bsseries::series::alpha;

pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_f64(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Draw a market configuration with `αZ <= az_cap` by sampling the reduced
/// variables directly and mapping them back to raw inputs.
pub fn draw_params(rng: &mut XorShift, az_cap: f64) -> (MarketParams, DerivedQuantities) {
    loop {
        let z_norm = rng.in_range(0.08, az_cap.min(0.79));
        let a = rng.in_range(-az_cap / z_norm, az_cap / z_norm);
        let k = z_norm * z_norm * (1.0 - a);
        let tau = rng.in_range(0.25, 2.0);
        let rate = rng.in_range(-0.05, 0.05);
        let strike = 4000.0;
        let forward = strike * (-rate * tau).exp();
        let spot = forward * k.exp();
        let vol = z_norm * std::f64::consts::SQRT_2 / tau.sqrt();
        let params = MarketParams::new(spot, strike, rate, vol, tau).unwrap();
        let d = derive(params).unwrap();
        // Mapping back through logs can nudge αZ past the cap by rounding.
        if alpha(d).unwrap() * d.norm_vol <= az_cap {
            return (params, d);
        }
    }
}
