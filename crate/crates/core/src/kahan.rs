//! Compensated (Kahan-Neumaier) accumulation.
//!
//! The residue series alternates in sign and cancels heavily away from the
//! money, so every summation in this crate runs through this accumulator in a
//! fixed order. The Neumaier variant also compensates when the incoming term
//! is larger than the running sum.

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_that_naive_summation_loses() {
        let mut k = KahanSum::new();
        let mut naive = 0.0f64;
        for &v in &[1.0, 1e100, 1.0, -1e100] {
            k.add(v);
            naive += v;
        }
        assert_eq!(k.value(), 2.0);
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn matches_exact_sum_of_small_terms() {
        let mut k = KahanSum::new();
        for _ in 0..10_000 {
            k.add(0.1);
        }
        assert!((k.value() - 1000.0).abs() < 1e-10);
    }
}
