//! Multiplication accounting for the instrumented reference path.
//!
//! Every half-word product computed by [`crate::nh`] is reported to a
//! [`MulCounter`]. The unit type discards the reports, so uninstrumented
//! calls compile down to the bare arithmetic.

pub trait MulCounter {
    fn record(&mut self, products: u64);
}

impl MulCounter for () {
    #[inline(always)]
    fn record(&mut self, _products: u64) {}
}

impl MulCounter for u64 {
    #[inline(always)]
    fn record(&mut self, products: u64) {
        *self += products;
    }
}

/// Per-stage multiplication totals for one hash evaluation.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StageTally {
    pub ehc: u64,
    pub tree: u64,
    pub finalize: u64,
    pub remainder: u64,
}

impl StageTally {
    pub fn total(&self) -> u64 {
        self.ehc + self.tree + self.finalize + self.remainder
    }

    /// Fraction of all multiplications spent in the EHC stage.
    pub fn ehc_share(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        self.ehc as f64 / self.total() as f64
    }
}
