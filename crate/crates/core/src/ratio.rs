//! Exact fractions for reporting.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// A reduced fraction with a float convenience value. Comparisons should
/// use `num` and `den`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
    pub value: f64,
}

impl Fraction {
    /// Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        Self::from(Ratio::new(num, den))
    }

    pub fn of_counts(count: u64, total: u64) -> Self {
        Self::new(count as i64, total as i64)
    }

    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new(self.num, self.den)
    }
}

impl From<Ratio<i64>> for Fraction {
    fn from(r: Ratio<i64>) -> Self {
        Self {
            num: *r.numer(),
            den: *r.denom(),
            value: *r.numer() as f64 / *r.denom() as f64,
        }
    }
}
