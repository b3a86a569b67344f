//! Point estimates with standard errors.

use serde::{Deserialize, Serialize};

/// Confidence multiplier used for every agreement check.
pub const SIGMA_GATE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn new(value: f64, std_error: f64) -> Self {
        Estimate { value, std_error }
    }

    /// Exact value with no sampling error.
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }

    /// `sqrt(se_a^2 + se_b^2)`.
    pub fn combined_se(&self, other: &Estimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }

    /// Whether the two estimates differ by at most `k` combined standard errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.combined_se(other)
    }

    /// Affine rescaling `a * X`.
    pub fn scaled(&self, a: f64) -> Estimate {
        Estimate { value: a * self.value, std_error: a.abs() * self.std_error }
    }
}

/// Binomial proportion with its standard error `sqrt(p (1 - p) / n)`.
pub fn proportion(successes: u64, trials: u64) -> Estimate {
    assert!(trials > 0, "proportion of zero trials");
    let p = successes as f64 / trials as f64;
    Estimate::new(p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Running first and second moments of an integer statistic. Merging is
/// exact, so the result does not depend on how trials were partitioned.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntMoments {
    pub n: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl IntMoments {
    #[inline]
    pub fn push(&mut self, x: u64) {
        self.n += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(mut self, other: IntMoments) -> IntMoments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.n as f64
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        // n * sum_sq - sum^2 is an exact integer
        let centred = (self.n as u128 * self.sum_sq - self.sum * self.sum) as f64;
        centred / (n * (n - 1.0))
    }

    /// Mean with standard error `s / sqrt(n)`.
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.mean(), (self.sample_variance() / self.n as f64).sqrt())
    }
}
