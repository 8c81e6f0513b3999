//! Deterministic reduction of per-point values into estimates.

use serde::{Deserialize, Serialize};

use crate::linalg::pairwise_sum;

use super::rule::{RuleKind, SphereRule};

/// A scalar estimate with its Monte Carlo standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl QuadratureEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, samples: 1 }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.std_error / self.value.abs()
        }
    }

    /// `c * X`
    pub fn scale(self, c: f64) -> Self {
        Self { value: c * self.value, std_error: c.abs() * self.std_error, samples: self.samples }
    }

    /// `X^q` by the delta method.
    pub fn powf(self, q: f64) -> Self {
        let value = self.value.powf(q);
        let std_error = if self.value == 0.0 {
            0.0
        } else {
            (q * value / self.value).abs() * self.std_error
        };
        Self { value, std_error, samples: self.samples }
    }

    /// `exp(X)` by the delta method.
    pub fn exp(self) -> Self {
        let value = self.value.exp();
        Self { value, std_error: value * self.std_error, samples: self.samples }
    }

    /// Whether `|self - other| <= k (SE_self + SE_other) + rel |other|`.
    pub fn agrees_with(&self, other: &QuadratureEstimate, k: f64, rel: f64) -> bool {
        (self.value - other.value).abs() <= k * (self.std_error + other.std_error) + rel * other.value.abs()
    }
}

/// Weighted mean of `values` over `rule`, with standard error from the
/// per-sample variance (pair means for antithetic rules).
pub fn rule_mean(rule: &SphereRule, values: &[f64]) -> QuadratureEstimate {
    let n = values.len();
    debug_assert_eq!(n, rule.len());
    let weighted: Vec<f64> = values.iter().enumerate().map(|(i, v)| rule.weight(i) * v).collect();
    let value = pairwise_sum(&weighted);
    let std_error = if rule.kind() == RuleKind::Antithetic && n >= 4 {
        let pairs: Vec<f64> = values.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect();
        standard_error(&pairs)
    } else {
        standard_error(values)
    };
    QuadratureEstimate { value, std_error, samples: n }
}

/// Plain sample mean with standard error.
pub fn sample_mean(values: &[f64]) -> QuadratureEstimate {
    let n = values.len();
    let value = pairwise_sum(values) / n as f64;
    QuadratureEstimate { value, std_error: standard_error(values), samples: n }
}

fn standard_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = pairwise_sum(values) / n as f64;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (var / n as f64).sqrt()
}
