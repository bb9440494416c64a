//! Dyadic Littlewood–Paley partition of unity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn mollifier(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn smooth_step(x: f64) -> f64 {
    let a = mollifier(x);
    let b = mollifier(1.0 - x);
    if a + b == 0.0 {
        return if x > 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Generator `χ(s) = S(log₂s + 1) − S(log₂s)`, supported in `(1/2, 2)`.
///
/// Shifts by powers of two telescope, so `Σ_k χ(2^{−k}s) = 1` exactly for `s > 0`.
pub fn chi(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let x = s.log2();
    smooth_step(x + 1.0) - smooth_step(x)
}

/// Bank of cutoffs `χ(λ⁻¹·)` for `λ = 2^k`, `k_min ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub k_min: i32,
    pub k_max: i32,
}

impl Default for DyadicPartition {
    fn default() -> Self {
        Self { k_min: -8, k_max: 8 }
    }
}

impl DyadicPartition {
    pub fn new(k_min: i32, k_max: i32) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::Invalid(format!("empty band range 2^{k_min}..2^{k_max}")));
        }
        Ok(Self { k_min, k_max })
    }

    pub fn lambda_min(&self) -> f64 {
        2f64.powi(self.k_min)
    }

    pub fn lambda_max(&self) -> f64 {
        2f64.powi(self.k_max)
    }

    pub fn bands(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).map(|k| 2f64.powi(k)).collect()
    }

    /// Band index of a dyadic `λ`, or a band error.
    pub fn index_of(&self, lambda: f64) -> Result<usize> {
        let k = lambda.log2().round();
        let exact = lambda > 0.0 && (2f64.powi(k as i32) - lambda).abs() <= 1e-12 * lambda;
        if !exact || (k as i32) < self.k_min || (k as i32) > self.k_max {
            return Err(Error::Band { lambda, min: self.lambda_min(), max: self.lambda_max() });
        }
        Ok((k as i32 - self.k_min) as usize)
    }

    /// `χ(s/λ)`.
    pub fn weight(&self, lambda: f64, s: f64) -> f64 {
        chi(s / lambda)
    }

    /// Sum of all bank weights at `s`; equals 1 on `[λ_min, λ_max]`.
    pub fn total(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let x = s.log2();
        smooth_step(x - self.k_min as f64 + 1.0) - smooth_step(x - self.k_max as f64)
    }

    /// Resolved range on which the bank sums to one.
    pub fn resolved_range(&self) -> (f64, f64) {
        (self.lambda_min(), self.lambda_max())
    }
}

/// `Σ_{j≥0} χ(s/(2^{−j}μ)) = 1 − S(log₂(s/μ))`: the one-sided low-pass at `μ`, supported on `s ≤ 2μ`.
pub fn low_pass(mu: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    1.0 - smooth_step((s / mu).log2())
}
