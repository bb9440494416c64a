//! Report types shared by the diagnostic and probe modules.

use serde::{Deserialize, Serialize};

/// Empirical statistics of an `LHS ≲ RHS` probe over a family of inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub lhs: String,
    pub rhs: String,
    /// One ratio per accepted member, in family order.
    pub ratios: Vec<f64>,
    /// Optional per-member parameter (λ, separation, δ, u …) aligned with `ratios`.
    pub parameters: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// Members with a vanishing right-hand side.
    pub skipped: usize,
    pub regression_constant: Option<f64>,
    /// Least-squares slope of `ln ratio` against `ln parameter`, when meaningful.
    pub loglog_slope: Option<f64>,
}

impl RatioReport {
    pub fn from_samples(lhs: String, rhs: String, ratios: Vec<f64>) -> Self {
        let (min, max, median) = summary(&ratios);
        Self {
            lhs,
            rhs,
            ratios,
            parameters: Vec::new(),
            min,
            max,
            median,
            skipped: 0,
            regression_constant: None,
            loglog_slope: None,
        }
    }

    /// Builds a report from `(parameter, lhs, rhs)` triples, skipping members with `rhs == 0`.
    pub fn from_pairs(lhs: &str, rhs: &str, members: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        let mut ratios = Vec::new();
        let mut params = Vec::new();
        let mut skipped = 0;
        for (p, l, r) in members {
            if r == 0.0 || !r.is_finite() || !l.is_finite() {
                skipped += 1;
                continue;
            }
            ratios.push(l / r);
            params.push(p);
        }
        let mut rep = Self::from_samples(lhs.to_string(), rhs.to_string(), ratios);
        rep.parameters = params;
        rep.skipped = skipped;
        rep
    }

    pub fn with_regression_constant(mut self, c: f64) -> Self {
        self.regression_constant = Some(c);
        self
    }

    pub fn with_loglog_slope(mut self) -> Self {
        if self.parameters.len() == self.ratios.len() && self.ratios.len() >= 2 {
            let xs: Vec<f64> = self.parameters.iter().map(|p| p.ln()).collect();
            let ys: Vec<f64> = self.ratios.iter().map(|r| r.ln()).collect();
            self.loglog_slope = least_squares_slope(&xs, &ys);
        }
        self
    }

    /// `max <= regression_constant`, or `true` when no constant is recorded.
    pub fn within_regression(&self) -> bool {
        self.regression_constant.map_or(true, |c| self.max <= c)
    }
}

/// Observed convergence of a discretization measured at successive resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    /// Step sizes, coarse to fine.
    pub steps: Vec<f64>,
    /// Error measure at each step.
    pub errors: Vec<f64>,
    /// Observed order between consecutive resolutions.
    pub orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn new(label: impl Into<String>, steps: Vec<f64>, errors: Vec<f64>) -> Self {
        let orders = steps.windows(2).zip(errors.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect();
        Self { label: label.into(), steps, errors, orders }
    }

    pub fn final_order(&self) -> Option<f64> {
        self.orders.last().copied()
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().cloned().fold(0.0, f64::max)
    }
}

/// `(min, max, median)`; all `NaN` for an empty slice.
pub fn summary(xs: &[f64]) -> (f64, f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    (sorted[0], sorted[n - 1], median)
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((least_squares_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-14);
        assert!(least_squares_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn summary_stats() {
        assert_eq!(summary(&[3.0, 1.0, 2.0]), (1.0, 3.0, 2.0));
        assert_eq!(summary(&[4.0, 1.0, 2.0, 3.0]), (1.0, 4.0, 2.5));
    }

    #[test]
    fn pairs_skip_degenerate() {
        let r = RatioReport::from_pairs("a", "b", vec![(1.0, 2.0, 1.0), (2.0, 0.0, 0.0), (4.0, 8.0, 2.0)]);
        assert_eq!(r.skipped, 1);
        assert_eq!(r.ratios, vec![2.0, 4.0]);
        let r = r.with_loglog_slope();
        assert!((r.loglog_slope.unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn convergence_orders() {
        let c = ConvergenceReport::new("x", vec![0.1, 0.05, 0.025], vec![1e-2, 2.5e-3, 6.25e-4]);
        assert!((c.final_order().unwrap() - 2.0).abs() < 1e-12);
    }
}
