//! Nonlinear coefficients of the semilinear `v`-equation.
//!
//! The four coefficients factor as `h_i(r, u) = h̃_i(u) / Φ(r, u)` with
//! `Φ(r, u) = 1 + sin²u / r²`. Each `h̃_i` has a removable singularity at
//! `u = 0`, so below [`SeriesSwitch::u_threshold`] the truncated Maclaurin
//! series is used instead of the closed form.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::report::RatioReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientId {
    H1,
    H2,
    H3,
    H4,
}

impl CoefficientId {
    pub const ALL: [CoefficientId; 4] = [Self::H1, Self::H2, Self::H3, Self::H4];

    /// Exponent `k` of the envelope `⟨u⟩^{-k}` bounding `∂ᵘʲ h̃`.
    pub fn decay_exponent(self, j: usize) -> i32 {
        match self {
            Self::H1 => 2,
            Self::H2 if j == 0 => 2,
            Self::H2 => 3,
            Self::H3 => 3,
            Self::H4 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::H1 => "h1",
            Self::H2 => "h2",
            Self::H3 => "h3",
            Self::H4 => "h4",
        }
    }
}

/// Crossover between series and closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSwitch {
    pub u_threshold: f64,
    /// Number of series terms kept.
    pub series_order: usize,
}

impl Default for SeriesSwitch {
    fn default() -> Self {
        Self { u_threshold: 0.5, series_order: 12 }
    }
}

impl SeriesSwitch {
    pub fn new(u_threshold: f64, series_order: usize) -> Result<Self> {
        if !(u_threshold > 0.0) || !u_threshold.is_finite() {
            return Err(Error::Invalid(format!("series threshold must be positive, got {u_threshold}")));
        }
        if series_order < 8 {
            return Err(Error::Invalid(format!("series order must be >= 8, got {series_order}")));
        }
        Ok(Self { u_threshold, series_order })
    }

    fn use_series(&self, u: f64) -> bool {
        u.abs() < self.u_threshold
    }

    /// `sin u / u`.
    pub fn sinc(&self, u: f64) -> f64 {
        if self.use_series(u) {
            // Σ (-1)^k u^{2k} / (2k+1)!
            even_series(u * u, self.series_order, |k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / factorial(2 * k + 1)
            })
        } else {
            u.sin() / u
        }
    }

    /// `(sin u − u cos u) / u³`.
    pub fn sin_minus_ucos_over_cube(&self, u: f64) -> f64 {
        if self.use_series(u) {
            // Σ_{m≥0} (-1)^m 2(m+1) u^{2m} / (2m+3)!
            even_series(u * u, self.series_order, |m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * 2.0 * (m as f64 + 1.0) / factorial(2 * m + 3)
            })
        } else {
            (u.sin() - u * u.cos()) / (u * u * u)
        }
    }

    fn h2_tilde(&self, u: f64) -> f64 {
        if self.use_series(u) {
            // (sin 2u − 2u)/(2u³) = Σ_{m≥0} (-1)^{m+1} 2^{2m+2} u^{2m} / (2m+3)!
            even_series(u * u, self.series_order, |m| {
                let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
                sign * 4f64.powi(m as i32 + 1) / factorial(2 * m + 3)
            })
        } else {
            ((2.0 * u).sin() - 2.0 * u) / (2.0 * u * u * u)
        }
    }

    /// The `r`-independent factor `h̃_i(u) = h_i(r,u) Φ(r,u)`.
    pub fn h_tilde(&self, id: CoefficientId, u: f64) -> f64 {
        match id {
            CoefficientId::H1 => 2.0 * u * self.sinc(u) * self.sin_minus_ucos_over_cube(u),
            CoefficientId::H2 => self.h2_tilde(u),
            CoefficientId::H3 => self.sinc(u) * self.sin_minus_ucos_over_cube(u),
            CoefficientId::H4 => self.sinc(2.0 * u),
        }
    }

    /// `Φ` for callers holding `v = u / r`: `1 + v² (sin u / u)²`.
    pub fn phi_stable(&self, v: f64, u: f64) -> f64 {
        let s = self.sinc(u);
        1.0 + v * v * s * s
    }

    pub fn h_stable(&self, id: CoefficientId, v: f64, u: f64) -> f64 {
        self.h_tilde(id, u) / self.phi_stable(v, u)
    }
}

static FACTORIALS: std::sync::LazyLock<[f64; 171]> = std::sync::LazyLock::new(|| {
    let mut t = [1.0; 171];
    for k in 1..171 {
        t[k] = t[k - 1] * k as f64;
    }
    t
});

fn factorial(n: usize) -> f64 {
    FACTORIALS.get(n).copied().unwrap_or(f64::INFINITY)
}

/// Horner evaluation of `Σ_{k<terms} c(k) x^k`.
fn even_series(x: f64, terms: usize, coeff: impl Fn(usize) -> f64) -> f64 {
    (0..terms).rev().fold(0.0, |acc, k| acc * x + coeff(k))
}

const DEFAULT_SWITCH: SeriesSwitch = SeriesSwitch { u_threshold: 0.5, series_order: 12 };

/// `Φ(r, u) = 1 + sin²u / r²`.
pub fn phi(r: f64, u: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("phi requires r > 0, got {r}")));
    }
    let s = u.sin();
    Ok(1.0 + s * s / (r * r))
}

pub fn phi_stable(v: f64, u: f64) -> f64 {
    DEFAULT_SWITCH.phi_stable(v, u)
}

pub fn h_tilde(id: CoefficientId, u: f64) -> f64 {
    DEFAULT_SWITCH.h_tilde(id, u)
}

pub fn h(id: CoefficientId, r: f64, u: f64) -> Result<f64> {
    Ok(h_tilde(id, u) / phi(r, u)?)
}

pub fn h_stable(id: CoefficientId, v: f64, u: f64) -> f64 {
    DEFAULT_SWITCH.h_stable(id, v, u)
}

/// `I(z) = ∫₀ᶻ |sin w| dw`, in closed form.
#[allow(non_snake_case)]
pub fn I(z: f64) -> f64 {
    if z < 0.0 {
        return -I(-z);
    }
    let k = (z / PI).floor();
    2.0 * k + 1.0 - (z - k * PI).cos()
}

/// Inverse of [`I`]; `I` is strictly increasing so this is well defined on ℝ.
pub fn inverse_i(y: f64) -> f64 {
    if y < 0.0 {
        return -inverse_i(-y);
    }
    let k = (y / 2.0).floor();
    let rem = (y - 2.0 * k).clamp(0.0, 2.0);
    k * PI + (1.0 - rem).clamp(-1.0, 1.0).acos()
}

/// Steps used for the `j`-th derivative; the Richardson pair uses `h` and `h/2`.
fn derivative_step(j: usize) -> f64 {
    match j {
        0 => 0.0,
        1 => 1e-3,
        2 => 4e-3,
        _ => 2e-2,
    }
}

fn central_difference(f: &impl Fn(f64) -> f64, u: f64, j: usize, h: f64) -> f64 {
    match j {
        0 => f(u),
        1 => (f(u + h) - f(u - h)) / (2.0 * h),
        2 => (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h),
        3 => (f(u + 2.0 * h) - 2.0 * f(u + h) + 2.0 * f(u - h) - f(u - 2.0 * h)) / (2.0 * h * h * h),
        _ => unreachable!("derivative order checked by caller"),
    }
}

/// `j`-th derivative of `f` at `u` by second-order central differences with one
/// Richardson step. Returns the extrapolated value and the size of the correction.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, u: f64, j: usize) -> (f64, f64) {
    assert!(j <= 3, "derivative order {j} not supported");
    if j == 0 {
        return (f(u), 0.0);
    }
    let h = derivative_step(j);
    let coarse = central_difference(&f, u, j, h);
    let fine = central_difference(&f, u, j, h / 2.0);
    ((4.0 * fine - coarse) / 3.0, (fine - coarse).abs() / 3.0)
}

/// Sample set for decay checks: fine near the origin, coarser in the tail.
/// `density` multiplies the number of samples.
pub fn decay_grid(u_max: f64, density: usize) -> Vec<f64> {
    let density = density.max(1) as f64;
    let near = 20f64.min(u_max);
    let fine = 1e-3 / density;
    let coarse = 2e-2 / density;
    let mut grid = Vec::new();
    let n_near = (near / fine).round() as usize;
    grid.extend((0..=n_near).map(|i| i as f64 * fine));
    if u_max > near {
        let n_far = ((u_max - near) / coarse).ceil() as usize;
        grid.extend((1..=n_far).map(|i| (near + i as f64 * coarse).min(u_max)));
    }
    grid
}

/// Recorded `sup_{0 ≤ u ≤ 10⁴} |∂ᵘʲ h̃_i(u)| ⟨u⟩^{k}` on [`decay_grid`]`(1e4, 1)`, rows `h₁ … h₄`,
/// columns `j = 0 … 3`. Doubling the sample density moves them by less than 1e-6 relative.
pub const DECAY_ENVELOPES: [[f64; 4]; 4] = [
    [1.986945, 2.920034, 4.695576, 8.171160],
    [1.486528, 3.728871, 4.571532, 6.312185],
    [1.122906, 1.840251, 2.945205, 4.800169],
    [1.0, 1.332953, 2.230613, 4.040631],
];

/// The grid used for [`DECAY_ENVELOPES`].
pub const DECAY_RANGE: f64 = 1e4;

/// Sup over `u_grid` of `|∂ᵘʲ h̃_id(u)| ⟨u⟩^k`.
pub fn decay_margin(id: CoefficientId, j: usize, u_grid: &[f64]) -> Result<RatioReport> {
    if j > 3 {
        return Err(Error::Invalid(format!("derivative order {j} > 3 not supported")));
    }
    let k = id.decay_exponent(j);
    let f = |u: f64| h_tilde(id, u);
    let samples: Vec<f64> = u_grid
        .iter()
        .map(|&u| {
            let (d, _) = richardson_derivative(f, u, j);
            d.abs() * (1.0 + u * u).powf(k as f64 / 2.0)
        })
        .collect();
    let mut report = RatioReport::from_samples(format!("|d^{j} {}~(u)| <u>^{k}", id.label()), "1".to_string(), samples);
    report.parameters = u_grid.to_vec();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(phi(1.0, 0.0).unwrap(), 1.0);
        assert!((phi(1.0, PI / 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(phi(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(phi(-1.0, 1.0), Err(Error::Domain(_))));
        assert!((phi_stable(3.0, 1e-9) - 10.0).abs() < 1e-12 * 10.0);
    }

    #[test]
    fn limits_at_origin() {
        assert!((h_tilde(CoefficientId::H4, 0.0) - 1.0).abs() < 1e-15);
        assert!((h_tilde(CoefficientId::H2, 0.0) + 2.0 / 3.0).abs() < 1e-15);
        assert!((h_tilde(CoefficientId::H3, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(h_tilde(CoefficientId::H1, 0.0), 0.0);
        let eps = 1e-7;
        let slope = h_tilde(CoefficientId::H1, eps) / eps;
        assert!((slope - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn h_direct_value() {
        // Φ(1, π/2) = 2 and h̃₂(π/2) = (0 − π) / (2 (π/2)³).
        let v = h(CoefficientId::H2, 1.0, PI / 2.0).unwrap();
        assert!((v + 2.0 / (PI * PI)).abs() < 1e-14);
        for r in [0.1, 1.0, 7.5] {
            assert!((h(CoefficientId::H4, r, 0.0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn stable_and_direct_paths_agree() {
        for &r in &[0.3, 1.0, 4.0] {
            for &u in &[-2.0, -0.7, -0.1, 1e-6, 0.2, 0.6, 3.0] {
                let v = u / r;
                for id in CoefficientId::ALL {
                    let a = h(id, r, u).unwrap();
                    let b = h_stable(id, v, u);
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{id:?} r={r} u={u}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn series_matches_closed_form_near_threshold() {
        let sw = SeriesSwitch::default();
        let closed = SeriesSwitch { u_threshold: 1e-300, series_order: 12 };
        for i in 0..=200 {
            let u = sw.u_threshold * (0.5 + 1.5 * i as f64 / 200.0);
            for id in CoefficientId::ALL {
                let a = sw.h_tilde(id, u);
                let b = closed.h_tilde(id, u);
                assert!((a - b).abs() <= 1e-12 * b.abs(), "{id:?} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn switch_validation() {
        assert!(SeriesSwitch::new(0.0, 10).is_err());
        assert!(SeriesSwitch::new(0.5, 7).is_err());
        assert!(SeriesSwitch::new(0.25, 8).is_ok());
    }

    #[test]
    fn i_closed_form() {
        assert_eq!(I(0.0), 0.0);
        assert!((I(PI) - 2.0).abs() < 1e-15);
        assert!((I(2.0 * PI) - 4.0).abs() < 1e-14);
        assert!((I(PI / 2.0) - 1.0).abs() < 1e-15);
        assert!((I(-PI / 2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn i_matches_quadrature() {
        // Composite Simpson on |sin|, split at multiples of π where it has kinks.
        let simpson = |a: f64, b: f64| {
            let n = 2000;
            let h = (b - a) / n as f64;
            let mut s = (a.sin().abs()) + (b.sin().abs());
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * (a + i as f64 * h).sin().abs();
            }
            s * h / 3.0
        };
        for &z in &[0.3, 2.0, 4.5, 9.9] {
            let mut acc = 0.0;
            let mut a = 0.0;
            while a < z {
                let b = ((a / PI).floor() + 1.0) * PI;
                let b = b.min(z);
                acc += simpson(a, b);
                a = b;
            }
            assert!((I(z) - acc).abs() < 1e-12, "z={z}");
        }
    }

    #[test]
    fn inverse_i_roundtrip() {
        for i in 0..400 {
            let z = -20.0 + i as f64 * 0.1;
            assert!((inverse_i(I(z)) - z).abs() < 1e-7, "z={z}");
        }
    }

    #[test]
    fn richardson_matches_analytic_derivative() {
        // d/du [sin 2u / (2u)] = cos 2u / u − sin 2u / (2u²)
        for &u in &[0.7f64, 1.3, 5.0, 40.0] {
            let exact = (2.0 * u).cos() / u - (2.0 * u).sin() / (2.0 * u * u);
            let (d, _) = richardson_derivative(|x| h_tilde(CoefficientId::H4, x), u, 1);
            assert!((d - exact).abs() < 1e-9, "u={u}: {d} vs {exact}");
        }
        // third derivative of sin: −cos
        for &u in &[0.1, 2.0, 10.0] {
            let (d, _) = richardson_derivative(f64::sin, u, 3);
            assert!((d + u.cos()).abs() < 1e-7);
        }
    }

    #[test]
    fn decay_margin_small_grids() {
        let r = decay_margin(CoefficientId::H4, 0, &[0.0]).unwrap();
        assert!((r.max - 1.0).abs() < 1e-15);
        let r = decay_margin(CoefficientId::H3, 0, &[0.0]).unwrap();
        assert!((r.max - 1.0 / 3.0).abs() < 1e-15);
        assert!(decay_margin(CoefficientId::H1, 4, &[0.0]).is_err());
    }

    #[test]
    fn decay_grid_shape() {
        let g = decay_grid(100.0, 1);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 100.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(decay_grid(100.0, 2).len() > 2 * g.len() - 10);
    }
}
