use serde::{Deserialize, Serialize};

use super::radial_derivative;
use crate::error::{Error, Result};
use crate::evolution::{FieldState, Form};
use crate::radial_spectral::{GridKind, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    /// `∫ Φ u_t²/2 r dr`.
    pub kinetic: f64,
    /// `∫ Φ u_r²/2 r dr`.
    pub gradient: f64,
    /// `∫ sin²u/(2r²) r dr`.
    pub potential: f64,
}

/// Pointwise energy densities `(Φu_t²/2, Φu_r²/2, sin²u/(2r²))` and `u_r`.
pub(crate) struct Densities {
    pub kinetic: Vec<f64>,
    pub gradient: Vec<f64>,
    pub potential: Vec<f64>,
    pub u_r: Vec<f64>,
}

pub(crate) fn densities(state: &FieldState) -> Result<Densities> {
    if state.form != Form::U {
        return Err(Error::Invalid("energy needs a U-form state".into()));
    }
    let u_r = radial_derivative(&state.f, Parity::Odd)?.samples;
    let mut d = Densities { kinetic: vec![], gradient: vec![], potential: vec![], u_r };
    for (i, &r) in state.f.nodes().iter().enumerate() {
        let u = state.f.samples[i];
        let s = u.sin() / r;
        let phi = 1.0 + s * s;
        d.kinetic.push(phi * state.f_t.samples[i].powi(2) / 2.0);
        d.gradient.push(phi * d.u_r[i].powi(2) / 2.0);
        d.potential.push(s * s / 2.0);
    }
    Ok(d)
}

/// `∫₀^R g r dr` for an even density `g`.
///
/// Cell-centered grids use the midpoint rule with the Euler–Maclaurin end
/// corrections at the axis, `−h²g(0)/24 + 7h⁴g''(0)/1920`, where `g(0)` and
/// `g''(0)` come from an even quadratic fit through the first three nodes.
/// Fourier–Bessel grids use their own weights.
fn integrate_even(state: &FieldState, g: &[f64]) -> f64 {
    let grid = state.grid();
    if grid.kind != GridKind::CellCentered {
        return grid.integrate(g);
    }
    let h = grid.spacing().expect("cell-centered");
    let mid = grid.integrate(g);
    let x: Vec<f64> = grid.nodes[..3].iter().map(|r| r * r).collect();
    // Lagrange in x = r²: value at 0 and the coefficient of x
    let (mut g0, mut b) = (0.0, 0.0);
    for k in 0..3 {
        let (p, q) = ((k + 1) % 3, (k + 2) % 3);
        let denom = (x[k] - x[p]) * (x[k] - x[q]);
        g0 += g[k] * x[p] * x[q] / denom;
        b += g[k] * -(x[p] + x[q]) / denom;
    }
    mid - h * h * g0 / 24.0 + 7.0 * h.powi(4) * (2.0 * b) / 1920.0
}

/// `E = ∫ [Φ(u_t² + u_r²)/2 + sin²u/(2r²)] r dr` by high-order quadrature.
pub fn energy(state: &FieldState) -> Result<EnergyReport> {
    let d = densities(state)?;
    let part = |g: &[f64]| integrate_even(state, g).max(0.0);
    let (kinetic, gradient, potential) = (part(&d.kinetic), part(&d.gradient), part(&d.potential));
    Ok(EnergyReport { t: state.t, energy: kinetic + gradient + potential, kinetic, gradient, potential })
}
