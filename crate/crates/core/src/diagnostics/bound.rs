//! The chain `|I(u(r))| ≤ A(r)^{1/2} B(r)^{1/2} ≤ 2E` with `I(z) = ∫₀ᶻ |sin w| dw`.

use serde::{Deserialize, Serialize};

use super::energy::densities;
use crate::coefficients::{inverse_i, I};
use crate::error::Result;
use crate::evolution::FieldState;

/// Relative slack allowed for rounding in the exact discrete inequalities.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: f64,
    /// Energy with the quadrature shared by `A` and `B`.
    pub energy: f64,
    pub max_abs_u: f64,
    /// `I⁻¹(2E)`.
    pub implied_bound: f64,
    /// `(Σ w|sin u|u_r)² ≤ (Σ w sin²u/r²)(Σ w u_r²)` at every node.
    pub cauchy_schwarz: bool,
    pub a_le_2e: bool,
    pub b_le_2e: bool,
    /// `max_r |I(u(r))|`, the continuous left end of the chain.
    pub max_i: f64,
    /// `max_r A^{1/2}B^{1/2}`.
    pub max_chain: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.cauchy_schwarz && self.a_le_2e && self.b_le_2e
    }
}

/// Evaluates the chain with cumulative sums over the grid's own quadrature weights.
pub fn pointwise_bound_check(state: &FieldState) -> Result<BoundReport> {
    let d = densities(state)?;
    let grid = state.grid();
    let w = &grid.weights;
    let energy: f64 = (0..w.len()).map(|k| w[k] * (d.kinetic[k] + d.gradient[k] + d.potential[k])).sum();
    let (mut s, mut a, mut b) = (0.0, 0.0, 0.0);
    let mut cs = true;
    let mut max_chain: f64 = 0.0;
    for k in 0..w.len() {
        let r = grid.nodes[k];
        let sin_u = state.f.samples[k].sin();
        s += w[k] * sin_u.abs() * d.u_r[k] / r;
        a += w[k] * 2.0 * d.potential[k];
        b += w[k] * d.u_r[k] * d.u_r[k];
        cs &= s * s <= a * b * (1.0 + ROUNDING);
        max_chain = max_chain.max((a * b).sqrt());
    }
    let limit = 2.0 * energy * (1.0 + ROUNDING);
    Ok(BoundReport {
        t: state.t,
        energy,
        max_abs_u: state.f.max_abs(),
        implied_bound: inverse_i(2.0 * energy),
        cauchy_schwarz: cs,
        a_le_2e: a <= limit,
        b_le_2e: b <= limit,
        max_i: state.f.samples.iter().map(|&u| I(u).abs()).fold(0.0, f64::max),
        max_chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Form;
    use crate::radial_spectral::{Dim, RadialGrid, RadialProfile};
    use std::sync::Arc;

    fn bump(delta: f64) -> FieldState {
        let g = Arc::new(RadialGrid::cell_centered(Dim::R2, 20.0, 1024).unwrap());
        FieldState::new(
            0.0,
            Form::U,
            RadialProfile::from_fn(g.clone(), |r| delta * r * r * (-r * r).exp()),
            RadialProfile::from_fn(g, |r| delta * r * (-r * r).exp()),
        )
        .unwrap()
    }

    #[test]
    fn zero_state() {
        let rep = pointwise_bound_check(&bump(0.0)).unwrap();
        assert_eq!((rep.energy, rep.max_abs_u, rep.implied_bound, rep.max_chain), (0.0, 0.0, 0.0, 0.0));
        assert!(rep.holds());
    }

    #[test]
    fn small_bump_is_bounded() {
        let rep = pointwise_bound_check(&bump(0.2)).unwrap();
        assert!(rep.holds());
        assert!(rep.max_abs_u <= rep.implied_bound);
        assert!(rep.max_i <= rep.max_chain * 1.01);
    }

    #[test]
    fn implied_bound_is_monotone_in_amplitude() {
        let bounds: Vec<f64> =
            [0.01, 0.02, 0.05, 0.1, 0.5, 2.0].iter().map(|&d| pointwise_bound_check(&bump(d)).unwrap().implied_bound).collect();
        assert!(bounds.windows(2).all(|w| w[0] < w[1]), "{bounds:?}");
        assert!(bounds[0] < 0.02);
    }
}
