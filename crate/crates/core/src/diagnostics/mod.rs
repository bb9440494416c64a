//! Identities and bounds checked on states, trajectories and analytic fields.

mod bound;
mod consistency;
mod energy;
mod nullform;
mod probes;
mod scaling;
mod scattering;

pub use bound::{pointwise_bound_check, BoundReport};
pub use consistency::{consistency_fields, rhs_u_convergence, uv_consistency, AXIS_EXCLUSION};
pub use energy::{energy, EnergyReport};
pub use nullform::{default_radii, manufactured_fields, nullform_defect, nullform_residual};
pub use probes::{
    bump_family, cubic_slope, default_nonlin_deltas, inequality_probe, nonlin_family, nonlin_samples, probe_family, probe_grid,
    rad_sob_family, rad_sob_grid, y_norm, Bump, NonlinSample, ProbeFamily, ProbeMember, ProbeName, PROBE_MEMBERS, PROBE_SEED,
};
pub use scaling::{
    default_points, meq_acceleration, scaling_covariance_check, smeq_operator, AnalyticField, GaussField, Jet, RationalField,
    SeparableField,
};
pub use scattering::{scattering_fit, ScatteringReport, Verdict, SCATTERING_TAIL_TOLERANCE, VERDICT_SLOPE};

use crate::error::{Error, Result};
use crate::radial_spectral::{GridKind, Parity, RadialProfile, SpectralGrid};

/// `∂_r f` at the nodes.
///
/// Cell-centered grids use sixth-order central differences, reflecting with
/// `parity` across the axis and oddly across the Dirichlet node at `R`.
/// Fourier–Bessel grids differentiate the series.
pub fn radial_derivative(f: &RadialProfile, parity: Parity) -> Result<RadialProfile> {
    let g = &f.grid;
    match g.kind {
        GridKind::CellCentered => {
            let h = g.spacing().expect("cell-centered");
            let n = f.len() as isize;
            let x = &f.samples;
            let at = |i: isize| -> f64 {
                if i < 0 {
                    parity.sign() * x[(-i - 1) as usize]
                } else if i < n {
                    x[i as usize]
                } else if i == n {
                    0.0
                } else if 2 * n - i >= 0 {
                    -x[(2 * n - i) as usize]
                } else {
                    0.0
                }
            };
            const C: [f64; 3] = [45.0, -9.0, 1.0];
            let samples =
                (0..n).map(|i| (1..=3).map(|k| C[k as usize - 1] * (at(i + k) - at(i - k))).sum::<f64>() / (60.0 * h)).collect();
            Ok(RadialProfile { grid: g.clone(), samples })
        }
        GridKind::FourierBessel => {
            let sg = SpectralGrid::shared(g.dim, g.cutoff, g.len())?;
            sg.derivative(f)
        }
        GridKind::Frequency => Err(Error::GridMismatch("expected a space-side profile".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::{Dim, RadialGrid};
    use std::sync::Arc;

    #[test]
    fn sixth_order_derivative_with_reflections() {
        let err = |n: usize| {
            let g = Arc::new(RadialGrid::cell_centered(Dim::R2, 8.0, n).unwrap());
            let f = RadialProfile::from_fn(g.clone(), |r| r * (-r * r).exp());
            let d = radial_derivative(&f, Parity::Odd).unwrap();
            d.samples.iter().zip(&g.nodes).map(|(x, r)| (x - (1.0 - 2.0 * r * r) * (-r * r).exp()).abs()).fold(0.0, f64::max)
        };
        let order = (err(50) / err(100)).log2();
        assert!(order > 5.5, "{order}");
    }
}
