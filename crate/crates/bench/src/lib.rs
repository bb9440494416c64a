//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use faddeev_core::evolution::{initial_data, DataFamily, DataParams, FieldState, Form, Scheme, SolverConfig};
use faddeev_core::hyperbolic::{Packet, SpacetimeField, SpacetimeGrid};
use faddeev_core::radial_spectral::{Dim, DyadicPartition, RadialProfile, SpectralGrid};

/// Gaussian on an `n`-node ℝ⁴ Fourier–Bessel grid of radius 40.
pub fn gaussian_profile(n: usize) -> (Arc<SpectralGrid>, RadialProfile) {
    let sg = SpectralGrid::shared(Dim::R4, 40.0, n).expect("grid");
    let f = RadialProfile::from_fn(sg.space.clone(), |r| (-r * r).exp());
    (sg, f)
}

/// `δ = 0.05` Gaussian bump in the given form on `n` nodes over `R = 40`, with a solver running `steps` steps.
pub fn bump_state(n: usize, form: Form, steps: usize) -> (FieldState, SolverConfig) {
    let base = SolverConfig::new(n, 40.0, 1.0, 0.5, Scheme::Rk4).expect("solver");
    let cfg = SolverConfig::new(n, 40.0, steps as f64 * base.dt, 0.5, Scheme::Rk4).expect("solver").with_stride(steps.max(1));
    let grid = cfg.grid(form).expect("grid");
    let d = initial_data(DataFamily::GaussBump, 0.05, &DataParams::default(), &grid, &DyadicPartition::default()).expect("data");
    let state = match form {
        Form::U => d.u,
        Form::V => d.v,
    };
    (state, cfg)
}

/// A resolved cone packet at frequency 1.
pub fn packet_field() -> SpacetimeField {
    let st = SpacetimeGrid::for_bandwidth(16.0, 16.0, 1.1 * 2.0 * 2.0).expect("grid");
    Packet::gaussian(1.0, 0.5).field(&st).expect("packet")
}
