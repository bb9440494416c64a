//! Radial Fourier analysis on ℝ² and ℝ⁴.

pub mod besov;
pub mod bessel;
pub mod grid;
pub mod hankel;
pub mod partition;

pub use besov::{
    band_lp_norms, band_project, besov_norm, besov_norm_detailed, check_resolved, combine_bands, data_norm_d, data_norm_d_with,
    lp_norm, norm_transition_probe, spectral_besov, spectral_view, BesovNorm, BesovSpec, DEFAULT_TAIL_TOLERANCE,
    MAX_SPECTRAL_NODES,
};
pub use bessel::{bessel_j, bessel_zeros};
pub use grid::{Dim, GridKind, Parity, RadialGrid, RadialProfile};
pub use hankel::SpectralGrid;
pub use partition::{chi, low_pass, smooth_step, DyadicPartition};
