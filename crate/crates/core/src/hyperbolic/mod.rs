//! Frequency-localized hyperbolic norms on radial spacetime fields over ℝ⁴⁺¹.

mod field;
mod norms;
mod packets;
mod probes;

pub use field::{st_transform, st_transform_with, SpacetimeField, SpacetimeSpectrum, HYPERBOLIC_TAIL_TOLERANCE, TAPER_FRACTION};
pub use norms::{
    a_band, b_band, b_tilde, box_f_norm_surrogate, box_op, composite_spectrum, composite_x_norm, composite_x_norm_with,
    cone_radius, f_norm_surrogate, modulation, x_half_norm, x_norm, y_norm, BandNorms, SurrogateNormReport, FLOOR_OCTAVES,
};
pub use packets::{fft_length, rng, FreeWave, Packet, SpacetimeGrid, MIN_STEPS, PACKET_TAPER_LIMIT};
pub use probes::{
    bilinear_probe, check_admissible, class_max_slope, free_wave_samples, mixed_norm, rv_probe, sin_composition_probe,
    sin_family, strichartz_family, strichartz_grid, strichartz_probe, trilinear_family, trilinear_probe, trilinear_ratio,
    weighted_mixed_norm, FreeWaveSample, SinCompositionReport, TrilinearTriple, BILINEAR_TAIL_TOLERANCE, STRICHARTZ_OCTAVES,
    STRICHARTZ_WINDOW, TRILINEAR_CLASSES, TRILINEAR_PER_CLASS, TRILINEAR_REGRESSION_CONSTANT, TRILINEAR_SEED,
};
