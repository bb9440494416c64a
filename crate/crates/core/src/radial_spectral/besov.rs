//! Homogeneous Besov norms `Ḃ^s_{p,1}` of radial functions on ℝ² and ℝ⁴.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::grid::{Dim, GridKind, Parity, RadialProfile};
use super::hankel::SpectralGrid;
use super::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::report::RatioReport;

/// Spectral mass allowed outside the resolved bands before a norm is refused.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;

/// Largest Fourier–Bessel grid built implicitly for profiles on other grids.
pub const MAX_SPECTRAL_NODES: usize = 2048;

/// Share of the frequency nodes treated as the unresolved top of the spectrum.
const TOP_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub dim: Dim,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64, dim: Dim) -> Result<Self> {
        if q != 1.0 {
            return Err(Error::Invalid(format!("only q = 1 is supported, got q = {q}")));
        }
        if !(p >= 1.0) {
            return Err(Error::Invalid(format!("p must lie in [1, ∞], got {p}")));
        }
        if !s.is_finite() {
            return Err(Error::Invalid("regularity must be finite".into()));
        }
        Ok(Self { s, p, q, dim })
    }

    /// `Ḃ^s_{2,1}(ℝⁿ)`.
    pub fn l2(s: f64, dim: Dim) -> Self {
        Self { s, p: 2.0, q: 1.0, dim }
    }
}

/// A Besov norm together with its per-band terms and the neglected tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovNorm {
    pub value: f64,
    /// `λ^s ‖S_λ f‖_p` in band order.
    pub terms: Vec<f64>,
    /// Relative `L²` spectral mass outside the resolved bands or at the top of the grid.
    pub tail: f64,
}

/// `(σ_{n−1} ∫ |f|ᵖ r^{n−1} dr)^{1/p}`; `p = ∞` gives the max over nodes.
pub fn lp_norm(f: &RadialProfile, p: f64) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    let vals: Vec<f64> = f.samples.iter().map(|x| x.abs().powf(p)).collect();
    (f.grid.dim.sphere_area() * f.grid.integrate(&vals)).powf(1.0 / p)
}

/// Spectral grid matching `f`, plus `f` on its space nodes.
///
/// Profiles on cell-centered grids are interpolated as even functions onto a
/// Fourier–Bessel grid with the same cutoff and at most [`MAX_SPECTRAL_NODES`] nodes.
pub fn spectral_view(f: &RadialProfile) -> Result<(Arc<SpectralGrid>, RadialProfile)> {
    let g = &f.grid;
    match g.kind {
        GridKind::FourierBessel => {
            let sg = SpectralGrid::shared(g.dim, g.cutoff, g.len())?;
            if !g.same_as(&sg.space) {
                return Err(Error::GridMismatch("Fourier–Bessel grid differs from the cached one".into()));
            }
            Ok((sg.clone(), RadialProfile { grid: sg.space.clone(), samples: f.samples.clone() }))
        }
        GridKind::CellCentered => {
            let sg = SpectralGrid::shared(g.dim, g.cutoff, g.len().min(MAX_SPECTRAL_NODES))?;
            let fb = f.resample(&sg.space, Parity::Even);
            Ok((sg, fb))
        }
        GridKind::Frequency => Err(Error::GridMismatch("expected a space-side profile".into())),
    }
}

/// `S_λ f = 𝓕⁻¹ χ(λ⁻¹ρ) 𝓕 f`, returned on the Fourier–Bessel nodes.
pub fn band_project(f: &RadialProfile, lambda: f64, part: &DyadicPartition) -> Result<RadialProfile> {
    part.index_of(lambda)?;
    let (sg, fb) = spectral_view(f)?;
    let fhat = sg.forward(&fb)?;
    let masked = fhat.map(|rho, x| x * part.weight(lambda, rho));
    sg.inverse(&masked)
}

/// `Σ_λ λ^s ‖S_λ f‖_{Lᵖ}` over the partition's bands.
pub fn besov_norm(f: &RadialProfile, spec: &BesovSpec, part: &DyadicPartition) -> Result<f64> {
    Ok(besov_norm_detailed(f, spec, part, DEFAULT_TAIL_TOLERANCE)?.value)
}

pub fn besov_norm_detailed(
    f: &RadialProfile,
    spec: &BesovSpec,
    part: &DyadicPartition,
    tail_tolerance: f64,
) -> Result<BesovNorm> {
    if spec.q != 1.0 {
        return Err(Error::Invalid("only q = 1 is supported".into()));
    }
    if f.grid.dim != spec.dim {
        return Err(Error::GridMismatch(format!("profile on {:?}, norm on {:?}", f.grid.dim, spec.dim)));
    }
    let (sg, fb) = spectral_view(f)?;
    let fhat = sg.forward(&fb)?;
    spectral_besov(&sg, &fhat, spec, part, tail_tolerance)
}

/// Besov norm from a frequency-side profile.
pub fn spectral_besov(
    sg: &SpectralGrid,
    fhat: &RadialProfile,
    spec: &BesovSpec,
    part: &DyadicPartition,
    tail_tolerance: f64,
) -> Result<BesovNorm> {
    let tail = check_resolved(sg, fhat, part, tail_tolerance)?;
    let bands = band_lp_norms(sg, fhat, spec.p, part);
    let terms: Vec<f64> = part.bands().iter().zip(&bands).map(|(l, b)| l.powf(spec.s) * b).collect();
    let value = terms.iter().sum();
    Ok(BesovNorm { value, terms, tail })
}

/// `‖S_λ f‖_{Lᵖ}` for every band, from the frequency side. Norms with the same `p`
/// and different `s` reuse these.
pub fn band_lp_norms(sg: &SpectralGrid, fhat: &RadialProfile, p: f64, part: &DyadicPartition) -> Vec<f64> {
    let n = sg.dim().n() as i32;
    let norm_const = (2.0 * PI).powi(-n / 2);
    part.bands()
        .par_iter()
        .map(|&lambda| {
            let masked = fhat.map(|rho, x| x * part.weight(lambda, rho));
            if p == 2.0 {
                norm_const * lp_norm(&masked, 2.0)
            } else {
                let samples = sg.inverse_slice(&masked.samples);
                lp_norm(&RadialProfile { grid: sg.space.clone(), samples }, p)
            }
        })
        .collect()
}

/// `Σ_λ λ^s b_λ` for band norms from [`band_lp_norms`].
pub fn combine_bands(bands: &[f64], s: f64, part: &DyadicPartition) -> f64 {
    part.bands().iter().zip(bands).map(|(l, b)| l.powf(s) * b).sum()
}

/// Relative spectral mass of `fhat` that the partition does not resolve.
pub fn check_resolved(sg: &SpectralGrid, fhat: &RadialProfile, part: &DyadicPartition, tail_tolerance: f64) -> Result<f64> {
    let tail = unresolved_mass(sg, fhat, part);
    if tail > tail_tolerance {
        return Err(Error::Resolution(format!(
            "spectral mass {tail:.3e} outside the resolved bands exceeds {tail_tolerance:.1e}"
        )));
    }
    Ok(tail)
}

fn unresolved_mass(sg: &SpectralGrid, fhat: &RadialProfile, part: &DyadicPartition) -> f64 {
    let w = &fhat.grid.weights;
    let total: f64 = fhat.samples.iter().zip(w).map(|(f, w)| w * f * f).sum();
    if total == 0.0 {
        return 0.0;
    }
    let outside: f64 = fhat
        .samples
        .iter()
        .zip(w)
        .zip(&fhat.grid.nodes)
        .map(|((f, w), &rho)| {
            let miss = 1.0 - part.total(rho);
            w * f * f * miss * miss
        })
        .sum();
    (outside / total).sqrt() + sg.spectral_tail(fhat, TOP_FRACTION)
}

/// `‖v₀‖_{Ḃ²∩Ḃ¹} + ‖v₁‖_{Ḃ¹∩Ḃ⁰}` on ℝ⁴ with `p = 2`, intersections taken as sums.
pub fn data_norm_d(v0: &RadialProfile, v1: &RadialProfile, part: &DyadicPartition) -> Result<f64> {
    data_norm_d_with(v0, v1, part, DEFAULT_TAIL_TOLERANCE)
}

pub fn data_norm_d_with(v0: &RadialProfile, v1: &RadialProfile, part: &DyadicPartition, tail_tolerance: f64) -> Result<f64> {
    for f in [v0, v1] {
        if f.grid.dim != Dim::R4 {
            return Err(Error::GridMismatch("data norm needs ℝ⁴ profiles".into()));
        }
    }
    let mut total = 0.0;
    for (f, lo) in [(v0, 1.0), (v1, 0.0)] {
        let (sg, fb) = spectral_view(f)?;
        let fhat = sg.forward(&fb)?;
        check_resolved(&sg, &fhat, part, tail_tolerance)?;
        let bands = band_lp_norms(&sg, &fhat, 2.0, part);
        total += combine_bands(&bands, lo + 1.0, part) + combine_bands(&bands, lo, part);
    }
    Ok(total)
}

/// Ratio `‖u₂/r‖_{Ḃ^s_{p,1}(ℝ⁴)} / ‖r^{2/p−1}u₂‖_{Ḃ^s_{p,1}(ℝ²)}` over a family of
/// `(parameter, u₂)` profiles on ℝ² Fourier–Bessel grids.
///
/// `u₂ ∼ r` at the origin is only Lipschitz as a function on ℝ², so its spectrum
/// decays algebraically; `tail_tolerance` bounds the accepted unresolved mass.
pub fn norm_transition_probe(
    family: &[(f64, RadialProfile)],
    spec: &BesovSpec,
    part: &DyadicPartition,
    tail_tolerance: f64,
) -> Result<RatioReport> {
    let members: Vec<Result<(f64, f64, f64)>> = family
        .par_iter()
        .map(|(param, u2)| {
            if u2.grid.dim != Dim::R2 || u2.grid.kind != GridKind::FourierBessel {
                return Err(Error::GridMismatch("transition probe expects ℝ² Fourier–Bessel profiles".into()));
            }
            let g = &u2.grid;
            let sg4 = SpectralGrid::shared(Dim::R4, g.cutoff, g.len())?;
            let raw = u2.interpolate(Parity::Odd, &sg4.space.nodes);
            let v4 = RadialProfile {
                grid: sg4.space.clone(),
                samples: raw.iter().zip(&sg4.space.nodes).map(|(u, r)| u / r).collect(),
            };
            let weight = 2.0 / spec.p - 1.0;
            let w2 = u2.map(|r, u| r.powf(weight) * u);
            let lhs = besov_norm_detailed(&v4, &BesovSpec { dim: Dim::R4, ..*spec }, part, tail_tolerance)?;
            let rhs = besov_norm_detailed(&w2, &BesovSpec { dim: Dim::R2, ..*spec }, part, tail_tolerance)?;
            Ok((*param, lhs.value, rhs.value))
        })
        .collect();
    let members = members.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RatioReport::from_pairs("||u/r||_B(R4)", "||r^(2/p-1) u||_B(R2)", members))
}
