use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::state::{companion_grid, FieldState, Form};
use crate::error::{Error, Result};
use crate::radial_spectral::{data_norm_d, Dim, DyadicPartition, RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFamily {
    /// `v₀ = δ e^{−r²/w²}`, i.e. `u₀ = δ r e^{−r²/w²}`.
    GaussBump,
    /// `v₀ = δ (1 − r²/w²)⁶` on `r < w`.
    PolyBump,
    /// `v₀ = δ (e^{−(r−c)²/w²} + e^{−(r+c)²/w²})`, a shell at radius `c`.
    TwoBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Velocity {
    Zero,
    /// `v₁ = −(r/⟨r⟩)(v₀′ + 3v₀/(2r))`, the outgoing condition `v_t = −v_r − 3v/(2r)` tapered at the axis.
    Outgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataParams {
    pub width: f64,
    pub center: f64,
    pub velocity: Velocity,
    /// Dilation `u ↦ λu(t/λ, r/λ)` applied to the profile, i.e. `v₀ ↦ v₀(·/λ)`, `v₁ ↦ λ⁻¹v₁(·/λ)`.
    pub scale: f64,
}

impl Default for DataParams {
    fn default() -> Self {
        Self { width: 1.0, center: 3.0, velocity: Velocity::Zero, scale: 1.0 }
    }
}

impl DataFamily {
    /// `(v₀(r), v₀′(r))` for unit amplitude.
    pub fn profile(self, p: &DataParams, r: f64) -> (f64, f64) {
        let w2 = p.width * p.width;
        match self {
            DataFamily::GaussBump => {
                let g = (-r * r / w2).exp();
                (g, -2.0 * r / w2 * g)
            }
            DataFamily::PolyBump => {
                if r >= p.width {
                    return (0.0, 0.0);
                }
                let s = 1.0 - r * r / w2;
                (s.powi(6), -12.0 * r / w2 * s.powi(5))
            }
            DataFamily::TwoBump => {
                let (a, b) = (r - p.center, r + p.center);
                let (ga, gb) = ((-a * a / w2).exp(), (-b * b / w2).exp());
                (ga + gb, -2.0 / w2 * (a * ga + b * gb))
            }
        }
    }

    /// Radius beyond which the unit-amplitude profile is below `1e-16` (or exactly zero).
    pub fn support(self, p: &DataParams) -> f64 {
        let s = match self {
            DataFamily::GaussBump => 6.1 * p.width,
            DataFamily::PolyBump => p.width,
            DataFamily::TwoBump => p.center + 6.1 * p.width,
        };
        s * p.scale
    }
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub u: FieldState,
    pub v: FieldState,
    /// `‖(v₀, v₁)‖_D`.
    pub data_norm: f64,
}

/// `v₀, v₁` sampled at `r` (amplitude `δ`).
pub fn sample(family: DataFamily, delta: f64, params: &DataParams, r: f64) -> (f64, f64) {
    let l = params.scale;
    let x = r / l;
    let (g, dg) = family.profile(params, x);
    let v0 = delta * g;
    let v1 = match params.velocity {
        Velocity::Zero => 0.0,
        Velocity::Outgoing => {
            let jac = (1.0 + x * x).sqrt();
            -delta * (dg * x / jac + 1.5 * g / jac) / l
        }
    };
    (v0, v1)
}

/// Initial state on the cell-centered grid `grid` (either dimension), in both forms.
pub fn initial_data(
    family: DataFamily,
    delta: f64,
    params: &DataParams,
    grid: &Arc<RadialGrid>,
    part: &DyadicPartition,
) -> Result<InitialData> {
    if !(delta >= 0.0) || !(params.width > 0.0) || !(params.scale > 0.0) {
        return Err(Error::Invalid(format!("bad data parameters δ={delta}, {params:?}")));
    }
    let g4 = companion_grid(grid, Dim::R4)?;
    let pairs: Vec<(f64, f64)> = g4.nodes.iter().map(|&r| sample(family, delta, params, r)).collect();
    let v0 = RadialProfile::new(g4.clone(), pairs.iter().map(|p| p.0).collect())?;
    let v1 = RadialProfile::new(g4.clone(), pairs.iter().map(|p| p.1).collect())?;
    let v = FieldState::new(0.0, Form::V, v0, v1)?;
    let u = v.convert(Form::U)?;
    let data_norm = if delta == 0.0 { 0.0 } else { data_norm_d(&v.f, &v.f_t, part)? };
    Ok(InitialData { u, v, data_norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::cell_centered(Dim::R2, 40.0, 2048).unwrap())
    }

    #[test]
    fn zero_amplitude() {
        let d = initial_data(DataFamily::GaussBump, 0.0, &DataParams::default(), &grid(), &DyadicPartition::default()).unwrap();
        assert_eq!(d.data_norm, 0.0);
        assert_eq!(d.u.f.max_abs(), 0.0);
    }

    #[test]
    fn u_is_r_times_v() {
        let d = initial_data(DataFamily::GaussBump, 0.1, &DataParams::default(), &grid(), &DyadicPartition::default()).unwrap();
        for (r, u) in d.u.f.nodes().iter().zip(&d.u.f.samples) {
            assert!((u - 0.1 * r * (-r * r).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_profiles() {
        let p = DataParams { width: 1.3, center: 2.5, ..Default::default() };
        for fam in [DataFamily::GaussBump, DataFamily::PolyBump, DataFamily::TwoBump] {
            for &r in &[0.2, 0.7, 1.1, 2.9] {
                let h = 1e-6;
                let fd = (fam.profile(&p, r + h).0 - fam.profile(&p, r - h).0) / (2.0 * h);
                assert!((fd - fam.profile(&p, r).1).abs() < 1e-7, "{fam:?} r={r}");
            }
        }
    }

    #[test]
    fn b2_part_is_scale_invariant() {
        // the cutoff truncates low frequencies; the gap closes like the cutoff grows
        use crate::radial_spectral::{besov_norm, BesovSpec};
        let part = DyadicPartition::default();
        let norms: Vec<f64> = [1.0, 2.0]
            .iter()
            .map(|&l| {
                let p = DataParams { scale: l, ..Default::default() };
                let g = Arc::new(RadialGrid::cell_centered(Dim::R2, 160.0, 2048).unwrap());
                let d = initial_data(DataFamily::GaussBump, 0.1, &p, &g, &part).unwrap();
                besov_norm(&d.v.f, &BesovSpec::l2(2.0, Dim::R4), &part).unwrap()
            })
            .collect();
        assert!((norms[1] / norms[0] - 1.0).abs() < 2e-5, "{norms:?}");
    }
}
