//! Exact spectral solution operators of the radial wave equation on ℝ⁴⁺¹.

use super::state::{FieldState, Form};
use crate::error::{Error, Result};
use crate::radial_spectral::{spectral_view, Dim, RadialProfile, SpectralGrid};

/// `(v̂, v̂_t)` at time `t` from `(v̂₀, v̂₁)`.
pub fn propagate_spectrum(rho: &[f64], v0: &[f64], v1: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut v = Vec::with_capacity(rho.len());
    let mut vt = Vec::with_capacity(rho.len());
    for ((&p, &a), &b) in rho.iter().zip(v0).zip(v1) {
        let (s, c) = (t * p).sin_cos();
        v.push(c * a + s / p * b);
        vt.push(-p * s * a + c * b);
    }
    (v, vt)
}

/// `S(t)(v₀, v₁)`: `v̂(t) = cos(tρ)v̂₀ + sin(tρ)/ρ v̂₁`, returned on Fourier–Bessel nodes.
pub fn free_propagate(v0: &RadialProfile, v1: &RadialProfile, t: f64) -> Result<FieldState> {
    if v0.grid.dim != Dim::R4 || v1.grid.dim != Dim::R4 {
        return Err(Error::GridMismatch("free propagation acts on ℝ⁴ profiles".into()));
    }
    let (sg, a) = spectral_view(v0)?;
    let (sg1, b) = spectral_view(v1)?;
    if !std::sync::Arc::ptr_eq(&sg, &sg1) {
        return Err(Error::GridMismatch("data live on different grids".into()));
    }
    if t == 0.0 {
        return FieldState::new(0.0, Form::V, a, b);
    }
    let ah = sg.forward(&a)?;
    let bh = sg.forward(&b)?;
    let (vh, vth) = propagate_spectrum(&sg.freq.nodes, &ah.samples, &bh.samples, t);
    let grid = sg.space.clone();
    FieldState::new(
        t,
        Form::V,
        RadialProfile { grid: grid.clone(), samples: sg.inverse_slice(&vh) },
        RadialProfile { grid, samples: sg.inverse_slice(&vth) },
    )
}

/// `□⁻¹F` at time `t` with zero data, `□ = −∂_t² + Δ`:
/// `v̂(t) = −∫₀ᵗ sin((t−s)ρ)/ρ F̂(s) ds`, trapezoid rule over the sample times.
///
/// `forcing` holds `(s, F(s))` with increasing `s`, starting at 0. When `t` falls
/// between samples, `F(t)` is interpolated linearly.
pub fn duhamel(forcing: &[(f64, RadialProfile)], t: f64) -> Result<FieldState> {
    let first = forcing.first().ok_or_else(|| Error::Invalid("empty forcing".into()))?;
    if first.0 != 0.0 {
        return Err(Error::Invalid("forcing must start at s = 0".into()));
    }
    if forcing.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Invalid("forcing times must increase".into()));
    }
    let last_t = forcing.last().unwrap().0;
    if t < 0.0 || t > last_t + 1e-12 {
        return Err(Error::Invalid(format!("t = {t} outside the forcing window [0, {last_t}]")));
    }
    let (sg, _) = spectral_view(&first.1)?;
    let transforms: Vec<Vec<f64>> = forcing
        .iter()
        .map(|(_, f)| {
            if f.grid.dim != Dim::R4 {
                return Err(Error::GridMismatch("Duhamel forcing must live on ℝ⁴".into()));
            }
            let (g, fb) = spectral_view(f)?;
            if !std::sync::Arc::ptr_eq(&g, &sg) {
                return Err(Error::GridMismatch("forcing samples on different grids".into()));
            }
            Ok(g.forward(&fb)?.samples)
        })
        .collect::<Result<_>>()?;

    let mut nodes: Vec<(f64, Vec<f64>)> = Vec::new();
    for (k, (s, _)) in forcing.iter().enumerate() {
        if *s <= t {
            nodes.push((*s, transforms[k].clone()));
        } else {
            let (s0, f0) = (forcing[k - 1].0, &transforms[k - 1]);
            let w = (t - s0) / (s - s0);
            if w > 0.0 {
                nodes.push((t, f0.iter().zip(&transforms[k]).map(|(a, b)| (1.0 - w) * a + w * b).collect()));
            }
            break;
        }
    }
    Ok(integrate_duhamel(&sg, &nodes, t))
}

fn integrate_duhamel(sg: &SpectralGrid, nodes: &[(f64, Vec<f64>)], t: f64) -> FieldState {
    let rho = &sg.freq.nodes;
    let m = rho.len();
    let mut v = vec![0.0; m];
    let mut vt = vec![0.0; m];
    for w in nodes.windows(2) {
        let h = w[1].0 - w[0].0;
        for (s, fh) in [(&w[0].0, &w[0].1), (&w[1].0, &w[1].1)] {
            for j in 0..m {
                let (sn, cs) = ((t - s) * rho[j]).sin_cos();
                v[j] -= 0.5 * h * sn / rho[j] * fh[j];
                vt[j] -= 0.5 * h * cs * fh[j];
            }
        }
    }
    let grid = sg.space.clone();
    FieldState {
        t,
        form: Form::V,
        f: RadialProfile { grid: grid.clone(), samples: sg.inverse_slice(&v) },
        f_t: RadialProfile { grid, samples: sg.inverse_slice(&vt) },
    }
}

/// `∫ (v_t² + |∇v|²) r³ dr` computed on the frequency side.
pub fn free_energy(state: &FieldState) -> Result<f64> {
    let (sg, v) = spectral_view(&state.f)?;
    let (_, vt) = spectral_view(&state.f_t)?;
    let vh = sg.forward(&v)?;
    let vth = sg.forward(&vt)?;
    let w = &sg.freq.weights;
    let scale = (2.0 * std::f64::consts::PI).powi(-4);
    Ok(scale
        * vh.samples
            .iter()
            .zip(&vth.samples)
            .zip(w.iter().zip(&sg.freq.nodes))
            .map(|((a, b), (w, p))| w * (p * p * a * a + b * b))
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::lp_norm;

    fn grid() -> std::sync::Arc<SpectralGrid> {
        SpectralGrid::shared(Dim::R4, 40.0, 1024).unwrap()
    }

    #[test]
    fn identity_at_zero_time() {
        let sg = grid();
        let v0 = RadialProfile::from_fn(sg.space.clone(), |r| (-r * r).exp());
        let v1 = RadialProfile::from_fn(sg.space.clone(), |r| r * r * (-r * r).exp());
        let s = free_propagate(&v0, &v1, 0.0).unwrap();
        assert_eq!(s.f.samples, v0.samples);
        assert_eq!(s.f_t.samples, v1.samples);
    }

    #[test]
    fn free_energy_is_conserved() {
        let sg = grid();
        let v0 = RadialProfile::from_fn(sg.space.clone(), |r| (-r * r).exp());
        let v1 = RadialProfile::from_fn(sg.space.clone(), |r| (1.0 - r * r) * (-r * r).exp());
        let e0 = free_energy(&free_propagate(&v0, &v1, 0.0).unwrap()).unwrap();
        for t in [1.0, 5.0, 15.0] {
            let s = free_propagate(&v0, &v1, t).unwrap();
            let e = free_energy(&s).unwrap();
            assert!((e / e0 - 1.0).abs() < 1e-8);
            // space-side check of the same quantity
            let d = sg.derivative(&s.f).unwrap();
            let space = lp_norm(&d, 2.0).powi(2) + lp_norm(&s.f_t, 2.0).powi(2);
            assert!((space / (2.0 * std::f64::consts::PI.powi(2)) / e0 - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn duhamel_recovers_manufactured_field() {
        // w = s² g(r) has zero data and □w = −2g + s² Δg.
        let sg = grid();
        let g = |r: f64| (-r * r).exp();
        let lap = |r: f64| (4.0 * r * r - 8.0) * (-r * r).exp();
        let ds = 0.01;
        let forcing: Vec<(f64, RadialProfile)> = (0..=200)
            .map(|k| {
                let s = k as f64 * ds;
                (s, RadialProfile::from_fn(sg.space.clone(), |r| -2.0 * g(r) + s * s * lap(r)))
            })
            .collect();
        let out = duhamel(&forcing, 2.0).unwrap();
        let exact = RadialProfile::from_fn(sg.space.clone(), |r| 4.0 * g(r));
        let err = out.f.sub(&exact).unwrap().max_abs() / exact.max_abs();
        assert!(err < 1e-3, "{err}");
        let vt_exact = RadialProfile::from_fn(sg.space.clone(), |r| 4.0 * g(r));
        assert!(out.f_t.sub(&vt_exact).unwrap().max_abs() < 1e-2);
    }

    #[test]
    fn duhamel_is_linear_and_zero_on_zero() {
        let sg = grid();
        let f = |c: f64| -> Vec<(f64, RadialProfile)> {
            (0..=20)
                .map(|k| (k as f64 * 0.1, RadialProfile::from_fn(sg.space.clone(), |r| c * (-(r - 1.0).powi(2)).exp())))
                .collect()
        };
        let zero = duhamel(&f(0.0), 1.5).unwrap();
        assert_eq!(zero.f.max_abs(), 0.0);
        let a = duhamel(&f(1.0), 1.55).unwrap();
        let b = duhamel(&f(3.0), 1.55).unwrap();
        assert!(b.f.sub(&a.f.scaled(3.0)).unwrap().max_abs() < 1e-10 * b.f.max_abs());
    }
}
