//! Sampled radial spacetime fields on ℝ⁴⁺¹ and their `(τ, ρ)` spectra.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evolution::{Form, Trajectory};
use crate::radial_spectral::{smooth_step, spectral_view, Dim, DyadicPartition, Parity, SpectralGrid};

/// Share of the window tapered at each end.
pub const TAPER_FRACTION: f64 = 0.1;

/// Unresolved spacetime spectral mass accepted by [`st_transform`].
pub const HYPERBOLIC_TAIL_TOLERANCE: f64 = 1e-4;

/// Share of the top frequencies (in `|τ|` and in `ρ`) treated as unresolved.
const TOP_FRACTION: f64 = 0.02;

/// `w(t_j, r_i)` at `t_j = t₀ + j·dt`, `j < M`, on the space nodes of an ℝ⁴ Fourier–Bessel grid.
#[derive(Debug, Clone)]
pub struct SpacetimeField {
    pub t0: f64,
    pub dt: f64,
    pub grid: Arc<SpectralGrid>,
    /// Row-major `M × N`, untapered.
    pub samples: Vec<f64>,
}

impl SpacetimeField {
    pub fn new(t0: f64, dt: f64, grid: Arc<SpectralGrid>, samples: Vec<f64>) -> Result<Self> {
        if grid.dim() != Dim::R4 {
            return Err(Error::GridMismatch("spacetime fields live on ℝ⁴".into()));
        }
        let n = grid.len();
        if samples.len() % n != 0 || samples.len() / n < 8 || (samples.len() / n) % 2 != 0 {
            return Err(Error::Invalid(format!(
                "{} samples do not form an even number (≥ 8) of time slices of {n} nodes",
                samples.len()
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "spacetime field", index: i, r: grid.space.nodes[i % n] });
        }
        Ok(Self { t0, dt, grid, samples })
    }

    /// Samples `f(t, r)` on `M` uniform times covering `[t₀, t₀ + window)`.
    pub fn from_fn(t0: f64, window: f64, steps: usize, grid: Arc<SpectralGrid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let dt = window / steps as f64;
        let samples = (0..steps)
            .flat_map(|j| {
                let t = t0 + j as f64 * dt;
                grid.space.nodes.iter().map(move |&r| (t, r)).collect::<Vec<_>>()
            })
            .map(|(t, r)| f(t, r))
            .collect();
        Self::new(t0, dt, grid, samples)
    }

    /// Snapshots of a trajectory at uniform times, resampled onto `grid` (v-form).
    pub fn from_trajectory(traj: &Trajectory, grid: Arc<SpectralGrid>) -> Result<Self> {
        let times = traj.times();
        if times.len() < 8 {
            return Err(Error::Invalid("need at least 8 snapshots".into()));
        }
        let dt = times[1] - times[0];
        if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
            return Err(Error::Invalid("snapshots are not uniformly spaced".into()));
        }
        let keep = times.len() - times.len() % 2;
        let mut samples = Vec::with_capacity(keep * grid.len());
        for s in &traj.snapshots[..keep] {
            let v = s.convert(Form::V)?;
            let (_, fb) = spectral_view(&v.f)?;
            let on = if fb.grid.same_as(&grid.space) { fb.samples } else { fb.interpolate(Parity::Even, &grid.space.nodes) };
            samples.extend(on);
        }
        Self::new(times[0], dt, grid, samples)
    }

    pub fn steps(&self) -> usize {
        self.samples.len() / self.grid.len()
    }

    pub fn window(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.steps()).map(|j| self.t0 + j as f64 * self.dt).collect()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.grid.len();
        &self.samples[j * n..(j + 1) * n]
    }

    /// Window taper: a smooth step over [`TAPER_FRACTION`] of the window at each end.
    pub fn taper(&self) -> Vec<f64> {
        let m = self.steps();
        let edge = TAPER_FRACTION * m as f64;
        (0..m)
            .map(|j| {
                let x = j as f64;
                smooth_step(x / edge) * smooth_step((m as f64 - x) / edge)
            })
            .collect()
    }

    /// Time slices where the taper equals one; mixed norms are taken here.
    pub fn interior(&self) -> Range<usize> {
        interior(self.steps())
    }

    /// Share of `‖w‖²_{L²_{t,x}}` removed by the taper.
    pub fn taper_mass(&self) -> f64 {
        let taper = self.taper();
        let w = &self.grid.space.weights;
        let (mut total, mut kept) = (0.0, 0.0);
        for (j, th) in taper.iter().enumerate() {
            let e: f64 = self.row(j).iter().zip(w).map(|(x, w)| w * x * x).sum();
            total += e;
            kept += th * th * e;
        }
        if total == 0.0 {
            0.0
        } else {
            1.0 - kept / total
        }
    }

    pub fn map(&self, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let n = self.grid.len();
        let nodes = &self.grid.space.nodes;
        let samples =
            self.samples.iter().enumerate().map(|(k, &x)| f(self.t0 + (k / n) as f64 * self.dt, nodes[k % n], x)).collect();
        Self::new(self.t0, self.dt, self.grid.clone(), samples)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { samples: self.samples.iter().map(|x| c * x).collect(), ..self.clone() }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid)
            || self.samples.len() != other.samples.len()
            || self.dt != other.dt
            || self.t0 != other.t0
        {
            return Err(Error::GridMismatch("spacetime fields on different grids".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Ok(Self { samples, ..self.clone() })
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub(crate) fn interior(m: usize) -> Range<usize> {
    let edge = (TAPER_FRACTION * m as f64).ceil() as usize;
    edge..m - edge
}

/// `ŵ(τ_k, ρ_i)`: DFT in time composed with the order-1 Hankel transform in space.
#[derive(Debug, Clone)]
pub struct SpacetimeSpectrum {
    pub t0: f64,
    pub dt: f64,
    pub grid: Arc<SpectralGrid>,
    /// Angular frequencies in FFT order.
    pub tau: Vec<f64>,
    /// Row-major `M × N`, rows indexed by `τ`.
    pub data: Vec<Complex64>,
}

/// Transforms the tapered field and refuses it when the spectrum is not resolved.
pub fn st_transform(w: &SpacetimeField) -> Result<SpacetimeSpectrum> {
    st_transform_with(w, HYPERBOLIC_TAIL_TOLERANCE)
}

pub fn st_transform_with(w: &SpacetimeField, tail_tolerance: f64) -> Result<SpacetimeSpectrum> {
    let spec = st_transform_unchecked(w);
    let tail = spec.unresolved_mass(&DyadicPartition::default());
    if tail > tail_tolerance {
        return Err(Error::Resolution(format!(
            "spacetime spectral mass {tail:.3e} outside the resolved range exceeds {tail_tolerance:.1e}"
        )));
    }
    Ok(spec)
}

pub(crate) fn st_transform_unchecked(w: &SpacetimeField) -> SpacetimeSpectrum {
    let n = w.grid.len();
    let m = w.steps();
    let taper = w.taper();
    let tapered: Vec<f64> = w.samples.chunks(n).zip(&taper).flat_map(|(row, th)| row.iter().map(move |x| th * x)).collect();
    let hat = w.grid.forward_rows(&tapered);
    let mut data: Vec<Complex64> = hat.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    columns_fft(&mut data, m, n, false);
    SpacetimeSpectrum { t0: w.t0, dt: w.dt, grid: w.grid.clone(), tau: angular_frequencies(m, w.dt), data }
}

pub(crate) fn angular_frequencies(m: usize, dt: f64) -> Vec<f64> {
    (0..m)
        .map(|k| {
            let k = if k < m / 2 { k as f64 } else { k as f64 - m as f64 };
            2.0 * PI * k / (m as f64 * dt)
        })
        .collect()
}

/// In-place FFT (or unnormalised inverse) of every column of a row-major `m × n` block.
pub(crate) fn columns_fft(data: &mut [Complex64], m: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for i in 0..n {
        for k in 0..m {
            buf[k] = data[k * n + i];
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for k in 0..m {
            data[k * n + i] = buf[k];
        }
    }
}

impl SpacetimeSpectrum {
    /// Spectrum `f(τ, ρ)` sampled on the grid of a field with `steps` slices of width `dt`
    /// starting at `t₀`.
    pub fn from_fn(t0: f64, dt: f64, steps: usize, grid: Arc<SpectralGrid>, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        if steps < 8 || steps % 2 != 0 || grid.dim() != Dim::R4 {
            return Err(Error::Invalid(format!("bad spacetime grid: {steps} steps on {:?}", grid.dim())));
        }
        let tau = angular_frequencies(steps, dt);
        let data = tau.iter().flat_map(|&t| grid.freq.nodes.iter().map(move |&r| (t, r))).map(|(t, r)| f(t, r)).collect();
        Ok(Self { t0, dt, grid, tau, data })
    }

    pub fn steps(&self) -> usize {
        self.tau.len()
    }

    pub fn rho(&self) -> &[f64] {
        &self.grid.freq.nodes
    }

    /// Weights `W_i` with `‖f‖²_{L²(ℝ⁴)} = Σ_i W_i |f̂(ρ_i)|²`.
    pub(crate) fn space_weights(&self) -> Vec<f64> {
        let c = Dim::R4.sphere_area() / (2.0 * PI).powi(4);
        self.grid.freq.weights.iter().map(|w| c * w).collect()
    }

    /// Applies a real multiplier `m(τ, ρ)`.
    pub fn multiply(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.grid.len();
        let rho = self.rho();
        let data = self.data.iter().enumerate().map(|(k, z)| z * f(self.tau[k / n], rho[k % n])).collect();
        Self { data, ..self.clone() }
    }

    /// `‖w‖_{L²_{t,x}}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let n = self.grid.len();
        let w = self.space_weights();
        let s: f64 = self.data.iter().enumerate().map(|(k, z)| w[k % n] * z.norm_sqr()).sum();
        (s * self.dt / self.steps() as f64).sqrt()
    }

    /// `‖w(t_j)‖_{L²_x}` at every slice, from the time-domain spectrum.
    pub fn slice_l2(&self) -> Vec<f64> {
        let (m, n) = (self.steps(), self.grid.len());
        let cols: Vec<usize> = (0..n).filter(|&i| (0..m).any(|k| self.data[k * n + i] != Complex64::new(0.0, 0.0))).collect();
        let w = self.space_weights();
        let mut acc = vec![0.0; m];
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(m);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for &i in &cols {
            for k in 0..m {
                buf[k] = self.data[k * n + i];
            }
            fft.process(&mut buf);
            for (a, z) in acc.iter_mut().zip(&buf) {
                *a += w[i] * z.norm_sqr();
            }
        }
        let scale = 1.0 / m as f64;
        acc.into_iter().map(|a| a.sqrt() * scale).collect()
    }

    /// Back to `(t, r)`: the tapered field.
    pub fn to_field(&self) -> Result<SpacetimeField> {
        let (m, n) = (self.steps(), self.grid.len());
        let mut data = self.data.clone();
        columns_fft(&mut data, m, n, true);
        let real: Vec<f64> = data.iter().map(|z| z.re / m as f64).collect();
        SpacetimeField::new(self.t0, self.dt, self.grid.clone(), self.grid.inverse_rows(&real))
    }

    /// Relative `L²` mass near the temporal Nyquist frequency, at the top of the
    /// radial grid, or where the cone partition does not sum to one.
    pub fn unresolved_mass(&self, part: &DyadicPartition) -> f64 {
        let n = self.grid.len();
        let w = self.space_weights();
        let nyquist = PI / self.dt;
        let rho = self.rho();
        let rho_top = rho[((1.0 - TOP_FRACTION) * n as f64).floor() as usize];
        let (mut total, mut edge, mut miss) = (0.0, 0.0, 0.0);
        for (k, z) in self.data.iter().enumerate() {
            let (tau, r) = (self.tau[k / n], rho[k % n]);
            let p = w[k % n] * z.norm_sqr();
            total += p;
            if tau.abs() >= (1.0 - TOP_FRACTION) * nyquist || r >= rho_top {
                edge += p;
            }
            let gap = 1.0 - part.total(tau.hypot(r));
            miss += p * gap * gap;
        }
        if total == 0.0 {
            return 0.0;
        }
        (edge / total).sqrt() + (miss / total).sqrt()
    }
}
