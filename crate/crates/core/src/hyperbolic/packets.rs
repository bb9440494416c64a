//! Randomised cone packets and free-wave bands on spacetime grids.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::field::{SpacetimeField, SpacetimeSpectrum};
use crate::error::{Error, Result};
use crate::radial_spectral::{chi, Dim, SpectralGrid};

/// Largest taper mass accepted for a packet.
pub const PACKET_TAPER_LIMIT: f64 = 0.01;

/// Fewest time slices used by [`SpacetimeGrid::for_bandwidth`].
pub const MIN_STEPS: usize = 256;

/// A spacetime window `[0, T)` with `M` slices over a radial grid on `[0, R]`.
#[derive(Debug, Clone)]
pub struct SpacetimeGrid {
    pub window: f64,
    pub steps: usize,
    pub grid: Arc<SpectralGrid>,
}

impl SpacetimeGrid {
    pub fn new(window: f64, steps: usize, cutoff: f64, nodes: usize) -> Result<Self> {
        Ok(Self { window, steps, grid: SpectralGrid::shared(Dim::R4, cutoff, nodes)? })
    }

    /// Grid on `[0, T) × [0, R]` resolving `ρ` up to `bandwidth`, with the temporal Nyquist
    /// frequency at twice that and at least [`MIN_STEPS`] slices, so the taper ramps stay smooth
    /// at the sample scale.
    pub fn for_bandwidth(window: f64, radius: f64, bandwidth: f64) -> Result<Self> {
        let n = ((bandwidth * radius / PI) / 32.0).ceil() as usize * 32;
        let m = fft_length((2.0 * bandwidth * window / PI).ceil() as usize);
        Self::new(window, m.max(MIN_STEPS), radius, n.max(32))
    }

    pub fn dt(&self) -> f64 {
        self.window / self.steps as f64
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.dt()
    }
}

/// Smallest even length `≥ n` with no prime factor above 5.
pub fn fft_length(n: usize) -> usize {
    let smooth = |mut k: usize| {
        for p in [2, 3, 5] {
            while k % p == 0 {
                k /= p;
            }
        }
        k == 1
    };
    (n.max(2)..).find(|&k| k % 2 == 0 && smooth(k)).unwrap()
}

/// Spectrum `amp·χ(s/λ)·e^{−(m/κλ)²/2}·(1 + a cos(b log₂(ρ/λ) + c))` with `s = |(τ, ρ)|` and
/// `m = (τ² − ρ²)/s`, centred in the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub lambda: f64,
    /// Modulation width relative to `λ`.
    pub kappa: f64,
    pub amplitude: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Packet {
    pub fn gaussian(lambda: f64, kappa: f64) -> Self {
        Self { lambda, kappa, amplitude: 1.0, a: 0.0, b: 0.0, c: 0.0 }
    }

    /// Random shape at frequency `λ`; `κ` log-uniform in `[kappa_min, kappa_max]`.
    pub fn draw(rng: &mut ChaCha8Rng, lambda: f64, kappa_min: f64, kappa_max: f64) -> Self {
        let kappa = (rng.gen_range(kappa_min.ln()..=kappa_max.ln())).exp();
        Self {
            lambda,
            kappa,
            amplitude: 1.0,
            a: rng.gen_range(0.0..0.8),
            b: rng.gen_range(0.5..3.0),
            c: rng.gen_range(0.0..2.0 * PI),
        }
    }

    pub fn symbol(&self, tau: f64, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let cut = chi(tau.hypot(rho) / self.lambda);
        if cut == 0.0 {
            return 0.0;
        }
        let d = (tau * tau - rho * rho) / (self.kappa * self.lambda * tau.hypot(rho));
        self.amplitude * cut * (-0.5 * d * d).exp() * (1.0 + self.a * (self.b * (rho / self.lambda).log2() + self.c).cos())
    }

    pub fn spectrum(&self, st: &SpacetimeGrid) -> Result<SpacetimeSpectrum> {
        let m = st.steps;
        let nyq = st.nyquist();
        let mut spec = SpacetimeSpectrum::from_fn(0.0, st.dt(), m, st.grid.clone(), |t, r| {
            if t.abs() >= nyq * (1.0 - 1e-12) {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(self.symbol(t, r), 0.0)
        })?;
        // (−1)^k shifts the packet to the middle of the window
        let n = st.grid.len();
        for (k, row) in spec.data.chunks_mut(n).enumerate() {
            if k % 2 == 1 {
                row.iter_mut().for_each(|z| *z = -*z);
            }
        }
        Ok(spec)
    }

    /// The packet in `(t, r)`, refused when the window cuts off more than [`PACKET_TAPER_LIMIT`].
    pub fn field(&self, st: &SpacetimeGrid) -> Result<SpacetimeField> {
        let f = self.spectrum(st)?.to_field()?;
        let tm = f.taper_mass();
        if tm > PACKET_TAPER_LIMIT {
            return Err(Error::Resolution(format!(
                "packet at λ = {} (κ = {:.3}) loses {tm:.2e} of its mass to the taper",
                self.lambda, self.kappa
            )));
        }
        Ok(f)
    }
}

/// Radial free wave `cos((t − t_c)|D|) φ` with `φ̂(ρ) = χ(√2ρ/λ)(1 + a cos(b log₂(ρ/λ) + c))`, focused at
/// the middle of the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeWave {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FreeWave {
    pub fn draw(rng: &mut ChaCha8Rng, lambda: f64) -> Self {
        Self { lambda, a: rng.gen_range(0.0..0.8), b: rng.gen_range(0.5..3.0), c: rng.gen_range(0.0..2.0 * PI) }
    }

    pub fn data_spectrum(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        chi(2f64.sqrt() * rho / self.lambda) * (1.0 + self.a * (self.b * (rho / self.lambda).log2() + self.c).cos())
    }

    /// `‖φ‖_{L²(ℝ⁴)}`.
    pub fn data_l2(&self, grid: &SpectralGrid) -> f64 {
        let c = Dim::R4.sphere_area() / (2.0 * PI).powi(4);
        let s: f64 = grid.freq.nodes.iter().zip(&grid.freq.weights).map(|(&r, w)| w * self.data_spectrum(r).powi(2)).sum();
        (c * s).sqrt()
    }

    pub fn field(&self, st: &SpacetimeGrid) -> Result<SpacetimeField> {
        let (m, dt) = (st.steps, st.dt());
        let tc = st.window / 2.0;
        let rho = &st.grid.freq.nodes;
        let data: Vec<f64> = rho.iter().map(|&r| self.data_spectrum(r)).collect();
        let block: Vec<f64> = (0..m)
            .flat_map(|j| {
                let t = j as f64 * dt - tc;
                rho.iter().zip(&data).map(move |(r, d)| (t * r).cos() * d)
            })
            .collect();
        SpacetimeField::new(0.0, dt, st.grid.clone(), st.grid.inverse_rows(&block))
    }
}

/// `ChaCha8` stream for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
