//! Cone-band multipliers and the X, Y, F, □F surrogate norms.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::ops::Range;

use super::field::{interior, st_transform_with, SpacetimeField, SpacetimeSpectrum, HYPERBOLIC_TAIL_TOLERANCE};
use crate::error::Result;
use crate::radial_spectral::{chi, low_pass, DyadicPartition};

/// Modulation floor `μ_min = λ·2^{−FLOOR_OCTAVES}`.
pub const FLOOR_OCTAVES: i32 = 10;

/// Bands whose `L²` mass is below this share of the total are treated as empty.
const EMPTY_BAND: f64 = 1e-12;

/// `|(τ, ρ)|`.
pub fn cone_radius(tau: f64, rho: f64) -> f64 {
    tau.hypot(rho)
}

/// `|τ² − ρ²| / |(τ, ρ)|`, the distance to the light cone.
pub fn modulation(tau: f64, rho: f64) -> f64 {
    let s = tau.hypot(rho);
    if s == 0.0 {
        0.0
    } else {
        (tau * tau - rho * rho).abs() / s
    }
}

/// `A_λ(D)`: the multiplier `χ(|(τ, ρ)|/λ)`.
pub fn a_band(w: &SpacetimeSpectrum, lambda: f64, part: &DyadicPartition) -> Result<SpacetimeSpectrum> {
    part.index_of(lambda)?;
    Ok(w.multiply(|t, r| chi(cone_radius(t, r) / lambda)))
}

/// `B_μ(D)`: the multiplier `χ(modulation/μ)`.
pub fn b_band(w: &SpacetimeSpectrum, mu: f64) -> SpacetimeSpectrum {
    w.multiply(|t, r| chi(modulation(t, r) / mu))
}

/// `B̃_μ(D) = Σ_{j≥0} B_{2^{−j}μ}`, supported on modulation `≤ 2μ`.
pub fn b_tilde(w: &SpacetimeSpectrum, mu: f64) -> SpacetimeSpectrum {
    w.multiply(|t, r| low_pass(mu, modulation(t, r)))
}

/// `□ = −∂_t² + Δ`, symbol `τ² − ρ²`.
pub fn box_op(w: &SpacetimeSpectrum) -> SpacetimeSpectrum {
    w.multiply(|t, r| t * t - r * r)
}

/// `Σ_μ μ^s ‖B_μ w‖_{L²_{t,x}}` over `μ = λ·2^{−10} … 4λ`; the lowest band collects
/// everything below the floor.
pub fn x_norm(w: &SpacetimeSpectrum, s: f64, lambda: f64) -> f64 {
    let band = BandView::new(w, lambda, false);
    band.x_parts(|_| 1.0, &[s])[0]
}

pub fn x_half_norm(w: &SpacetimeSpectrum, lambda: f64) -> f64 {
    x_norm(w, 0.5, lambda)
}

/// `‖w‖_{L^∞L²} + λ⁻¹‖□w‖_{L¹L²}`, both over the untapered interior.
pub fn y_norm(w: &SpacetimeSpectrum, lambda: f64) -> f64 {
    BandView::new(w, lambda, false).time_norms(|_| 1.0).y(lambda)
}

/// `min_{μ₀} X^{1/2}(B̃_{μ₀} w) + Y((1 − B̃_{μ₀}) w)`, with the split threshold.
///
/// `μ₀ = 0` puts everything in Y and `μ₀ = 2λ` everything in X.
pub fn f_norm_surrogate(w: &SpacetimeSpectrum, lambda: f64) -> (f64, f64) {
    let s = BandView::new(w, lambda, false).splits();
    (s.f, s.f_mu0)
}

/// `λ·min_{μ₀} [X^{−1/2}(B̃_{μ₀} w) + ‖(1 − B̃_{μ₀}) w‖_{L¹L²}]`, with the split threshold.
pub fn box_f_norm_surrogate(w: &SpacetimeSpectrum, lambda: f64) -> (f64, f64) {
    let s = BandView::new(w, lambda, false).splits();
    (s.box_f, s.box_mu0)
}

/// Per-band surrogate values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandNorms {
    pub lambda: f64,
    pub x_half: f64,
    pub y: f64,
    pub f: f64,
    pub box_f: f64,
    /// Split threshold realising `f`.
    pub mu0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateNormReport {
    pub bands: Vec<BandNorms>,
    /// `Σ λ² F_λ`.
    pub f: f64,
    /// `Σ λ F_λ`.
    pub grad_f: f64,
    /// `f + grad_f`.
    pub x: f64,
    /// Unresolved spacetime spectral mass.
    pub tail: f64,
    pub taper_mass: f64,
}

/// Composite `F ∩ |∇|F` surrogate of a field.
pub fn composite_x_norm(w: &SpacetimeField) -> Result<SurrogateNormReport> {
    composite_x_norm_with(w, HYPERBOLIC_TAIL_TOLERANCE)
}

pub fn composite_x_norm_with(w: &SpacetimeField, tail_tolerance: f64) -> Result<SurrogateNormReport> {
    let spec = st_transform_with(w, tail_tolerance)?;
    let mut rep = composite_spectrum(&spec, &DyadicPartition::default());
    rep.taper_mass = w.taper_mass();
    Ok(rep)
}

/// Composite surrogate from a spectrum, over the bands of `part` that carry mass.
pub fn composite_spectrum(spec: &SpacetimeSpectrum, part: &DyadicPartition) -> SurrogateNormReport {
    let total = spec.l2_norm();
    let bands: Vec<BandNorms> = part
        .bands()
        .into_par_iter()
        .filter_map(|lambda| {
            let band = BandView::new(spec, lambda, true);
            if band.l2() <= EMPTY_BAND * total || total == 0.0 {
                return None;
            }
            let s = band.splits();
            Some(BandNorms { lambda, x_half: s.x_all, y: s.y_all, f: s.f, box_f: s.box_f, mu0: s.f_mu0 })
        })
        .collect();
    let f = bands.iter().map(|b| b.lambda * b.lambda * b.f).sum();
    let grad_f = bands.iter().map(|b| b.lambda * b.f).sum();
    SurrogateNormReport { bands, f, grad_f, x: f + grad_f, tail: spec.unresolved_mass(part), taper_mass: 0.0 }
}

struct Entry {
    k: usize,
    val: Complex64,
    symbol: f64,
    /// Nonzero modulation-band weights `(band, weight)`.
    weights: [(usize, f64); 3],
    count: usize,
}

impl Entry {
    /// `B̃_{μ_level}` at this entry: the lower modulation bands telescope to the low-pass.
    fn low(&self, level: usize) -> f64 {
        self.weights[..self.count].iter().filter(|(j, _)| *j <= level).map(|(_, b)| b).sum()
    }
}

/// Nonzero entries of one cone band, grouped by radial column.
struct BandView {
    lambda: f64,
    mu_min: f64,
    /// `μ_j = μ_min 2^j`, `j ≤ levels`, ends at `4λ`.
    levels: usize,
    steps: usize,
    dt: f64,
    entries: Vec<Entry>,
    /// `(W_i, entry range)` per column.
    cols: Vec<(f64, Range<usize>)>,
}

struct TimeNorms {
    sup: f64,
    l1: f64,
    box_l1: f64,
}

impl TimeNorms {
    fn y(&self, lambda: f64) -> f64 {
        self.sup + self.box_l1 / lambda
    }
}

struct Splits {
    x_all: f64,
    y_all: f64,
    f: f64,
    f_mu0: f64,
    box_f: f64,
    box_mu0: f64,
}

impl BandView {
    fn new(spec: &SpacetimeSpectrum, lambda: f64, localize: bool) -> Self {
        let (m, n) = (spec.steps(), spec.grid.len());
        let mu_min = lambda * 2f64.powi(-FLOOR_OCTAVES);
        let levels = (FLOOR_OCTAVES + 2) as usize;
        let w = spec.space_weights();
        let rho = spec.rho();
        let mut entries = Vec::new();
        let mut cols = Vec::new();
        for i in 0..n {
            if localize && rho[i] >= 2.0 * lambda {
                break;
            }
            let start = entries.len();
            for k in (0..m).filter(|&k| !localize || spec.tau[k].abs() < 2.0 * lambda) {
                let (t, r) = (spec.tau[k], rho[i]);
                let cut = if localize {
                    let s = cone_radius(t, r);
                    if s <= 0.5 * lambda || s >= 2.0 * lambda {
                        continue;
                    }
                    chi(s / lambda)
                } else {
                    1.0
                };
                let val = spec.data[k * n + i] * cut;
                if cut == 0.0 || val == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let md = modulation(t, r);
                let mut weights = [(0, 0.0); 3];
                let mut count = 0;
                let x = if md > 0.0 { (md / mu_min).log2() } else { f64::NEG_INFINITY };
                let lo = if x.is_finite() { (x.floor() as i64 - 1).max(0) as usize } else { 0 };
                let hi = if x.is_finite() { (x.floor() as i64 + 2).clamp(0, levels as i64) as usize } else { 0 };
                for j in lo..=hi {
                    let b = if j == 0 { low_pass(mu_min, md) } else { chi(md / (mu_min * 2f64.powi(j as i32))) };
                    if b != 0.0 && count < 3 {
                        weights[count] = (j, b);
                        count += 1;
                    }
                }
                entries.push(Entry { k, val, symbol: t * t - r * r, weights, count });
            }
            if entries.len() > start {
                cols.push((w[i], start..entries.len()));
            }
        }
        Self { lambda, mu_min, levels, steps: m, dt: spec.dt, entries, cols }
    }

    fn scale(&self) -> f64 {
        self.dt / self.steps as f64
    }

    fn l2(&self) -> f64 {
        let s: f64 =
            self.cols.iter().map(|(w, r)| w * self.entries[r.clone()].iter().map(|e| e.val.norm_sqr()).sum::<f64>()).sum();
        (s * self.scale()).sqrt()
    }

    /// `Σ_j μ_j^s ‖B_{μ_j} g(D) w‖` for every exponent in `exps`.
    fn x_parts(&self, g: impl Fn(&Entry) -> f64, exps: &[f64]) -> Vec<f64> {
        let mut energy = vec![0.0; self.levels + 1];
        for (w, range) in &self.cols {
            for e in &self.entries[range.clone()] {
                let gm = g(e);
                if gm == 0.0 {
                    continue;
                }
                let p = w * e.val.norm_sqr() * gm * gm;
                for &(j, b) in &e.weights[..e.count] {
                    energy[j] += p * b * b;
                }
            }
        }
        let scale = self.scale();
        exps.iter()
            .map(|&s| {
                energy.iter().enumerate().map(|(j, e)| (self.mu_min * 2f64.powi(j as i32)).powf(s) * (e * scale).sqrt()).sum()
            })
            .collect()
    }

    /// Interior `L^∞L²` and `L¹L²` of `h(D) w`, and `L¹L²` of `□h(D) w`.
    fn time_norms(&self, h: impl Fn(&Entry) -> f64) -> TimeNorms {
        let m = self.steps;
        let fft = FftPlanner::new().plan_fft_inverse(m);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let (mut acc, mut acc_box) = (vec![0.0; m], vec![0.0; m]);
        let mut a = vec![Complex64::new(0.0, 0.0); m];
        let i = Complex64::new(0.0, 1.0);
        for (w, range) in &self.cols {
            a.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let mut any = false;
            for e in &self.entries[range.clone()] {
                let hm = h(e);
                if hm != 0.0 {
                    // columns are Hermitian in τ: the field goes to the real part, □ to the imaginary
                    a[e.k] = e.val * hm * (1.0 + i * e.symbol);
                    any = true;
                }
            }
            if !any {
                continue;
            }
            fft.process_with_scratch(&mut a, &mut scratch);
            for j in 0..m {
                acc[j] += w * a[j].re * a[j].re;
                acc_box[j] += w * a[j].im * a[j].im;
            }
        }
        let inv = 1.0 / m as f64;
        let mut out = TimeNorms { sup: 0.0, l1: 0.0, box_l1: 0.0 };
        for j in interior(m) {
            let x = acc[j].sqrt() * inv;
            out.sup = out.sup.max(x);
            out.l1 += self.dt * x;
            out.box_l1 += self.dt * acc_box[j].sqrt() * inv;
        }
        out
    }

    fn splits(&self) -> Splits {
        let lambda = self.lambda;
        let all_y = self.time_norms(|_| 1.0);
        let y_all = all_y.y(lambda);
        let mut best = Splits { x_all: 0.0, y_all, f: y_all, f_mu0: 0.0, box_f: lambda * all_y.l1, box_mu0: 0.0 };
        for level in 0..=FLOOR_OCTAVES as usize {
            let mu0 = self.mu_min * 2f64.powi(level as i32);
            let x = self.x_parts(|e| e.low(level), &[0.5, -0.5]);
            let box_x = lambda * x[1];
            if x[0] >= best.f && box_x >= best.box_f {
                break;
            }
            let high = self.time_norms(|e| 1.0 - e.low(level));
            let f = x[0] + high.y(lambda);
            if f < best.f {
                best.f = f;
                best.f_mu0 = mu0;
            }
            let bf = box_x + lambda * high.l1;
            if bf < best.box_f {
                best.box_f = bf;
                best.box_mu0 = mu0;
            }
        }
        let x = self.x_parts(|_| 1.0, &[0.5, -0.5]);
        best.x_all = x[0];
        if x[0] < best.f {
            best.f = x[0];
            best.f_mu0 = 2.0 * lambda;
        }
        if lambda * x[1] < best.box_f {
            best.box_f = lambda * x[1];
            best.box_mu0 = 2.0 * lambda;
        }
        best
    }
}
