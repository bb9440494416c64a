//! Radial sampling grids and sampled profiles.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use super::bessel::{bessel_j, bessel_zeros};
use crate::error::{Error, Result};

/// Ambient dimension of a radial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    R2,
    R4,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::R2 => 2,
            Dim::R4 => 4,
        }
    }

    /// Bessel order `n/2 − 1` of the radial Fourier kernel.
    pub fn nu(self) -> u32 {
        match self {
            Dim::R2 => 0,
            Dim::R4 => 1,
        }
    }

    /// Area of the unit sphere `S^{n−1}`.
    pub fn sphere_area(self) -> f64 {
        match self {
            Dim::R2 => 2.0 * PI,
            Dim::R4 => 2.0 * PI * PI,
        }
    }

    pub fn from_n(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::R2),
            4 => Ok(Dim::R4),
            _ => Err(Error::Invalid(format!("dimension must be 2 or 4, got {n}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    /// Scaled zeros of `J_{n/2−1}`, carrying the Fourier–Bessel quadrature.
    FourierBessel,
    /// `r_i = (i + 1/2) dr`, midpoint quadrature; the outer boundary sits at `R = (N + 1/2) dr`.
    CellCentered,
    /// Frequency nodes `ρ_m` dual to a Fourier–Bessel grid.
    Frequency,
}

/// Nodes and quadrature weights on `(0, R]`.
///
/// `weights` integrate against the radial measure: `∫₀^R F(r) r^{n−1} dr ≈ Σ wᵢ F(rᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub dim: Dim,
    pub cutoff: f64,
    pub kind: GridKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn fourier_bessel(dim: Dim, cutoff: f64, n: usize) -> Result<Self> {
        let zeros = bessel_zeros(dim.nu(), n + 1);
        Self::fourier_bessel_from_zeros(dim, cutoff, &zeros)
    }

    pub(crate) fn fourier_bessel_from_zeros(dim: Dim, cutoff: f64, zeros: &[f64]) -> Result<Self> {
        let n = zeros.len() - 1;
        check_size(cutoff, n)?;
        let s = zeros[n];
        let nu = dim.nu();
        let pow = dim.n() as i32 - 2;
        let nodes: Vec<f64> = zeros[..n].iter().map(|j| j * cutoff / s).collect();
        let weights = zeros[..n]
            .iter()
            .zip(&nodes)
            .map(|(&j, &r)| {
                let jp = bessel_j(nu + 1, j);
                2.0 * cutoff * cutoff / (s * s * jp * jp) * r.powi(pow)
            })
            .collect();
        Ok(Self { dim, cutoff, kind: GridKind::FourierBessel, nodes, weights })
    }

    pub fn cell_centered(dim: Dim, cutoff: f64, n: usize) -> Result<Self> {
        check_size(cutoff, n)?;
        let dr = cutoff / (n as f64 + 0.5);
        let pow = dim.n() as i32 - 1;
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dr).collect();
        let weights = nodes.iter().map(|r| dr * r.powi(pow)).collect();
        Ok(Self { dim, cutoff, kind: GridKind::CellCentered, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing of a cell-centered grid.
    pub fn spacing(&self) -> Option<f64> {
        match self.kind {
            GridKind::CellCentered => Some(self.cutoff / (self.len() as f64 + 0.5)),
            _ => None,
        }
    }

    /// Structural identity: same kind, dimension, size and extent.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.kind == other.kind
            && self.dim == other.dim
            && self.len() == other.len()
            && self.cutoff == other.cutoff
            && self.nodes.first() == other.nodes.first()
            && self.nodes.last() == other.nodes.last()
    }

    /// `∫ F r^{n−1} dr` over the grid (without the sphere factor).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }
}

fn check_size(cutoff: f64, n: usize) -> Result<()> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::Invalid(format!("grid cutoff must be positive, got {cutoff}")));
    }
    if n < 4 {
        return Err(Error::Invalid(format!("grid needs at least 4 nodes, got {n}")));
    }
    Ok(())
}

/// Symmetry of a radial profile under `r ↦ −r`, used when extrapolating
/// towards the axis: `v` on ℝ⁴ is even, `u = r v` on ℝ² is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Samples of a radial function on a grid; implicitly zero beyond `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: Arc<RadialGrid>,
    pub samples: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Arc<RadialGrid>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for {} nodes", samples.len(), grid.len())));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "profile", index: i, r: grid.nodes[i] });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, samples: vec![0.0; n] }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let samples = grid.nodes.iter().map(|&r| f(r)).collect();
        Self { grid, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let samples = self.grid.nodes.iter().zip(&self.samples).map(|(&r, &x)| f(r, x)).collect();
        Self { grid: self.grid.clone(), samples }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|_, x| c * x)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("profiles live on different grids".into()))
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        let samples =
            self.grid.nodes.iter().zip(self.samples.iter().zip(&other.samples)).map(|(&r, (&a, &b))| f(r, a, b)).collect();
        Ok(Self { grid: self.grid.clone(), samples })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |_, a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |_, a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |_, a, b| a * b)
    }

    /// Values at arbitrary radii by local 6-point Lagrange interpolation, using
    /// `parity` to mirror samples across the axis and `f(R) = 0` at the cutoff.
    pub fn interpolate(&self, parity: Parity, radii: &[f64]) -> Vec<f64> {
        const STENCIL: usize = 6;
        let n = self.len();
        let ghosts = STENCIL / 2;
        // Extended node/value arrays: mirrored ghosts, samples, then zeros at and beyond R.
        let mut xs = Vec::with_capacity(n + 2 * ghosts);
        let mut ys = Vec::with_capacity(n + 2 * ghosts);
        for k in (0..ghosts.min(n)).rev() {
            xs.push(-self.grid.nodes[k]);
            ys.push(parity.sign() * self.samples[k]);
        }
        xs.extend_from_slice(&self.grid.nodes);
        ys.extend_from_slice(&self.samples);
        let last = self.grid.nodes[n - 1];
        let h = (self.grid.cutoff - last).max(last - self.grid.nodes[n - 2]);
        for k in 0..ghosts {
            xs.push(self.grid.cutoff + k as f64 * h);
            ys.push(0.0);
        }
        radii
            .iter()
            .map(|&r| {
                if r >= self.grid.cutoff {
                    return 0.0;
                }
                let pos = xs.partition_point(|&x| x <= r);
                let start = pos.saturating_sub(STENCIL / 2).min(xs.len() - STENCIL);
                let (sx, sy) = (&xs[start..start + STENCIL], &ys[start..start + STENCIL]);
                let mut acc = 0.0;
                for i in 0..STENCIL {
                    if sx[i] == r {
                        return sy[i];
                    }
                    let mut l = 1.0;
                    for j in 0..STENCIL {
                        if j != i {
                            l *= (r - sx[j]) / (sx[i] - sx[j]);
                        }
                    }
                    acc += l * sy[i];
                }
                acc
            })
            .collect()
    }

    /// Resamples onto `target` by local interpolation.
    pub fn resample(&self, target: &Arc<RadialGrid>, parity: Parity) -> Self {
        let samples = self.interpolate(parity, &target.nodes);
        Self { grid: target.clone(), samples }
    }

    /// Writes `r,f` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["r", "f"])?;
        for (r, f) in self.grid.nodes.iter().zip(&self.samples) {
            wtr.write_record([format!("{r:.17e}"), format!("{f:.17e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads `r,f` rows and checks the radii against `grid`.
    pub fn read_csv<R: Read>(grid: Arc<RadialGrid>, rdr: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(rdr);
        let mut samples = Vec::with_capacity(grid.len());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Io(format!("row {i}: missing column {k}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("row {i}: {e}")))
            };
            let r = parse(0)?;
            let expected = *grid.nodes.get(i).ok_or_else(|| Error::GridMismatch("too many rows".into()))?;
            if (r - expected).abs() > 1e-12 * expected.max(1.0) {
                return Err(Error::GridMismatch(format!("row {i}: r = {r}, grid node {expected}")));
            }
            samples.push(parse(1)?);
        }
        Self::new(grid, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_centered_layout() {
        let g = RadialGrid::cell_centered(Dim::R2, 9.95, 99).unwrap();
        let dr = g.spacing().unwrap();
        assert!((dr - 0.1).abs() < 1e-14);
        assert!((g.nodes[0] - 0.05).abs() < 1e-14);
        assert!((g.cutoff - g.nodes[98] - dr).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::cell_centered(Dim::R2, -1.0, 10).is_err());
        assert!(RadialGrid::fourier_bessel(Dim::R4, 10.0, 2).is_err());
        assert!(Dim::from_n(3).is_err());
    }

    #[test]
    fn fourier_bessel_quadrature_gaussian_moments() {
        // ∫₀^∞ e^{−r²} r^{2k+1} dr = k!/2. On ℝ⁴ the profile is e^{−r²} r^{2k−2}, smooth only for k ≥ 1.
        for dim in [Dim::R2, Dim::R4] {
            let g = RadialGrid::fourier_bessel(dim, 40.0, 512).unwrap();
            let pow = dim.n() as i32 - 1;
            let k0 = if dim == Dim::R4 { 1 } else { 0 };
            for k in k0..=4 {
                let vals: Vec<f64> = g.nodes.iter().map(|&r| (-r * r).exp() * r.powi(2 * k) / r.powi(pow) * r).collect();
                let exact = (1..=k).map(|i| i as f64).product::<f64>() / 2.0;
                let got = g.integrate(&vals);
                assert!((got - exact).abs() < 1e-12 * exact, "dim {dim:?} k {k}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn interpolation_is_high_order() {
        let g = Arc::new(RadialGrid::cell_centered(Dim::R4, 10.0, 400).unwrap());
        let f = RadialProfile::from_fn(g.clone(), |r| (-r * r).exp());
        let pts: Vec<f64> = (0..50).map(|i| 0.013 + i as f64 * 0.11).collect();
        let vals = f.interpolate(Parity::Even, &pts);
        for (r, v) in pts.iter().zip(vals) {
            assert!((v - (-r * r).exp()).abs() < 1e-9, "r={r}");
        }
        let u = RadialProfile::from_fn(g, |r| r * (-r * r).exp());
        let vals = u.interpolate(Parity::Odd, &[0.001, 0.02]);
        assert!((vals[0] - 0.001 * (-1e-6f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn csv_round_trip() {
        let g = Arc::new(RadialGrid::cell_centered(Dim::R2, 5.0, 20).unwrap());
        let f = RadialProfile::from_fn(g.clone(), |r| r.sin());
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = RadialProfile::read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = Arc::new(RadialGrid::cell_centered(Dim::R2, 5.0, 20).unwrap());
        let b = Arc::new(RadialGrid::cell_centered(Dim::R2, 5.0, 21).unwrap());
        assert!(RadialProfile::zeros(a).add(&RadialProfile::zeros(b)).is_err());
    }
}
