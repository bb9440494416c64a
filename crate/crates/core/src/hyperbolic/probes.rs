//! Empirical Strichartz, trilinear, bilinear and composition probes on packet families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{st_transform, SpacetimeField};
use super::norms::{composite_x_norm, composite_x_norm_with, f_norm_surrogate};
use super::packets::{rng, FreeWave, Packet, SpacetimeGrid};
use crate::error::{Error, Result};
use crate::radial_spectral::{Dim, Parity, RadialProfile};
use crate::report::{least_squares_slope, RatioReport};

/// Strichartz bands `λ = 2^{−3} … 2^{3}`.
pub const STRICHARTZ_OCTAVES: (i32, i32) = (-3, 3);

/// Unresolved mass accepted for `r v w`, whose odd factor `r` leaves a slowly decaying spectrum.
pub const BILINEAR_TAIL_TOLERANCE: f64 = 1e-3;

/// Largest band separation `λ/ν = 2^6` in the trilinear family.
pub const TRILINEAR_CLASSES: u32 = 6;

/// Triples per separation class in the reference family.
pub const TRILINEAR_PER_CLASS: usize = 15;

/// Seed of the reference trilinear family.
pub const TRILINEAR_SEED: u64 = 2024;

/// Largest trilinear ratio over the reference family (4.755e-4), plus 2%.
pub const TRILINEAR_REGRESSION_CONSTANT: f64 = 4.85e-4;

/// Wave-admissible pair on ℝ⁴ in the radial range: `2 ≤ q, r ≤ ∞` and either
/// `2/q + 3/r ≤ 3/2` or `1/q + 3/r < 3/2`.
pub fn check_admissible(q: f64, r: f64) -> Result<()> {
    let bad = |violated: &str| Err(Error::Inadmissible { q, r, violated: violated.into() });
    if !(q >= 2.0) || !(r >= 2.0) {
        return bad("2 ≤ q, r ≤ ∞");
    }
    let standard = 2.0 / q + 3.0 / r <= 1.5 + 1e-12;
    let radial = 1.0 / q + 3.0 / r < 1.5;
    if standard || radial {
        Ok(())
    } else {
        bad("1/q + 3/r < 3/2")
    }
}

/// Default Strichartz window; the radius matches it.
pub const STRICHARTZ_WINDOW: f64 = 128.0;

/// The single grid carrying every band `2^k`, `k ≤ octaves.1`, with `T = R = window`.
pub fn strichartz_grid(octaves: (i32, i32), window: f64) -> Result<SpacetimeGrid> {
    let top = 2f64.powi(octaves.1);
    SpacetimeGrid::for_bandwidth(window, window, 1.1 * 2f64.sqrt() * top)
}

/// `members` random free-wave shapes, each placed at every band `2^k`, `k ∈ octaves`.
pub fn strichartz_family(octaves: (i32, i32), members: usize, seed: u64) -> Vec<FreeWave> {
    let mut rng = rng(seed);
    let shapes: Vec<FreeWave> = (0..members).map(|_| FreeWave::draw(&mut rng, 1.0)).collect();
    (octaves.0..=octaves.1).flat_map(|k| shapes.iter().map(move |s| FreeWave { lambda: 2f64.powi(k), ..*s })).collect()
}

/// A free-wave band together with its `F_λ` surrogate.
#[derive(Debug, Clone)]
pub struct FreeWaveSample {
    pub wave: FreeWave,
    pub field: SpacetimeField,
    pub f: f64,
}

pub fn free_wave_samples(family: &[FreeWave], st: &SpacetimeGrid) -> Result<Vec<FreeWaveSample>> {
    family
        .par_iter()
        .map(|&wave| {
            let field = wave.field(st)?;
            let f = f_norm_surrogate(&st_transform(&field)?, wave.lambda).0;
            Ok(FreeWaveSample { wave, field, f })
        })
        .collect()
}

/// `λ^{4/r + 1/q − 2}‖v‖_{L^qL^r} / F_λ(v)` over free-wave bands.
pub fn strichartz_probe(q: f64, r: f64, samples: &[FreeWaveSample]) -> Result<RatioReport> {
    check_admissible(q, r)?;
    let rows = samples.iter().map(|s| {
        let lambda = s.wave.lambda;
        (lambda, lambda.powf(4.0 / r + 1.0 / q - 2.0) * mixed_norm(&s.field, q, r), s.f)
    });
    Ok(RatioReport::from_pairs(&format!("λ^(4/r+1/q-2) ‖v‖_L{q}L{r}"), "F_λ surrogate", rows).with_loglog_slope())
}

/// `‖r v‖_{L^qL^∞} / F_λ(v)`; the slope in `λ` is `1 − 1/q`.
pub fn rv_probe(q: f64, samples: &[FreeWaveSample]) -> Result<RatioReport> {
    if !(q > 2.0) {
        return Err(Error::Inadmissible { q, r: f64::INFINITY, violated: "2 < q ≤ ∞".into() });
    }
    let rows = samples.iter().map(|s| (s.wave.lambda, weighted_mixed_norm(&s.field, q), s.f));
    Ok(RatioReport::from_pairs(&format!("‖r v‖_L{q}Linf"), "F_λ surrogate", rows).with_loglog_slope())
}

fn lebesgue_in_time(values: &[f64], q: f64, dt: f64) -> f64 {
    if q.is_infinite() {
        values.iter().fold(0.0f64, |m, x| m.max(*x))
    } else {
        (dt * values.iter().map(|x| x.powf(q)).sum::<f64>()).powf(1.0 / q)
    }
}

/// `‖w‖_{L^q_t L^r_x}` over the interior slices.
pub fn mixed_norm(w: &SpacetimeField, q: f64, r: f64) -> f64 {
    let weights = &w.grid.space.weights;
    let per_slice: Vec<f64> = w
        .interior()
        .map(|j| {
            let row = w.row(j);
            if r.is_infinite() {
                row.iter().fold(0.0f64, |m, x| m.max(x.abs()))
            } else {
                (Dim::R4.sphere_area() * row.iter().zip(weights).map(|(x, q)| q * x.abs().powf(r)).sum::<f64>()).powf(1.0 / r)
            }
        })
        .collect();
    lebesgue_in_time(&per_slice, q, w.dt)
}

/// `‖r w‖_{L^q_t L^∞_x}` over the interior, with the spatial sup refined between nodes.
pub fn weighted_mixed_norm(w: &SpacetimeField, q: f64) -> f64 {
    const REFINE: usize = 33;
    let nodes = &w.grid.space.nodes;
    let per_slice: Vec<f64> = w
        .interior()
        .map(|j| {
            let row = w.row(j);
            let top = (0..row.len()).max_by(|&a, &b| (nodes[a] * row[a].abs()).total_cmp(&(nodes[b] * row[b].abs()))).unwrap();
            let lo = if top == 0 { 0.0 } else { nodes[top - 1] };
            let hi = nodes.get(top + 1).copied().unwrap_or(w.grid.cutoff());
            let radii: Vec<f64> = (0..REFINE).map(|k| lo + (hi - lo) * k as f64 / (REFINE - 1) as f64).collect();
            let profile = RadialProfile { grid: w.grid.space.clone(), samples: row.to_vec() };
            let values = profile.interpolate(Parity::Even, &radii);
            radii.iter().zip(values).fold(nodes[top] * row[top].abs(), |m, (r, v)| m.max(r * v.abs()))
        })
        .collect();
    lebesgue_in_time(&per_slice, q, w.dt)
}

/// Three packets at frequencies `ν ≤ μ ≤ λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrilinearTriple {
    pub separation: f64,
    pub packets: [Packet; 3],
}

impl TrilinearTriple {
    /// Window `16/ν`, radius `0.6` of the window, bandwidth for the triple product.
    pub fn grid(&self) -> Result<SpacetimeGrid> {
        let [u, v, w] = self.packets;
        let nu = u.lambda.min(v.lambda).min(w.lambda);
        let window = 16.0 / nu;
        SpacetimeGrid::for_bandwidth(window, 0.6 * window, 1.1 * 2.0 * (u.lambda + v.lambda + w.lambda))
    }
}

fn kappa_range(nu: f64, lambda: f64) -> (f64, f64) {
    let lo = (nu / lambda).max(1.0 / 16.0);
    (lo, (2.0 * lo).max(1.0))
}

/// `per_class` random triples for each separation `λ/ν = 2^k`, `k ≤ classes`,
/// with `ν = 2^{−⌈k/2⌉}` and `μ` a random dyadic in `[ν, λ]`.
pub fn trilinear_family(classes: u32, per_class: usize, seed: u64) -> Vec<TrilinearTriple> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for k in 0..=classes {
        let nu = 2f64.powi(-((k as i32 + 1) / 2));
        let lambda = nu * 2f64.powi(k as i32);
        for _ in 0..per_class {
            let mu = nu * 2f64.powi(rand::Rng::gen_range(&mut rng, 0..=k as i32));
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, f: f64| {
                let (lo, hi) = kappa_range(nu, f);
                Packet::draw(rng, f, lo, hi)
            };
            let packets = [draw(&mut rng, nu), draw(&mut rng, mu), draw(&mut rng, lambda)];
            out.push(TrilinearTriple { separation: lambda / nu, packets });
        }
    }
    out
}

/// `X(r²uvw) / (X(u) X(v) X(w))` for the composite `F ∩ |∇|F` surrogate, or `None` when a factor vanishes.
pub fn trilinear_ratio(u: &SpacetimeField, v: &SpacetimeField, w: &SpacetimeField) -> Result<Option<f64>> {
    let xs = [composite_x_norm(u)?.x, composite_x_norm(v)?.x, composite_x_norm(w)?.x];
    if xs.iter().any(|x| *x == 0.0) {
        return Ok(None);
    }
    let product = u.mul(v)?.mul(w)?.map(|_, r, x| r * r * x)?;
    Ok(Some(composite_x_norm(&product)?.x / (xs[0] * xs[1] * xs[2])))
}

/// Trilinear ratios over a family, with the slope of the per-class maximum against the separation.
pub fn trilinear_probe(family: &[TrilinearTriple]) -> Result<RatioReport> {
    let rows = family
        .par_iter()
        .map(|t| {
            let st = t.grid()?;
            let fields = t.packets.iter().map(|p| p.field(&st)).collect::<Result<Vec<_>>>()?;
            let ratio = trilinear_ratio(&fields[0], &fields[1], &fields[2])?;
            Ok(match ratio {
                Some(r) => (t.separation, r, 1.0),
                None => (t.separation, 0.0, 0.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep =
        RatioReport::from_pairs("X(r² u v w)", "X(u) X(v) X(w)", rows).with_regression_constant(TRILINEAR_REGRESSION_CONSTANT);
    rep.loglog_slope = class_max_slope(&rep.parameters, &rep.ratios);
    Ok(rep)
}

/// Least-squares slope of `ln max ratio` per parameter value against `ln parameter`.
pub fn class_max_slope(params: &[f64], ratios: &[f64]) -> Option<f64> {
    let mut classes: Vec<(f64, f64)> = Vec::new();
    for (&p, &r) in params.iter().zip(ratios) {
        match classes.iter_mut().find(|c| c.0 == p) {
            Some(c) => c.1 = c.1.max(r),
            None => classes.push((p, r)),
        }
    }
    let xs: Vec<f64> = classes.iter().map(|c| c.0.ln()).collect();
    let ys: Vec<f64> = classes.iter().map(|c| c.1.ln()).collect();
    least_squares_slope(&xs, &ys)
}

/// `X(r v w) / (X(v) X(w))` for the `μ` and `λ` members of each triple; reported without a bound.
pub fn bilinear_probe(family: &[TrilinearTriple]) -> Result<RatioReport> {
    let rows = family
        .par_iter()
        .map(|t| {
            let st = t.grid()?;
            let v = t.packets[1].field(&st)?;
            let w = t.packets[2].field(&st)?;
            let (xv, xw) = (composite_x_norm(&v)?.x, composite_x_norm(&w)?.x);
            // r = |x| is not smooth at the origin, so the product has an algebraic spectral tail
            let product = v.mul(&w)?.map(|_, r, x| r * x)?;
            Ok((t.separation, composite_x_norm_with(&product, BILINEAR_TAIL_TOLERANCE)?.x, xv * xw))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = RatioReport::from_pairs("X(r v w)", "X(v) X(w)", rows);
    rep.loglog_slope = class_max_slope(&rep.parameters, &rep.ratios);
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinCompositionReport {
    pub alpha: f64,
    /// `X(sin(α r v)/r) / (|α| X(v))`, parameter `X(v)`.
    pub ratios: RatioReport,
    /// `max_v (X(r^{2j} v^{2j+1}) / X(v)^{2j+1})^{1/j}` for `j = 1, 2`.
    pub chain: [f64; 2],
    /// Largest chain constant: the geometric growth rate of the odd-power series.
    pub growth: f64,
}

/// Small packets on a grid resolving fifth powers, scaled to `X(v) = amplitude`.
pub fn sin_family(members: usize, amplitude: f64, seed: u64) -> Result<Vec<SpacetimeField>> {
    let mut rng = rng(seed);
    let st = SpacetimeGrid::for_bandwidth(32.0, 20.0, 1.1 * 2.0 * 5.0)?;
    (0..members)
        .map(|i| {
            let lambda = if i % 2 == 0 { 1.0 } else { 0.5 };
            let (lo, hi) = kappa_range(0.5, lambda);
            let f = Packet::draw(&mut rng, lambda, lo, hi).field(&st)?;
            let x = composite_x_norm(&f)?.x;
            Ok(f.scaled(amplitude / x))
        })
        .collect()
}

/// `sin(α r v)/r` against `α v`, and the odd-power chain constants.
pub fn sin_composition_probe(family: &[SpacetimeField], alpha: f64) -> Result<SinCompositionReport> {
    let rows = family
        .par_iter()
        .map(|v| {
            let xv = composite_x_norm(v)?.x;
            if xv == 0.0 {
                return Ok(None);
            }
            if alpha.abs() * xv > 1.0 {
                return Err(Error::Domain(format!(
                    "|α| X(v) = {:.3} exceeds 1; the sine series is not controlled",
                    alpha.abs() * xv
                )));
            }
            let s = v.map(|_, r, x| (alpha * r * x).sin() / r)?;
            let lhs = composite_x_norm(&s)?.x;
            let mut chain = [0.0; 2];
            for (j, c) in chain.iter_mut().enumerate() {
                let p = 2 * (j + 1) as i32;
                let term = v.map(|_, r, x| r.powi(p) * x.powi(p + 1))?;
                *c = (composite_x_norm(&term)?.x / xv.powi(p + 1)).powf(1.0 / (j + 1) as f64);
            }
            Ok(Some((xv, lhs, alpha.abs() * xv, chain)))
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<_> = rows.into_iter().flatten().collect();
    let mut chain = [0.0f64; 2];
    for r in &rows {
        chain[0] = chain[0].max(r.3[0]);
        chain[1] = chain[1].max(r.3[1]);
    }
    let mut ratios = RatioReport::from_pairs("X(sin(α r v)/r)", "|α| X(v)", rows.iter().map(|r| (r.0, r.1, r.2)));
    ratios.skipped += skipped;
    Ok(SinCompositionReport { alpha, ratios, chain, growth: chain[0].max(chain[1]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(check_admissible(f64::INFINITY, 2.0).is_ok());
        assert!(check_admissible(2.0, 6.0).is_ok());
        assert!(check_admissible(4.0, f64::INFINITY).is_ok());
        assert!(check_admissible(2.0, 2.0).is_err());
        assert!(check_admissible(1.5, 10.0).is_err());
        assert!(matches!(check_admissible(2.0, 3.0), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn strichartz_small_family() {
        let st = strichartz_grid(STRICHARTZ_OCTAVES, STRICHARTZ_WINDOW).unwrap();
        let samples = free_wave_samples(&strichartz_family(STRICHARTZ_OCTAVES, 1, 3), &st).unwrap();
        let energy = strichartz_probe(f64::INFINITY, 2.0, &samples).unwrap();
        assert!(energy.min > 0.99 && energy.max < 1.01, "{energy:?}");
        let scaled = strichartz_probe(2.0, 6.0, &samples).unwrap();
        assert!(scaled.loglog_slope.unwrap().abs() < 0.1, "{scaled:?}");
        let rv = rv_probe(4.0, &samples).unwrap();
        assert!((rv.loglog_slope.unwrap() - 0.75).abs() < 0.05, "{rv:?}");
        assert!(rv_probe(2.0, &samples).is_err());
    }

    #[test]
    fn trilinear_ratio_is_symmetric_and_vanishes_cleanly() {
        let t = trilinear_family(TRILINEAR_CLASSES, 1, 11)[2];
        let st = t.grid().unwrap();
        let f: Vec<_> = t.packets.iter().map(|p| p.field(&st).unwrap()).collect();
        let a = trilinear_ratio(&f[0], &f[1], &f[2]).unwrap().unwrap();
        let b = trilinear_ratio(&f[2], &f[0], &f[1]).unwrap().unwrap();
        assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
        assert!(a > 0.0 && a < TRILINEAR_REGRESSION_CONSTANT);
        let zero = f[0].scaled(0.0);
        assert_eq!(trilinear_ratio(&zero, &f[1], &f[2]).unwrap(), None);
    }

    #[test]
    fn family_shape() {
        let fam = trilinear_family(TRILINEAR_CLASSES, 2, 5);
        assert_eq!(fam.len(), 2 * (TRILINEAR_CLASSES as usize + 1));
        for t in &fam {
            let [u, v, w] = t.packets;
            assert!(u.lambda <= v.lambda && v.lambda <= w.lambda);
            assert_eq!(w.lambda / u.lambda, t.separation);
        }
        assert_eq!(fam, trilinear_family(TRILINEAR_CLASSES, 2, 5));
    }

    #[test]
    fn class_maxima() {
        let params = [1.0, 1.0, 2.0, 2.0, 4.0];
        let ratios = [0.5, 1.0, 2.0, 0.1, 4.0];
        assert!((class_max_slope(&params, &ratios).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(class_max_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn bilinear_runs() {
        let fam: Vec<_> = trilinear_family(TRILINEAR_CLASSES, 1, 2).into_iter().take(3).collect();
        let rep = bilinear_probe(&fam).unwrap();
        assert_eq!(rep.ratios.len(), 3);
        assert!(rep.ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    }

    #[test]
    fn sin_matches_its_linearisation() {
        let fam = sin_family(2, 1e-2, 4).unwrap();
        let rep = sin_composition_probe(&fam, 1.0).unwrap();
        assert!(rep.ratios.ratios.iter().all(|r| (r - 1.0).abs() < 1e-3), "{:?}", rep.ratios.ratios);
        assert!(rep.growth.is_finite() && rep.growth > 0.0);
        assert!(sin_composition_probe(&fam, 2.0).unwrap().ratios.max.is_finite());
        assert!(matches!(sin_composition_probe(&fam, 1e3), Err(Error::Domain(_))));
    }
}
