//! Experiment configuration: one TOML file per run.
//!
//! Physical parameters (grid, horizon, amplitudes) have no defaults; a missing
//! field is reported with its dotted path.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use faddeev_core::diagnostics::{ProbeName, PROBE_MEMBERS, PROBE_SEED};
use faddeev_core::evolution::{DataFamily, DataParams, Form, Scheme, SolverConfig, Velocity};
use faddeev_core::radial_spectral::DyadicPartition;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    /// Seed for every random family; `--seed` overrides it.
    pub seed: Option<u64>,
    pub output: Option<OutputBlock>,
    pub grid: Option<GridBlock>,
    pub solver: Option<SolverBlock>,
    pub data: Option<DataBlock>,
    pub partition: Option<PartitionBlock>,
    pub norms: Option<NormsBlock>,
    pub verify: Option<VerifyBlock>,
    pub probe: Option<ProbeBlock>,
    pub hnorm: Option<HnormBlock>,
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: String,
}

/// Cell-centred radial grid, lengths in the unit of the equation (light speed 1).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub nodes: Option<usize>,
    /// Outer radius `R`.
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    /// Final time `T`.
    pub horizon: Option<f64>,
    /// `dt/dr`.
    pub cfl: Option<f64>,
    pub scheme: Option<Scheme>,
    /// `u` (quasilinear, on ℝ²) or `v` (semilinear, on ℝ⁴).
    pub form: Option<Form>,
    pub snapshot_stride: Option<usize>,
    /// Damping strength of the outer sponge layer; absent means a hard wall.
    pub sponge: Option<f64>,
    /// `false` evolves the free wave equation.
    pub nonlinear: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataBlock {
    pub family: Option<DataFamily>,
    pub delta: Option<f64>,
    pub width: Option<f64>,
    /// Shell radius, `two_bump` only.
    pub center: Option<f64>,
    pub velocity: Option<Velocity>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionBlock {
    pub k_min: i32,
    pub k_max: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovEntry {
    pub s: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsBlock {
    /// `Ḃ^s_{p,1}(ℝ⁴)` norms of `v₀`.
    pub besov: Vec<BesovEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyCheck {
    Nullform,
    Scaling,
    UvConsistency,
    RhsU,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    pub checks: Vec<VerifyCheck>,
    /// Resolutions per convergence study (successive halvings of the step).
    pub levels: usize,
    /// Dilations for the scaling check.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    /// Coarsest `(dr, dt)` and evaluation time of the null-form stencil.
    pub dr: Option<f64>,
    pub dt: Option<f64>,
    pub time: Option<f64>,
    /// Coarsest grid of the `u`/`v` cross-checks.
    pub nodes: Option<usize>,
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeBlock {
    pub names: Vec<String>,
    pub members: Option<usize>,
    /// Amplitudes of the `nonlin` trajectories.
    pub nonlin_deltas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HnormProbe {
    Strichartz,
    Rv,
    Trilinear,
    Bilinear,
    Sin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnormBlock {
    pub probes: Vec<HnormProbe>,
    /// Free-wave bands `2^k` for the Strichartz probes.
    pub octaves: Option<[i32; 2]>,
    /// Strichartz window `T = R`.
    pub window: Option<f64>,
    pub members: Option<usize>,
    /// `(q, r)` pairs; `r = inf` is accepted.
    pub pairs: Option<Vec<[f64; 2]>>,
    pub rv_q: Option<f64>,
    /// Largest trilinear separation `2^classes`.
    pub classes: Option<u32>,
    pub per_class: Option<usize>,
    pub sin_alpha: Option<f64>,
    pub sin_amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub deltas: Vec<f64>,
}

fn missing(field: &str, command: &str) -> CliError {
    CliError::Config(format!("{field}: required by `{command}`"))
}

fn invalid(field: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {why}"))
}

fn positive(field: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string() + &span_hint(&e)))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(&canon))
    }

    pub fn seed_or(&self, fallback: u64) -> u64 {
        self.seed.unwrap_or(fallback)
    }

    pub fn solver(&self, command: &str) -> Result<(SolverConfig, Form), CliError> {
        let g = self.grid.as_ref().ok_or_else(|| missing("grid", command))?;
        let s = self.solver.as_ref().ok_or_else(|| missing("solver", command))?;
        let nodes = g.nodes.ok_or_else(|| missing("grid.nodes", command))?;
        if nodes < 8 {
            return Err(invalid("grid.nodes", format!("need at least 8, got {nodes}")));
        }
        let cutoff = positive("grid.cutoff", g.cutoff.ok_or_else(|| missing("grid.cutoff", command))?)?;
        let horizon = s.horizon.ok_or_else(|| missing("solver.horizon", command))?;
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(invalid("solver.horizon", format!("must be finite and ≥ 0, got {horizon}")));
        }
        let cfl = positive("solver.cfl", s.cfl.ok_or_else(|| missing("solver.cfl", command))?)?;
        let scheme = s.scheme.ok_or_else(|| missing("solver.scheme", command))?;
        let form = s.form.ok_or_else(|| missing("solver.form", command))?;
        let stride = s.snapshot_stride.ok_or_else(|| missing("solver.snapshot_stride", command))?;
        if stride == 0 {
            return Err(invalid("solver.snapshot_stride", "must be at least 1"));
        }
        let mut cfg =
            SolverConfig::new(nodes, cutoff, horizon, cfl, scheme).map_err(|e| invalid("solver", e))?.with_stride(stride);
        if let Some(k) = s.sponge {
            cfg = cfg.with_sponge(positive("solver.sponge", k)?);
        }
        if s.nonlinear == Some(false) {
            cfg = cfg.linear();
        }
        Ok((cfg, form))
    }

    pub fn data(&self, command: &str) -> Result<(DataFamily, f64, DataParams), CliError> {
        let d = self.data.as_ref().ok_or_else(|| missing("data", command))?;
        let family = d.family.ok_or_else(|| missing("data.family", command))?;
        let delta = d.delta.ok_or_else(|| missing("data.delta", command))?;
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(invalid("data.delta", format!("must be finite and ≥ 0, got {delta}")));
        }
        let width = positive("data.width", d.width.ok_or_else(|| missing("data.width", command))?)?;
        let center = match (family, d.center) {
            (DataFamily::TwoBump, None) => return Err(missing("data.center", "two_bump data")),
            (_, c) => c.unwrap_or(0.0),
        };
        let velocity = d.velocity.ok_or_else(|| missing("data.velocity", command))?;
        let scale = positive("data.scale", d.scale.unwrap_or(1.0))?;
        Ok((family, delta, DataParams { width, center, velocity, scale }))
    }

    pub fn partition(&self) -> Result<DyadicPartition, CliError> {
        match &self.partition {
            None => Ok(DyadicPartition::default()),
            Some(p) => DyadicPartition::new(p.k_min, p.k_max).map_err(|e| invalid("partition", e)),
        }
    }

    pub fn sweep_deltas(&self) -> Result<Vec<f64>, CliError> {
        let s = self.sweep.as_ref().ok_or_else(|| missing("sweep", "sweep"))?;
        if s.deltas.is_empty() {
            return Err(invalid("sweep.deltas", "must list at least one amplitude"));
        }
        for (i, d) in s.deltas.iter().enumerate() {
            if !(*d >= 0.0 && d.is_finite()) {
                return Err(invalid(&format!("sweep.deltas[{i}]"), format!("must be finite and ≥ 0, got {d}")));
            }
        }
        Ok(s.deltas.clone())
    }

    pub fn verify(&self) -> Result<&VerifyBlock, CliError> {
        let v = self.verify.as_ref().ok_or_else(|| missing("verify", "verify"))?;
        if v.levels < 2 {
            return Err(invalid("verify.levels", "a convergence order needs at least 2 levels"));
        }
        if v.checks.is_empty() {
            return Err(invalid("verify.checks", "must list at least one check"));
        }
        if v.checks.contains(&VerifyCheck::Scaling) && v.lambdas.is_empty() {
            return Err(missing("verify.lambdas", "the scaling check"));
        }
        Ok(v)
    }

    pub fn probes(&self) -> Result<(Vec<ProbeName>, usize), CliError> {
        let p = self.probe.as_ref().ok_or_else(|| missing("probe", "probe"))?;
        if p.names.is_empty() {
            return Err(invalid("probe.names", "must list at least one probe"));
        }
        let names = p
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| ProbeName::parse(n).map_err(|e| invalid(&format!("probe.names[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        let members = p.members.unwrap_or(PROBE_MEMBERS);
        if members == 0 {
            return Err(invalid("probe.members", "must be at least 1"));
        }
        Ok((names, members))
    }

    pub fn hnorm(&self) -> Result<&HnormBlock, CliError> {
        let h = self.hnorm.as_ref().ok_or_else(|| missing("hnorm", "hnorm"))?;
        if h.probes.is_empty() {
            return Err(invalid("hnorm.probes", "must list at least one probe"));
        }
        if let Some([lo, hi]) = h.octaves {
            if lo > hi {
                return Err(invalid("hnorm.octaves", format!("empty range [{lo}, {hi}]")));
            }
        }
        if let Some(w) = h.window {
            positive("hnorm.window", w)?;
        }
        Ok(h)
    }

    pub fn probe_seed(&self) -> u64 {
        self.seed_or(PROBE_SEED)
    }
}

fn span_hint(e: &toml::de::Error) -> String {
    match e.span() {
        Some(s) => format!(" (at byte {})", s.start),
        None => String::new(),
    }
}
