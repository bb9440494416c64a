use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial_spectral::{Dim, GridKind, RadialGrid, RadialProfile};

/// Largest admissible `dt/dr`.
pub const CFL_LIMIT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// The angle `u` on ℝ².
    U,
    /// `v = u/r` on ℝ⁴.
    V,
}

impl Form {
    pub fn dim(self) -> Dim {
        match self {
            Form::U => Dim::R2,
            Form::V => Dim::R4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub form: Form,
    pub f: RadialProfile,
    pub f_t: RadialProfile,
}

impl FieldState {
    pub fn new(t: f64, form: Form, f: RadialProfile, f_t: RadialProfile) -> Result<Self> {
        if f.grid.dim != form.dim() {
            return Err(Error::GridMismatch(format!("{form:?} state needs a {:?} grid", form.dim())));
        }
        if !(Arc::ptr_eq(&f.grid, &f_t.grid) || f.grid.same_as(&f_t.grid)) {
            return Err(Error::GridMismatch("field and velocity live on different grids".into()));
        }
        Ok(Self { t, form, f, f_t })
    }

    pub fn zeros(form: Form, grid: Arc<RadialGrid>) -> Result<Self> {
        Self::new(0.0, form, RadialProfile::zeros(grid.clone()), RadialProfile::zeros(grid))
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.f.grid
    }

    pub fn max_abs(&self) -> (f64, f64) {
        (self.f.max_abs(), self.f_t.max_abs())
    }

    /// `u = r v` on the same nodes, or `v = u / r`.
    pub fn convert(&self, target: Form) -> Result<Self> {
        if target == self.form {
            return Ok(self.clone());
        }
        let grid = companion_grid(self.grid(), target.dim())?;
        let scale: Vec<f64> = match target {
            Form::U => grid.nodes.clone(),
            Form::V => grid.nodes.iter().map(|r| 1.0 / r).collect(),
        };
        let apply = |p: &RadialProfile| RadialProfile {
            grid: grid.clone(),
            samples: p.samples.iter().zip(&scale).map(|(a, b)| a * b).collect(),
        };
        Self::new(self.t, target, apply(&self.f), apply(&self.f_t))
    }
}

/// The grid with the same nodes as `grid` but quadrature weights for `dim`.
pub fn companion_grid(grid: &Arc<RadialGrid>, dim: Dim) -> Result<Arc<RadialGrid>> {
    if grid.dim == dim {
        return Ok(grid.clone());
    }
    match grid.kind {
        GridKind::CellCentered => Ok(Arc::new(RadialGrid::cell_centered(dim, grid.cutoff, grid.len())?)),
        GridKind::FourierBessel => {
            let weights =
                grid.nodes.iter().zip(&grid.weights).map(|(r, w)| w * r.powi(dim.n() as i32 - grid.dim.n() as i32)).collect();
            Ok(Arc::new(RadialGrid { dim, weights, ..(**grid).clone() }))
        }
        GridKind::Frequency => Err(Error::GridMismatch("frequency grids carry no field".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Leapfrog,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nodes: usize,
    pub dr: f64,
    pub dt: f64,
    pub cutoff: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    /// Realised `dt/dr`; never above the requested value.
    pub cfl: f64,
    pub steps: usize,
    pub snapshot_stride: usize,
    pub ceiling_f: f64,
    pub ceiling_ft: f64,
    /// Peak damping rate of the cubic sponge over the outer 10% of the grid.
    pub sponge: Option<f64>,
    pub nonlinear: bool,
}

impl SolverConfig {
    /// Cell-centered grid of `nodes` points on `(0, cutoff)` advanced to `horizon`
    /// with `dt ≤ cfl·dr` chosen so that an integer number of steps lands on `horizon`.
    pub fn new(nodes: usize, cutoff: f64, horizon: f64, cfl: f64, scheme: Scheme) -> Result<Self> {
        if nodes < 8 || !(cutoff > 0.0) || !(horizon >= 0.0) || !(cfl > 0.0) {
            return Err(Error::Invalid(format!("bad solver parameters: nodes={nodes} R={cutoff} T={horizon} cfl={cfl}")));
        }
        let dr = cutoff / (nodes as f64 + 0.5);
        let steps = (horizon / (cfl * dr)).ceil().max(1.0) as usize;
        let dt = horizon / steps as f64;
        let dt = if dt == 0.0 { cfl * dr } else { dt };
        Ok(Self {
            nodes,
            dr,
            dt,
            cutoff,
            horizon,
            scheme,
            cfl: dt / dr,
            steps: if horizon == 0.0 { 0 } else { steps },
            snapshot_stride: 1,
            ceiling_f: 1e3,
            ceiling_ft: 1e6,
            sponge: None,
            nonlinear: true,
        })
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride.max(1);
        self
    }

    pub fn with_sponge(mut self, strength: f64) -> Self {
        self.sponge = Some(strength);
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    /// Overrides the time step, e.g. to probe the CFL guard.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self.cfl = dt / self.dr;
        self.steps = (self.horizon / dt).round() as usize;
        self
    }

    pub fn check_cfl(&self) -> Result<()> {
        if self.cfl > CFL_LIMIT + 1e-12 {
            return Err(Error::Cfl { cfl: self.cfl, limit: CFL_LIMIT });
        }
        Ok(())
    }

    pub fn grid(&self, form: Form) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::cell_centered(form.dim(), self.cutoff, self.nodes)?))
    }

    /// Whether signals from data supported in `r ≤ support` stay clear of the cutoff.
    pub fn causally_closed(&self, support: f64) -> bool {
        self.sponge.is_some() || self.horizon <= self.cutoff - support
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Completed,
    BlowupDetected,
    CflViolation,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub snapshots: Vec<FieldState>,
    pub status: Status,
}

impl Trajectory {
    pub fn last(&self) -> &FieldState {
        self.snapshots.last().expect("trajectory always holds the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}
