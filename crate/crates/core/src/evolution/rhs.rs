//! Spatial discretizations of the `u`- and `v`-equations on cell-centered grids.
//!
//! Both are written as `f_tt = A(f) + B(f)·f_t² − σ f_t`, which is the exact
//! structure of either equation (the velocity enters only through `u_t²` or
//! `v_t²`). The leapfrog scheme relies on this to solve for the new level
//! node by node.
//!
//! The `u`-form is the Euler–Lagrange system of a discrete Lagrangian written in
//! `v = u/r`. Since `∫(u_r² + u²/r²) r dr = ∫ r³ v_r² dr`, the energy splits as
//!
//! ```text
//! E = ∫ Φ r³ v_t²/2 + ∫ r³ v_r²/2 + ∫ [S²(1 + G²) − v²] r/2,   S = sin u / r,  G = u_r = v + r v_r,
//! ```
//!
//! and each piece is discretized with cell volumes `Vᵢ = ∫ r³ dr` and edge fluxes
//! `r³ₑ Dₑv`. The semi-discrete energy is conserved exactly. The linear part is
//! second order up to the axis; the nonlinear part is second order away from it
//! and carries a relative `O(dr²/r²)` error in the cells next to it.
//!
//! The `v`-form is a direct finite-difference discretization of the semilinear
//! equation with the `h_i` coefficients.

use std::sync::Arc;

use super::state::{FieldState, Form};
use crate::coefficients::{CoefficientId, SeriesSwitch};
use crate::error::{Error, Result};
use crate::radial_spectral::{GridKind, RadialGrid, RadialProfile};

#[derive(Debug, Clone)]
pub(crate) struct Operator {
    form: Form,
    nonlinear: bool,
    dr: f64,
    r: Vec<f64>,
    /// `r_{i+1/2}`; the last edge joins node `N−1` to the Dirichlet node at `R`.
    edge: Vec<f64>,
    /// Cell volumes `∫ r³ dr`.
    vol: Vec<f64>,
    pub(crate) sponge: Vec<f64>,
    switch: SeriesSwitch,
}

/// Discrete energy of a `u`-form state, split as in the module notes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEnergy {
    pub kinetic: f64,
    /// `Σ dr r³ₑ (Dₑv)²/2`.
    pub dirichlet: f64,
    /// Discrete `∫ [S²(1 + G²) − v²] r/2 dr`.
    pub remainder: f64,
}

impl DiscreteEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.dirichlet + self.remainder
    }
}

impl Operator {
    pub(crate) fn new(form: Form, grid: &RadialGrid, nonlinear: bool, sponge: Option<f64>) -> Result<Self> {
        if grid.kind != GridKind::CellCentered {
            return Err(Error::GridMismatch("solver needs a cell-centered grid".into()));
        }
        if grid.dim != form.dim() {
            return Err(Error::GridMismatch(format!("{form:?} form on a {:?} grid", grid.dim)));
        }
        let n = grid.len();
        let dr = grid.spacing().expect("cell-centered grid has a spacing");
        let r = grid.nodes.clone();
        let edge: Vec<f64> = (0..n).map(|i| (i + 1) as f64 * dr).collect();
        let vol = (0..n)
            .map(|i| {
                let hi = (i + 1) as f64 * dr;
                let lo = i as f64 * dr;
                (hi.powi(4) - lo.powi(4)) / 4.0
            })
            .collect();
        let start = 0.9 * grid.cutoff;
        let sponge = match sponge {
            Some(s) => {
                r.iter().map(|&ri| if ri > start { s * ((ri - start) / (grid.cutoff - start)).powi(3) } else { 0.0 }).collect()
            }
            None => vec![0.0; n],
        };
        Ok(Self { form, nonlinear, dr, r, edge, vol, sponge, switch: SeriesSwitch::default() })
    }

    pub(crate) fn len(&self) -> usize {
        self.r.len()
    }

    /// Fills `a` and `b` so that `f_tt = a + b f_t²` (without the sponge).
    pub(crate) fn split(&self, f: &[f64], a: &mut [f64], b: &mut [f64]) {
        match self.form {
            Form::U => {
                let v: Vec<f64> = f.iter().zip(&self.r).map(|(u, r)| u / r).collect();
                self.split_lagrangian(&v, a, b);
                for i in 0..self.len() {
                    a[i] *= self.r[i];
                    b[i] /= self.r[i];
                }
            }
            Form::V => self.split_v(f, a, b),
        }
    }

    fn value(v: &[f64], i: isize) -> f64 {
        if i < 0 {
            v[(-i - 1) as usize]
        } else if (i as usize) < v.len() {
            v[i as usize]
        } else {
            0.0
        }
    }

    /// `(r³₊D₊v − r³₋D₋v)/Vᵢ`, with an even reflection at the axis and `v = 0` at `R`.
    fn laplacian(&self, v: &[f64], i: usize) -> (f64, f64) {
        let ii = i as isize;
        let d_plus = (Self::value(v, ii + 1) - v[i]) / self.dr;
        let d_minus = (v[i] - Self::value(v, ii - 1)) / self.dr;
        let hi = self.edge[i];
        let lo = hi - self.dr;
        ((hi.powi(3) * d_plus - lo.powi(3) * d_minus) / self.vol[i], 0.5 * (d_plus + d_minus))
    }

    /// `S = sin u / r` and `cos u` at each node.
    fn sines(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        v.iter()
            .zip(&self.r)
            .map(|(&vi, &r)| {
                let u = r * vi;
                let (sn, cs) = u.sin_cos();
                (if u.abs() < 1e-3 { vi * self.switch.sinc(u) } else { sn / r }, cs)
            })
            .unzip()
    }

    /// `Ĝₑ = v̄ₑ + rₑDₑv` and `q̂ₑ = (S²ᵢ + S²ᵢ₊₁)/2` on the edges.
    fn edge_terms(&self, v: &[f64], s: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        (0..n)
            .map(|e| {
                let (v1, s1) = if e + 1 < n { (v[e + 1], s[e + 1]) } else { (0.0, 0.0) };
                let g = 0.5 * (v[e] + v1) + self.edge[e] * (v1 - v[e]) / self.dr;
                (g, 0.5 * (s[e] * s[e] + s1 * s1))
            })
            .unzip()
    }

    /// Node weights `Vᵢ/rᵢ²` for `∫ F r dr` with `F = O(r²)`.
    fn node_weight(&self, i: usize) -> f64 {
        self.vol[i] / (self.r[i] * self.r[i])
    }

    /// Euler–Lagrange accelerations of the discrete `u`-Lagrangian, in the variable `v`.
    ///
    /// The nonlinear remainder is `Σᵢ ωᵢ(S²ᵢ − v²ᵢ)/2 + Σₑ dr rₑ q̂ₑ Ĝₑ²/2`; keeping `G`
    /// on the edges makes summation by parts exact, so the leading cubic terms
    /// cancel at every node as they do in the continuum.
    fn split_lagrangian(&self, v: &[f64], a: &mut [f64], b: &mut [f64]) {
        let n = self.len();
        let dr = self.dr;
        for i in 0..n {
            a[i] = self.laplacian(v, i).0;
            b[i] = 0.0;
        }
        if !self.nonlinear {
            return;
        }
        let (s, c) = self.sines(v);
        let (g, q) = self.edge_terms(v, &s);
        let mut grad: Vec<f64> = (0..n).map(|i| self.node_weight(i) * (s[i] * c[i] - v[i])).collect();
        for e in 0..n {
            let w = dr * self.edge[e];
            let k = self.edge[e] / dr;
            grad[e] += w * (s[e] * c[e] * g[e] * g[e] / 2.0 + q[e] * g[e] * (0.5 - k));
            if e + 1 < n {
                grad[e + 1] += w * (s[e + 1] * c[e + 1] * g[e] * g[e] / 2.0 + q[e] * g[e] * (0.5 + k));
            }
        }
        for i in 0..n {
            let phi = 1.0 + s[i] * s[i];
            a[i] = (a[i] * self.vol[i] - grad[i]) / (self.vol[i] * phi);
            b[i] = -s[i] * c[i] / phi;
        }
    }

    pub(crate) fn discrete_energy(&self, u: &[f64], ut: &[f64]) -> DiscreteEnergy {
        let n = self.len();
        let dr = self.dr;
        let v: Vec<f64> = u.iter().zip(&self.r).map(|(u, r)| u / r).collect();
        let (s, _) = self.sines(&v);
        let mut e = DiscreteEnergy { kinetic: 0.0, dirichlet: 0.0, remainder: 0.0 };
        for i in 0..n {
            let d = (Self::value(&v, i as isize + 1) - v[i]) / dr;
            e.dirichlet += dr * self.edge[i].powi(3) * d * d / 2.0;
            let vt = ut[i] / self.r[i];
            let phi = if self.nonlinear { 1.0 + s[i] * s[i] } else { 1.0 };
            e.kinetic += self.vol[i] * phi * vt * vt / 2.0;
        }
        if self.nonlinear {
            let (g, q) = self.edge_terms(&v, &s);
            for i in 0..n {
                e.remainder +=
                    self.node_weight(i) * (s[i] * s[i] - v[i] * v[i]) / 2.0 + dr * self.edge[i] * q[i] * g[i] * g[i] / 2.0;
            }
        }
        e
    }

    fn split_v(&self, v: &[f64], a: &mut [f64], b: &mut [f64]) {
        for i in 0..self.len() {
            let (lap, vr) = self.laplacian(v, i);
            if !self.nonlinear {
                a[i] = lap;
                b[i] = 0.0;
                continue;
            }
            let vi = v[i];
            let u = self.r[i] * vi;
            let phi = self.switch.phi_stable(vi, u);
            let h = |id| self.switch.h_tilde(id, u) / phi;
            let v2 = vi * vi;
            let v3 = v2 * vi;
            let h4 = h(CoefficientId::H4);
            let semilinear =
                h(CoefficientId::H1) * v3 * vr + h(CoefficientId::H2) * v3 + h(CoefficientId::H3) * v3 * v2 - h4 * vi * vr * vr;
            a[i] = lap - semilinear;
            b[i] = -h4 * vi;
        }
    }

    /// `f_tt` including the sponge term.
    pub(crate) fn accel(&self, f: &[f64], ft: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        self.split(f, out, scratch);
        for i in 0..self.len() {
            out[i] += scratch[i] * ft[i] * ft[i] - self.sponge[i] * ft[i];
        }
    }
}

fn evaluate(state: &FieldState, form: Form, what: &'static str) -> Result<RadialProfile> {
    if state.form != form {
        return Err(Error::Invalid(format!("{what} needs a {form:?}-form state")));
    }
    let op = Operator::new(form, state.grid(), true, None)?;
    let n = op.len();
    let mut out = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    op.accel(&state.f.samples, &state.f_t.samples, &mut out, &mut scratch);
    check_finite(what, state.grid(), &out)?;
    Ok(RadialProfile { grid: state.grid().clone(), samples: out })
}

pub(crate) fn check_finite(what: &'static str, grid: &Arc<RadialGrid>, values: &[f64]) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index, r: grid.nodes[index] }),
        None => Ok(()),
    }
}

/// `u_tt` of the quasilinear equation on a cell-centered ℝ² grid, with `u = 0` at `R`.
pub fn rhs_u(state: &FieldState) -> Result<RadialProfile> {
    evaluate(state, Form::U, "rhs_u")
}

/// `v_tt = v_rr + 3v_r/r − [h₁v³v_r + h₂v³ + h₃v⁵ + h₄v(v_t² − v_r²)]` on a cell-centered ℝ⁴ grid.
pub fn rhs_v(state: &FieldState) -> Result<RadialProfile> {
    evaluate(state, Form::V, "rhs_v")
}

/// Energy conserved by the semi-discrete `u`-form solver (sponge off).
pub fn discrete_energy(state: &FieldState, nonlinear: bool) -> Result<DiscreteEnergy> {
    if state.form != Form::U {
        return Err(Error::Invalid("discrete energy needs a U-form state".into()));
    }
    let op = Operator::new(Form::U, state.grid(), nonlinear, None)?;
    Ok(op.discrete_energy(&state.f.samples, &state.f_t.samples))
}
