//! Cross-checks of the two spatial discretizations on manufactured fields.

use std::sync::Arc;

use super::scaling::{meq_acceleration, AnalyticField};
use crate::error::Result;
use crate::evolution::{rhs_u, rhs_v, FieldState, Form};
use crate::radial_spectral::{RadialGrid, RadialProfile};
use crate::report::ConvergenceReport;

fn sampled(field: &dyn AnalyticField, form: Form, cutoff: f64, nodes: usize) -> Result<FieldState> {
    let g = Arc::new(RadialGrid::cell_centered(form.dim(), cutoff, nodes)?);
    let scale = |r: f64| if form == Form::U { 1.0 } else { 1.0 / r };
    let f = RadialProfile::from_fn(g.clone(), |r| field.jet(0.0, r).u * scale(r));
    let ft = RadialProfile::from_fn(g, |r| field.jet(0.0, r).u_t * scale(r));
    FieldState::new(0.0, form, f, ft)
}

/// Radius below which the cross-checks are not taken; the nonlinear `u`-form
/// terms are only first order in the cells next to the axis.
pub const AXIS_EXCLUSION: f64 = 0.5;

/// `max |rhs_u − r·rhs_v|` over nodes with `r ≥ r_min` at `t = 0`, for `nodes`
/// and its successive doublings.
pub fn uv_consistency(
    field: &dyn AnalyticField,
    cutoff: f64,
    nodes: usize,
    levels: usize,
    r_min: f64,
) -> Result<ConvergenceReport> {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..levels {
        let n = nodes << k;
        let u = sampled(field, Form::U, cutoff, n)?;
        let v = sampled(field, Form::V, cutoff, n)?;
        let au = rhs_u(&u)?;
        let av = rhs_v(&v)?;
        let err = au
            .samples
            .iter()
            .zip(&av.samples)
            .zip(u.f.nodes())
            .filter(|(_, &r)| r >= r_min)
            .map(|((a, b), r)| (a - r * b).abs())
            .fold(0.0, f64::max);
        steps.push(cutoff / (n as f64 + 0.5));
        errors.push(err);
    }
    Ok(ConvergenceReport::new(format!("u/v consistency, {}", field.label()), steps, errors))
}

/// `max |rhs_u − u_tt|` over `r ≥ r_min` against the exact acceleration of the quasilinear equation.
pub fn rhs_u_convergence(
    field: &dyn AnalyticField,
    cutoff: f64,
    nodes: usize,
    levels: usize,
    r_min: f64,
) -> Result<ConvergenceReport> {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..levels {
        let n = nodes << k;
        let u = sampled(field, Form::U, cutoff, n)?;
        let a = rhs_u(&u)?;
        let err = a
            .samples
            .iter()
            .zip(u.f.nodes())
            .filter(|(_, &r)| r >= r_min)
            .map(|(x, &r)| (x - meq_acceleration(&field.jet(0.0, r), r)).abs())
            .fold(0.0, f64::max);
        steps.push(cutoff / (n as f64 + 0.5));
        errors.push(err);
    }
    Ok(ConvergenceReport::new(format!("rhs_u vs exact, {}", field.label()), steps, errors))
}

/// The manufactured fields used by the cross-checks.
pub fn consistency_fields() -> Vec<Box<dyn AnalyticField>> {
    use super::scaling::{GaussField, SeparableField};
    vec![
        Box::new(GaussField { amplitude: 0.8, width: 1.2 }),
        Box::new(SeparableField { amplitude: 0.5, width: 1.0, omega: 1.0, phase: 0.7 }),
        Box::new(SeparableField { amplitude: 1.5, width: 0.6, omega: 2.0, phase: 0.3 }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_and_v_forms_agree_at_second_order() {
        for f in consistency_fields() {
            let rep = uv_consistency(f.as_ref(), 10.0, 200, 3, AXIS_EXCLUSION).unwrap();
            let order = rep.final_order().unwrap();
            assert!((order - 2.0).abs() < 0.2, "{}: {:?} {:?}", f.label(), rep.errors, rep.orders);
        }
    }

    #[test]
    fn near_axis_error_is_bounded_and_first_order() {
        let f = consistency_fields().remove(0);
        let rep = rhs_u_convergence(f.as_ref(), 10.0, 200, 3, 0.0).unwrap();
        assert!(rep.final_order().unwrap() > 0.9, "{:?}", rep.orders);
    }

    #[test]
    fn rhs_u_is_second_order() {
        for f in consistency_fields() {
            let rep = rhs_u_convergence(f.as_ref(), 10.0, 200, 3, AXIS_EXCLUSION).unwrap();
            let order = rep.final_order().unwrap();
            assert!((order - 2.0).abs() < 0.2, "{}: {:?} {:?}", f.label(), rep.errors, rep.orders);
        }
    }
}
