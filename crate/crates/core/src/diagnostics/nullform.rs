//! `v_t² − v_r² = −□(v²/2) + v□v` with `□ = −∂_t² + ∂_r² + (3/r)∂_r`.

use crate::report::ConvergenceReport;

fn wave_operator(w: &dyn Fn(f64, f64) -> f64, t: f64, r: f64, dr: f64, dt: f64) -> f64 {
    let c = w(t, r);
    let (rp, rm) = (w(t, r + dr), w(t, r - dr));
    -(w(t + dt, r) - 2.0 * c + w(t - dt, r)) / (dt * dt) + (rp - 2.0 * c + rm) / (dr * dr) + 3.0 / r * (rp - rm) / (2.0 * dr)
}

/// Largest `|v_t² − v_r² + □(v²/2) − v□v|` over `radii` at time `t`, with
/// second-order central differences of steps `dr`, `dt`.
pub fn nullform_defect(v: &dyn Fn(f64, f64) -> f64, t: f64, radii: &[f64], dr: f64, dt: f64) -> f64 {
    let half_square = |t: f64, r: f64| 0.5 * v(t, r).powi(2);
    radii
        .iter()
        .map(|&r| {
            let vt = (v(t + dt, r) - v(t - dt, r)) / (2.0 * dt);
            let vr = (v(t, r + dr) - v(t, r - dr)) / (2.0 * dr);
            let res = vt * vt - vr * vr + wave_operator(&half_square, t, r, dr, dt) - v(t, r) * wave_operator(v, t, r, dr, dt);
            res.abs()
        })
        .fold(0.0, f64::max)
}

/// Residual of the null-form identity at `levels` successive halvings of `(dr, dt)`.
pub fn nullform_residual(
    label: &str,
    v: &dyn Fn(f64, f64) -> f64,
    t: f64,
    radii: &[f64],
    dr: f64,
    dt: f64,
    levels: usize,
) -> ConvergenceReport {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..levels {
        let s = 0.5f64.powi(k as i32);
        steps.push(dr * s);
        errors.push(nullform_defect(v, t, radii, dr * s, dt * s));
    }
    ConvergenceReport::new(label, steps, errors)
}

/// The three manufactured fields used for the identity check.
pub fn manufactured_fields() -> Vec<(&'static str, Box<dyn Fn(f64, f64) -> f64 + Send + Sync>)> {
    vec![
        ("exp(-(r^2+t^2))", Box::new(|t: f64, r: f64| (-(r * r + t * t)).exp())),
        ("r exp(-r^2) cos t", Box::new(|t: f64, r: f64| r * (-r * r).exp() * t.cos())),
        ("(1+r^2+t^2)^-2", Box::new(|t: f64, r: f64| (1.0 + r * r + t * t).powi(-2))),
    ]
}

/// Sample radii on `[0.1, 4]`.
pub fn default_radii() -> Vec<f64> {
    (0..40).map(|k| 0.1 + 0.1 * k as f64).collect()
}
