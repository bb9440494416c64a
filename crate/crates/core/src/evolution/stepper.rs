use super::rhs::Operator;
use super::state::{FieldState, Scheme, SolverConfig, Status, Trajectory};
use crate::error::{Error, Result};
use crate::radial_spectral::{GridKind, RadialProfile};

/// Advances `initial` to `config.horizon`.
///
/// A configuration over the CFL limit yields a trajectory holding only the
/// initial state with status [`Status::CflViolation`].
pub fn evolve(initial: &FieldState, config: &SolverConfig) -> Result<Trajectory> {
    let grid = initial.grid();
    if grid.kind != GridKind::CellCentered || grid.len() != config.nodes || grid.cutoff != config.cutoff {
        return Err(Error::GridMismatch(format!(
            "initial state has {} nodes on R = {}, config expects {} on R = {}",
            grid.len(),
            grid.cutoff,
            config.nodes,
            config.cutoff
        )));
    }
    let mut traj = Trajectory { config: config.clone(), snapshots: vec![initial.clone()], status: Status::Completed };
    if config.check_cfl().is_err() {
        traj.status = Status::CflViolation;
        return Ok(traj);
    }
    let op = Operator::new(initial.form, grid, config.nonlinear, config.sponge)?;
    match config.scheme {
        Scheme::Rk4 => run_rk4(&op, initial, config, &mut traj),
        Scheme::Leapfrog => run_leapfrog(&op, initial, config, &mut traj),
    }
    Ok(traj)
}

fn snapshot(initial: &FieldState, t: f64, f: &[f64], ft: &[f64]) -> FieldState {
    let grid = initial.grid().clone();
    FieldState {
        t,
        form: initial.form,
        f: RadialProfile { grid: grid.clone(), samples: f.to_vec() },
        f_t: RadialProfile { grid, samples: ft.to_vec() },
    }
}

fn exceeds(config: &SolverConfig, f: &[f64], ft: &[f64]) -> bool {
    let bad = |xs: &[f64], ceiling: f64| xs.iter().any(|x| !(x.abs() <= ceiling));
    bad(f, config.ceiling_f) || bad(ft, config.ceiling_ft)
}

fn run_rk4(op: &Operator, initial: &FieldState, config: &SolverConfig, traj: &mut Trajectory) {
    let n = op.len();
    let dt = config.dt;
    let mut f = initial.f.samples.clone();
    let mut ft = initial.f_t.samples.clone();
    let mut scratch = vec![0.0; n];
    let (mut a1, mut a2, mut a3, mut a4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut fs, mut vs) = (vec![0.0; n], vec![0.0; n]);
    let (mut v2, mut v3, mut v4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for step in 1..=config.steps {
        op.accel(&f, &ft, &mut a1, &mut scratch);
        for i in 0..n {
            fs[i] = f[i] + 0.5 * dt * ft[i];
            vs[i] = ft[i] + 0.5 * dt * a1[i];
        }
        v2.copy_from_slice(&vs);
        op.accel(&fs, &v2, &mut a2, &mut scratch);
        for i in 0..n {
            fs[i] = f[i] + 0.5 * dt * v2[i];
            vs[i] = ft[i] + 0.5 * dt * a2[i];
        }
        v3.copy_from_slice(&vs);
        op.accel(&fs, &v3, &mut a3, &mut scratch);
        for i in 0..n {
            fs[i] = f[i] + dt * v3[i];
            vs[i] = ft[i] + dt * a3[i];
        }
        v4.copy_from_slice(&vs);
        op.accel(&fs, &v4, &mut a4, &mut scratch);
        for i in 0..n {
            f[i] += dt / 6.0 * (ft[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            ft[i] += dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        let t = initial.t + step as f64 * dt;
        if exceeds(config, &f, &ft) {
            traj.snapshots.push(snapshot(initial, t, &f, &ft));
            traj.status = Status::BlowupDetected;
            return;
        }
        if step % config.snapshot_stride == 0 || step == config.steps {
            traj.snapshots.push(snapshot(initial, t, &f, &ft));
        }
    }
}

/// Centered second differences with the velocity `(f^{n+1} − f^{n−1})/(2dt)`.
///
/// Since `f_tt = A + B f_t² − σ f_t` pointwise, each node's update is the root of
/// a scalar quadratic, so the scheme stays explicit and time-symmetric.
fn run_leapfrog(op: &Operator, initial: &FieldState, config: &SolverConfig, traj: &mut Trajectory) {
    let n = op.len();
    let dt = config.dt;
    let mut f = initial.f.samples.clone();
    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
    let mut acc = vec![0.0; n];
    op.accel(&f, &initial.f_t.samples, &mut acc, &mut b);
    let mut prev: Vec<f64> = (0..n).map(|i| f[i] - dt * initial.f_t.samples[i] + 0.5 * dt * dt * acc[i]).collect();
    let mut y = vec![0.0; n];
    let mut vel = vec![0.0; n];
    for step in 0..=config.steps {
        op.split(&f, &mut a, &mut b);
        for i in 0..n {
            let k = 1.0 + 0.5 * op.sponge[i] * dt;
            let c = 2.0 * (f[i] - prev[i]) + dt * dt * a[i];
            y[i] = 2.0 * c / (k + (k * k - b[i] * c).sqrt());
            vel[i] = y[i] / (2.0 * dt);
        }
        let t = initial.t + step as f64 * dt;
        if step > 0 && (step % config.snapshot_stride == 0 || step == config.steps) {
            traj.snapshots.push(snapshot(initial, t, &f, &vel));
        }
        if step == config.steps {
            break;
        }
        for i in 0..n {
            let next = prev[i] + y[i];
            prev[i] = f[i];
            f[i] = next;
        }
        if exceeds(config, &f, &vel) {
            traj.snapshots.push(snapshot(initial, t + dt, &f, &vel));
            traj.status = Status::BlowupDetected;
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::state::Form;
    use std::sync::Arc;

    fn bump(form: Form, config: &SolverConfig, delta: f64) -> FieldState {
        let g = config.grid(form).unwrap();
        let f = move |r: f64| match form {
            Form::U => delta * r * (-r * r).exp(),
            Form::V => delta * (-r * r).exp(),
        };
        FieldState::new(0.0, form, RadialProfile::from_fn(g.clone(), f), RadialProfile::zeros(g)).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        for scheme in [Scheme::Rk4, Scheme::Leapfrog] {
            let cfg = SolverConfig::new(128, 10.0, 2.0, 0.9, scheme).unwrap().with_stride(10);
            let s = bump(Form::U, &cfg, 0.0);
            let tr = evolve(&s, &cfg).unwrap();
            assert_eq!(tr.status, Status::Completed);
            assert!(tr.snapshots.iter().all(|s| s.f.max_abs() == 0.0 && s.f_t.max_abs() == 0.0));
            let ts = tr.times();
            assert!(ts.windows(2).all(|w| w[1] > w[0]));
            assert!((ts.last().unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cfl_guard() {
        let cfg = SolverConfig::new(64, 10.0, 1.0, 0.9, Scheme::Rk4).unwrap();
        let bad = cfg.clone().with_dt(cfg.dr);
        let tr = evolve(&bump(Form::U, &bad, 0.1), &bad).unwrap();
        assert_eq!(tr.status, Status::CflViolation);
        assert_eq!(tr.snapshots.len(), 1);
    }

    #[test]
    fn blowup_ceiling_trips() {
        let mut cfg = SolverConfig::new(64, 10.0, 1.0, 0.5, Scheme::Rk4).unwrap();
        cfg.ceiling_f = 1e-3;
        let tr = evolve(&bump(Form::V, &cfg, 0.1), &cfg).unwrap();
        assert_eq!(tr.status, Status::BlowupDetected);
    }

    #[test]
    fn leapfrog_is_reversible() {
        let cfg = SolverConfig::new(256, 12.0, 3.0, 0.5, Scheme::Leapfrog).unwrap();
        let s0 = bump(Form::U, &cfg, 0.3);
        let fwd = evolve(&s0, &cfg).unwrap();
        let end = fwd.last();
        let back0 = FieldState { t: 0.0, f_t: end.f_t.scaled(-1.0), ..end.clone() };
        let back = evolve(&back0, &cfg).unwrap();
        let err = back.last().f.sub(&s0.f).unwrap().max_abs() / s0.f.max_abs();
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn grid_mismatch_rejected() {
        let cfg = SolverConfig::new(64, 10.0, 1.0, 0.5, Scheme::Rk4).unwrap();
        let g = Arc::new(crate::radial_spectral::RadialGrid::cell_centered(crate::radial_spectral::Dim::R2, 10.0, 65).unwrap());
        let s = FieldState::zeros(Form::U, g).unwrap();
        assert!(evolve(&s, &cfg).is_err());
    }
}
