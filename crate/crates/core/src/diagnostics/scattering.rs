//! Distance of a trajectory from the free wave that matches it at the final time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{free_propagate, FieldState, Form, Status, Trajectory};
use crate::radial_spectral::{data_norm_d_with, spectral_view, DyadicPartition, RadialProfile};
use crate::report::least_squares_slope;

/// `|slope|` of `ln defect` per unit time separating the verdicts.
pub const VERDICT_SLOPE: f64 = 0.02;

/// Finite-difference solutions carry grid-scale noise that a spectral view sees
/// as unresolved mass; the defect tolerates this much.
pub const SCATTERING_TAIL_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Decaying,
    Flat,
    Growing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub fit_time: f64,
    /// Snapshot times before the fit time.
    pub times: Vec<f64>,
    /// `‖(v − v₊, v_t − v₊,t)(t)‖_D`.
    pub defect: Vec<f64>,
    pub peak: f64,
    /// Defect at the last snapshot before the fit time.
    pub final_defect: f64,
    pub slope: Option<f64>,
    pub verdict: Verdict,
    pub warning: Option<String>,
}

impl ScatteringReport {
    pub fn final_over_peak(&self) -> f64 {
        if self.peak == 0.0 {
            0.0
        } else {
            self.final_defect / self.peak
        }
    }
}

fn on_fb(p: &RadialProfile) -> Result<RadialProfile> {
    Ok(spectral_view(p)?.1)
}

/// Pulls the final snapshot back to `t = 0` with the free flow and measures the
/// data-norm distance of every earlier snapshot to the resulting free wave.
pub fn scattering_fit(traj: &Trajectory, part: &DyadicPartition) -> Result<ScatteringReport> {
    if traj.status != Status::Completed {
        return Err(Error::Invalid(format!("scattering fit needs a completed trajectory, got {:?}", traj.status)));
    }
    let snaps: Vec<FieldState> = traj.snapshots.iter().map(|s| s.convert(Form::V)).collect::<Result<_>>()?;
    let last = snaps.last().expect("trajectory holds the initial state");
    let fit_time = last.t;
    let plus = free_propagate(&last.f, &last.f_t, -fit_time)?;
    let mut times = Vec::new();
    let mut defect = Vec::new();
    for s in &snaps[..snaps.len() - 1] {
        let free = free_propagate(&plus.f, &plus.f_t, s.t)?;
        let df = on_fb(&s.f)?.sub(&free.f)?;
        let dft = on_fb(&s.f_t)?.sub(&free.f_t)?;
        times.push(s.t);
        defect.push(data_norm_d_with(&df, &dft, part, SCATTERING_TAIL_TOLERANCE)?);
    }
    let peak = defect.iter().cloned().fold(0.0, f64::max);
    let final_defect = defect.last().copied().unwrap_or(0.0);
    let window: Vec<usize> = (0..times.len()).filter(|&k| times[k] >= 0.5 * fit_time && defect[k] > 0.0).collect();
    let (slope, verdict, warning) = if window.len() < 3 {
        (None, Verdict::Flat, Some(format!("only {} usable snapshots in the second half of the record", window.len())))
    } else {
        let xs: Vec<f64> = window.iter().map(|&k| times[k]).collect();
        let ys: Vec<f64> = window.iter().map(|&k| defect[k].ln()).collect();
        let slope = least_squares_slope(&xs, &ys);
        let verdict = match slope {
            Some(m) if m < -VERDICT_SLOPE => Verdict::Decaying,
            Some(m) if m > VERDICT_SLOPE => Verdict::Growing,
            _ => Verdict::Flat,
        };
        (slope, verdict, None)
    };
    Ok(ScatteringReport { fit_time, times, defect, peak, final_defect, slope, verdict, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, initial_data, DataFamily, DataParams, Scheme, SolverConfig};

    fn run(delta: f64, nonlinear: bool, horizon: f64, stride: usize) -> Trajectory {
        run_n(1024, delta, nonlinear, horizon, stride)
    }

    fn run_n(n: usize, delta: f64, nonlinear: bool, horizon: f64, stride: usize) -> Trajectory {
        let mut cfg = SolverConfig::new(n, 40.0, horizon, 0.5, Scheme::Rk4).unwrap().with_stride(stride);
        if !nonlinear {
            cfg = cfg.linear();
        }
        let g = cfg.grid(Form::V).unwrap();
        let d = initial_data(DataFamily::GaussBump, delta, &DataParams::default(), &g, &DyadicPartition::default()).unwrap();
        evolve(&d.v, &cfg).unwrap()
    }

    #[test]
    fn free_data_defect_is_dispersion_error() {
        // linear finite differences against the exact free flow: only the
        // second-order dispersion error remains
        let peak = |n: usize| scattering_fit(&run_n(n, 0.05, false, 10.0, n / 25), &DyadicPartition::default()).unwrap().peak;
        let (coarse, fine) = (peak(1024), peak(2048));
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "{coarse} {fine}");
        assert!(fine < 5e-3);
    }

    #[test]
    fn short_record_is_flat() {
        let tr = run(0.01, true, 1.0, 1000);
        let rep = scattering_fit(&tr, &DyadicPartition::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Flat);
        assert!(rep.warning.is_some());
    }

    #[test]
    fn rejects_blown_up_trajectory() {
        let mut tr = run(0.01, true, 1.0, 1000);
        tr.status = Status::BlowupDetected;
        assert!(scattering_fit(&tr, &DyadicPartition::default()).is_err());
    }
}
