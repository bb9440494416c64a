//! One function per subcommand. Each writes its artifacts into an [`OutputDir`].

use rayon::prelude::*;
use serde::Serialize;

use faddeev_core::diagnostics::{
    consistency_fields, cubic_slope, default_nonlin_deltas, default_points, default_radii, energy, inequality_probe,
    manufactured_fields, nonlin_family, nonlin_samples, nullform_residual, pointwise_bound_check, probe_family,
    rhs_u_convergence, scaling_covariance_check, scattering_fit, uv_consistency, NonlinSample, ProbeName, ScatteringReport,
    AXIS_EXCLUSION,
};
use faddeev_core::evolution::{evolve, initial_data, Form, SolverConfig, Status, Trajectory};
use faddeev_core::hyperbolic::{
    bilinear_probe, free_wave_samples, rv_probe, sin_composition_probe, sin_family, strichartz_family, strichartz_grid,
    strichartz_probe, trilinear_family, trilinear_probe, SinCompositionReport, STRICHARTZ_OCTAVES, STRICHARTZ_WINDOW,
    TRILINEAR_CLASSES, TRILINEAR_PER_CLASS, TRILINEAR_SEED,
};
use faddeev_core::radial_spectral::{besov_norm_detailed, data_norm_d, spectral_view, BesovNorm, BesovSpec, Dim};
use faddeev_core::{ConvergenceReport, RatioReport};

use crate::config::{ExperimentConfig, HnormProbe, VerifyCheck};
use crate::error::CliError;
use crate::output::{num, OutputDir, Timings};
use crate::plots::{emit_plots, PlotSource};

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotDiagnostics {
    pub t: f64,
    pub energy: f64,
    pub max_abs_u: f64,
    pub max_abs_ut: f64,
    pub implied_bound: f64,
    pub chain_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub status: Status,
    pub form: Form,
    pub solver: SolverConfig,
    pub delta: f64,
    pub data_norm: f64,
    /// `|E(T) − E(0)| / E(0)`, zero for zero data.
    pub energy_drift: f64,
    pub max_abs_u: f64,
    pub implied_bound: f64,
    pub chain_holds: bool,
    pub warning: Option<String>,
    pub snapshots: Vec<SnapshotDiagnostics>,
}

fn simulate_core(cfg: &ExperimentConfig, command: &str, t: &mut Timings) -> Result<(SimulationReport, Trajectory), CliError> {
    let (solver, form) = cfg.solver(command)?;
    let (family, delta, params) = cfg.data(command)?;
    let part = cfg.partition()?;
    let grid = solver.grid(form)?;
    let init = t.time("initial_data", || initial_data(family, delta, &params, &grid, &part))?;
    let state = match form {
        Form::U => init.u,
        Form::V => init.v,
    };
    let traj = t.time("evolve", || evolve(&state, &solver))?;
    let snapshots = t.time("diagnostics", || {
        traj.snapshots
            .par_iter()
            .map(|s| {
                let u = s.convert(Form::U)?;
                let e = energy(&u)?;
                let b = pointwise_bound_check(&u)?;
                Ok(SnapshotDiagnostics {
                    t: s.t,
                    energy: e.energy,
                    max_abs_u: b.max_abs_u,
                    max_abs_ut: u.f_t.max_abs(),
                    implied_bound: b.implied_bound,
                    chain_holds: b.holds(),
                })
            })
            .collect::<Result<Vec<_>, faddeev_core::Error>>()
    })?;
    let e0 = snapshots[0].energy;
    let e1 = snapshots.last().expect("initial snapshot").energy;
    let warning = (!solver.causally_closed(family.support(&params)))
        .then(|| format!("horizon {} lets the data reach the wall at R = {}", solver.horizon, solver.cutoff));
    let rep = SimulationReport {
        status: traj.status,
        form,
        solver,
        delta,
        data_norm: init.data_norm,
        energy_drift: if e0 > 0.0 { (e1 - e0).abs() / e0 } else { 0.0 },
        max_abs_u: snapshots.iter().map(|s| s.max_abs_u).fold(0.0, f64::max),
        implied_bound: snapshots[0].implied_bound,
        chain_holds: snapshots.iter().all(|s| s.chain_holds),
        warning,
        snapshots,
    };
    Ok((rep, traj))
}

fn write_simulation(out: &mut OutputDir, rep: &SimulationReport, traj: &Trajectory) -> Result<(), CliError> {
    out.json("trajectory.json", rep)?;
    out.table(
        "timeseries.csv",
        &["t", "E", "max_abs_u", "max_abs_ut", "implied_bound", "chain_holds"],
        rep.snapshots.iter().map(|s| vec![s.t, s.energy, s.max_abs_u, s.max_abs_ut, s.implied_bound, s.chain_holds as u8 as f64]),
    )?;
    for (k, s) in traj.snapshots.iter().enumerate() {
        out.table(
            &format!("snapshots/snap_{k:05}.csv"),
            &["r", "f", "f_t"],
            s.f.grid.nodes.iter().zip(&s.f.samples).zip(&s.f_t.samples).map(|((r, f), ft)| vec![*r, *f, *ft]),
        )?;
    }
    let energy = PlotSource::Energy {
        name: "energy".into(),
        times: rep.snapshots.iter().map(|s| s.t).collect(),
        energy: rep.snapshots.iter().map(|s| s.energy).collect(),
    };
    emit_plots(out, &[energy])?;
    Ok(())
}

pub fn simulate(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let (rep, traj) = simulate_core(cfg, "simulate", t)?;
    t.time("write", || write_simulation(out, &rep, &traj))
}

fn write_scattering(out: &mut OutputDir, rep: &ScatteringReport) -> Result<(), CliError> {
    out.json("scattering.json", rep)?;
    out.table("defect.csv", &["t", "defect"], rep.times.iter().zip(&rep.defect).map(|(t, d)| vec![*t, *d]))?;
    let src = PlotSource::Defect { name: "defect".into(), times: rep.times.clone(), defect: rep.defect.clone() };
    emit_plots(out, &[src])?;
    Ok(())
}

pub fn scatter(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let (sim, traj) = simulate_core(cfg, "scatter", t)?;
    t.time("write", || write_simulation(out, &sim, &traj))?;
    let part = cfg.partition()?;
    let rep = t.time("scattering_fit", || scattering_fit(&traj, &part))?;
    write_scattering(out, &rep)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    delta: f64,
    status: String,
    data_norm: f64,
    energy_drift: f64,
    max_abs_u: f64,
    implied_bound: f64,
    chain_holds: bool,
    verdict: String,
    final_over_peak: f64,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    rows: Vec<SweepRow>,
    /// `max|u|` increases with `δ` along the sweep.
    max_abs_u_monotone: bool,
    implied_bound_monotone: bool,
}

/// Runs `simulate` and `scatter` at every amplitude; each run owns `runs/<k>/`.
pub fn sweep(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let deltas = cfg.sweep_deltas()?;
    cfg.solver("sweep")?;
    cfg.data("sweep")?;
    let runs: Vec<(SweepRow, OutputDir, Timings)> = deltas
        .par_iter()
        .enumerate()
        .map(|(k, &delta)| {
            let mut run_cfg = cfg.clone();
            run_cfg.data.as_mut().expect("validated").delta = Some(delta);
            let mut dir = out.child(&format!("runs/{k:03}"))?;
            let mut timings = Timings::default();
            let mut row = SweepRow {
                delta,
                status: String::new(),
                data_norm: f64::NAN,
                energy_drift: f64::NAN,
                max_abs_u: f64::NAN,
                implied_bound: f64::NAN,
                chain_holds: false,
                verdict: String::new(),
                final_over_peak: f64::NAN,
                error: None,
            };
            let part = cfg.partition()?;
            let result = simulate_core(&run_cfg, "sweep", &mut timings).and_then(|(sim, traj)| {
                write_simulation(&mut dir, &sim, &traj)?;
                row.status = format!("{:?}", sim.status);
                row.data_norm = sim.data_norm;
                row.energy_drift = sim.energy_drift;
                row.max_abs_u = sim.max_abs_u;
                row.implied_bound = sim.implied_bound;
                row.chain_holds = sim.chain_holds;
                let rep = timings.time("scattering_fit", || scattering_fit(&traj, &part))?;
                write_scattering(&mut dir, &rep)?;
                row.verdict = format!("{:?}", rep.verdict);
                row.final_over_peak = rep.final_over_peak();
                Ok(())
            });
            match result {
                Ok(()) => {}
                Err(CliError::Numerical(e)) => row.error = Some(e.to_string()),
                Err(e) => return Err(e),
            }
            Ok((row, dir, timings))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows = Vec::new();
    for (k, (row, dir, timings)) in runs.into_iter().enumerate() {
        out.adopt(&format!("runs/{k:03}"), dir);
        t.merge(&format!("runs/{k:03}"), timings);
        rows.push(row);
    }
    let mut order: Vec<&SweepRow> = rows.iter().collect();
    order.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let monotone = |f: fn(&SweepRow) -> f64| order.windows(2).all(|w| f(w[0]) <= f(w[1]));
    let summary = SweepSummary {
        max_abs_u_monotone: monotone(|r| r.max_abs_u),
        implied_bound_monotone: monotone(|r| r.implied_bound),
        rows,
    };
    out.csv(
        "summary.csv",
        &[
            "delta",
            "status",
            "data_norm",
            "energy_drift",
            "max_abs_u",
            "implied_bound",
            "chain_holds",
            "verdict",
            "final_over_peak",
        ],
        summary.rows.iter().map(|r| {
            vec![
                num(r.delta),
                r.status.clone(),
                num(r.data_norm),
                num(r.energy_drift),
                num(r.max_abs_u),
                num(r.implied_bound),
                r.chain_holds.to_string(),
                r.verdict.clone(),
                num(r.final_over_peak),
            ]
        }),
    )?;
    out.json("summary.json", &summary)?;
    match summary.rows.iter().find_map(|r| r.error.clone()) {
        Some(e) => Err(CliError::Numerical(faddeev_core::Error::Resolution(format!("sweep run failed: {e}")))),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct NormsReport {
    data_norm: f64,
    besov: Vec<(BesovSpec, BesovNorm)>,
}

/// Besov norms and spectra of the configured initial data on ℝ⁴.
pub fn norms(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let g = cfg.grid.as_ref().ok_or_else(|| CliError::Config("grid: required by `norms`".into()))?;
    let nodes = g.nodes.ok_or_else(|| CliError::Config("grid.nodes: required by `norms`".into()))?;
    let cutoff = g.cutoff.ok_or_else(|| CliError::Config("grid.cutoff: required by `norms`".into()))?;
    let (family, delta, params) = cfg.data("norms")?;
    let part = cfg.partition()?;
    let grid = std::sync::Arc::new(
        faddeev_core::radial_spectral::RadialGrid::cell_centered(Dim::R4, cutoff, nodes)
            .map_err(|e| CliError::Config(format!("grid: {e}")))?,
    );
    let specs: Vec<BesovSpec> = match &cfg.norms {
        Some(n) => n
            .besov
            .iter()
            .enumerate()
            .map(|(i, b)| BesovSpec::new(b.s, b.p, 1.0, Dim::R4).map_err(|e| CliError::Config(format!("norms.besov[{i}]: {e}"))))
            .collect::<Result<_, _>>()?,
        None => vec![BesovSpec::l2(2.0, Dim::R4), BesovSpec::l2(1.0, Dim::R4)],
    };
    let init = t.time("initial_data", || initial_data(family, delta, &params, &grid, &part))?;
    let (v0, v1) = (&init.v.f, &init.v.f_t);
    for (name, p) in [("profile_v0.csv", v0), ("profile_v1.csv", v1)] {
        out.table(name, &["r", "f"], p.grid.nodes.iter().zip(&p.samples).map(|(r, f)| vec![*r, *f]))?;
    }
    let (sg, fb) = spectral_view(v0)?;
    let fhat = sg.forward(&fb)?;
    out.table("spectrum_v0.csv", &["rho", "fhat"], sg.freq.nodes.iter().zip(&fhat.samples).map(|(r, f)| vec![*r, *f]))?;
    let report = t.time("norms", || -> Result<NormsReport, faddeev_core::Error> {
        let data_norm = if delta == 0.0 { 0.0 } else { data_norm_d(v0, v1, &part)? };
        let besov = specs
            .iter()
            .map(|s| Ok((*s, besov_norm_detailed(v0, s, &part, faddeev_core::radial_spectral::DEFAULT_TAIL_TOLERANCE)?)))
            .collect::<Result<Vec<_>, faddeev_core::Error>>()?;
        Ok(NormsReport { data_norm, besov })
    })?;
    out.json("norms.json", &report)
}

#[derive(Debug, Serialize)]
struct VerifyEntry {
    check: VerifyCheck,
    report: ConvergenceReport,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    entries: Vec<VerifyEntry>,
}

/// Convergence studies on manufactured and analytic fields.
pub fn verify(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let v = cfg.verify()?;
    let need = |x: Option<f64>, field: &str| {
        x.ok_or_else(|| CliError::Config(format!("verify.{field}: required by the selected checks")))
    };
    let mut entries = Vec::new();
    for &check in &v.checks {
        let reports: Vec<ConvergenceReport> = match check {
            VerifyCheck::Nullform => {
                let (dr, dt, time) = (need(v.dr, "dr")?, need(v.dt, "dt")?, need(v.time, "time")?);
                t.time("nullform", || {
                    manufactured_fields()
                        .iter()
                        .map(|(name, f)| nullform_residual(name, f.as_ref(), time, &default_radii(), dr, dt, v.levels))
                        .collect()
                })
            }
            VerifyCheck::Scaling => t.time("scaling", || {
                consistency_fields()
                    .iter()
                    .flat_map(|f| v.lambdas.iter().map(move |&l| scaling_covariance_check(f.as_ref(), l, &default_points())))
                    .collect()
            }),
            VerifyCheck::UvConsistency | VerifyCheck::RhsU => {
                let nodes = v.nodes.ok_or_else(|| CliError::Config("verify.nodes: required by the selected checks".into()))?;
                let cutoff = need(v.cutoff, "cutoff")?;
                t.time(if check == VerifyCheck::RhsU { "rhs_u" } else { "uv_consistency" }, || {
                    consistency_fields()
                        .iter()
                        .map(|f| match check {
                            VerifyCheck::RhsU => rhs_u_convergence(f.as_ref(), cutoff, nodes, v.levels, AXIS_EXCLUSION),
                            _ => uv_consistency(f.as_ref(), cutoff, nodes, v.levels, AXIS_EXCLUSION),
                        })
                        .collect::<Result<Vec<_>, _>>()
                })?
            }
        };
        entries.extend(reports.into_iter().map(|report| VerifyEntry { check, report }));
    }
    let rows = entries.iter().flat_map(|e| {
        let tag = serde_json::to_value(e.check).expect("check serializes").as_str().unwrap_or_default().to_string();
        (0..e.report.steps.len()).map(move |k| {
            let order = if k == 0 { f64::NAN } else { e.report.orders[k - 1] };
            vec![tag.clone(), e.report.label.clone(), num(e.report.steps[k]), num(e.report.errors[k]), num(order)]
        })
    });
    out.csv("convergence.csv", &["check", "label", "step", "error", "order"], rows.collect::<Vec<_>>())?;
    out.json("convergence.json", &VerifyReport { entries })
}

fn write_ratio(out: &mut OutputDir, key: &str, rep: &RatioReport, plots: &mut Vec<PlotSource>) -> Result<(), CliError> {
    out.json(&format!("{key}.json"), rep)?;
    out.table(&format!("{key}.csv"), &["parameter", "ratio"], rep.parameters.iter().zip(&rep.ratios).map(|(p, r)| vec![*p, *r]))?;
    plots.push(PlotSource::Ratio { name: key.to_string(), parameters: rep.parameters.clone(), ratios: rep.ratios.clone() });
    Ok(())
}

#[derive(Debug, Serialize)]
struct NonlinDetail<'a> {
    samples: &'a [NonlinSample],
    /// `d ln LHS / d ln ‖v‖_X̃`.
    cubic_slope: Option<f64>,
}

/// Empirical inequality probes on seeded profile families and small-data trajectories.
pub fn probe(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let (names, members) = cfg.probes()?;
    let seed = cfg.probe_seed();
    let part = cfg.partition()?;
    let mut plots = Vec::new();
    for name in names {
        let key = format!("probe_{}", name.key().to_lowercase());
        let family = if name == ProbeName::Nonlin {
            let (solver, _) = cfg.solver("probe nonlin")?;
            let deltas = cfg.probe.as_ref().and_then(|p| p.nonlin_deltas.clone()).unwrap_or_else(default_nonlin_deltas);
            t.time(&format!("{key}/family"), || nonlin_family(&deltas, solver.nodes, solver.horizon, solver.snapshot_stride))?
        } else {
            t.time(&format!("{key}/family"), || probe_family(name, members, seed))?
        };
        let rep = t.time(&key, || inequality_probe(name, &family, &part))?;
        write_ratio(out, &key, &rep, &mut plots)?;
        if name == ProbeName::Nonlin {
            let samples = nonlin_samples(&family, &part)?;
            let detail = NonlinDetail { cubic_slope: cubic_slope(&samples), samples: &samples };
            out.json(&format!("{key}_samples.json"), &detail)?;
        }
    }
    emit_plots(out, &plots)?;
    Ok(())
}

/// Spacetime probes: Strichartz, `rv`, trilinear, bilinear and sine composition.
pub fn hnorm(cfg: &ExperimentConfig, out: &mut OutputDir, t: &mut Timings) -> Result<(), CliError> {
    let h = cfg.hnorm()?;
    let seed = cfg.seed_or(faddeev_core::diagnostics::PROBE_SEED);
    let mut plots = Vec::new();
    let wants = |p: HnormProbe| h.probes.contains(&p);
    if wants(HnormProbe::Strichartz) || wants(HnormProbe::Rv) {
        let octaves = h.octaves.map(|[a, b]| (a, b)).unwrap_or(STRICHARTZ_OCTAVES);
        let window = h.window.unwrap_or(STRICHARTZ_WINDOW);
        let st = strichartz_grid(octaves, window)?;
        let family = strichartz_family(octaves, h.members.unwrap_or(3), seed);
        let samples = t.time("free_waves", || free_wave_samples(&family, &st))?;
        out.table(
            "free_waves.csv",
            &["lambda", "a", "b", "c", "f_surrogate"],
            samples.iter().map(|s| vec![s.wave.lambda, s.wave.a, s.wave.b, s.wave.c, s.f]),
        )?;
        if wants(HnormProbe::Strichartz) {
            let pairs = h.pairs.clone().unwrap_or_else(|| vec![[f64::INFINITY, 2.0], [2.0, 6.0]]);
            for [q, r] in pairs {
                let key = format!("strichartz_q{}_r{}", num(q), num(r));
                let rep = t.time(&key, || strichartz_probe(q, r, &samples))?;
                write_ratio(out, &key, &rep, &mut plots)?;
            }
        }
        if wants(HnormProbe::Rv) {
            let q = h.rv_q.unwrap_or(4.0);
            let key = format!("rv_q{}", num(q));
            let rep = t.time(&key, || rv_probe(q, &samples))?;
            write_ratio(out, &key, &rep, &mut plots)?;
        }
    }
    if wants(HnormProbe::Trilinear) || wants(HnormProbe::Bilinear) {
        let classes = h.classes.unwrap_or(TRILINEAR_CLASSES);
        let family = trilinear_family(classes, h.per_class.unwrap_or(TRILINEAR_PER_CLASS), cfg.seed_or(TRILINEAR_SEED));
        out.json("packet_triples.json", &serde_json::json!({ "triples": family }))?;
        if wants(HnormProbe::Trilinear) {
            let rep = t.time("trilinear", || trilinear_probe(&family))?;
            write_ratio(out, "trilinear", &rep, &mut plots)?;
        }
        if wants(HnormProbe::Bilinear) {
            let rep = t.time("bilinear", || bilinear_probe(&family))?;
            write_ratio(out, "bilinear", &rep, &mut plots)?;
        }
    }
    if wants(HnormProbe::Sin) {
        let family = t.time("sin_family", || sin_family(h.members.unwrap_or(8), h.sin_amplitude.unwrap_or(0.1), seed))?;
        let rep: SinCompositionReport = t.time("sin", || sin_composition_probe(&family, h.sin_alpha.unwrap_or(1.0)))?;
        out.json("sin_composition.json", &rep)?;
        write_ratio(out, "sin", &rep.ratios, &mut plots)?;
    }
    emit_plots(out, &plots)?;
    Ok(())
}
