//! One test per acceptance criterion. Each writes a `PASS`/`FAIL` line with the
//! measured quantities before asserting. The line goes straight to the stderr
//! handle, which the test harness does not capture.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use faddeev_cli::{run, Command, Invocation};
use faddeev_core::coefficients::{decay_grid, decay_margin, h_tilde, CoefficientId, DECAY_ENVELOPES, DECAY_RANGE};
use faddeev_core::diagnostics::{
    consistency_fields, cubic_slope, default_nonlin_deltas, default_points, default_radii, inequality_probe, manufactured_fields,
    nonlin_family, nonlin_samples, nullform_residual, probe_family, scaling_covariance_check, uv_consistency, ProbeName,
    AXIS_EXCLUSION,
};
use faddeev_core::evolution::{discrete_energy, evolve, initial_data, DataFamily, DataParams, Form, Scheme, SolverConfig};
use faddeev_core::hyperbolic::{
    free_wave_samples, rv_probe, strichartz_family, strichartz_grid, strichartz_probe, trilinear_family, trilinear_probe,
    STRICHARTZ_OCTAVES, STRICHARTZ_WINDOW, TRILINEAR_CLASSES, TRILINEAR_REGRESSION_CONSTANT, TRILINEAR_SEED,
};
use faddeev_core::radial_spectral::{
    band_project, besov_norm, lp_norm, BesovSpec, Dim, DyadicPartition, RadialProfile, SpectralGrid,
};
use faddeev_core::report::least_squares_slope;

fn verdict(n: u32, what: &str, pass: bool, detail: String, elapsed: Duration) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("{tag} criterion {n}: {what}: {detail} ({:.1} s)\n", elapsed.as_secs_f64());
    std::io::stderr().lock().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} ({what}) failed: {detail}");
}

fn run_cli(command: Command, toml: &str, dir: &Path) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let config = dir.join("config.toml");
    fs::write(&config, toml).unwrap();
    let inv = Invocation { command, config, out: Some(dir.join("out")), seed: None, threads: Some(1) };
    run(&inv).unwrap_or_else(|e| panic!("{command:?} failed: {e}"))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Numeric rows of a stamped CSV, skipping the config line and header.
fn read_table(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path).unwrap().lines().skip(2).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn criterion_01_coefficient_limits() {
    let start = Instant::now();
    let u = 1e-6;
    let limits = [(CoefficientId::H2, -2.0 / 3.0), (CoefficientId::H3, 1.0 / 3.0), (CoefficientId::H4, 1.0)];
    let mut worst: f64 = 0.0;
    for (id, l) in limits {
        worst = worst.max((h_tilde(id, u) - l).abs()).max((h_tilde(id, 0.0) - l).abs());
    }
    let h1_zero = h_tilde(CoefficientId::H1, 0.0).abs();
    let h1_slope = (h_tilde(CoefficientId::H1, u) / u - 2.0 / 3.0).abs();
    let err = worst.max(h1_zero).max(h1_slope);
    verdict(1, "h̃ limits at u → 0", err < 1e-10, format!("max deviation {err:.2e}"), start.elapsed());
}

#[test]
fn criterion_02_decay_envelopes() {
    let start = Instant::now();
    let grid = decay_grid(DECAY_RANGE, 1);
    let mut worst: f64 = 0.0;
    for (i, id) in CoefficientId::ALL.into_iter().enumerate() {
        for j in 0..4 {
            let max = decay_margin(id, j, &grid).unwrap().max;
            worst = worst.max((max / DECAY_ENVELOPES[i][j] - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 0.01 && elapsed < Duration::from_secs(10);
    verdict(2, "decay margins match the envelopes", pass, format!("max relative gap {worst:.2e}"), elapsed);
}

#[test]
fn criterion_03_hankel_transform() {
    let start = Instant::now();
    let sg = SpectralGrid::shared(Dim::R4, 40.0, 2048).unwrap();
    let f = RadialProfile::from_fn(sg.space.clone(), |r| (-r * r / 2.0).exp());
    let fhat = sg.forward(&f).unwrap();
    let c = (2.0 * PI).powi(2);
    let gauss =
        fhat.nodes().iter().zip(&fhat.samples).map(|(rho, v)| (v - c * (-rho * rho / 2.0).exp()).abs() / c).fold(0.0, f64::max);
    let g = RadialProfile::from_fn(sg.space.clone(), |r| (1.0 + r * r) * (-r * r).exp() * (2.0 * r).cos());
    let ghat = sg.forward(&g).unwrap();
    let back = sg.inverse(&ghat).unwrap();
    let round_trip = back.sub(&g).unwrap().max_abs() / g.max_abs();
    let plancherel = (lp_norm(&ghat, 2.0) / c / lp_norm(&g, 2.0) - 1.0).abs();
    let pass = round_trip < 1e-8 && gauss < 1e-6 && plancherel < 1e-8;
    verdict(
        3,
        "Hankel transform on ℝ⁴",
        pass,
        format!("round trip {round_trip:.2e}, Gaussian {gauss:.2e}, Plancherel {plancherel:.2e}"),
        start.elapsed(),
    );
}

#[test]
fn criterion_04_littlewood_paley() {
    let start = Instant::now();
    let sg = SpectralGrid::shared(Dim::R4, 40.0, 1024).unwrap();
    let part = DyadicPartition::default();
    let shell = |center: f64| sg.from_spectrum(|rho| (-(rho - center).powi(2) / 2.0).exp());
    let f = shell(6.0);
    let mut acc = RadialProfile::zeros(sg.space.clone());
    for l in part.bands() {
        acc = acc.add(&band_project(&f, l, &part).unwrap()).unwrap();
    }
    let recon = lp_norm(&acc.sub(&f).unwrap(), 2.0) / lp_norm(&f, 2.0);
    let g = shell(10.0);
    let half: Vec<f64> = sg.space.nodes.iter().map(|r| r / 2.0).collect();
    let wide = RadialProfile { grid: sg.space.clone(), samples: sg.eval_series(&g, &half).unwrap() };
    let mut dil: f64 = 0.0;
    for (s, p) in [(1.0, 2.0), (0.5, 2.0), (1.0 / 6.0, 6.0), (-5.0 / 6.0, 6.0)] {
        let spec = BesovSpec::new(s, p, 1.0, Dim::R4).unwrap();
        let ratio = besov_norm(&wide, &spec, &part).unwrap() / besov_norm(&g, &spec, &part).unwrap();
        dil = dil.max((ratio.log2() - (4.0 / p - s)).abs());
    }
    let pass = recon < 1e-6 && dil < 1e-6;
    verdict(
        4,
        "band reconstruction and Besov dilation",
        pass,
        format!("reconstruction {recon:.2e}, dilation exponent error {dil:.2e}"),
        start.elapsed(),
    );
}

fn energy_drift(nodes: usize) -> f64 {
    let cfg = SolverConfig::new(nodes, 40.0, 20.0, 0.5, Scheme::Rk4).unwrap().with_stride(1 << 20);
    let g = cfg.grid(Form::U).unwrap();
    let d = initial_data(DataFamily::GaussBump, 0.05, &DataParams::default(), &g, &DyadicPartition::default()).unwrap();
    let traj = evolve(&d.u, &cfg).unwrap();
    let e0 = discrete_energy(&traj.snapshots[0], true).unwrap().total();
    let e1 = discrete_energy(traj.last(), true).unwrap().total();
    (e1 - e0).abs() / e0
}

#[test]
fn criterion_05_energy_conservation() {
    let start = Instant::now();
    let drifts: Vec<f64> = [1024, 2048, 4096].into_iter().map(energy_drift).collect();
    let orders: Vec<f64> = drifts.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = drifts[2] < 1e-5 && orders.iter().all(|&p| p >= 2.0);
    verdict(
        5,
        "discrete energy drift",
        pass,
        format!(
            "drift at N = 1024/2048/4096: {:.2e}/{:.2e}/{:.2e}, orders {:.2}/{:.2}",
            drifts[0], drifts[1], drifts[2], orders[0], orders[1]
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_06_null_form() {
    let start = Instant::now();
    let orders: Vec<f64> = manufactured_fields()
        .iter()
        .map(|(name, f)| nullform_residual(name, f.as_ref(), 0.4, &default_radii(), 0.02, 0.02, 3).final_order().unwrap())
        .collect();
    let pass = orders.iter().all(|p| (p - 2.0).abs() <= 0.2);
    verdict(6, "null-form residual converges at second order", pass, format!("orders {orders:.3?}"), start.elapsed());
}

#[test]
fn criterion_07_scaling() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for f in consistency_fields() {
        for lambda in [0.25, 1.0, 2.0, 8.0] {
            worst = worst.max(scaling_covariance_check(f.as_ref(), lambda, &default_points()).max_error());
        }
    }
    verdict(7, "scaling covariance", worst < 1e-10, format!("max relative error {worst:.2e}"), start.elapsed());
}

#[test]
fn criterion_08_uv_consistency() {
    let start = Instant::now();
    let orders: Vec<f64> = consistency_fields()
        .iter()
        .map(|f| uv_consistency(f.as_ref(), 10.0, 200, 3, AXIS_EXCLUSION).unwrap().final_order().unwrap())
        .collect();
    let pass = orders.iter().all(|p| (p - 2.0).abs() <= 0.2);
    verdict(8, "u and v discretisations agree at second order", pass, format!("orders {orders:.3?}"), start.elapsed());
}

const SWEEP: &str = r#"
name = "acceptance-sweep"
[grid]
nodes = 1024
cutoff = 40.0
[solver]
horizon = 30.0
cfl = 0.5
scheme = "rk4"
form = "v"
snapshot_stride = 40
[data]
family = "gauss_bump"
delta = 0.0
width = 1.0
velocity = "zero"
[sweep]
deltas = [0.2, 0.1, 0.05, 0.02, 0.01]
"#;

#[test]
fn criterion_09_bound_chain() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let root = run_cli(Command::Sweep, SWEEP, tmp.path());
    let summary = read_json(&root.join("summary.json"));
    let monotone = summary["implied_bound_monotone"].as_bool().unwrap();
    let (mut snapshots, mut chain, mut worst_gap) = (0, true, f64::NEG_INFINITY);
    for k in 0..5 {
        for row in read_table(&root.join(format!("runs/{k:03}/timeseries.csv"))) {
            // t, E, max_abs_u, max_abs_ut, implied_bound, chain_holds
            snapshots += 1;
            chain &= row[5] == 1.0;
            worst_gap = worst_gap.max(row[2] - row[4]);
        }
    }
    let pass = chain && worst_gap <= 1e-3 && monotone && snapshots > 5;
    verdict(
        9,
        "pointwise bound chain over a δ-sweep",
        pass,
        format!("{snapshots} snapshots, chain {chain}, max(max|u| − bound) {worst_gap:.2e}, bound monotone {monotone}"),
        start.elapsed(),
    );
}

#[test]
fn criterion_10_scattering() {
    let start = Instant::now();
    let toml = SWEEP.replace("delta = 0.0", "delta = 0.02").replace("[sweep]\ndeltas = [0.2, 0.1, 0.05, 0.02, 0.01]\n", "");
    let tmp = tempfile::tempdir().unwrap();
    let root = run_cli(Command::Scatter, &toml, tmp.path());
    let traj = read_json(&root.join("trajectory.json"));
    let scat = read_json(&root.join("scattering.json"));
    let status = traj["status"].as_str().unwrap().to_string();
    let verdict_ = scat["verdict"].as_str().unwrap().to_string();
    let ratio = scat["final_defect"].as_f64().unwrap() / scat["peak"].as_f64().unwrap();
    let pass = status == "COMPLETED" && verdict_ == "DECAYING" && ratio < 0.1;
    verdict(
        10,
        "small data scatter",
        pass,
        format!("status {status}, verdict {verdict_}, final/peak {ratio:.3e}"),
        start.elapsed(),
    );
}

#[test]
fn criterion_11_radial_sobolev_scaling() {
    let start = Instant::now();
    let fam = probe_family(ProbeName::RadSob, 50, faddeev_core::diagnostics::PROBE_SEED).unwrap();
    let rep = inequality_probe(ProbeName::RadSob, &fam, &DyadicPartition::default()).unwrap();
    let slope = rep.loglog_slope.unwrap();
    verdict(11, "‖rφ_λ‖_∞/‖φ_λ‖₂ grows like λ", (slope - 1.0).abs() <= 0.05, format!("slope {slope:.4}"), start.elapsed());
}

#[test]
fn criterion_12_strichartz() {
    let start = Instant::now();
    let st = strichartz_grid(STRICHARTZ_OCTAVES, STRICHARTZ_WINDOW).unwrap();
    let fam = strichartz_family(STRICHARTZ_OCTAVES, 3, 3);
    let samples = free_wave_samples(&fam, &st).unwrap();
    let energy = strichartz_probe(f64::INFINITY, 2.0, &samples).unwrap();
    let s26 = strichartz_probe(2.0, 6.0, &samples).unwrap().loglog_slope.unwrap();
    let rv = rv_probe(4.0, &samples).unwrap().loglog_slope.unwrap();
    let elapsed = start.elapsed();
    let pass = energy.min >= 0.5
        && energy.max <= 2.0
        && s26.abs() < 0.1
        && (rv - 0.75).abs() <= 0.05
        && elapsed < Duration::from_secs(120);
    verdict(
        12,
        "Strichartz scaling on free waves",
        pass,
        format!("(∞,2) ratios [{:.4}, {:.4}], (2,6) slope {s26:.4}, rv q=4 slope {rv:.4}", energy.min, energy.max),
        elapsed,
    );
}

#[test]
fn criterion_13_nonlinear_estimate() {
    let start = Instant::now();
    let deltas = default_nonlin_deltas();
    let fam = nonlin_family(&deltas, 1024, 20.0, 5).unwrap();
    let samples = nonlin_samples(&fam, &DyadicPartition::default()).unwrap();
    let ratios: Vec<f64> = samples.iter().map(|s| s.lhs / s.x_tilde.powi(3)).collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let cubic = cubic_slope(&samples).unwrap();
    let xs: Vec<f64> = samples.iter().map(|s| s.delta.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let ratio_slope = least_squares_slope(&xs, &ys).unwrap();
    let constant = ProbeName::Nonlin.regression_constant();
    let pass = max <= constant && (cubic - 3.0).abs() <= 0.3 && ratio_slope >= -0.1;
    verdict(
        13,
        "cubic nonlinear estimate",
        pass,
        format!("max ratio {max:.3e} (constant {constant:.2e}), cubic slope {cubic:.3}, ratio slope in δ {ratio_slope:.3}"),
        start.elapsed(),
    );
}

#[test]
fn criterion_14_trilinear() {
    let start = Instant::now();
    let fam = trilinear_family(TRILINEAR_CLASSES, 15, TRILINEAR_SEED);
    let rep = trilinear_probe(&fam).unwrap();
    let slope = rep.loglog_slope.unwrap_or(f64::NAN);
    let elapsed = start.elapsed();
    let pass =
        rep.ratios.len() >= 100 && rep.max <= TRILINEAR_REGRESSION_CONSTANT && slope <= 0.1 && elapsed < Duration::from_secs(600);
    verdict(
        14,
        "trilinear estimate on packet triples",
        pass,
        format!(
            "{} triples, max {:.3e} (constant {TRILINEAR_REGRESSION_CONSTANT:.2e}), class-max slope {slope:.3}",
            rep.ratios.len(),
            rep.max
        ),
        elapsed,
    );
}

fn tree(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_15_determinism() {
    let start = Instant::now();
    let simulate = r#"
name = "det-simulate"
[grid]
nodes = 256
cutoff = 20.0
[solver]
horizon = 2.0
cfl = 0.5
scheme = "rk4"
form = "v"
snapshot_stride = 20
[data]
family = "gauss_bump"
delta = 0.05
width = 1.0
velocity = "outgoing"
"#;
    let probe = r#"
name = "det-probe"
seed = 7
[probe]
names = ["SOB", "ALGEBRA_Y"]
members = 3
"#;
    let verify = r#"
name = "det-verify"
[verify]
checks = ["nullform", "scaling"]
levels = 3
lambdas = [0.5, 2.0]
dr = 0.02
dt = 0.02
time = 0.4
"#;
    let tmp = tempfile::tempdir().unwrap();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (cmd, toml) in [(Command::Simulate, simulate), (Command::Probe, probe), (Command::Verify, verify)] {
        let a = run_cli(cmd, toml, &tmp.path().join(format!("{cmd:?}_a")));
        let b = run_cli(cmd, toml, &tmp.path().join(format!("{cmd:?}_b")));
        let (ta, tb) = (tree(&a), tree(&b));
        if ta != tb {
            mismatches.push(format!("{cmd:?}: file lists differ"));
            continue;
        }
        for rel in ta.iter().filter(|p| p.file_name().unwrap() != "timings.json") {
            compared += 1;
            if fs::read(a.join(rel)).unwrap() != fs::read(b.join(rel)).unwrap() {
                mismatches.push(format!("{cmd:?}: {}", rel.display()));
            }
        }
    }
    let pass = mismatches.is_empty() && compared > 0;
    verdict(
        15,
        "repeated runs are byte-identical",
        pass,
        format!("{compared} files compared, mismatches {mismatches:?}"),
        start.elapsed(),
    );
}
