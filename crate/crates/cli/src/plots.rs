//! gnuplot data files and driver scripts.

use faddeev_core::report::least_squares_slope;

use crate::error::CliError;
use crate::output::{num, OutputDir};

#[derive(Debug, Clone)]
pub enum PlotSource {
    /// `E(t)`.
    Energy { name: String, times: Vec<f64>, energy: Vec<f64> },
    /// Scattering defect against `t`.
    Defect { name: String, times: Vec<f64>, defect: Vec<f64> },
    /// Ratios against a parameter, drawn on log-log axes.
    Ratio { name: String, parameters: Vec<f64>, ratios: Vec<f64> },
}

impl PlotSource {
    fn name(&self) -> &str {
        match self {
            PlotSource::Energy { name, .. } | PlotSource::Defect { name, .. } | PlotSource::Ratio { name, .. } => name,
        }
    }
}

#[derive(Debug, Default, PartialEq)]
pub struct PlotSummary {
    pub written: Vec<String>,
    /// Sources with nothing to draw.
    pub skipped: Vec<String>,
}

fn series(xs: &[f64], ys: &[f64]) -> String {
    xs.iter().zip(ys).map(|(x, y)| format!("{} {}\n", num(*x), num(*y))).collect()
}

fn script(name: &str, xlabel: &str, ylabel: &str, extra: &str, using: &str) -> String {
    format!(
        "set terminal pngcairo size 900,600\nset output '{name}.png'\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n{extra}plot '{name}.dat' using {using} with linespoints title '{name}'\n"
    )
}

/// Writes `plots/<name>.dat` and `plots/<name>.gp` for each source; empty sources are skipped.
pub fn emit_plots(out: &mut OutputDir, sources: &[PlotSource]) -> Result<PlotSummary, CliError> {
    let mut summary = PlotSummary::default();
    for src in sources {
        let name = src.name();
        let (data, gp) = match src {
            PlotSource::Energy { times, energy, .. } if !times.is_empty() => {
                (format!("# t E\n{}", series(times, energy)), script(name, "t", "E", "", "1:2"))
            }
            PlotSource::Defect { times, defect, .. } if !times.is_empty() => {
                (format!("# t defect\n{}", series(times, defect)), script(name, "t", "defect", "set logscale y\n", "1:2"))
            }
            PlotSource::Ratio { parameters, ratios, .. } if !ratios.is_empty() => {
                let keep: Vec<(f64, f64)> = parameters
                    .iter()
                    .zip(ratios)
                    .filter(|(p, r)| **p > 0.0 && **r > 0.0)
                    .map(|(p, r)| (p.ln(), r.ln()))
                    .collect();
                if keep.is_empty() {
                    summary.skipped.push(name.to_string());
                    continue;
                }
                let (xs, ys): (Vec<f64>, Vec<f64>) = keep.into_iter().unzip();
                let slope = least_squares_slope(&xs, &ys).map(num).unwrap_or_else(|| "none".into());
                (
                    format!("# fitted slope {slope}\n# ln(parameter) ln(ratio)\n{}", series(&xs, &ys)),
                    script(name, "ln parameter", "ln ratio", "", "1:2"),
                )
            }
            _ => {
                summary.skipped.push(name.to_string());
                continue;
            }
        };
        for (ext, comment, body) in [("dat", "#", data), ("gp", "#", gp)] {
            let rel = format!("plots/{name}.{ext}");
            out.text(&rel, comment, &body)?;
            summary.written.push(rel);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "h").unwrap();
        assert_eq!(emit_plots(&mut out, &[]).unwrap(), PlotSummary::default());
        assert!(!dir.path().join("plots").exists());
    }

    #[test]
    fn energy_is_two_columns() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "h").unwrap();
        let src = PlotSource::Energy { name: "energy".into(), times: vec![0.0, 0.5], energy: vec![1.0, 1.0] };
        emit_plots(&mut out, &[src]).unwrap();
        let dat = std::fs::read_to_string(dir.path().join("plots/energy.dat")).unwrap();
        let rows: Vec<&str> = dat.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, ["0 1", "0.5 1"]);
        assert!(dir.path().join("plots/energy.gp").exists());
    }

    #[test]
    fn ratio_header_carries_the_fit() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "h").unwrap();
        let src = PlotSource::Ratio { name: "r".into(), parameters: vec![1.0, 2.0, 4.0], ratios: vec![1.0, 4.0, 16.0] };
        emit_plots(&mut out, &[src]).unwrap();
        let dat = std::fs::read_to_string(dir.path().join("plots/r.dat")).unwrap();
        let slope: f64 = dat.lines().nth(1).unwrap().trim_start_matches("# fitted slope ").parse().unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_report_is_listed() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "h").unwrap();
        let src = PlotSource::Defect { name: "d".into(), times: vec![], defect: vec![] };
        let s = emit_plots(&mut out, &[src]).unwrap();
        assert_eq!(s.skipped, ["d"]);
        assert!(s.written.is_empty());
    }
}
