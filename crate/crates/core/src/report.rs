//! Experiment runner and report serialization.
//!
//! Reports are pure functions of the resolved config: wall-clock timings are
//! kept out of the report and written to a sidecar file, so two runs of one
//! config produce byte-identical JSON.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boundary::WeightSpec;
use crate::chain::{validate_chain, AdmissibilityReport, DeltaPoint};
use crate::config::{ExperimentConfig, PlotKind};
use crate::error::{Error, Result};
use crate::rkhs::build_constrained_space;
use crate::szego::{verify_szego, SzegoReport};
use crate::toeplitz::{widom_scan, WidomScan};

pub const REPORT_SCHEMA: &str = "constrained-hardy.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SzegoVerify,
    WidomScan,
    KernelDump,
}

/// `K(z_i, z_j)` for the configured points at one Δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDump {
    pub degree: usize,
    pub delta: DeltaPoint,
    pub points: Vec<[f64; 2]>,
    /// `values[i][j] = [re, im]` of `K(z_i, z_j)`.
    pub values: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Results {
    Szego(SzegoReport),
    Widom(WidomScan),
    Kernel(KernelDump),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub experiment: Experiment,
    /// Config with all defaults materialized.
    pub config: ExperimentConfig,
    pub admissibility: AdmissibilityReport,
    pub results: Results,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub timings: Vec<StageTiming>,
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f();
    timings.push(StageTiming {
        stage: stage.to_string(),
        seconds: t.elapsed().as_secs_f64(),
    });
    out
}

/// Runs one experiment. Nothing is written; see [`write_outputs`].
pub fn run(config: &ExperimentConfig, experiment: Experiment) -> Result<RunOutput> {
    config.validate()?;
    let resolved = config.resolved()?;
    let domain = config.domain()?;
    let chain = &config.chain;
    let mut timings = Vec::new();

    let admissibility = timed(&mut timings, "chain admissibility", || {
        let rep = validate_chain(chain, &domain, config.seed)?;
        rep.ensure()?;
        Ok(rep)
    })
    .map_err(|e| e.in_stage("chain admissibility"))?;

    let results = match experiment {
        Experiment::SzegoVerify => {
            let block = config
                .rho
                .as_ref()
                .ok_or_else(|| Error::Config("szego-verify needs a [rho] block".into()))?;
            let rho = block.to_boundary(&domain)?;
            let rep = timed(&mut timings, "szego-verify", || {
                verify_szego(&rho, chain, &domain, &config.domain.schedule)
            })
            .map_err(|e| e.in_stage("szego-verify"))?;
            Results::Szego(rep)
        }
        Experiment::WidomScan => {
            let block = config
                .phi
                .as_ref()
                .ok_or_else(|| Error::Config("widom-scan needs a [phi] block".into()))?;
            let phi = block.to_boundary(&domain)?;
            let scan = timed(&mut timings, "widom-scan", || {
                widom_scan(&phi, chain, &domain, &resolved.scan)
            })
            .map_err(|e| e.in_stage("widom-scan"))?;
            Results::Widom(scan)
        }
        Experiment::KernelDump => {
            if config.phi.is_some() {
                return Err(Error::Config("kernel-dump takes [rho] as its weight, not [phi]".into()));
            }
            let block = config
                .kernel
                .as_ref()
                .ok_or_else(|| Error::Config("kernel-dump needs a [kernel] block".into()))?;
            let weight = match &config.rho {
                Some(r) => WeightSpec::Density(r.to_boundary(&domain)?),
                None => WeightSpec::Unit,
            };
            let delta = config.kernel_delta()?;
            let dump = timed(&mut timings, "kernel-dump", || {
                let space = build_constrained_space(&domain, &weight, chain, &delta)?;
                let pts: Vec<C64> = block.points.iter().map(|p| C64::new(p[0], p[1])).collect();
                let values = pts
                    .iter()
                    .map(|&z| {
                        pts.iter()
                            .map(|&w| {
                                let k = space.kernel_eval(z, w);
                                [k.re, k.im]
                            })
                            .collect()
                    })
                    .collect();
                Ok(KernelDump {
                    degree: domain.truncation(),
                    delta: delta.clone(),
                    points: block.points.clone(),
                    values,
                })
            })
            .map_err(|e| e.in_stage("kernel-dump"))?;
            Results::Kernel(dump)
        }
    };

    Ok(RunOutput {
        report: Report {
            schema: REPORT_SCHEMA.to_string(),
            experiment,
            config: resolved,
            admissibility,
            results,
        },
        timings,
    })
}

/// Deterministic pretty JSON with a trailing newline.
pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn default_plot(report: &Report) -> PlotKind {
    match report.results {
        Results::Szego(_) => PlotKind::Convergence,
        Results::Widom(_) => PlotKind::SigmaGrid,
        Results::Kernel(_) => PlotKind::KernelTable,
    }
}

/// Shortest round-trip text, switching to exponent form for small or large
/// magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// CSV text for `kind`:
/// `convergence` gives `M,gap`; `sigma-grid` gives `alpha,delta,sigma_min`;
/// `kernel-table` gives one row per point pair.
pub fn plot_csv(report: &Report, kind: PlotKind) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match (&report.results, kind) {
        (Results::Szego(r), PlotKind::Convergence) => {
            w.write_record(["M", "gap"]).map_err(csv_err)?;
            for t in &r.trace {
                w.write_record([t.degree.to_string(), num(t.gap)])
                    .map_err(csv_err)?;
            }
        }
        (Results::Widom(s), PlotKind::SigmaGrid) => {
            w.write_record(["alpha", "delta", "sigma_min"]).map_err(csv_err)?;
            for p in &s.points {
                let alpha = p.alpha.iter().map(|&a| num(a)).collect::<Vec<_>>().join(";");
                w.write_record([alpha, p.delta.to_string(), num(p.sigma_min)])
                    .map_err(csv_err)?;
            }
        }
        (Results::Kernel(k), PlotKind::KernelTable) => {
            w.write_record(["z_re", "z_im", "w_re", "w_im", "k_re", "k_im"])
                .map_err(csv_err)?;
            for (z, row) in k.points.iter().zip(&k.values) {
                for (wp, v) in k.points.iter().zip(row) {
                    w.write_record([z[0], z[1], wp[0], wp[1], v[0], v[1]].map(num))
                        .map_err(csv_err)?;
                }
            }
        }
        (_, kind) => {
            return Err(Error::Precondition(format!(
                "plot kind {kind:?} does not match a {:?} report",
                report.experiment
            )))
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Writes the plot table for `kind` to `path`.
pub fn emit_plot_data(report: &Report, kind: PlotKind, path: &Path) -> Result<()> {
    write_atomic(path, plot_csv(report, kind)?.as_bytes())
}

/// `report.json` → `report.timings.json`.
pub fn timings_path(json: &Path) -> PathBuf {
    json.with_extension("timings.json")
}

/// Writes every output the config requests and returns their paths.
pub fn write_outputs(out: &RunOutput) -> Result<Vec<PathBuf>> {
    let o = &out.report.config.output;
    let mut written = Vec::new();
    if let Some(p) = &o.json {
        write_atomic(p, report_json(&out.report).as_bytes())?;
        let tp = timings_path(p);
        let t = serde_json::to_string_pretty(&out.timings).expect("timings serialize");
        write_atomic(&tp, t.as_bytes())?;
        written.push(p.clone());
        written.push(tp);
    }
    if let Some(p) = &o.csv {
        let kind = o.plot.unwrap_or_else(|| default_plot(&out.report));
        emit_plot_data(&out.report, kind, p)?;
        written.push(p.clone());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn cfg(body: &str) -> ExperimentConfig {
        parse_config(body).unwrap()
    }

    #[test]
    fn constant_rho_on_neil() {
        let c = cfg("[domain]\nkind = \"disk\"\nschedule = [8, 16]\n[rho]\ncoefficients = [[[0, 1.0, 0.0]]]\n[[chain]]\ntype = \"derivation\"\npoint = [0.0, 0.0]\norder = 1\n");
        let out = run(&c, Experiment::SzegoVerify).unwrap();
        let Results::Szego(r) = &out.report.results else { panic!() };
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert_eq!(out.report.config.domain.x0, Some([0.0, 0.0]));
        let csv = plot_csv(&out.report, PlotKind::Convergence).unwrap();
        assert!(csv.starts_with("M,gap\n8,"));
        assert!(plot_csv(&out.report, PlotKind::SigmaGrid).is_err());
    }

    #[test]
    fn constant_phi_scan() {
        let c = cfg("[domain]\nkind = \"disk\"\nschedule = [6]\n[phi]\ncoefficients = [[[0, 1.0, 0.0]]]\n[[chain]]\ntype = \"derivation\"\npoint = [0.0, 0.0]\norder = 1\n");
        let out = run(&c, Experiment::WidomScan).unwrap();
        let Results::Widom(s) = &out.report.results else { panic!() };
        assert_eq!(s.verdict, crate::toeplitz::Verdict::ConsistentInvertible);
        let csv = plot_csv(&out.report, PlotKind::SigmaGrid).unwrap();
        for line in csv.lines().skip(1) {
            let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_block_is_config_error() {
        let c = cfg("[domain]\nkind = \"disk\"\nschedule = [6]\n");
        assert!(matches!(run(&c, Experiment::SzegoVerify), Err(Error::Config(_))));
        assert!(matches!(run(&c, Experiment::KernelDump), Err(Error::Config(_))));
    }

    #[test]
    fn kernel_dump_and_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let json = dir.path().join("k.json");
        let csv = dir.path().join("k.csv");
        let text = format!(
            "[domain]\nkind = \"disk\"\nschedule = [8]\n[kernel]\npoints = [[0.0, 0.0], [0.5, 0.0]]\n[output]\njson = {:?}\ncsv = {:?}\n",
            json.display().to_string(),
            csv.display().to_string()
        );
        let out = run(&cfg(&text), Experiment::KernelDump).unwrap();
        let Results::Kernel(k) = &out.report.results else { panic!() };
        // degree-8 section of 1/(1 - |z|²)
        let want: f64 = (0..=8).map(|j| 0.25f64.powi(j)).sum();
        assert!((k.values[1][1][0] - want).abs() < 1e-12);
        let paths = write_outputs(&out).unwrap();
        assert_eq!(paths.len(), 3);
        let back: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(back, out.report);
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
        assert!(timings_path(&json).exists());
    }
}
