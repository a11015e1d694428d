//! End-to-end runs of the `constrained-hardy` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_constrained-hardy"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn exec(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const NEIL: &str = "[[chain]]\ntype = \"derivation\"\npoint = [0.0, 0.0]\norder = 1\n";

#[test]
fn szego_exp_cos_neil_converges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "[domain]\nkind = \"disk\"\n\n[rho]\nlog_coefficients = [[[1, 0.5, 0.0], [-1, 0.5, 0.0]]]\n\n{NEIL}\n[output]\njson = \"r.json\"\ncsv = \"r.csv\"\n"
    );
    write(dir.path(), "c.toml", &cfg);
    let o = exec(&["szego-verify", "-c", "c.toml"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(rep["schema"], "constrained-hardy.report/1");
    // defaults are echoed
    assert_eq!(rep["config"]["domain"]["schedule"], serde_json::json!([16, 32, 64]));
    let trace = rep["results"]["trace"].as_array().unwrap();
    assert_eq!(trace.last().unwrap()["degree"], 64);
    assert!(trace.last().unwrap()["gap"].as_f64().unwrap() < 1e-3);

    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("M,gap"));
    let gaps: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{gaps:?}");
    assert!(dir.path().join("r.timings.json").exists());
}

fn sigma_column(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn widom_sigma_grids() {
    let dir = tempfile::tempdir().unwrap();
    let one = format!("[domain]\nkind = \"disk\"\nschedule = [16]\n[phi]\ncoefficients = [[[0, 1.0, 0.0]]]\n{NEIL}\n[output]\ncsv = \"one.csv\"\n");
    write(dir.path(), "one.toml", &one);
    let o = exec(&["widom-scan", "-c", "one.toml"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["results"]["verdict"]["verdict"], "consistent-invertible");
    let s = sigma_column(&std::fs::read_to_string(dir.path().join("one.csv")).unwrap());
    assert_eq!(s.len(), 12);
    assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-12));

    let zb = "[domain]\nkind = \"disk\"\nschedule = [16]\n[phi]\ncoefficients = [[[-2, 1.0, 0.0]]]\n[output]\ncsv = \"zb.csv\"\n";
    write(dir.path(), "zb.toml", zb);
    let o = exec(&["widom-scan", "-c", "zb.toml"], dir.path());
    assert_eq!(code(&o), 0);
    let s = sigma_column(&std::fs::read_to_string(dir.path().join("zb.csv")).unwrap());
    assert!(s.iter().any(|v| *v == 0.0));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "q.toml", "[domain]\nkind = \"annulus\"\nq = 1.2\nx0 = [0.9, 0.0]\n[rho]\ncoefficients = [[[0, 1.0, 0.0]], [[0, 1.0, 0.0]]]\n");
    let o = exec(&["szego-verify", "-c", "q.toml"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("q outside (0,1)"));

    write(dir.path(), "both.toml", "[domain]\nkind = \"disk\"\n[rho]\ncoefficients = [[[0, 1.0, 0.0]]]\n[phi]\ncoefficients = [[[0, 1.0, 0.0]]]\n");
    let o = exec(&["widom-scan", "-c", "both.toml"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exclusivity"));

    assert_eq!(code(&exec(&["kernel-dump", "-c", "missing.toml"], dir.path())), 2);
    assert_eq!(code(&exec(&["no-such-command"], dir.path())), 2);
}

#[test]
fn numerical_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // density ratio e^30 puts the weighted Gram matrix past the conditioning limit
    write(dir.path(), "g.toml", "[domain]\nkind = \"disk\"\nschedule = [64]\n[rho]\nlog_coefficients = [[[1, 7.5, 0.0], [-1, 7.5, 0.0]]]\n");
    let o = exec(&["szego-verify", "-c", "g.toml"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("condition number"));
}

#[test]
fn delta_calc_ops() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "chain.toml",
        "[[chain]]\ntype = \"two_point\"\npoints = [[0.3, 0.0], [-0.3, 0.0]]\n\n[[chain]]\ntype = \"derivation\"\npoint = [0.0, 0.0]\norder = 1\n",
    );
    let run = |args: &[&str]| {
        let mut a = vec!["delta-calc", "--chain", "chain.toml"];
        a.extend_from_slice(args);
        exec(&a, dir.path())
    };
    let o = run(&["--op", "product", "--points", "2,inf", "0.5,2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "(1+0i, 2+0i)");
    let o = run(&["--op", "inverse", "--points", "4,0.5"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "(0.25+0i, -0.5+0i)");
    let o = run(&["--op", "gamma"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "(1+0i, inf)");
    assert_eq!(code(&run(&["--op", "product", "--points", "2,inf"])), 2);
    assert_eq!(code(&run(&["--op", "inverse", "--points", "2"])), 2);
}

#[test]
fn kernel_dump_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("[domain]\nkind = \"disk\"\nschedule = [32]\n{NEIL}\n[kernel]\npoints = [[0.0, 0.0], [0.5, 0.0]]\n[output]\ncsv = \"k.csv\"\n");
    write(dir.path(), "k.toml", &cfg);
    let o = exec(&["kernel-dump", "-c", "k.toml"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("k.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    // Neil kernel at D = ∞: K(z, w) = 1 + z²w̄²/(1 − z w̄)
    let (z, w) = (rows[3][0], rows[3][2]);
    let want = 1.0 + (z * z * w * w) / (1.0 - z * w);
    assert!((rows[3][4] - want).abs() < 1e-8);
}

#[test]
fn reports_are_byte_identical_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "seed = 9\n[domain]\nkind = \"annulus\"\nq = 0.5\nx0 = [0.75, 0.0]\nschedule = [8, 12]\n[rho]\ncoefficients = [[[0, 1.0, 0.0], [1, 0.2, 0.0], [-1, 0.2, 0.0]], [[0, 0.5, 0.0]]]\n[[chain]]\ntype = \"two_point\"\npoints = [[0.6, 0.1], [-0.65, 0.0]]\n";
    write(dir.path(), "a.toml", cfg);
    let a = exec(&["szego-verify", "-c", "a.toml"], dir.path());
    let b = exec(&["szego-verify", "-c", "a.toml"], dir.path());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}
