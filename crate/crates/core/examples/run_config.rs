//! Drives an experiment from a TOML config, as the CLI does, and prints the
//! report. Usage: `cargo run --example run_config -- configs/widom_neil.toml widom-scan`.

use constrained_hardy::config::parse_config;
use constrained_hardy::report::{plot_csv, report_json, run, Experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "configs/szego_neil_exp_cos.toml".into());
    let kind = match args.next().as_deref() {
        Some("widom-scan") => Experiment::WidomScan,
        Some("kernel-dump") => Experiment::KernelDump,
        _ => Experiment::SzegoVerify,
    };
    let cfg = parse_config(&std::fs::read_to_string(&path)?)?;
    let out = run(&cfg, kind)?;
    let json = report_json(&out.report);
    println!("{}", json.lines().take(12).collect::<Vec<_>>().join("\n"));
    println!("... ({} bytes)", json.len());
    let kind = match kind {
        Experiment::SzegoVerify => constrained_hardy::config::PlotKind::Convergence,
        Experiment::WidomScan => constrained_hardy::config::PlotKind::SigmaGrid,
        Experiment::KernelDump => constrained_hardy::config::PlotKind::KernelTable,
    };
    print!("{}", plot_csv(&out.report, kind)?);
    for t in &out.timings {
        println!("# {}: {:.3} s", t.stage, t.seconds);
    }
    Ok(())
}
