use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use constrained_hardy::chain::{delta_gamma, delta_inverse, delta_product, DeltaPoint, GamelinChain};
use constrained_hardy::config::parse_config;
use constrained_hardy::report::{report_json, run, write_outputs, Experiment, Results};
use constrained_hardy::Error;

/// Constrained Hardy space experiments.
///
/// Exit status: 0 on success, 2 on configuration or input errors,
/// 3 when a numerical guard aborts the computation.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compare both sides of the constrained Szegő identity over the M schedule.
    SzegoVerify {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Scan Toeplitz singular values over Σ × Δ and report the Widom verdict.
    WidomScan {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Tabulate the constrained kernel at the configured points.
    KernelDump {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Projective arithmetic on Δ for a chain.
    DeltaCalc {
        /// TOML file with `[[chain]]` records.
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, value_enum)]
        op: DeltaOp,
        /// Δ points as comma-separated coordinates, e.g. "2,inf".
        #[arg(long, num_args = 0..)]
        points: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaOp {
    Product,
    Inverse,
    Gamma,
}

fn experiment(config: &PathBuf, kind: Experiment) -> Result<(), Error> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
    let cfg = parse_config(&text)?;
    let out = run(&cfg, kind)?;
    let written = write_outputs(&out)?;
    if out.report.config.output.json.is_none() {
        print!("{}", report_json(&out.report));
    } else {
        match &out.report.results {
            Results::Szego(r) => println!(
                "M={} lhs={:.10} rhs={:.10} gap={:.3e}",
                r.degree, r.lhs, r.rhs, r.gap
            ),
            Results::Widom(s) => println!(
                "verdict={:?} min_sigma={:.3e} distance={:.6} points={}",
                s.verdict,
                s.min_sigma,
                s.distance.value,
                s.points.len()
            ),
            Results::Kernel(k) => println!("kernel table {}x{}", k.points.len(), k.points.len()),
        }
    }
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn delta_calc(chain: &PathBuf, op: DeltaOp, points: &[String]) -> Result<(), Error> {
    let text = std::fs::read_to_string(chain)
        .map_err(|e| Error::Config(format!("{}: {e}", chain.display())))?;
    let chain = GamelinChain::from_toml(&text)?;
    let pts = points
        .iter()
        .map(|s| DeltaPoint::parse_list(s))
        .collect::<Result<Vec<_>, _>>()?;
    let need = match op {
        DeltaOp::Product => 2,
        DeltaOp::Inverse => 1,
        DeltaOp::Gamma => 0,
    };
    if pts.len() != need {
        return Err(Error::Config(format!("expected {need} points, got {}", pts.len())));
    }
    let result = match op {
        DeltaOp::Product => delta_product(&pts[0], &pts[1], &chain)?,
        DeltaOp::Inverse => delta_inverse(&pts[0], &chain)?,
        DeltaOp::Gamma => delta_gamma(&chain),
    };
    println!("{result}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::SzegoVerify { config } => experiment(config, Experiment::SzegoVerify),
        Cmd::WidomScan { config } => experiment(config, Experiment::WidomScan),
        Cmd::KernelDump { config } => experiment(config, Experiment::KernelDump),
        Cmd::DeltaCalc { chain, op, points } => delta_calc(chain, *op, points),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
