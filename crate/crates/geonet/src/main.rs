use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geonet::{execute, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "geonet", version, about = "Stationary geodesic nets by curve shortening and min-max")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Also write net.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shorten one cycle to a stationary net or to a point.
    Shorten(Common),
    /// Pull a sweepout down and extract a stationary cycle near its width.
    Minmax(Common),
    /// Check the 4d bound with the two-disc tetrahedron family.
    VerifyT1q2(Common),
    /// Check the 2d bound for a closed geodesic on a torus.
    VerifyPi1(Common),
    /// Check the first-variation formula against finite differences.
    Gradcheck(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Shorten(a) => (Command::Shorten, a),
        Cmd::Minmax(a) => (Command::Minmax, a),
        Cmd::VerifyT1q2(a) => (Command::VerifyT1q2, a),
        Cmd::VerifyPi1(a) => (Command::VerifyPi1, a),
        Cmd::Gradcheck(a) => (Command::Gradcheck, a),
    };
    match main_inner(command, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main_inner(command: Command, args: Common) -> Result<i32, geonet::RunError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.output.svg |= args.svg;
    let run = execute(&cfg, Some(command))?;
    let svg = cfg.output.svg.then(|| geonet::run::projection(&cfg, &run.artifacts.manifold));
    run.write(&cfg.output.dir, svg)?;
    let r = &run.report;
    for b in &r.bounds {
        println!("{:<26} {:>14.9} <= {:<14.9} {}", b.name, b.measured, b.bound, if b.pass { "pass" } else { "FAIL" });
    }
    println!("status: {:?}, report: {}", r.status, cfg.output.dir.join("report.json").display());
    Ok(r.status.exit_code())
}
