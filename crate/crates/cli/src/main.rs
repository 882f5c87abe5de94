//! Command-line front end: run experiments and verify emitted reports.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mobisim_core::report::write_shadow_dump;
use mobisim_core::runner::point_config;
use mobisim_core::{
    emit_reports, load_config, run_experiment, verify_dir, EmitOptions, Simulation, SweepPoint,
};

#[derive(Parser)]
#[command(name = "mobisim", version, about = "Beamformed cellular network simulator with outage-session reliability KPIs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more simulation scenarios and emit KPI reports.
    Simulate(SimulateArgs),
    /// Recompute all KPIs from the traces in a report directory.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario config file (flat key = value).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for kpi.csv / kpi.json / traces.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated UE speeds in km/h; defaults to the config's speed.
    #[arg(long, value_delimiter = ',')]
    speeds: Option<Vec<f64>>,
    /// Hand blockage: on, off, or both (one sweep point each).
    #[arg(long, value_enum)]
    blockage: Option<BlockageMode>,
    /// Replications per sweep point (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    reps: u32,
    /// Export per-UE interval traces and session tables.
    #[arg(long)]
    trace: bool,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    /// Dump each cell's shadow-fading grid for the first sweep point.
    #[arg(long)]
    dump_shadow: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Report directory written by `simulate`.
    #[arg(long)]
    report: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockageMode {
    On,
    Off,
    Both,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Verify(args) => verify(args),
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let cfg = load_config(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;

    let speeds = args.speeds.unwrap_or_else(|| vec![cfg.ue_speed_kmh]);
    let blockages: Vec<bool> = match args.blockage {
        None => vec![cfg.hand_blockage],
        Some(BlockageMode::Off) => vec![false],
        Some(BlockageMode::On) => vec![true],
        Some(BlockageMode::Both) => vec![false, true],
    };
    let sweep: Vec<SweepPoint> = speeds
        .iter()
        .flat_map(|&speed_kmh| {
            blockages.iter().map(move |&hand_blockage| SweepPoint {
                speed_kmh,
                hand_blockage,
            })
        })
        .collect();

    let results = run_experiment(&cfg, &sweep, args.reps, args.trace)?;
    let mut manifest = emit_reports(&results, &args.out, &EmitOptions { force: args.force })?;

    if args.dump_shadow {
        let first = point_config(&cfg, &sweep[0], 0);
        let sim: Simulation = Simulation::new(&first)?;
        manifest.extend(write_shadow_dump(&sim, &args.out, args.force)?);
    }

    for r in &results {
        let rep = &r.report;
        println!(
            "{}: sessions={} ho={} fail={} outage={:.3}% mot={} mtbo={}",
            rep.scenario,
            rep.n_sessions,
            rep.n_ho_success,
            rep.n_mobility_failure,
            rep.total_outage_pct,
            rep.mot_s.map_or("n/a".into(), |v| format!("{:.4}s", v)),
            rep.mtbo_s.map_or("n/a".into(), |v| format!("{:.3}s", v)),
        );
    }
    println!("wrote {} files to {}", manifest.len(), args.out.display());
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<()> {
    let outcome = verify_dir(&args.report)
        .with_context(|| format!("verifying {}", args.report.display()))?;
    if outcome.is_ok() {
        println!(
            "verify: {} report(s) reproduced exactly from traces",
            outcome.n_reports
        );
        Ok(())
    } else {
        for m in &outcome.mismatches {
            eprintln!("mismatch: {m}");
        }
        bail!("{} mismatch(es) across {} report(s)", outcome.mismatches.len(), outcome.n_reports);
    }
}
