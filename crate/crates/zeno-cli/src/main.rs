//! `zeno` — experiment runner for the dissipation-protected CNOT simulator.
//!
//! Each subcommand runs one reproducible experiment, writes CSV (and SVG
//! where a figure is defined) into the output directory, prints its
//! assertion results, and exits nonzero if any assertion failed. The last
//! stdout line is a machine-readable JSON summary.

mod config;
mod experiments;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "zeno",
    about = "Simulator of a dissipation-protected CNOT gate in a leaky cavity",
    version
)]
struct Cli {
    /// TOML config file; CLI flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV/SVG artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base RNG seed for all Monte-Carlo substreams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cavity photon truncation.
    #[arg(long, global = true, value_name = "INT")]
    n_max: Option<usize>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P0 over one CNOT pulse vs Rabi frequency, per spontaneous-emission rate.
    Fig2(Fig2Args),
    /// One CNOT pulse on a chosen initial state.
    Cnot(CnotArgs),
    /// Mean first-emission time vs gate duration scaling in 1/omega.
    Scaling(ScalingArgs),
    /// Dark-period statistics of the three-level V-configuration atom.
    Vsystem(VsystemArgs),
    /// Decoherence-free basis and complement decay spectrum.
    Dfs(DfsArgs),
}

#[derive(Args)]
struct Fig2Args {
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    #[arg(long)]
    omega_points: Option<usize>,
    /// Comma-separated curve values.
    #[arg(long, value_delimiter = ',')]
    gamma_cav: Option<Vec<f64>>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
}

#[derive(Args)]
struct CnotArgs {
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    gamma_cav: Option<f64>,
    /// 000/001/010/011, `0a`, or e.g. `010+011`.
    #[arg(long)]
    initial: Option<String>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
}

#[derive(Args)]
struct VsystemArgs {
    #[arg(long)]
    omega_w_min: Option<f64>,
    #[arg(long)]
    omega_w_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    omega_s: Option<f64>,
    #[arg(long)]
    gamma_s: Option<f64>,
    #[arg(long)]
    trajectories: Option<u64>,
}

#[derive(Args)]
struct DfsArgs {
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
}

macro_rules! override_field {
    ($target:expr, $source:expr) => {
        if let Some(v) = $source {
            $target = v;
        }
    };
}

fn main() -> ExitCode {
    match run() {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    override_field!(cfg.run.out, cli.out.clone());
    override_field!(cfg.run.seed, cli.seed);
    override_field!(cfg.run.n_max, cli.n_max);
    override_field!(cfg.run.jobs, cli.jobs);
    if cfg.run.n_max < 1 {
        anyhow::bail!("n_max must be at least 1");
    }

    if cfg.run.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.jobs)
            .build_global()
            .context("cannot configure worker pool")?;
    }
    std::fs::create_dir_all(&cfg.run.out)
        .with_context(|| format!("cannot create output directory {}", cfg.run.out.display()))?;
    let out_dir = cfg.run.out.clone();

    match &cli.command {
        Command::Fig2(args) => {
            override_field!(cfg.fig2.omega_min, args.omega_min);
            override_field!(cfg.fig2.omega_max, args.omega_max);
            override_field!(cfg.fig2.omega_points, args.omega_points);
            override_field!(cfg.fig2.gamma_cav, args.gamma_cav.clone());
            override_field!(cfg.fig2.kappa, args.kappa);
            override_field!(cfg.fig2.g, args.g);
        }
        Command::Cnot(args) => {
            override_field!(cfg.cnot.omega, args.omega);
            override_field!(cfg.cnot.kappa, args.kappa);
            override_field!(cfg.cnot.g, args.g);
            override_field!(cfg.cnot.gamma_cav, args.gamma_cav);
            override_field!(cfg.cnot.initial, args.initial.clone());
        }
        Command::Scaling(args) => {
            override_field!(cfg.scaling.omega_min, args.omega_min);
            override_field!(cfg.scaling.omega_max, args.omega_max);
            override_field!(cfg.scaling.points, args.points);
            override_field!(cfg.scaling.kappa, args.kappa);
            override_field!(cfg.scaling.g, args.g);
        }
        Command::Vsystem(args) => {
            override_field!(cfg.vsystem.omega_w_min, args.omega_w_min);
            override_field!(cfg.vsystem.omega_w_max, args.omega_w_max);
            override_field!(cfg.vsystem.points, args.points);
            override_field!(cfg.vsystem.omega_s, args.omega_s);
            override_field!(cfg.vsystem.gamma_s, args.gamma_s);
            override_field!(cfg.vsystem.trajectories, args.trajectories);
        }
        Command::Dfs(args) => {
            override_field!(cfg.dfs.kappa, args.kappa);
            override_field!(cfg.dfs.g, args.g);
        }
    }
    cfg.validate()?;

    let report = match cli.command {
        Command::Fig2(_) => experiments::fig2::run(&cfg.fig2, &cfg.run, &out_dir)?,
        Command::Cnot(_) => experiments::cnot::run(&cfg.cnot, &cfg.run, &out_dir)?,
        Command::Scaling(_) => experiments::scaling::run(&cfg.scaling, &cfg.run, &out_dir)?,
        Command::Vsystem(_) => experiments::vsystem::run(&cfg.vsystem, &cfg.run, &out_dir)?,
        Command::Dfs(_) => experiments::dfs::run(&cfg.dfs, &cfg.run, &out_dir)?,
    };

    println!("{}", report.summary_json());
    Ok(report.all_passed())
}
