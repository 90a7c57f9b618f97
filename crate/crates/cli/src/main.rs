use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semidiscrete_cli::config::NetConfig;
use semidiscrete_cli::error::validation;
use semidiscrete_cli::seeds::read_seed_strips;
use semidiscrete_cli::selftest::run_selftest;
use semidiscrete_cli::{run_job, JobConfig, JobError, Verb};

#[derive(Parser)]
#[command(name = "semidiscrete", version, about = "Build, analyse and export semi-discrete surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the raw samples of every family member.
    Generate(JobArgs),
    /// Write curvature, singularity and Weingarten reports and a summary.
    Analyze(JobArgs),
    /// Meshes and reports for the whole parallel family.
    Parallel(JobArgs),
    /// Write OBJ/PLY meshes.
    Export(JobArgs),
    /// Run built-in checks.
    Selftest {
        #[arg(long, default_value = "selftest-out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct JobArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV with columns k,re,im seeding the strips of a propagated net.
    #[arg(long)]
    seed_strips: Option<PathBuf>,
    /// Comma-separated spectral parameters, e.g. 0.01,-0.01.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda_sweep: Option<Vec<f64>>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

fn load(args: &JobArgs) -> Result<JobConfig, JobError> {
    let mut cfg = JobConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    if let Some(sweep) = &args.lambda_sweep {
        cfg.tolerances.lambda_sweep = sweep.clone();
    }
    for t in &args.tol {
        let (name, value) = t.split_once('=').ok_or_else(|| validation(format!("--tol expects NAME=VALUE, got '{t}'")))?;
        let value: f64 = value.trim().parse().map_err(|_| validation(format!("--tol {name}: '{value}' is not a number")))?;
        cfg.tolerances.set(name.trim(), value)?;
    }
    if let Some(path) = &args.seed_strips {
        let seeds_in = read_seed_strips(path, cfg.grid.k_min, cfg.grid.k_max)?;
        match &mut cfg.net {
            NetConfig::Propagated { seeds, .. } => *seeds = seeds_in,
            _ => return Err(validation("--seed-strips needs a propagated net")),
        }
    }
    Ok(cfg)
}

fn run(verb: Verb, args: &JobArgs) -> Result<(), JobError> {
    let cfg = load(args)?;
    let outcome = run_job(&cfg, verb)?;
    for p in &outcome.artifacts {
        println!("{}", p.display());
    }
    if let Some(s) = &outcome.summary {
        eprint!("{s}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, args) = match &cli.command {
        Command::Generate(a) => (Verb::Generate, a),
        Command::Analyze(a) => (Verb::Analyze, a),
        Command::Parallel(a) => (Verb::Parallel, a),
        Command::Export(a) => (Verb::Export, a),
        Command::Selftest { out } => {
            let checks = run_selftest(out);
            let mut ok = true;
            for c in &checks {
                println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.pass;
            }
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(3) };
        }
    };
    match run(verb, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
