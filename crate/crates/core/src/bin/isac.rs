use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isac_track::experiments::{
    linear_grid, parse_grid, sp1_report, sweep_angle, tradeoff, write_sweep_csv, write_track_csv,
    write_tradeoff_csv, RunManifest,
};
use isac_track::optimize::solve_sp1;
use isac_track::params::ParamsFile;
use isac_track::sim::{run_scenario, ScenarioConfig, Scheme};
use isac_track::validate::{render_table, run_suite};
use isac_track::{Error, Result, SystemParams};

#[derive(Parser)]
#[command(name = "isac", version, about = "UAV ISAC tracking experiments")]
struct Cli {
    /// Flat `key = value` parameter file; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-slot tracking run as CSV.
    Track {
        #[arg(long, default_value = "proposed")]
        scheme: Scheme,
        /// Overridden by ISAC_SEED.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        slots: usize,
        /// Keep only slots divisible by this.
        #[arg(long, default_value_t = 1)]
        every: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal elevation angle over altitude for each weight.
    SweepAngle {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.3, 0.5, 0.7, 1.0])]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        h_min: f64,
        #[arg(long, default_value_t = 100.0)]
        h_max: f64,
        #[arg(long, default_value_t = 0.25)]
        h_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate versus sensing frontier per weight.
    Tradeoff {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 0.9, 1.0])]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 0.15)]
        a1: f64,
        /// lo:hi:step in metres.
        #[arg(long, default_value = "0:100:0.01")]
        x_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Static optimal relative position.
    SolveSp1 {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "H", alias = "h")]
        h: Option<f64>,
    },
    /// Run the self-check suite.
    Validate,
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) | Error::InvalidParam { .. } => 2,
        Error::InfeasibleQos { .. } | Error::EmptyInterval { .. } | Error::VelocityBound { .. } => {
            3
        }
        _ => 1,
    }
}

fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var("ISAC_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("ISAC_SEED=`{s}`: {e}"))),
        Err(_) => Ok(flag),
    }
}

fn emit(
    out: Option<&Path>,
    manifest: RunManifest,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write(&mut file)?;
            file.flush()?;
            let manifest = RunManifest {
                outputs: vec![path.to_path_buf()],
                ..manifest
            };
            manifest.write_next_to(path)?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            write(&mut stdout)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    let file = match &cli.config {
        Some(path) => ParamsFile::load(path)?,
        None => ParamsFile::default(),
    };
    let params = file.into_params()?;
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }
    let args: Vec<String> = std::env::args().skip(1).collect();

    match cli.cmd {
        Cmd::Track {
            scheme,
            seed,
            slots,
            every,
            out,
        } => {
            let seed = resolve_seed(seed)?;
            let cfg = ScenarioConfig {
                n_slots: slots,
                seed,
                scheme,
                ..Default::default()
            };
            let records = run_scenario(&cfg, &params)?;
            let mut manifest = RunManifest::new("track", args, file);
            manifest.seeds = vec![seed];
            manifest.scenario = Some(cfg);
            emit(out.as_deref(), manifest, |w| {
                write_track_csv(w, &records, every)
            })?;
        }
        Cmd::SweepAngle {
            alphas,
            h_min,
            h_max,
            h_step,
            out,
        } => {
            let rows = sweep_angle(&params, &alphas, &linear_grid(h_min, h_max, h_step)?);
            let manifest = RunManifest::new("sweep-angle", args, file);
            emit(out.as_deref(), manifest, |w| write_sweep_csv(w, &rows))?;
        }
        Cmd::Tradeoff {
            alphas,
            a1,
            x_grid,
            out,
        } => {
            let points = tradeoff(&params, &alphas, a1, &parse_grid(&x_grid)?)?;
            let manifest = RunManifest::new("tradeoff", args, file);
            emit(out.as_deref(), manifest, |w| write_tradeoff_csv(w, &points))?;
        }
        Cmd::SolveSp1 { alpha, h } => {
            let mut p: SystemParams = params;
            if let Some(a) = alpha {
                p = p.with_alpha(a);
            }
            if let Some(h) = h {
                p = p.with_altitude(h);
            }
            p.validate()?;
            let r = solve_sp1(&p)?;
            print!("{}", sp1_report(&r, &p));
        }
        Cmd::Validate => {
            let results = run_suite(&params);
            print!("{}", render_table(&results));
            if results.iter().any(|r| !r.passed) {
                return Ok(Outcome::ChecksFailed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
