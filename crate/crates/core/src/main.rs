use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use headpred::autoreg::{save_models, DEFAULT_MAX_LAG};
use headpred::eval::{
    emit_outputs, load_config, run_eval, to_grid, train_ar, PredictorKind, DEFAULT_BURN_IN,
    DEFAULT_LAT_MS, DEFAULT_RESAMPLE_HZ,
};
use headpred::metrics::{velocity_stats, DEFAULT_SG_POLYORDER, DEFAULT_SG_WINDOW};
use headpred::synth::{generate, load_profile};
use headpred::{load_trace, make_lookahead, save_trace, Result};

#[derive(Parser)]
#[command(name = "headpred", version, about = "6DoF head-motion prediction toolkit")]
struct Cli {
    /// Log progress and per-combination MAEs (with and without burn-in).
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay traces through the predictors and write result tables.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated LATs in milliseconds.
        #[arg(long, value_delimiter = ',')]
        lat: Option<Vec<f64>>,
        /// Comma-separated subset of baseline,autoreg,kalman.
        #[arg(long, value_delimiter = ',')]
        predictors: Option<Vec<String>>,
        /// Added to every synthetic trace seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a synthetic trace from a TOML motion profile.
    Synth {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Velocity statistics of a trace.
    Stats {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SG_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = DEFAULT_SG_POLYORDER)]
        polyorder: usize,
    },
    /// Fit per-dimension AR models on training traces and save them as JSON.
    TrainAr {
        /// Comma-separated trace CSV paths.
        #[arg(long, value_delimiter = ',', required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
        max_lag: usize,
        #[arg(long, default_value_t = DEFAULT_RESAMPLE_HZ)]
        resample_hz: f64,
    },
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Eval { config, out, lat, predictors, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            if let Some(lat) = lat {
                cfg.lat_ms = lat;
            }
            if let Some(p) = predictors {
                cfg.predictors = p
                    .iter()
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse())
                    .collect::<Result<Vec<PredictorKind>>>()?;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = run_eval(&cfg)?;
            emit_outputs(&report, &cfg.out_dir)?;
            println!("predictor,lat_ms,mae_position_m,mae_angular_deg,n_traces");
            for r in report.summary() {
                println!(
                    "{},{},{:.6},{:.4},{}",
                    r.predictor_id, r.lat_ms, r.mae_position_m, r.mae_angular_deg, r.n_traces
                );
            }
            println!("wrote results to {}", cfg.out_dir.display());
        }
        Command::Synth { profile, out } => {
            let s = generate(&load_profile(&profile)?)?;
            save_trace(&s.trace, &out)?;
            println!("wrote {} samples to {}", s.trace.len(), out.display());
        }
        Command::Stats { trace, window, polyorder } => {
            let t = load_trace(&trace)?;
            let stats = velocity_stats(&t, window, polyorder)?;
            println!("dimension,mean,p2_5,p97_5,mean_abs,p95_abs,max_abs");
            for d in &stats.dimensions {
                println!(
                    "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    d.label, d.mean, d.p2_5, d.p97_5, d.mean_abs, d.p95_abs, d.max_abs
                );
            }
        }
        Command::TrainAr { traces, out, max_lag, resample_hz } => {
            let training = traces
                .iter()
                .map(|p| to_grid(load_trace(p)?, resample_hz))
                .collect::<Result<Vec<_>>>()?;
            let lookaheads = DEFAULT_LAT_MS
                .iter()
                .map(|l| make_lookahead(*l, resample_hz))
                .collect::<Result<Vec<_>>>()?;
            let models = train_ar(&training, max_lag, &lookaheads, DEFAULT_BURN_IN)?;
            save_models(&models, &out)?;
            for m in &models {
                println!("{}: lag {}{}", m.dimension_label, m.lag, if m.degenerate { " (degenerate)" } else { "" });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
