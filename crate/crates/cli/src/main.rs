use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sealoss_cli::{
    cmd_analyze, cmd_curves, cmd_range, cmd_synth, AnalyzeOptions, CommandResult, CurvesOptions, RangeOptions,
    SynthOptions, DEFAULT_CURVE_MODELS, EXIT_CONFIG,
};
use sealoss_core::ingest::parse_timestamp;
use sealoss_core::models::Spacing;
use sealoss_core::synthetic::SyntheticTrack;
use sealoss_core::ModelId;

#[derive(Parser)]
#[command(name = "sealoss", version, about = "Over-sea path-loss models and campaign analysis")]
struct Cli {
    /// Campaign configuration (JSON).
    #[arg(long, env = "SEALOSS_CONFIG", global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write model loss curves over a distance grid.
    Curves {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long, default_value_t = 10.0)]
        dmin: f64,
        #[arg(long, default_value_t = 12_000.0)]
        dmax: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
        #[arg(long, default_value = "log", value_parser = parse_spacing)]
        spacing: Spacing,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Turn a measurement log into path-loss samples and score the models.
    Analyze {
        #[arg(long)]
        log: PathBuf,
        /// RSSI calibration table; identity if omitted.
        #[arg(long)]
        cal: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        models: ModelArgs,
        /// Average samples into N log-spaced distance bins first.
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Maximum range at which the link budget closes.
    Range {
        #[command(flatten)]
        models: ModelArgs,
        /// Receiver sensitivity override, dBm.
        #[arg(long, allow_hyphen_values = true)]
        sensitivity: Option<f64>,
        /// Also write range.json to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded synthetic measurement log.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "bullington", value_parser = parse_model)]
        model: ModelId,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 325)]
        samples: usize,
        #[arg(long, default_value_t = 50.0)]
        dmin: f64,
        #[arg(long, default_value_t = 9_790.0)]
        dmax: f64,
        /// Track bearing from the base station, degrees from north.
        #[arg(long, default_value_t = 250.0)]
        bearing: f64,
        /// Gaussian noise standard deviation, dB.
        #[arg(long, default_value_t = 2.0)]
        noise: f64,
        /// Seconds between packets.
        #[arg(long, default_value_t = 17)]
        interval: i64,
        #[arg(long, default_value = "2019-06-12T09:00:00Z")]
        start: String,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Comma-separated model ids.
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    models: Option<Vec<ModelId>>,
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse().map_err(|e: sealoss_core::Error| e.to_string())
}

fn parse_spacing(s: &str) -> Result<Spacing, String> {
    s.parse().map_err(|e: sealoss_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config else {
        eprintln!("error: no configuration given; pass --config or set SEALOSS_CONFIG");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    let result = match cli.command {
        Command::Curves {
            models,
            dmin,
            dmax,
            points,
            spacing,
            out,
        } => cmd_curves(&CurvesOptions {
            config,
            models: models.models.unwrap_or_else(|| DEFAULT_CURVE_MODELS.to_vec()),
            d_min: dmin,
            d_max: dmax,
            points,
            spacing,
            out_dir: out,
        }),
        Command::Analyze {
            log,
            cal,
            out,
            models,
            bins,
        } => cmd_analyze(&AnalyzeOptions {
            config,
            log,
            calibration: cal,
            out_dir: out,
            models: models.models.unwrap_or_else(|| ModelId::ALL.to_vec()),
            bins,
        }),
        Command::Range {
            models,
            sensitivity,
            out,
        } => cmd_range(&RangeOptions {
            config,
            models: models.models.unwrap_or_else(|| ModelId::ALL.to_vec()),
            sensitivity_dbm: sensitivity,
            out_dir: out,
        }),
        Command::Synth {
            out,
            model,
            seed,
            samples,
            dmin,
            dmax,
            bearing,
            noise,
            interval,
            start,
        } => match parse_timestamp(&start) {
            Ok(start_time) => cmd_synth(&SynthOptions {
                config,
                model,
                track: SyntheticTrack {
                    seed,
                    n_samples: samples,
                    start_distance_m: dmin,
                    end_distance_m: dmax,
                    bearing_deg: bearing,
                    noise_std_db: noise,
                    interval_s: interval,
                    start_time,
                },
                out,
            }),
            Err(e) => CommandResult {
                exit_code: EXIT_CONFIG,
                artifacts: vec![],
                report: e.to_string(),
            },
        },
    };
    finish(result)
}

fn finish(r: CommandResult) -> ExitCode {
    if r.exit_code == 0 {
        print!("{}", r.report);
        for a in &r.artifacts {
            println!("wrote {}", a.display());
        }
    } else {
        eprint!("{}", r.report);
        if !r.report.ends_with('\n') {
            eprintln!();
        }
        for a in &r.artifacts {
            eprintln!("wrote {}", a.display());
        }
    }
    ExitCode::from(r.exit_code.clamp(0, 255) as u8)
}
