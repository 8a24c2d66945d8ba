use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eigengesture::dataset::SynthConfig;
use eigengesture::pipeline::{run_pipeline, Emit, InputSource, RunConfig, EXIT_CONFIG};
use eigengesture::preprocess::PipelineOrder;

#[derive(Parser)]
#[command(
    name = "eigengesture",
    version,
    about = "Principal component analysis of data-glove gestures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus (recordings plus corpus.json).
    Synth(CommonArgs),
    /// Write the studentised data matrix with its index maps.
    Preprocess(CommonArgs),
    /// Write the singular value spectrum.
    Decompose(CommonArgs),
    /// Write the normalised reconstruction error curve d(n).
    ErrorCurve(CommonArgs),
    /// Write the leading eigengestures, raw and remapped.
    Eigengestures(CommonArgs),
    /// Reconstruct one realisation from the leading components.
    Reconstruct(CommonArgs),
    /// Render eigengesture plots and hand-pose frames.
    Render(CommonArgs),
    /// Full pipeline; emits everything selected with --emit.
    Run(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Resampled,
    Physical,
}

#[derive(Args)]
struct CommonArgs {
    /// Corpus manifest (corpus.json).
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,
    /// Use a synthetic corpus, e.g. `--synth rank=15,noise=0.05,k=22,l=20,min-len=40,max-len=160`.
    #[arg(long, num_args = 0..=1, default_missing_value = "", value_name = "KEY=VALUE,...")]
    synth: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Seed for synthetic data.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Order::Resampled)]
    order: Order,
    /// Comma-separated artifact list: corpus, data_matrix, spectrum, error_curve,
    /// eigengestures, reconstruction, plots.
    #[arg(long, value_delimiter = ',')]
    emit: Vec<Emit>,
    /// Quantile pair for the eigengesture remap.
    #[arg(long, value_parser = parse_pair, default_value = "0.05,0.95")]
    quantiles: (f64, f64),
    /// Samples per resampled gesture.
    #[arg(long, default_value_t = 20)]
    resample_n: usize,
    /// Number of gesture types K (inferred by default).
    #[arg(long)]
    gestures: Option<usize>,
    /// Realisations per gesture L (inferred by default).
    #[arg(long)]
    realisations: Option<usize>,
    /// Reconstruction rank [default: min(20, q)].
    #[arg(long)]
    rank: Option<usize>,
    /// Realisation to reconstruct as K:L [default: 3:2].
    #[arg(long, value_parser = parse_gesture)]
    gesture: Option<(usize, usize)>,
    /// Eigengestures to export [default: min(5, q)].
    #[arg(long)]
    count: Option<usize>,
    /// Also write the mean of per-realisation relative errors.
    #[arg(long)]
    column_mean: bool,
    /// Neutral pose, ten comma-separated values in studentised units.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    neutral: Option<Vec<f64>>,
    /// Frames drawn in each pose figure.
    #[arg(long, default_value_t = 5)]
    frames: usize,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_gesture(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected K:L")?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_synth(spec: &str) -> Result<SynthConfig, String> {
    let mut cfg = SynthConfig::default();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {item:?}"))?;
        let int = || value.parse::<usize>().map_err(|e| format!("{key}: {e}"));
        match key {
            "k" | "gestures" => cfg.gestures = int()?,
            "l" | "realisations" => cfg.realisations = int()?,
            "rank" => cfg.true_rank = int()?,
            "noise" => cfg.noise_sigma = value.parse().map_err(|e| format!("{key}: {e}"))?,
            "min-len" => cfg.length_range.0 = int()?,
            "max-len" => cfg.length_range.1 = int()?,
            "seed" => cfg.seed = value.parse().map_err(|e| format!("{key}: {e}"))?,
            _ => return Err(format!("unknown synth key {key:?}")),
        }
    }
    Ok(cfg)
}

fn build_config(command: Command) -> Result<RunConfig, String> {
    let (fixed, args) = match command {
        Command::Synth(a) => (Some(Emit::Corpus), a),
        Command::Preprocess(a) => (Some(Emit::DataMatrix), a),
        Command::Decompose(a) => (Some(Emit::Spectrum), a),
        Command::ErrorCurve(a) => (Some(Emit::ErrorCurve), a),
        Command::Eigengestures(a) => (Some(Emit::Eigengestures), a),
        Command::Reconstruct(a) => (Some(Emit::Reconstruction), a),
        Command::Render(a) => (Some(Emit::Plots), a),
        Command::Run(a) => (None, a),
    };
    let input = match (&args.input, &args.synth) {
        (Some(path), None) => InputSource::Corpus(path.clone()),
        (None, Some(spec)) => InputSource::Synthetic(parse_synth(spec)?),
        (None, None) if fixed == Some(Emit::Corpus) => InputSource::Synthetic(SynthConfig::default()),
        _ => return Err("one of --input or --synth is required".into()),
    };
    let mut config = RunConfig::new(input, args.out);
    let requested: BTreeSet<Emit> = args.emit.into_iter().collect();
    match fixed {
        Some(e) => {
            config.emit = requested;
            config.emit.insert(e);
        }
        None if !requested.is_empty() => config.emit = requested,
        None => {}
    }
    config.resample_n = args.resample_n;
    config.gestures = args.gestures;
    config.realisations = args.realisations;
    config.order = match args.order {
        Order::Resampled => PipelineOrder::Resampled,
        Order::Physical => PipelineOrder::Physical,
    };
    config.quantiles = args.quantiles;
    config.seed = args.seed;
    config.rank = args.rank;
    config.gesture = args.gesture;
    config.eigengesture_count = args.count;
    config.column_mean = args.column_mean;
    if let Some(neutral) = args.neutral {
        config.neutral_pose = neutral;
    }
    config.pose_frames = args.frames;
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = match build_config(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run_pipeline(&config) {
        Ok(report) => {
            if let Some(a) = &report.analysis {
                println!(
                    "{} x {} data matrix, q = {}, numerical rank {}",
                    a.rows, a.cols, a.q, a.numerical_rank
                );
            }
            println!(
                "wrote {} files to {}",
                report.artifacts.len() + 1,
                config.output_dir.display()
            );
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
