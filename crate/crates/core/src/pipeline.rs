//! End-to-end run: load or synthesise a corpus, preprocess, decompose and
//! emit the requested artifacts.
//!
//! All outputs are computed in memory first and only written once the whole
//! run has succeeded, each through a temp-file rename. A failed run leaves
//! the output directory untouched.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{
    builtin_manifest, corpus_artifacts, load_corpus, synthesize_corpus, DatasetError, GestureManifest, RawRecording,
    SynthConfig,
};
use crate::decomposition::{
    column_error_curve, eigengestures, error_curve, reconstruct_gesture, spectrum, svd, DecompositionError, SvdResult,
};
use crate::io::{fmt_f64, write_artifacts, Artifact};
use crate::preprocess::{
    preprocess_corpus, DataMatrix, PipelineOrder, PreprocessError, PreprocessOptions, Preprocessed,
};
use crate::visualize::{
    check_quantiles, matrix_csv, remap, render_comparison, render_pose_frames, render_timeseries, PlotStyle,
    SensorStats, VisualizeError, DEFAULT_QUANTILES,
};
use crate::{CHANNEL_NAMES, SENSOR_COUNT};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Ranks at which the report always records `d(n)`.
pub const REPORT_RANKS: [usize; 4] = [1, 20, 50, 100];

/// Singular values above this fraction of `sigma_1` count towards the numerical rank.
const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Visualize(#[from] VisualizeError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Process exit code: 2 config, 3 data, 4 numerical, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => EXIT_CONFIG,
            PipelineError::Dataset(e) => match e {
                DatasetError::Io { .. } => EXIT_IO,
                DatasetError::BadConfig(_) => EXIT_CONFIG,
                _ => EXIT_DATA,
            },
            PipelineError::Preprocess(e) => match e {
                PreprocessError::DegenerateSensor { .. } => EXIT_NUMERICAL,
                PreprocessError::BadTarget(_) | PreprocessError::BadTimeStep(_) => EXIT_CONFIG,
                _ => EXIT_DATA,
            },
            PipelineError::Decomposition(e) => match e {
                DecompositionError::NoConvergence { .. } | DecompositionError::NonFinite => EXIT_NUMERICAL,
                DecompositionError::RankOutOfRange { .. } | DecompositionError::CountOutOfRange { .. } => EXIT_CONFIG,
                DecompositionError::UnknownRealisation { .. } | DecompositionError::ShapeMismatch { .. } => EXIT_DATA,
            },
            PipelineError::Visualize(e) => match e {
                VisualizeError::Io { .. } => EXIT_IO,
                VisualizeError::BadQuantiles { .. } | VisualizeError::FrameOutOfRange { .. } => EXIT_CONFIG,
                _ => EXIT_DATA,
            },
            PipelineError::Io { .. } => EXIT_IO,
        }
    }
}

/// What a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Corpus,
    DataMatrix,
    Spectrum,
    ErrorCurve,
    Eigengestures,
    Reconstruction,
    Plots,
}

impl Emit {
    pub const ALL: [Emit; 7] = [
        Emit::Corpus,
        Emit::DataMatrix,
        Emit::Spectrum,
        Emit::ErrorCurve,
        Emit::Eigengestures,
        Emit::Reconstruction,
        Emit::Plots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emit::Corpus => "corpus",
            Emit::DataMatrix => "data_matrix",
            Emit::Spectrum => "spectrum",
            Emit::ErrorCurve => "error_curve",
            Emit::Eigengestures => "eigengestures",
            Emit::Reconstruction => "reconstruction",
            Emit::Plots => "plots",
        }
    }
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().replace('-', "_");
        Emit::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| format!("unknown emit target {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    /// Path to a `corpus.json` manifest.
    Corpus(PathBuf),
    Synthetic(SynthConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub resample_n: usize,
    /// Override for `K`; inferred from the recordings when absent.
    pub gestures: Option<usize>,
    /// Override for `L`; inferred from the recordings when absent.
    pub realisations: Option<usize>,
    pub order: PipelineOrder,
    pub quantiles: (f64, f64),
    /// Not echoed into the report, so identical runs into different directories match.
    #[serde(skip)]
    pub output_dir: PathBuf,
    /// Overrides the synthetic corpus seed.
    pub seed: Option<u64>,
    pub emit: BTreeSet<Emit>,
    /// Reconstruction rank; defaults to `min(20, q)`.
    pub rank: Option<usize>,
    /// Realisation `(k, l)` to reconstruct; defaults to `(3, 2)` clamped to the corpus.
    pub gesture: Option<(usize, usize)>,
    /// Eigengestures to export; defaults to `min(5, q)`.
    pub eigengesture_count: Option<usize>,
    /// Also emit the per-realisation mean relative error curve.
    pub column_mean: bool,
    /// Starting pose of every remapped eigengesture, studentised units.
    pub neutral_pose: Vec<f64>,
    /// Number of evenly spaced frames in the pose figures.
    pub pose_frames: usize,
}

impl RunConfig {
    pub fn new(input: InputSource, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            input,
            resample_n: crate::preprocess::DEFAULT_RESAMPLE_N,
            gestures: None,
            realisations: None,
            order: PipelineOrder::Resampled,
            quantiles: DEFAULT_QUANTILES,
            output_dir: output_dir.into(),
            seed: None,
            emit: [
                Emit::Spectrum,
                Emit::ErrorCurve,
                Emit::Eigengestures,
                Emit::Reconstruction,
                Emit::Plots,
            ]
            .into_iter()
            .collect(),
            rank: None,
            gesture: None,
            eigengesture_count: None,
            column_mean: false,
            neutral_pose: vec![0.0; SENSOR_COUNT],
            pose_frames: 5,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.resample_n < 2 {
            return bad(format!("resample length must be >= 2, got {}", self.resample_n));
        }
        if check_quantiles(self.quantiles.0, self.quantiles.1).is_err() {
            return bad(format!(
                "quantiles ({}, {}) must satisfy 0 <= lo < hi <= 1",
                self.quantiles.0, self.quantiles.1
            ));
        }
        if self.neutral_pose.len() != SENSOR_COUNT || self.neutral_pose.iter().any(|v| !v.is_finite()) {
            return bad(format!("neutral pose needs {SENSOR_COUNT} finite values"));
        }
        if self.gestures == Some(0) || self.realisations == Some(0) {
            return bad("gesture and realisation counts must be >= 1".into());
        }
        if self.pose_frames == 0 {
            return bad("pose frame count must be >= 1".into());
        }
        if self.emit.is_empty() {
            return bad("nothing to emit".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub recordings: usize,
    pub gestures: usize,
    pub realisations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisSummary {
    pub rows: usize,
    pub cols: usize,
    pub q: usize,
    /// Leading singular values (at most ten).
    pub sigma_head: Vec<f64>,
    pub total_energy: f64,
    pub numerical_rank: usize,
    /// `d(n)` at the standard ranks that exist for this matrix.
    pub error_curve_at: BTreeMap<usize, f64>,
    pub degenerate_spectrum: bool,
    /// Full `d(1..=q)`, present when the error curve is emitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_curve: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<ReconstructionSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionSummary {
    pub gesture: usize,
    pub realisation: usize,
    pub rank: usize,
    /// Frobenius norm of original minus reconstruction for this realisation.
    pub residual_norm: f64,
}

/// Machine-readable summary written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub corpus: CorpusSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSummary>,
    pub warnings: Vec<String>,
    /// Written files, relative to the output directory (excluding the report).
    pub artifacts: Vec<String>,
}

/// In-memory result of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub artifacts: Vec<Artifact>,
}

fn load_input(config: &RunConfig) -> Result<(GestureManifest, Vec<RawRecording>), PipelineError> {
    match &config.input {
        InputSource::Corpus(path) => Ok(load_corpus(path)?),
        InputSource::Synthetic(synth) => {
            let synth = effective_synth(config, synth);
            Ok((builtin_manifest(), synthesize_corpus(&synth)?))
        }
    }
}

fn effective_synth(config: &RunConfig, synth: &SynthConfig) -> SynthConfig {
    let mut s = synth.clone();
    if let Some(seed) = config.seed {
        s.seed = seed;
    }
    if let Some(k) = config.gestures {
        s.gestures = k;
    }
    if let Some(l) = config.realisations {
        s.realisations = l;
    }
    s.resample_n = config.resample_n;
    s
}

fn corpus_dims(config: &RunConfig, recordings: &[RawRecording]) -> (usize, usize) {
    let k = config
        .gestures
        .unwrap_or_else(|| recordings.iter().map(|r| r.meta.gesture_id).max().unwrap_or(0));
    let l = config
        .realisations
        .unwrap_or_else(|| recordings.iter().map(|r| r.meta.slot().1).max().unwrap_or(0));
    (k, l)
}

/// Runs everything in memory. Nothing is written.
pub fn plan_run(config: &RunConfig) -> Result<RunOutput, PipelineError> {
    config.validate()?;
    let mut config = config.clone();
    if let InputSource::Synthetic(s) = &config.input {
        config.input = InputSource::Synthetic(effective_synth(&config, s));
    }

    let (manifest, recordings) = load_input(&config)?;
    if recordings.is_empty() {
        return Err(PreprocessError::EmptyCorpus.into());
    }
    for r in &recordings {
        if manifest.get(r.meta.gesture_id).is_none() {
            return Err(DatasetError::UnknownGesture(r.meta.gesture_id).into());
        }
    }
    let (k, l) = corpus_dims(&config, &recordings);

    let mut artifacts = Vec::new();
    let mut warnings = Vec::new();
    if config.emit.contains(&Emit::Corpus) {
        for a in corpus_artifacts(&manifest, &recordings)? {
            artifacts.push(Artifact::new(Path::new("corpus").join(&a.path), a.bytes));
        }
    }

    let needs_analysis = config.emit.iter().any(|e| *e != Emit::Corpus);
    let analysis = if needs_analysis {
        let options = PreprocessOptions {
            resample_n: config.resample_n,
            order: config.order,
            ..PreprocessOptions::default()
        };
        let pre = preprocess_corpus(&recordings, k, l, &options)?;
        Some(analyse(&config, &pre, &mut artifacts, &mut warnings)?)
    } else {
        None
    };

    artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    let report = RunReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config,
        corpus: CorpusSummary {
            recordings: recordings.len(),
            gestures: k,
            realisations: l,
        },
        analysis,
        warnings,
        artifacts: artifacts
            .iter()
            .map(|a| a.path.to_string_lossy().into_owned())
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serialises");
    json.push('\n');
    artifacts.push(Artifact::new("report.json", json));
    Ok(RunOutput { report, artifacts })
}

/// Runs the pipeline and writes every artifact under `config.output_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport, PipelineError> {
    let output = plan_run(config)?;
    write_artifacts(&config.output_dir, &output.artifacts).map_err(|source| PipelineError::Io {
        path: config.output_dir.clone(),
        source,
    })?;
    Ok(output.report)
}

fn analyse(
    config: &RunConfig,
    pre: &Preprocessed,
    artifacts: &mut Vec<Artifact>,
    warnings: &mut Vec<String>,
) -> Result<AnalysisSummary, PipelineError> {
    let x = &pre.matrix;
    if config.emit.contains(&Emit::DataMatrix) {
        artifacts.push(Artifact::new("preprocessed/data_matrix.csv", data_matrix_csv(x)));
    }
    let decomposition = svd(x)?;
    let q = decomposition.q();
    let curve = error_curve(x, &decomposition, q)?;
    if curve.degenerate {
        warnings.push("degenerate spectrum: sigma_2..sigma_q are all zero".into());
    }

    if config.emit.contains(&Emit::Spectrum) {
        let mut csv = String::from("index,sigma,energy_fraction,cumulative_energy\n");
        for row in spectrum(&decomposition) {
            writeln!(
                csv,
                "{},{},{},{}",
                row.index,
                fmt_f64(row.sigma),
                fmt_f64(row.energy_fraction),
                fmt_f64(row.cumulative_energy)
            )
            .unwrap();
        }
        artifacts.push(Artifact::new("spectrum.csv", csv));
    }
    if config.emit.contains(&Emit::ErrorCurve) {
        artifacts.push(Artifact::new("error_curve.csv", curve_csv("d_n", &curve.values)));
        if config.column_mean {
            let mean = column_error_curve(x, &decomposition, q)?;
            artifacts.push(Artifact::new(
                "column_error_curve.csv",
                curve_csv("mean_relative_error", &mean),
            ));
        }
    }

    if config.emit.contains(&Emit::Eigengestures) || config.emit.contains(&Emit::Plots) {
        emit_eigengestures(config, pre, &decomposition, artifacts, warnings)?;
    }

    let reconstruction = if config.emit.contains(&Emit::Reconstruction) {
        Some(emit_reconstruction(config, x, &decomposition, artifacts)?)
    } else {
        None
    };

    Ok(AnalysisSummary {
        rows: x.matrix().nrows(),
        cols: x.matrix().ncols(),
        q,
        sigma_head: decomposition.sigma.iter().take(10).copied().collect(),
        total_energy: decomposition.total_energy(),
        numerical_rank: decomposition.numerical_rank(RANK_TOLERANCE),
        error_curve_at: REPORT_RANKS
            .iter()
            .filter_map(|&n| curve.at(n).map(|d| (n, d)))
            .collect(),
        degenerate_spectrum: curve.degenerate,
        error_curve: config.emit.contains(&Emit::ErrorCurve).then(|| curve.values.clone()),
        reconstruction,
    })
}

fn emit_eigengestures(
    config: &RunConfig,
    pre: &Preprocessed,
    decomposition: &SvdResult,
    artifacts: &mut Vec<Artifact>,
    warnings: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let count = config.eigengesture_count.unwrap_or(5.min(decomposition.q()));
    let eigs = eigengestures(decomposition, count)?;
    let stats = SensorStats::from_tensor(&pre.tensor, config.quantiles.0, config.quantiles.1)?;
    let samples = pre.matrix.layout().samples;
    let frames = pose_frames(samples, config.pose_frames);
    let style = PlotStyle::default();

    if config.emit.contains(&Emit::Eigengestures) {
        artifacts.push(Artifact::new("eigengestures/sensor_stats.csv", stats.to_csv()));
    }
    for eig in &eigs {
        let remapped = remap(eig, &stats, &config.neutral_pose)?;
        for &s in &remapped.flat_channels {
            warnings.push(format!(
                "eigengesture {} channel {} is flat; drawn at the neutral pose",
                eig.index, CHANNEL_NAMES[s]
            ));
        }
        let stem = format!("eigengesture_{:03}", eig.index);
        if config.emit.contains(&Emit::Eigengestures) {
            artifacts.push(Artifact::new(
                format!("eigengestures/{stem}.csv"),
                matrix_csv(&eig.shape),
            ));
            artifacts.push(Artifact::new(
                format!("eigengestures/{stem}_remapped.csv"),
                matrix_csv(&remapped.values),
            ));
        }
        if config.emit.contains(&Emit::Plots) {
            let title = format!(
                "eigengesture {} (sigma {:.3}, energy {:.2}%)",
                eig.index,
                eig.singular_value,
                100.0 * eig.energy_fraction
            );
            artifacts.push(Artifact::new(
                format!("plots/{stem}.svg"),
                render_timeseries(&eig.shape, &title, &style)?,
            ));
            artifacts.push(Artifact::new(
                format!("plots/{stem}_poses.svg"),
                render_pose_frames(&remapped, &frames)?,
            ));
        }
    }
    Ok(())
}

fn emit_reconstruction(
    config: &RunConfig,
    x: &DataMatrix,
    decomposition: &SvdResult,
    artifacts: &mut Vec<Artifact>,
) -> Result<ReconstructionSummary, PipelineError> {
    let layout = x.layout();
    let (k, l) = config
        .gesture
        .unwrap_or((3.min(layout.gestures), 2.min(layout.realisations)));
    let rank = config.rank.unwrap_or(20.min(decomposition.q()));
    let approx = reconstruct_gesture(decomposition, k, l, rank)?;
    let col = layout.column(k, l).ok_or(DecompositionError::UnknownRealisation {
        gesture: k,
        realisation: l,
    })?;
    let original = x.gesture(col);
    let stem = format!("reconstruction/gesture_k{k:02}_l{l:02}");
    artifacts.push(Artifact::new(format!("{stem}_original.csv"), matrix_csv(&original)));
    artifacts.push(Artifact::new(format!("{stem}_rank{rank:03}.csv"), matrix_csv(&approx)));
    artifacts.push(Artifact::new(
        format!("{stem}_rank{rank:03}.svg"),
        render_comparison(
            &original,
            &approx,
            &format!("gesture {k}, realisation {l}: preprocessed"),
            &format!("reconstruction from {rank} components"),
            &PlotStyle::default(),
        )?,
    ));
    Ok(ReconstructionSummary {
        gesture: k,
        realisation: l,
        rank,
        residual_norm: (original - approx).norm(),
    })
}

/// `count` evenly spaced 1-based frames from 1 to `samples`.
pub fn pose_frames(samples: usize, count: usize) -> Vec<usize> {
    if count <= 1 || samples <= 1 {
        return vec![1];
    }
    let count = count.min(samples);
    let mut frames: Vec<usize> = (0..count).map(|i| 1 + i * (samples - 1) / (count - 1)).collect();
    frames.dedup();
    frames
}

fn curve_csv(column: &str, values: &[f64]) -> String {
    let mut out = format!("n,{column}\n");
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, fmt_f64(*v)).unwrap();
    }
    out
}

/// Data matrix as CSV, with the index maps and sensor moments as `#` comments.
pub fn data_matrix_csv(x: &DataMatrix) -> String {
    let d = x.layout();
    let mut out = String::new();
    writeln!(
        out,
        "# data matrix {} rows x {} columns; row = sensor * {} + time (sensor-major), column = (gesture - 1) * {} + (realisation - 1)",
        d.rows(),
        d.cols(),
        d.samples,
        d.realisations
    )
    .unwrap();
    let rows: Vec<String> = (0..d.rows())
        .map(|r| {
            let (t, s) = d.time_sensor(r);
            format!("{}@{}", CHANNEL_NAMES.get(s).copied().unwrap_or("?"), t + 1)
        })
        .collect();
    writeln!(out, "# row_index {}", rows.join(" ")).unwrap();
    let cols: Vec<String> = (0..d.cols())
        .map(|c| {
            let (k, l) = d.slot(c);
            format!("{k}:{l}")
        })
        .collect();
    writeln!(out, "# column_index {}", cols.join(" ")).unwrap();
    if let Some(m) = x.moments() {
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
        writeln!(out, "# sensor_means {}", join(&m.means)).unwrap();
        writeln!(out, "# sensor_stds {}", join(&m.stds)).unwrap();
    }
    for r in 0..d.rows() {
        let row: Vec<String> = x.matrix().row(r).iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
