//! From raw recordings to the analysis-ready data matrix.
//!
//! The default ([`PipelineOrder::Resampled`]) sequence is: resample every
//! recording to `N` samples, arrange the realisations into a
//! `K x L x N x S` tensor, double-integrate the accelerometer channels,
//! studentise each sensor over the whole tensor, and flatten into the
//! `(N*S) x (K*L)` matrix whose columns are realisations.

mod integrate;
mod resample;
mod tensor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::RawRecording;

pub use integrate::{double_integrate, integrate_acceleration};
pub use resample::{resample, resample_channel, ResampledGesture};
pub use tensor::{assemble_tensor, flatten, studentise, DataMatrix, GestureTensor, Layout, SensorMoments};

/// Default resampled length.
pub const DEFAULT_RESAMPLE_N: usize = 20;

/// Standard deviation below which a sensor is considered constant.
pub const DEGENERATE_STD: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("resample target must be >= 2, got {0}")]
    BadTarget(usize),
    #[error("integration step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("gesture {gesture}, realisation {realisation} is missing")]
    MissingRealisation { gesture: usize, realisation: usize },
    #[error("gesture {gesture}, realisation {realisation} appears more than once")]
    DuplicateRealisation { gesture: usize, realisation: usize },
    #[error("gesture {gesture}, realisation {realisation} lies outside the {gestures} x {realisations} layout")]
    UnexpectedRealisation {
        gesture: usize,
        realisation: usize,
        gestures: usize,
        realisations: usize,
    },
    #[error("inconsistent gesture shapes: {0}")]
    ShapeMismatch(String),
    #[error("sensor {sensor} is constant (std {std:e}); cannot studentise")]
    DegenerateSensor { sensor: usize, std: f64 },
    #[error("tensor must be studentised before flattening")]
    NotStudentised,
    #[error("no recordings to preprocess")]
    EmptyCorpus,
}

/// Where double integration happens relative to resampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineOrder {
    /// Resample, tensorise, integrate on the resampled grid, studentise.
    #[default]
    Resampled,
    /// Integrate each raw recording with its own sampling interval, then resample.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessOptions {
    pub resample_n: usize,
    pub order: PipelineOrder,
    /// Integration step on the resampled grid (resampled order only). Studentisation
    /// removes the overall scale, so the default of 1 is as good as any.
    pub resampled_dt: f64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            resample_n: DEFAULT_RESAMPLE_N,
            order: PipelineOrder::Resampled,
            resampled_dt: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// Studentised tensor.
    pub tensor: GestureTensor,
    pub matrix: DataMatrix,
}

/// Runs the whole preprocessing chain for a `gestures x realisations` corpus.
pub fn preprocess_corpus(
    recordings: &[RawRecording],
    gestures: usize,
    realisations: usize,
    options: &PreprocessOptions,
) -> Result<Preprocessed, PreprocessError> {
    if recordings.is_empty() {
        return Err(PreprocessError::EmptyCorpus);
    }
    let tensor = match options.order {
        PipelineOrder::Resampled => {
            let resampled = recordings
                .iter()
                .map(|r| resample(r, options.resample_n))
                .collect::<Result<Vec<_>, _>>()?;
            let raw = assemble_tensor(&resampled, gestures, realisations)?;
            raw.integrate_acceleration(options.resampled_dt)?
        }
        PipelineOrder::Physical => {
            let resampled = recordings
                .iter()
                .map(|r| {
                    let mut samples = r.samples().clone();
                    double_integrate(&mut samples, r.meta.dt_seconds)?;
                    let mut g = ResampledGesture::from_matrix(r.meta.clone(), &samples, options.resample_n)?;
                    g.integrated = true;
                    Ok(g)
                })
                .collect::<Result<Vec<_>, PreprocessError>>()?;
            assemble_tensor(&resampled, gestures, realisations)?
        }
    };
    let tensor = studentise(tensor)?;
    let matrix = flatten(&tensor)?;
    Ok(Preprocessed { tensor, matrix })
}
