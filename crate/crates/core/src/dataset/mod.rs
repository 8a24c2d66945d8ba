//! Recordings, the gesture taxonomy, corpus files and synthetic corpora.

mod corpus;
mod manifest;
mod recording;
mod synth;

use std::fmt;
use std::path::PathBuf;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::SENSOR_COUNT;

pub use corpus::{corpus_artifacts, load_corpus, save_corpus, CorpusFile, RecordingEntry, CORPUS_FORMAT_VERSION};
pub use manifest::{builtin_manifest, GestureClass, GestureEntry, GestureManifest, MotionComponents};
pub use recording::{format_recording, load_recording, parse_recording, save_recording};
pub use synth::{synthesize_corpus, synthesize_data_matrix, SynthConfig};

/// Nominal inter-sample interval of the glove (about 33 Hz).
pub const DEFAULT_DT_SECONDS: f64 = 0.030;

/// Repetitions recorded per performer and gesture: three normal, one fast, one slow.
pub const REPETITIONS_PER_PERFORMER: usize = 5;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}:{line}: {reason}")]
    MalformedFile { path: String, line: usize, reason: String },
    #[error("recording has {rows} samples, at least 2 are required")]
    TooShort { rows: usize },
    #[error("invalid recording metadata: {0}")]
    InvalidMetadata(String),
    #[error("invalid synthetic corpus configuration: {0}")]
    BadConfig(String),
    #[error("invalid corpus manifest: {0}")]
    InvalidManifest(String),
    #[error("gesture id {0} does not resolve in the manifest")]
    UnknownGesture(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tempo {
    Normal,
    Fast,
    Slow,
}

impl Tempo {
    /// Tempo used for a given repetition number: 1-3 normal, 4 fast, 5 slow.
    pub fn for_repetition(repetition: usize) -> Tempo {
        match repetition {
            4 => Tempo::Fast,
            5 => Tempo::Slow,
            _ => Tempo::Normal,
        }
    }
}

impl fmt::Display for Tempo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tempo::Normal => "normal",
            Tempo::Fast => "fast",
            Tempo::Slow => "slow",
        })
    }
}

/// Everything known about a recording apart from its samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub gesture_id: usize,
    pub performer_id: usize,
    pub repetition: usize,
    pub tempo: Tempo,
    pub dt_seconds: f64,
}

impl RecordingMeta {
    pub fn new(gesture_id: usize, performer_id: usize, repetition: usize) -> Self {
        RecordingMeta {
            gesture_id,
            performer_id,
            repetition,
            tempo: Tempo::for_repetition(repetition),
            dt_seconds: DEFAULT_DT_SECONDS,
        }
    }

    /// Realisation slot `(k, l)`, both 1-based.
    ///
    /// Realisations of one gesture are numbered performer-major:
    /// `l = (performer - 1) * 5 + repetition`.
    pub fn slot(&self) -> (usize, usize) {
        (
            self.gesture_id,
            (self.performer_id - 1) * REPETITIONS_PER_PERFORMER + self.repetition,
        )
    }

    /// Inverse of [`RecordingMeta::slot`].
    pub fn for_slot(gesture: usize, realisation: usize) -> Self {
        let performer = (realisation - 1) / REPETITIONS_PER_PERFORMER + 1;
        let repetition = (realisation - 1) % REPETITIONS_PER_PERFORMER + 1;
        RecordingMeta::new(gesture, performer, repetition)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.gesture_id == 0 {
            return Err(DatasetError::InvalidMetadata("gesture_id must be >= 1".into()));
        }
        if self.performer_id == 0 {
            return Err(DatasetError::InvalidMetadata("performer_id must be >= 1".into()));
        }
        if !(1..=REPETITIONS_PER_PERFORMER).contains(&self.repetition) {
            return Err(DatasetError::InvalidMetadata(format!(
                "repetition {} outside 1..={REPETITIONS_PER_PERFORMER}",
                self.repetition
            )));
        }
        if !(self.dt_seconds.is_finite() && self.dt_seconds > 0.0) {
            return Err(DatasetError::InvalidMetadata(format!(
                "dt_seconds must be positive, got {}",
                self.dt_seconds
            )));
        }
        Ok(())
    }
}

/// One performance of one gesture: `N_i x 10` samples in canonical channel order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecording {
    pub meta: RecordingMeta,
    samples: DMatrix<f64>,
}

impl RawRecording {
    pub fn new(meta: RecordingMeta, samples: DMatrix<f64>) -> Result<Self, DatasetError> {
        meta.validate()?;
        if samples.ncols() != SENSOR_COUNT {
            return Err(DatasetError::InvalidMetadata(format!(
                "expected {SENSOR_COUNT} channels, got {}",
                samples.ncols()
            )));
        }
        if samples.nrows() < 2 {
            return Err(DatasetError::TooShort { rows: samples.nrows() });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(DatasetError::InvalidMetadata("non-finite sample".into()));
        }
        Ok(RawRecording { meta, samples })
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_round_trip() {
        for l in 1..=20 {
            let meta = RecordingMeta::for_slot(3, l);
            assert_eq!(meta.slot(), (3, l));
        }
        let meta = RecordingMeta::for_slot(1, 9);
        assert_eq!((meta.performer_id, meta.repetition, meta.tempo), (2, 4, Tempo::Fast));
    }

    #[test]
    fn rejects_short_and_non_finite() {
        let meta = RecordingMeta::new(1, 1, 1);
        let one_row = DMatrix::zeros(1, SENSOR_COUNT);
        assert!(matches!(
            RawRecording::new(meta.clone(), one_row),
            Err(DatasetError::TooShort { rows: 1 })
        ));
        let mut bad = DMatrix::zeros(3, SENSOR_COUNT);
        bad[(1, 4)] = f64::NAN;
        assert!(RawRecording::new(meta, bad).is_err());
    }

    #[test]
    fn rejects_bad_metadata() {
        let mut meta = RecordingMeta::new(1, 1, 6);
        assert!(meta.validate().is_err());
        meta.repetition = 1;
        meta.dt_seconds = 0.0;
        assert!(meta.validate().is_err());
    }
}
