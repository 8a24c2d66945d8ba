//! Corpus manifest files (`corpus.json`).
//!
//! The schema is versioned through `format_version`; see `docs/corpus-format.md`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::recording::{format_recording, load_recording};
use super::{DatasetError, GestureManifest, RawRecording, RecordingMeta, Tempo, DEFAULT_DT_SECONDS};
use crate::io::{write_artifacts, Artifact};

pub const CORPUS_FORMAT_VERSION: u32 = 1;
const CORPUS_FILE_NAME: &str = "corpus.json";

fn default_dt() -> f64 {
    DEFAULT_DT_SECONDS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingEntry {
    /// Recording file, relative to the directory holding the manifest.
    pub path: PathBuf,
    pub gesture_id: usize,
    pub performer_id: usize,
    pub repetition: usize,
    pub tempo: Tempo,
    #[serde(default = "default_dt")]
    pub dt_seconds: f64,
}

impl RecordingEntry {
    fn meta(&self) -> RecordingMeta {
        RecordingMeta {
            gesture_id: self.gesture_id,
            performer_id: self.performer_id,
            repetition: self.repetition,
            tempo: self.tempo,
            dt_seconds: self.dt_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub format_version: u32,
    pub gestures: GestureManifest,
    pub recordings: Vec<RecordingEntry>,
}

/// Reads a corpus manifest and every recording it lists.
pub fn load_corpus(manifest_path: &Path) -> Result<(GestureManifest, Vec<RawRecording>), DatasetError> {
    let text = fs::read_to_string(manifest_path).map_err(|source| DatasetError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let corpus: CorpusFile = serde_json::from_str(&text)
        .map_err(|e| DatasetError::InvalidManifest(format!("{}: {e}", manifest_path.display())))?;
    if corpus.format_version != CORPUS_FORMAT_VERSION {
        return Err(DatasetError::InvalidManifest(format!(
            "unsupported format_version {} (expected {CORPUS_FORMAT_VERSION})",
            corpus.format_version
        )));
    }
    corpus.gestures.validate()?;

    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut recordings = Vec::with_capacity(corpus.recordings.len());
    for entry in &corpus.recordings {
        if corpus.gestures.get(entry.gesture_id).is_none() {
            return Err(DatasetError::UnknownGesture(entry.gesture_id));
        }
        let meta = entry.meta();
        meta.validate()?;
        recordings.push(load_recording(&base.join(&entry.path), meta)?);
    }
    Ok((corpus.gestures, recordings))
}

fn recording_file_name(meta: &RecordingMeta) -> PathBuf {
    PathBuf::from("recordings").join(format!(
        "g{:02}_p{}_r{}_{}.csv",
        meta.gesture_id, meta.performer_id, meta.repetition, meta.tempo
    ))
}

/// Renders a corpus as in-memory files: one CSV per recording plus `corpus.json`.
pub fn corpus_artifacts(
    manifest: &GestureManifest,
    recordings: &[RawRecording],
) -> Result<Vec<Artifact>, DatasetError> {
    let mut artifacts = Vec::with_capacity(recordings.len() + 1);
    let mut entries = Vec::with_capacity(recordings.len());
    for rec in recordings {
        if manifest.get(rec.meta.gesture_id).is_none() {
            return Err(DatasetError::UnknownGesture(rec.meta.gesture_id));
        }
        let path = recording_file_name(&rec.meta);
        artifacts.push(Artifact::new(path.clone(), format_recording(rec)));
        entries.push(RecordingEntry {
            path,
            gesture_id: rec.meta.gesture_id,
            performer_id: rec.meta.performer_id,
            repetition: rec.meta.repetition,
            tempo: rec.meta.tempo,
            dt_seconds: rec.meta.dt_seconds,
        });
    }
    let corpus = CorpusFile {
        format_version: CORPUS_FORMAT_VERSION,
        gestures: manifest.clone(),
        recordings: entries,
    };
    let mut json = serde_json::to_string_pretty(&corpus).expect("corpus serialises");
    json.push('\n');
    artifacts.push(Artifact::new(CORPUS_FILE_NAME, json));
    Ok(artifacts)
}

/// Writes a corpus under `dir` and returns the manifest path.
pub fn save_corpus(
    dir: &Path,
    manifest: &GestureManifest,
    recordings: &[RawRecording],
) -> Result<PathBuf, DatasetError> {
    let artifacts = corpus_artifacts(manifest, recordings)?;
    write_artifacts(dir, &artifacts).map_err(|source| DatasetError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(dir.join(CORPUS_FILE_NAME))
}
