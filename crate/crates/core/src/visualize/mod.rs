//! Remapping eigengestures into hand-presentation coordinates and rendering
//! them as SVG.
//!
//! Eigengestures live in the artificial coordinates of the SVD. To show one
//! on a hand model every sensor is mapped by its own affine transform:
//! the scale is the quotient of the data's 5%-95% quantile dispersion and
//! the eigengesture's dispersion, and the offset puts the first frame on a
//! common neutral pose.

mod pose;
mod quantile;
mod svg;

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::decomposition::Eigengesture;
use crate::io::fmt_f64;
use crate::preprocess::GestureTensor;
use crate::CHANNEL_NAMES;

pub use pose::{hand_glyph, pose_angles, render_pose_frames, HandAngles, NEUTRAL_SPLAY_DEG};
pub use quantile::{quantile_dispersion, quantile_sorted};
pub use svg::{render_comparison, render_timeseries, PlotStyle};

/// Default quantile pair for dispersion.
pub const DEFAULT_QUANTILES: (f64, f64) = (0.05, 0.95);

/// Eigengesture channels with a dispersion below this are treated as flat.
pub const FLAT_CHANNEL_DISPERSION: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum VisualizeError {
    #[error("quantile of an empty value set")]
    EmptyInput,
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("invalid quantiles ({lo}, {hi}); need 0 <= lo < hi <= 1")]
    BadQuantiles { lo: f64, hi: f64 },
    #[error("frame {frame} outside 1..={samples}")]
    FrameOutOfRange { frame: usize, samples: usize },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Per-sensor quantile spread of the studentised data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorStats {
    pub lo: f64,
    pub hi: f64,
    pub q_lo: Vec<f64>,
    pub q_hi: Vec<f64>,
    /// `q_hi - q_lo`.
    pub dispersion: Vec<f64>,
}

impl SensorStats {
    /// Quantiles of every sensor over all `(k, l, t)` of the tensor.
    pub fn from_tensor(tensor: &GestureTensor, lo: f64, hi: f64) -> Result<Self, VisualizeError> {
        check_quantiles(lo, hi)?;
        let sensors = tensor.layout().sensors;
        let mut stats = SensorStats {
            lo,
            hi,
            q_lo: Vec::with_capacity(sensors),
            q_hi: Vec::with_capacity(sensors),
            dispersion: Vec::with_capacity(sensors),
        };
        for s in 0..sensors {
            let mut v = tensor.sensor_values(s);
            if v.is_empty() {
                return Err(VisualizeError::EmptyInput);
            }
            v.sort_by(f64::total_cmp);
            let (a, b) = (quantile_sorted(&v, lo), quantile_sorted(&v, hi));
            stats.q_lo.push(a);
            stats.q_hi.push(b);
            stats.dispersion.push(b - a);
        }
        Ok(stats)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# quantiles lo={} hi={}\nsensor,q_lo,q_hi,dispersion\n",
            self.lo, self.hi
        );
        for s in 0..self.dispersion.len() {
            let name = CHANNEL_NAMES.get(s).copied().unwrap_or("?");
            writeln!(
                out,
                "{name},{},{},{}",
                fmt_f64(self.q_lo[s]),
                fmt_f64(self.q_hi[s]),
                fmt_f64(self.dispersion[s])
            )
            .unwrap();
        }
        out
    }
}

pub fn check_quantiles(lo: f64, hi: f64) -> Result<(), VisualizeError> {
    if (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo < hi {
        Ok(())
    } else {
        Err(VisualizeError::BadQuantiles { lo, hi })
    }
}

/// An eigengesture mapped affinely, sensor by sensor, into data units.
#[derive(Debug, Clone, PartialEq)]
pub struct RemappedEigengesture {
    pub source: Eigengesture,
    pub scale: Vec<f64>,
    pub offset: Vec<f64>,
    /// `values[(t, s)] = shape[(t, s)] * scale[s] + offset[s]`.
    pub values: DMatrix<f64>,
    pub neutral_pose: Vec<f64>,
    /// Sensors whose eigengesture dispersion was below [`FLAT_CHANNEL_DISPERSION`];
    /// their scale is 0 and they sit at the neutral pose throughout.
    pub flat_channels: Vec<usize>,
}

pub fn remap(eig: &Eigengesture, stats: &SensorStats, neutral: &[f64]) -> Result<RemappedEigengesture, VisualizeError> {
    let (samples, sensors) = eig.shape.shape();
    if neutral.len() != sensors || stats.dispersion.len() != sensors {
        return Err(VisualizeError::BadShape(format!(
            "eigengesture has {sensors} sensors, neutral pose {}, stats {}",
            neutral.len(),
            stats.dispersion.len()
        )));
    }
    if samples == 0 {
        return Err(VisualizeError::EmptyInput);
    }
    let mut scale = Vec::with_capacity(sensors);
    let mut offset = Vec::with_capacity(sensors);
    let mut flat_channels = Vec::new();
    for (s, &pose) in neutral.iter().enumerate() {
        let channel: Vec<f64> = eig.shape.column(s).iter().copied().collect();
        let spread = quantile_dispersion(&channel, stats.lo, stats.hi)?;
        let k = if spread < FLAT_CHANNEL_DISPERSION {
            log::warn!(
                "eigengesture {} channel {} is flat (dispersion {spread:e}); drawn at the neutral pose",
                eig.index,
                CHANNEL_NAMES.get(s).copied().unwrap_or("?")
            );
            flat_channels.push(s);
            0.0
        } else {
            stats.dispersion[s] / spread
        };
        scale.push(k);
        offset.push(pose - eig.shape[(0, s)] * k);
    }
    let values = DMatrix::from_fn(samples, sensors, |t, s| eig.shape[(t, s)] * scale[s] + offset[s]);
    Ok(RemappedEigengesture {
        source: eig.clone(),
        scale,
        offset,
        values,
        neutral_pose: neutral.to_vec(),
        flat_channels,
    })
}

/// `N x S` values as comma-separated text with a channel-name header.
pub fn matrix_csv(values: &DMatrix<f64>) -> String {
    let mut out = String::from("t,");
    let names: Vec<&str> = (0..values.ncols())
        .map(|s| CHANNEL_NAMES.get(s).copied().unwrap_or("?"))
        .collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for t in 0..values.nrows() {
        write!(out, "{}", t + 1).unwrap();
        for s in 0..values.ncols() {
            write!(out, ",{}", fmt_f64(values[(t, s)])).unwrap();
        }
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), VisualizeError> {
    crate::io::write_atomic(path, contents.as_bytes()).map_err(|source| VisualizeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a two-panel time-series plot of an `N x 10` matrix.
pub fn emit_timeseries_plot(values: &DMatrix<f64>, path: &Path, title: &str) -> Result<(), VisualizeError> {
    let svg = render_timeseries(values, title, &PlotStyle::default())?;
    write_file(path, &svg)
}

/// Writes hand glyphs for the given 1-based frames.
pub fn emit_pose_frames(remapped: &RemappedEigengesture, frames: &[usize], path: &Path) -> Result<(), VisualizeError> {
    let svg = render_pose_frames(remapped, frames)?;
    write_file(path, &svg)
}
