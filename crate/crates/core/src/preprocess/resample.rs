use nalgebra::DMatrix;

use super::PreprocessError;
use crate::dataset::{RawRecording, RecordingMeta};

/// A recording mapped onto the common `N`-point time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledGesture {
    pub meta: RecordingMeta,
    /// `N x S`, time along rows.
    pub values: DMatrix<f64>,
    /// Whether the accelerometer channels already hold double-integrated position.
    pub integrated: bool,
}

impl ResampledGesture {
    pub(crate) fn from_matrix(meta: RecordingMeta, samples: &DMatrix<f64>, n: usize) -> Result<Self, PreprocessError> {
        if n < 2 {
            return Err(PreprocessError::BadTarget(n));
        }
        let mut values = DMatrix::zeros(n, samples.ncols());
        for s in 0..samples.ncols() {
            let src: Vec<f64> = samples.column(s).iter().copied().collect();
            for (t, v) in resample_channel(&src, n).into_iter().enumerate() {
                values[(t, s)] = v;
            }
        }
        Ok(ResampledGesture {
            meta,
            values,
            integrated: false,
        })
    }
}

/// Piecewise-linear resampling of every channel onto `n` uniform points.
///
/// Both the source and target grids span `[0, 1]`, whatever the recording length.
pub fn resample(rec: &RawRecording, n: usize) -> Result<ResampledGesture, PreprocessError> {
    ResampledGesture::from_matrix(rec.meta.clone(), rec.samples(), n)
}

/// Resamples one channel of `m >= 2` points to `n >= 2` points.
///
/// Target `i` sits at source position `i * (m - 1) / (n - 1)`. The integer
/// part and remainder are computed exactly, so target points that coincide
/// with source points (including both endpoints) are copied verbatim.
pub fn resample_channel(src: &[f64], n: usize) -> Vec<f64> {
    let m = src.len();
    assert!(
        m >= 2 && n >= 2,
        "resample_channel needs at least two points on each side"
    );
    let den = n - 1;
    (0..n)
        .map(|i| {
            let num = i * (m - 1);
            let (j, rem) = (num / den, num % den);
            if rem == 0 {
                src[j]
            } else {
                let gamma = rem as f64 / den as f64;
                src[j] + gamma * (src[j + 1] - src[j])
            }
        })
        .collect()
}
