//! Principal component analysis of motion-capture glove gestures.
//!
//! The crate is organised along the analysis pipeline:
//!
//! * [`dataset`]: recordings, the gesture taxonomy, corpus files and the
//!   synthetic corpus generator.
//! * [`preprocess`]: resampling, tensor assembly, double integration of the
//!   accelerometer, studentisation and flattening into the data matrix.
//! * [`decomposition`]: thin SVD (one-sided Jacobi), principal components,
//!   eigengestures, low-rank reconstruction and the normalised error curve.
//! * [`visualize`]: quantile-dispersion remapping of eigengestures and
//!   deterministic SVG output.
//! * [`pipeline`]: the end-to-end run used by the command-line tool.

pub mod dataset;
pub mod decomposition;
pub mod io;
pub mod numeric;
pub mod pipeline;
pub mod preprocess;
pub mod visualize;

/// Number of sensor channels delivered by the glove.
pub const SENSOR_COUNT: usize = 10;

/// Canonical channel order of every recording and every derived matrix.
pub const CHANNEL_NAMES: [&str; SENSOR_COUNT] = [
    "thumb", "index", "middle", "ring", "little", "accel_x", "accel_y", "accel_z", "roll", "pitch",
];

/// Finger bend channels (thumb..little).
pub const BEND_CHANNELS: std::ops::Range<usize> = 0..5;
/// Accelerometer channels (x, y, z). After double integration they hold position.
pub const ACCEL_CHANNELS: std::ops::Range<usize> = 5..8;
pub const ROLL_CHANNEL: usize = 8;
pub const PITCH_CHANNEL: usize = 9;
