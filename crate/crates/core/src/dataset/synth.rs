//! Synthetic corpora with known low-rank structure.
//!
//! Each recording `(k, l)` is `baseline + sum_j c[k,l,j] * B_j(t) + noise`,
//! where the `B_j` are fixed smooth 10-channel curves shared by the whole
//! corpus and evaluated on the recording's own time grid. The mixture
//! coefficients are centred over all realisations, so centring during
//! preprocessing does not add a direction, and recording lengths are drawn
//! from `m * (resample_n - 1) + 1` so the resampling grid is a subset of every
//! recording grid. Together this makes the noiseless preprocessed data matrix
//! exactly rank `true_rank` when preprocessed in the default resampled order.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::manifest::GESTURE_COUNT;
use super::{DatasetError, RawRecording, RecordingMeta};
use crate::preprocess::{DataMatrix, Layout};
use crate::{ACCEL_CHANNELS, SENSOR_COUNT};

const HARMONICS: usize = 3;
/// Spread of realisations around their gesture type, relative to the type effect.
const REALISATION_SPREAD: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of gesture types `K` (at most 22).
    pub gestures: usize,
    /// Realisations per gesture type `L`.
    pub realisations: usize,
    pub true_rank: usize,
    pub noise_sigma: f64,
    /// Inclusive bounds on the number of samples per recording.
    pub length_range: (usize, usize),
    pub seed: u64,
    /// Resampling length the generated grids are aligned to.
    pub resample_n: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            gestures: GESTURE_COUNT,
            realisations: 20,
            true_rank: 15,
            noise_sigma: 0.05,
            length_range: (40, 160),
            seed: 2011,
            resample_n: 20,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |msg: String| Err(DatasetError::BadConfig(msg));
        if !(1..=GESTURE_COUNT).contains(&self.gestures) {
            return bad(format!(
                "gestures must be in 1..={GESTURE_COUNT}, got {}",
                self.gestures
            ));
        }
        if self.realisations == 0 {
            return bad("realisations must be >= 1".into());
        }
        if self.resample_n < 2 {
            return bad(format!("resample_n must be >= 2, got {}", self.resample_n));
        }
        let max_rank = (self.gestures * self.realisations).min(self.resample_n * SENSOR_COUNT);
        if self.true_rank == 0 || self.true_rank > max_rank {
            return bad(format!("true_rank must be in 1..={max_rank}, got {}", self.true_rank));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad(format!("noise_sigma must be finite and >= 0, got {}", self.noise_sigma));
        }
        let (lo, hi) = self.length_range;
        if lo < 2 || lo > hi {
            return bad(format!("length_range ({lo}, {hi}) must satisfy 2 <= min <= max"));
        }
        if self.admissible_lengths().is_empty() {
            return bad(format!(
                "length_range ({lo}, {hi}) contains no length of the form m*{}+1",
                self.resample_n - 1
            ));
        }
        Ok(())
    }

    fn admissible_lengths(&self) -> Vec<usize> {
        let step = self.resample_n - 1;
        let (lo, hi) = self.length_range;
        (1..)
            .map(|m| m * step + 1)
            .take_while(|&len| len <= hi)
            .filter(|&len| len >= lo)
            .collect()
    }
}

/// One smooth 10-channel curve: a sum of a few sinusoids per channel.
struct BasisCurve {
    // [channel][harmonic] = (amplitude, frequency, phase)
    terms: [[(f64, f64, f64); HARMONICS]; SENSOR_COUNT],
}

impl BasisCurve {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut terms = [[(0.0, 0.0, 0.0); HARMONICS]; SENSOR_COUNT];
        for channel in terms.iter_mut() {
            for term in channel.iter_mut() {
                let amp: f64 = rng.sample::<f64, _>(StandardNormal) / (HARMONICS as f64).sqrt();
                let freq = rng.random_range(0.5..3.0);
                let phase = rng.random_range(0.0..TAU);
                *term = (amp, freq, phase);
            }
        }
        BasisCurve { terms }
    }

    fn eval(&self, t: f64, channel: usize) -> f64 {
        self.terms[channel]
            .iter()
            .map(|&(a, f, p)| a * (TAU * f * t + p).sin())
            .sum()
    }
}

/// Generates `K * L` recordings in `(k, l)` order. Deterministic in `config.seed`.
pub fn synthesize_corpus(config: &SynthConfig) -> Result<Vec<RawRecording>, DatasetError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rank = config.true_rank;
    let (k_count, l_count) = (config.gestures, config.realisations);

    let basis: Vec<BasisCurve> = (0..rank).map(|_| BasisCurve::random(&mut rng)).collect();

    // Constant per-channel offsets vanish under per-sensor centring. Accelerometer
    // channels get none: a constant acceleration integrates to a parabola.
    let mut baseline = [0.0; SENSOR_COUNT];
    for (s, b) in baseline.iter_mut().enumerate() {
        if !ACCEL_CHANNELS.contains(&s) {
            *b = rng.random_range(-1.0..1.0);
        }
    }

    let component_scale: Vec<f64> = (0..rank).map(|j| 1.0 / ((j + 1) as f64).sqrt()).collect();
    let mut coeffs = vec![0.0; k_count * l_count * rank];
    for k in 0..k_count {
        let type_effect: Vec<f64> = (0..rank).map(|_| rng.sample(StandardNormal)).collect();
        for l in 0..l_count {
            for j in 0..rank {
                let jitter: f64 = rng.sample(StandardNormal);
                coeffs[(k * l_count + l) * rank + j] =
                    component_scale[j] * (type_effect[j] + REALISATION_SPREAD * jitter);
            }
        }
    }
    let total = (k_count * l_count) as f64;
    for j in 0..rank {
        let mean = (0..k_count * l_count).map(|c| coeffs[c * rank + j]).sum::<f64>() / total;
        for c in 0..k_count * l_count {
            coeffs[c * rank + j] -= mean;
        }
    }

    let lengths = config.admissible_lengths();
    let noise = Normal::new(0.0, config.noise_sigma).expect("validated noise_sigma");
    let mut recordings = Vec::with_capacity(k_count * l_count);
    for k in 0..k_count {
        for l in 0..l_count {
            let len = lengths[rng.random_range(0..lengths.len())];
            let c = &coeffs[(k * l_count + l) * rank..(k * l_count + l + 1) * rank];
            let samples = DMatrix::from_fn(len, SENSOR_COUNT, |i, s| {
                let t = i as f64 / (len - 1) as f64;
                let signal: f64 = basis.iter().zip(c).map(|(b, cj)| cj * b.eval(t, s)).sum();
                baseline[s] + signal
            });
            // Noise is drawn in a fixed row-major order, independent of the formula above.
            let mut samples = samples;
            if config.noise_sigma > 0.0 {
                for i in 0..len {
                    for s in 0..SENSOR_COUNT {
                        samples[(i, s)] += noise.sample(&mut rng);
                    }
                }
            }
            recordings.push(RawRecording::new(RecordingMeta::for_slot(k + 1, l + 1), samples)?);
        }
    }
    Ok(recordings)
}

/// Builds a data matrix `X = Q1 diag(spectrum) Q2^T` with random orthonormal
/// `Q1`, `Q2`, so its singular values are exactly `spectrum` (up to rounding).
///
/// Used to exercise the decomposition and error-curve machinery on a
/// prescribed spectrum, bypassing the recording pipeline.
pub fn synthesize_data_matrix(layout: Layout, spectrum: &[f64], seed: u64) -> Result<DataMatrix, DatasetError> {
    let (rows, cols) = (layout.rows(), layout.cols());
    let q = rows.min(cols);
    if spectrum.is_empty() || spectrum.len() > q {
        return Err(DatasetError::BadConfig(format!(
            "spectrum length {} must be in 1..={q}",
            spectrum.len()
        )));
    }
    if spectrum.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(DatasetError::BadConfig(
            "spectrum entries must be finite and >= 0".into(),
        ));
    }
    let r = spectrum.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = |m: usize| DMatrix::from_fn(m, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let left = gaussian(rows).qr().q();
    let right = gaussian(cols).qr().q();
    let scaled = DMatrix::from_fn(rows, r, |i, j| left[(i, j)] * spectrum[j]);
    Ok(DataMatrix::new(&scaled * right.transpose(), layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SynthConfig {
        SynthConfig {
            gestures: 4,
            realisations: 5,
            true_rank: 3,
            noise_sigma: 0.0,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn shape_and_slots() {
        let recs = synthesize_corpus(&cfg()).unwrap();
        assert_eq!(recs.len(), 20);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.meta.slot(), (i / 5 + 1, i % 5 + 1));
            assert!((40..=160).contains(&r.len()));
            assert_eq!((r.len() - 1) % 19, 0);
        }
    }

    #[test]
    fn deterministic() {
        let a = synthesize_corpus(&SynthConfig {
            noise_sigma: 0.1,
            ..cfg()
        })
        .unwrap();
        let b = synthesize_corpus(&SynthConfig {
            noise_sigma: 0.1,
            ..cfg()
        })
        .unwrap();
        assert_eq!(a, b);
        let c = synthesize_corpus(&SynthConfig {
            noise_sigma: 0.1,
            seed: 7,
            ..cfg()
        })
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bad_configs() {
        let bad = [
            SynthConfig { gestures: 0, ..cfg() },
            SynthConfig { gestures: 23, ..cfg() },
            SynthConfig {
                realisations: 0,
                ..cfg()
            },
            SynthConfig { true_rank: 0, ..cfg() },
            SynthConfig { true_rank: 21, ..cfg() },
            SynthConfig {
                noise_sigma: -1.0,
                ..cfg()
            },
            SynthConfig {
                length_range: (1, 100),
                ..cfg()
            },
            SynthConfig {
                length_range: (50, 40),
                ..cfg()
            },
            SynthConfig {
                length_range: (41, 56),
                ..cfg()
            },
            SynthConfig { resample_n: 1, ..cfg() },
        ];
        for c in bad {
            assert!(
                matches!(synthesize_corpus(&c), Err(DatasetError::BadConfig(_))),
                "{c:?}"
            );
        }
    }

    #[test]
    fn prescribed_spectrum_matrix() {
        let layout = Layout {
            gestures: 2,
            realisations: 3,
            samples: 2,
            sensors: 2,
        };
        let x = synthesize_data_matrix(layout, &[3.0, 1.0], 1).unwrap();
        assert_eq!(x.matrix().shape(), (4, 6));
        let sv = x.matrix().clone().singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!((sv[0] - 3.0).abs() < 1e-12 && (sv[1] - 1.0).abs() < 1e-12 && sv[2].abs() < 1e-12);
        assert!(synthesize_data_matrix(layout, &[1.0; 5], 1).is_err());
    }
}
