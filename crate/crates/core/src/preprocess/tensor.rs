use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{integrate::double_integrate, PreprocessError, ResampledGesture, DEGENERATE_STD};
use crate::numeric::mean_and_std;

/// Dimensions of the gesture tensor and the matching data-matrix index maps.
///
/// Gesture and realisation indices exposed by `column`/`slot` are 1-based;
/// time and sensor indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub gestures: usize,
    pub realisations: usize,
    pub samples: usize,
    pub sensors: usize,
}

impl Layout {
    pub fn rows(&self) -> usize {
        self.samples * self.sensors
    }

    pub fn cols(&self) -> usize {
        self.gestures * self.realisations
    }

    /// Column of realisation `(k, l)`; columns are ordered `(k, l)` lexicographically.
    pub fn column(&self, gesture: usize, realisation: usize) -> Option<usize> {
        if (1..=self.gestures).contains(&gesture) && (1..=self.realisations).contains(&realisation) {
            Some((gesture - 1) * self.realisations + realisation - 1)
        } else {
            None
        }
    }

    pub fn slot(&self, col: usize) -> (usize, usize) {
        (col / self.realisations + 1, col % self.realisations + 1)
    }

    /// Row of `(t, s)`: sensor-major, so each sensor's trajectory is contiguous.
    pub fn row(&self, t: usize, s: usize) -> usize {
        s * self.samples + t
    }

    /// Inverse of [`Layout::row`].
    pub fn time_sensor(&self, row: usize) -> (usize, usize) {
        (row % self.samples, row / self.samples)
    }

    /// Reshapes a length-`rows()` vector into `samples x sensors`.
    pub fn unflatten<'a>(&self, column: impl IntoIterator<Item = &'a f64>) -> DMatrix<f64> {
        // Sensor-major rows are exactly nalgebra's column-major storage of an N x S matrix.
        DMatrix::from_iterator(self.samples, self.sensors, column.into_iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorMoments {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// The `K x L x N x S` array of resampled realisations.
#[derive(Debug, Clone, PartialEq)]
pub struct GestureTensor {
    layout: Layout,
    data: Vec<f64>,
    integrated: bool,
    moments: Option<SensorMoments>,
}

impl GestureTensor {
    fn index(&self, k: usize, l: usize, t: usize, s: usize) -> usize {
        let d = &self.layout;
        ((k * d.realisations + l) * d.samples + t) * d.sensors + s
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn is_integrated(&self) -> bool {
        self.integrated
    }

    /// Per-sensor moments removed by [`studentise`]; `None` before that step.
    pub fn moments(&self) -> Option<&SensorMoments> {
        self.moments.as_ref()
    }

    /// Element `[k, l, t, s]`, all 0-based.
    pub fn get(&self, k: usize, l: usize, t: usize, s: usize) -> f64 {
        self.data[self.index(k, l, t, s)]
    }

    /// The `N x S` slice of realisation `(k, l)`, 0-based.
    pub fn slice(&self, k: usize, l: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.layout.samples, self.layout.sensors, |t, s| self.get(k, l, t, s))
    }

    /// All values of sensor `s` in `(k, l, t)` order.
    pub fn sensor_values(&self, s: usize) -> Vec<f64> {
        self.data.iter().skip(s).step_by(self.layout.sensors).copied().collect()
    }

    /// Double-integrates the accelerometer channels of every realisation.
    pub fn integrate_acceleration(mut self, dt: f64) -> Result<Self, PreprocessError> {
        let d = self.layout;
        for k in 0..d.gestures {
            for l in 0..d.realisations {
                let mut slice = self.slice(k, l);
                double_integrate(&mut slice, dt)?;
                for t in 0..d.samples {
                    for s in 0..d.sensors {
                        let i = self.index(k, l, t, s);
                        self.data[i] = slice[(t, s)];
                    }
                }
            }
        }
        self.integrated = true;
        self.moments = None;
        Ok(self)
    }
}

/// Places each gesture at its `(k, l)` slot. Every slot must be filled exactly once.
pub fn assemble_tensor(
    gestures: &[ResampledGesture],
    k_count: usize,
    l_count: usize,
) -> Result<GestureTensor, PreprocessError> {
    let first = gestures.first().ok_or(PreprocessError::MissingRealisation {
        gesture: 1,
        realisation: 1,
    })?;
    let (n, s_count) = first.values.shape();
    let integrated = first.integrated;
    let layout = Layout {
        gestures: k_count,
        realisations: l_count,
        samples: n,
        sensors: s_count,
    };

    let mut filled = vec![false; k_count * l_count];
    let mut tensor = GestureTensor {
        layout,
        data: vec![0.0; k_count * l_count * n * s_count],
        integrated,
        moments: None,
    };
    for g in gestures {
        let (k, l) = g.meta.slot();
        let col = layout.column(k, l).ok_or(PreprocessError::UnexpectedRealisation {
            gesture: k,
            realisation: l,
            gestures: k_count,
            realisations: l_count,
        })?;
        if g.values.shape() != (n, s_count) {
            return Err(PreprocessError::ShapeMismatch(format!(
                "gesture ({k}, {l}) is {:?}, expected {:?}",
                g.values.shape(),
                (n, s_count)
            )));
        }
        if g.integrated != integrated {
            return Err(PreprocessError::ShapeMismatch(
                "mixed integrated and raw gestures".into(),
            ));
        }
        if std::mem::replace(&mut filled[col], true) {
            return Err(PreprocessError::DuplicateRealisation {
                gesture: k,
                realisation: l,
            });
        }
        for t in 0..n {
            for s in 0..s_count {
                let i = tensor.index(k - 1, l - 1, t, s);
                tensor.data[i] = g.values[(t, s)];
            }
        }
    }
    if let Some(col) = filled.iter().position(|f| !f) {
        let (gesture, realisation) = layout.slot(col);
        return Err(PreprocessError::MissingRealisation { gesture, realisation });
    }
    Ok(tensor)
}

/// Centres and scales every sensor to zero mean and unit population
/// standard deviation over all `(k, l, t)`.
pub fn studentise(mut tensor: GestureTensor) -> Result<GestureTensor, PreprocessError> {
    let s_count = tensor.layout.sensors;
    let mut means = Vec::with_capacity(s_count);
    let mut stds = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let (mean, std) = mean_and_std(&tensor.sensor_values(s));
        if std.is_nan() || std < DEGENERATE_STD {
            return Err(PreprocessError::DegenerateSensor { sensor: s, std });
        }
        means.push(mean);
        stds.push(std);
    }
    for (i, v) in tensor.data.iter_mut().enumerate() {
        let s = i % s_count;
        *v = (*v - means[s]) / stds[s];
    }
    tensor.moments = Some(SensorMoments { means, stds });
    Ok(tensor)
}

/// The `(N*S) x (K*L)` matrix whose columns are vectorised realisations.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    x: DMatrix<f64>,
    layout: Layout,
    moments: Option<SensorMoments>,
    integrated: bool,
}

impl DataMatrix {
    pub fn new(x: DMatrix<f64>, layout: Layout) -> Self {
        assert_eq!(
            x.shape(),
            (layout.rows(), layout.cols()),
            "matrix does not match layout"
        );
        DataMatrix {
            x,
            layout,
            moments: None,
            integrated: false,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn moments(&self) -> Option<&SensorMoments> {
        self.moments.as_ref()
    }

    /// Column `col` reshaped to `N x S`.
    pub fn gesture(&self, col: usize) -> DMatrix<f64> {
        self.layout.unflatten(self.x.column(col).iter())
    }

    /// Rebuilds the tensor the matrix was flattened from.
    pub fn unflatten(&self) -> GestureTensor {
        let d = self.layout;
        let mut data = vec![0.0; d.cols() * d.rows()];
        for col in 0..d.cols() {
            for row in 0..d.rows() {
                let (t, s) = d.time_sensor(row);
                data[(col * d.samples + t) * d.sensors + s] = self.x[(row, col)];
            }
        }
        GestureTensor {
            layout: d,
            data,
            integrated: self.integrated,
            moments: self.moments.clone(),
        }
    }
}

pub fn flatten(tensor: &GestureTensor) -> Result<DataMatrix, PreprocessError> {
    if tensor.moments.is_none() {
        return Err(PreprocessError::NotStudentised);
    }
    let d = tensor.layout;
    let x = DMatrix::from_fn(d.rows(), d.cols(), |row, col| {
        let (t, s) = d.time_sensor(row);
        let (k, l) = d.slot(col);
        tensor.get(k - 1, l - 1, t, s)
    });
    Ok(DataMatrix {
        x,
        layout: d,
        moments: tensor.moments.clone(),
        integrated: tensor.integrated,
    })
}
