use nalgebra::DMatrix;

use super::{PreprocessError, ResampledGesture};
use crate::ACCEL_CHANNELS;

/// Replaces the accelerometer columns of `samples` by position, using the
/// rectangle rule with zero initial velocity and position:
/// `v_t = v_{t-1} + a_t dt`, `p_t = p_{t-1} + v_t dt`.
pub fn double_integrate(samples: &mut DMatrix<f64>, dt: f64) -> Result<(), PreprocessError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PreprocessError::BadTimeStep(dt));
    }
    for s in ACCEL_CHANNELS {
        let (mut v, mut p) = (0.0, 0.0);
        for t in 0..samples.nrows() {
            v += samples[(t, s)] * dt;
            p += v * dt;
            samples[(t, s)] = p;
        }
    }
    Ok(())
}

pub fn integrate_acceleration(g: &ResampledGesture, dt: f64) -> Result<ResampledGesture, PreprocessError> {
    let mut values = g.values.clone();
    double_integrate(&mut values, dt)?;
    Ok(ResampledGesture {
        meta: g.meta.clone(),
        values,
        integrated: true,
    })
}
