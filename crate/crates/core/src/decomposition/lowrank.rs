use nalgebra::DMatrix;
use serde::Serialize;

use super::{DecompositionError, SvdResult};
use crate::preprocess::DataMatrix;

/// Best rank-`n` approximation `U[:, ..n] diag(sigma[..n]) V[:, ..n]^T`.
pub fn reconstruct(svd: &SvdResult, n: usize) -> Result<DMatrix<f64>, DecompositionError> {
    svd.check_rank(n)?;
    let mut scaled = svd.u.columns(0, n).into_owned();
    for i in 0..n {
        scaled.column_mut(i).scale_mut(svd.sigma[i]);
    }
    Ok(scaled * svd.v.columns(0, n).transpose())
}

/// Column `(gesture, realisation)` of the rank-`n` approximation as `N x S`.
pub fn reconstruct_gesture(
    svd: &SvdResult,
    gesture: usize,
    realisation: usize,
    n: usize,
) -> Result<DMatrix<f64>, DecompositionError> {
    let col = svd
        .layout
        .column(gesture, realisation)
        .ok_or(DecompositionError::UnknownRealisation { gesture, realisation })?;
    svd.check_rank(n)?;
    let mut x = nalgebra::DVector::zeros(svd.u.nrows());
    for i in 0..n {
        x.axpy(svd.sigma[i] * svd.v[(col, i)], &svd.u.column(i), 1.0);
    }
    Ok(svd.layout.unflatten(x.iter()))
}

/// Normalised reconstruction error `d(n)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurve {
    /// `values[n - 1] = d(n)`.
    pub values: Vec<f64>,
    /// Set when `sigma_2 = ... = sigma_q = 0`; the curve is then 1 followed by zeros.
    pub degenerate: bool,
}

impl ErrorCurve {
    /// `d(n)`, 1-based.
    pub fn at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

/// Squared Frobenius residuals `sum_{i > n} sigma_i^2` for `n = 0..=q`.
fn tail_energies(sigma: &[f64]) -> Vec<f64> {
    let mut tails = vec![0.0; sigma.len() + 1];
    for i in (0..sigma.len()).rev() {
        tails[i] = tails[i + 1] + sigma[i] * sigma[i];
    }
    tails
}

/// `d(n) = ||X - X_n||_F / ||X - X_1||_F`, evaluated through the spectrum:
/// `d(n)^2 = sum_{i > n} sigma_i^2 / sum_{i > 1} sigma_i^2`.
pub fn error_curve(x: &DataMatrix, svd: &SvdResult, n_max: usize) -> Result<ErrorCurve, DecompositionError> {
    check_shape(x, svd)?;
    svd.check_rank(n_max)?;
    let tails = tail_energies(&svd.sigma);
    let denom = tails[1];
    if denom == 0.0 {
        log::warn!("degenerate spectrum: only the first singular value is non-zero");
        let mut values = vec![0.0; n_max];
        values[0] = 1.0;
        return Ok(ErrorCurve {
            values,
            degenerate: true,
        });
    }
    let values = (1..=n_max).map(|n| (tails[n] / denom).sqrt()).collect();
    Ok(ErrorCurve {
        values,
        degenerate: false,
    })
}

/// Mean over realisations of `||x_c - x_c^(n)|| / ||x_c||` for `n = 1..=n_max`.
/// Columns with zero norm are left out of the mean.
pub fn column_error_curve(x: &DataMatrix, svd: &SvdResult, n_max: usize) -> Result<Vec<f64>, DecompositionError> {
    check_shape(x, svd)?;
    svd.check_rank(n_max)?;
    let cols = svd.v.nrows();
    let mut sums = vec![0.0; n_max];
    let mut counted = 0usize;
    for c in 0..cols {
        let coords: Vec<f64> = (0..svd.q()).map(|i| svd.sigma[i] * svd.v[(c, i)]).collect();
        let tails = tail_energies(&coords);
        let norm = x.matrix().column(c).norm();
        if norm == 0.0 {
            continue;
        }
        counted += 1;
        for n in 1..=n_max {
            sums[n - 1] += tails[n].sqrt() / norm;
        }
    }
    let counted = counted.max(1) as f64;
    Ok(sums.into_iter().map(|s| s / counted).collect())
}

fn check_shape(x: &DataMatrix, svd: &SvdResult) -> Result<(), DecompositionError> {
    let expected = (svd.u.nrows(), svd.v.nrows());
    let found = x.matrix().shape();
    if expected != found {
        return Err(DecompositionError::ShapeMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::svd;
    use crate::preprocess::Layout;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = Layout {
            gestures: 1,
            realisations: cols,
            samples: rows,
            sensors: 1,
        };
        DataMatrix::new(DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)), layout)
    }

    #[test]
    fn full_rank_reproduces() {
        let x = random(7, 5, 1);
        let s = svd(&x).unwrap();
        let xhat = reconstruct(&s, 5).unwrap();
        assert!((xhat - x.matrix()).norm() <= 1e-8 * x.matrix().norm());
    }

    #[test]
    fn rank_one_of_diagonal() {
        let layout = Layout {
            gestures: 1,
            realisations: 2,
            samples: 2,
            sensors: 1,
        };
        let x = DataMatrix::new(DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 2.0]), layout);
        let s = svd(&x).unwrap();
        assert_eq!(
            reconstruct(&s, 1).unwrap(),
            DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 0.0])
        );
        assert!(matches!(
            reconstruct(&s, 0),
            Err(DecompositionError::RankOutOfRange { rank: 0, q: 2 })
        ));
        assert!(matches!(
            reconstruct(&s, 3),
            Err(DecompositionError::RankOutOfRange { rank: 3, q: 2 })
        ));
    }

    #[test]
    fn eckart_young_direct() {
        let x = random(9, 6, 2);
        let s = svd(&x).unwrap();
        for n in 1..=6 {
            let direct = (x.matrix() - reconstruct(&s, n).unwrap()).norm();
            let spectral = s.sigma[n..].iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((direct - spectral).abs() <= 1e-8 * x.matrix().norm(), "n={n}");
        }
    }

    #[test]
    fn gesture_residual_matches_column() {
        let layout = Layout {
            gestures: 2,
            realisations: 3,
            samples: 4,
            sensors: 2,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DataMatrix::new(DMatrix::from_fn(8, 6, |_, _| rng.random_range(-1.0..1.0)), layout);
        let s = svd(&x).unwrap();
        let n = 2;
        let full = reconstruct(&s, n).unwrap();
        let col = layout.column(2, 1).unwrap();
        let g = reconstruct_gesture(&s, 2, 1, n).unwrap();
        let residual = (x.gesture(col) - &g).norm();
        assert!((residual - (x.matrix().column(col) - full.column(col)).norm()).abs() < 1e-12);
        let exact = reconstruct_gesture(&s, 2, 1, 6).unwrap();
        assert!((exact - x.gesture(col)).amax() < 1e-8);
        assert!(matches!(
            reconstruct_gesture(&s, 3, 1, 2),
            Err(DecompositionError::UnknownRealisation {
                gesture: 3,
                realisation: 1
            })
        ));
    }

    #[test]
    fn curve_endpoints_and_monotone() {
        let x = random(10, 7, 4);
        let s = svd(&x).unwrap();
        let c = error_curve(&x, &s, 7).unwrap();
        assert_eq!(c.at(1), Some(1.0));
        assert_eq!(c.at(7), Some(0.0));
        assert!(c.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(!c.degenerate);
        assert_eq!(c.at(0), None);
    }

    #[test]
    fn degenerate_spectrum() {
        let layout = Layout {
            gestures: 1,
            realisations: 3,
            samples: 3,
            sensors: 1,
        };
        let u = nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = DataMatrix::new(&u * u.transpose(), layout);
        let s = svd(&x).unwrap();
        let c = error_curve(&x, &s, 3).unwrap();
        assert!(c.degenerate || c.values[1] < 1e-8);
        let zero = DataMatrix::new(DMatrix::zeros(3, 3), layout);
        let s = svd(&zero).unwrap();
        let c = error_curve(&zero, &s, 3).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.values, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn shape_checked() {
        let x = random(5, 4, 5);
        let s = svd(&x).unwrap();
        let other = random(5, 3, 6);
        assert!(matches!(
            error_curve(&other, &s, 2),
            Err(DecompositionError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn column_curve_matches_direct() {
        let x = random(6, 5, 7);
        let s = svd(&x).unwrap();
        let curve = column_error_curve(&x, &s, 5).unwrap();
        for n in 1..=5 {
            let xhat = reconstruct(&s, n).unwrap();
            let direct: f64 = (0..5)
                .map(|c| (x.matrix().column(c) - xhat.column(c)).norm() / x.matrix().column(c).norm())
                .sum::<f64>()
                / 5.0;
            assert!((curve[n - 1] - direct).abs() < 1e-10, "n={n}");
        }
    }
}
