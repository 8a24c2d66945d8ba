//! SVD of the data matrix and everything derived from it.

mod jacobi;
mod lowrank;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::preprocess::{DataMatrix, Layout};

pub use jacobi::{thin_svd, Factorization, MAX_SWEEPS};
pub use lowrank::{column_error_curve, error_curve, reconstruct, reconstruct_gesture, ErrorCurve};

#[derive(Debug, Error, PartialEq)]
pub enum DecompositionError {
    #[error("SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("eigengesture count {count} outside 1..={q}")]
    CountOutOfRange { count: usize, q: usize },
    #[error("rank {rank} outside 1..={q}")]
    RankOutOfRange { rank: usize, q: usize },
    #[error("no realisation ({gesture}, {realisation}) in the data matrix")]
    UnknownRealisation { gesture: usize, realisation: usize },
    #[error("data matrix shape {found:?} does not match the decomposition {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Thin SVD `X = U diag(sigma) V^T` of a data matrix, together with the
/// layout needed to map columns of `U` back to `(time, sensor)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// `(N*S) x q`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Length `q`, non-negative, non-increasing.
    pub sigma: Vec<f64>,
    /// `(K*L) x q`, orthonormal columns.
    pub v: DMatrix<f64>,
    pub layout: Layout,
}

impl SvdResult {
    /// Number of singular triplets, `min(N*S, K*L)`.
    pub fn q(&self) -> usize {
        self.sigma.len()
    }

    pub fn total_energy(&self) -> f64 {
        self.sigma.iter().map(|s| s * s).sum()
    }

    /// Number of singular values above `rel_tol * sigma_1`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_tol * top).count()
    }

    pub(crate) fn check_rank(&self, rank: usize) -> Result<(), DecompositionError> {
        if rank == 0 || rank > self.q() {
            Err(DecompositionError::RankOutOfRange { rank, q: self.q() })
        } else {
            Ok(())
        }
    }
}

pub fn svd(x: &DataMatrix) -> Result<SvdResult, DecompositionError> {
    let f = thin_svd(x.matrix())?;
    log::debug!(
        "jacobi svd of {:?} converged in {} sweeps",
        x.matrix().shape(),
        f.sweeps
    );
    Ok(SvdResult {
        u: f.u,
        sigma: f.sigma,
        v: f.v,
        layout: x.layout(),
    })
}

/// Principal components: column `i` of `scores` is `V[:, i] * sigma_i`,
/// i.e. the coordinates of every realisation along the `i`-th direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponents {
    pub scores: DMatrix<f64>,
}

pub fn principal_components(svd: &SvdResult) -> PrincipalComponents {
    let mut scores = svd.v.clone();
    for (i, s) in svd.sigma.iter().enumerate() {
        scores.column_mut(i).scale_mut(*s);
    }
    PrincipalComponents { scores }
}

/// A left singular vector reshaped to `time x sensor`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigengesture {
    /// 1-based.
    pub index: usize,
    /// `N x S`.
    pub shape: DMatrix<f64>,
    pub singular_value: f64,
    /// `sigma_i^2 / sum_j sigma_j^2` over the full spectrum.
    pub energy_fraction: f64,
}

/// The first `count` eigengestures.
pub fn eigengestures(svd: &SvdResult, count: usize) -> Result<Vec<Eigengesture>, DecompositionError> {
    if count == 0 || count > svd.q() {
        return Err(DecompositionError::CountOutOfRange { count, q: svd.q() });
    }
    let total = svd.total_energy();
    Ok((0..count)
        .map(|i| {
            let sigma = svd.sigma[i];
            Eigengesture {
                index: i + 1,
                shape: svd.layout.unflatten(svd.u.column(i).iter()),
                singular_value: sigma,
                energy_fraction: if total > 0.0 { sigma * sigma / total } else { 0.0 },
            }
        })
        .collect())
}

/// One row of the spectrum table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub sigma: f64,
    pub energy_fraction: f64,
    pub cumulative_energy: f64,
}

pub fn spectrum(svd: &SvdResult) -> Vec<SpectrumRow> {
    let total = svd.total_energy();
    let mut cumulative = 0.0;
    svd.sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let fraction = if total > 0.0 { s * s / total } else { 0.0 };
            cumulative += fraction;
            SpectrumRow {
                index: i + 1,
                sigma: s,
                energy_fraction: fraction,
                cumulative_energy: cumulative,
            }
        })
        .collect()
}
