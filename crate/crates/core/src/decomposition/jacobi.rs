//! Thin SVD by one-sided (Hestenes) Jacobi rotations.
//!
//! The working matrix `W` (the input, or its transpose when the input is
//! wide) has its columns orthogonalised pairwise by plane rotations that are
//! accumulated into `R`. At convergence `W = U_w diag(sigma)` and the input is
//! recovered as `W R^T`. The method is slower than bidiagonalisation but
//! computes small singular values to high relative accuracy and needs no
//! deflation logic.

use nalgebra::DMatrix;

use super::DecompositionError;

/// Upper bound on full sweeps before giving up. Quadratic convergence
/// usually finishes in well under 15.
pub const MAX_SWEEPS: usize = 60;

/// Column norms below this are treated as exact zeros.
const ZERO_NORM: f64 = 1.4916681462400413e-154; // sqrt(f64::MIN_POSITIVE)

/// `A = U diag(sigma) V^T` with `q = min(m, n)` columns in `U` and `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
    pub sweeps: usize,
}

/// Column-major storage with `rows` entries per column.
struct Columns {
    rows: usize,
    data: Vec<f64>,
}

impl Columns {
    fn pair_mut(&mut self, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(i < j);
        let (head, tail) = self.data.split_at_mut(j * self.rows);
        (&mut head[i * self.rows..(i + 1) * self.rows], &mut tail[..self.rows])
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

/// Thin singular value decomposition with singular values in non-increasing
/// order and the sign of each `U` column fixed so that its largest-magnitude
/// entry (lowest row on ties) is non-negative.
pub fn thin_svd(a: &DMatrix<f64>) -> Result<Factorization, DecompositionError> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(DecompositionError::NonFinite);
    }
    let (m, n) = a.shape();
    let q = m.min(n);
    if q == 0 {
        return Ok(Factorization {
            u: DMatrix::zeros(m, 0),
            sigma: Vec::new(),
            v: DMatrix::zeros(n, 0),
            sweeps: 0,
        });
    }

    let transposed = m < n;
    let work = if transposed { a.transpose() } else { a.clone() };
    let (p, r) = work.shape();
    let mut w = Columns {
        rows: p,
        data: work.as_slice().to_vec(),
    };
    let mut rot = Columns {
        rows: r,
        data: DMatrix::<f64>::identity(r, r).as_slice().to_vec(),
    };

    // Rounding in a length-p dot product is O(p * eps); a tighter threshold
    // could stall.
    let tol = f64::EPSILON * p as f64;
    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(DecompositionError::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for i in 0..r.saturating_sub(1) {
            for j in i + 1..r {
                let (wi, wj) = w.pair_mut(i, j);
                let alpha = dot(wi, wi);
                let beta = dot(wj, wj);
                if alpha.sqrt() < ZERO_NORM || beta.sqrt() < ZERO_NORM {
                    continue;
                }
                let gamma = dot(wi, wj);
                if gamma.abs() <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1.0f64.hypot(zeta));
                let c = 1.0 / 1.0f64.hypot(t);
                let s = c * t;
                rotate(wi, wj, c, s);
                let (ri, rj) = rot.pair_mut(i, j);
                rotate(ri, rj, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..r).map(|j| dot(w.col(j), w.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut sigma = Vec::with_capacity(r);
    let mut left = DMatrix::zeros(p, r);
    let mut right = DMatrix::zeros(r, r);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let norm = norms[src];
        if norm < ZERO_NORM {
            sigma.push(0.0);
            deficient.push(dst);
        } else {
            sigma.push(norm);
            for (k, v) in w.col(src).iter().enumerate() {
                left[(k, dst)] = v / norm;
            }
        }
        for (k, v) in rot.col(src).iter().enumerate() {
            right[(k, dst)] = *v;
        }
    }
    complete_orthonormal(&mut left, &deficient);

    let (mut u, mut v) = if transposed { (right, left) } else { (left, right) };
    fix_signs(&mut u, &mut v);
    Ok(Factorization { u, sigma, v, sweeps })
}

/// Fills the listed columns of `basis` with unit vectors orthogonal to every
/// other column, drawn from the standard basis by Gram-Schmidt.
fn complete_orthonormal(basis: &mut DMatrix<f64>, deficient: &[usize]) {
    if deficient.is_empty() {
        return;
    }
    let p = basis.nrows();
    let mut filled: Vec<usize> = (0..basis.ncols()).filter(|c| !deficient.contains(c)).collect();
    // Some standard basis vector always keeps at least 1/sqrt(p) after projection.
    let accept = 0.5 / (p as f64).sqrt();
    let mut candidate = 0;
    for &target in deficient {
        loop {
            assert!(candidate < p, "no standard basis vector left to complete the basis");
            let mut e = nalgebra::DVector::<f64>::zeros(p);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &c in &filled {
                    let col = basis.column(c);
                    let proj = col.dot(&e);
                    e.axpy(-proj, &col, 1.0);
                }
            }
            let norm = e.norm();
            if norm >= accept {
                basis.set_column(target, &(e / norm));
                filled.push(target);
                break;
            }
        }
    }
}

fn fix_signs(u: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    for i in 0..u.ncols() {
        let mut best = 0;
        for row in 1..u.nrows() {
            if u[(row, i)].abs() > u[(best, i)].abs() {
                best = row;
            }
        }
        if u[(best, i)] < 0.0 {
            u.column_mut(i).neg_mut();
            v.column_mut(i).neg_mut();
        }
    }
}
