//! Dense symmetric linear algebra used by both ADMM engines.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{max_asymmetry, CostMatrix, SpectralMeta};

const SYMMETRY_TOL: f64 = 1e-10;
const EIGEN_MAX_SWEEPS: usize = 10_000;
const SINGULAR_SHIFT_TOL: f64 = 1e-12;

/// Eigendecomposition `M = U diag(lambda) U^T`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub u: DMatrix<f64>,
    pub lambda: DVector<f64>,
}

impl SymEigen {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.u.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= self.lambda[j];
        }
        scaled * self.u.transpose()
    }
}

pub fn sym_eigen(m: &DMatrix<f64>) -> Result<SymEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let asym = max_asymmetry(m);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::EigenNoConvergence(EIGEN_MAX_SWEEPS))?;

    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lambda = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let u = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SymEigen { u, lambda })
}

/// Solves `(rho I + 2C) v = rhs` from a cached decomposition of `C`.
pub fn shifted_solve(e: &SymEigen, rho: f64, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if rhs.len() != e.n() {
        return Err(Error::DimensionMismatch {
            expected: e.n(),
            got: rhs.len(),
        });
    }
    let mut coeffs = e.u.tr_mul(rhs);
    for (c, &l) in coeffs.iter_mut().zip(e.lambda.iter()) {
        let d = 2.0 * l + rho;
        if d.abs() < SINGULAR_SHIFT_TOL {
            return Err(Error::NearSingularShift(d.abs()));
        }
        *c /= d;
    }
    Ok(&e.u * coeffs)
}

/// Solves `S W = rhs` for a small symmetric positive definite `S` via Cholesky.
pub fn small_spd_solve(s: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !s.is_square() || s.nrows() != rhs.nrows() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            got: rhs.nrows(),
        });
    }
    let chol = s.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.solve(rhs))
}

/// Computes `(L1, LH)` for `C` and caches them on the cost matrix.
pub fn spectral_constants(cost: &CostMatrix) -> Result<SpectralMeta> {
    if let Some(meta) = cost.spectral_meta() {
        return Ok(meta);
    }
    let e = sym_eigen(cost.matrix())?;
    Ok(cost.cache_spectral_meta(SpectralMeta::from_eigenvalues(e.lambda.as_slice())))
}

/// Decomposes `C` once and caches its spectral constants alongside.
pub fn eigen_with_constants(cost: &CostMatrix) -> Result<(SymEigen, SpectralMeta)> {
    let e = sym_eigen(cost.matrix())?;
    let meta = cost.cache_spectral_meta(SpectralMeta::from_eigenvalues(e.lambda.as_slice()));
    Ok((e, meta))
}
