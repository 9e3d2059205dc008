//! Turning relaxed iterates into sign vectors.
//!
//! Vector iterates and rank-one factors are rounded entrywise. Wider factors
//! go through a randomized hyperplane scan: for every prefix width `k` and
//! every trial, project the first `k` factor columns onto a fresh Gaussian
//! direction, take signs, and keep the candidate with the lowest `x^T C x`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{quad_form, CostMatrix, Partition};
use crate::numerics::sym_eigen;
use crate::rng::seeded;

pub const DEFAULT_TRIALS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorOrigin {
    Eigen,
    Svd,
}

/// `n x k` factor whose columns are ordered by decreasing magnitude of the
/// spectral value they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub f: DMatrix<f64>,
    /// Eigenvalues or singular values matching the columns of `f`.
    pub spectrum: Vec<f64>,
    pub origin: FactorOrigin,
}

impl Factor {
    pub fn width(&self) -> usize {
        self.f.ncols()
    }
}

/// `sign(x)` with `sign(0) = +1`.
pub fn sign_round(x: &[f64]) -> Partition {
    Partition::from_signs(x)
}

/// `F = Q |Lambda|^{1/2}` with columns sorted by `|lambda|` descending.
/// Negative eigenvalues (an indefinite `Z` mid-run) contribute `|lambda|`.
pub fn factor_from_symmetric(z: &DMatrix<f64>) -> Result<Factor> {
    let e = sym_eigen(z)?;
    let n = e.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.lambda[b].abs().total_cmp(&e.lambda[a].abs()));
    let f = DMatrix::from_fn(n, n, |i, j| {
        let k = order[j];
        e.u[(i, k)] * e.lambda[k].abs().sqrt()
    });
    Ok(Factor {
        f,
        spectrum: order.iter().map(|&k| e.lambda[k]).collect(),
        origin: FactorOrigin::Eigen,
    })
}

/// `F = U Sigma^{1/2}` from the thin SVD `X = U Sigma V^T`, singular values
/// descending.
pub fn factor_from_rect(x: &DMatrix<f64>) -> Result<Factor> {
    let svd = x.clone().svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| Error::InvalidConfig("SVD did not return left vectors".into()))?;
    let sv = svd.singular_values;
    let width = sv.len();
    let mut order: Vec<usize> = (0..width).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let f = DMatrix::from_fn(x.nrows(), width, |i, j| {
        let k = order[j];
        u[(i, k)] * sv[k].sqrt()
    });
    Ok(Factor {
        f,
        spectrum: order.iter().map(|&k| sv[k]).collect(),
        origin: FactorOrigin::Svd,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rounded {
    pub partition: Partition,
    pub objective: f64,
    /// Number of candidates scored.
    pub candidates: usize,
    /// Prefix width and trial (both 1-based) of the winning candidate.
    pub best_k: usize,
    pub best_trial: usize,
}

/// Scans `k = 1..=width` and `trials` Gaussian directions per `k`, each drawn
/// fresh from one seeded stream, and returns the candidate minimizing
/// `x^T C x`. Ties keep the earliest candidate.
pub fn randomized_round(
    factor: &Factor,
    cost: &CostMatrix,
    trials: usize,
    seed: u64,
) -> Result<Rounded> {
    let n = factor.f.nrows();
    if cost.n() != n {
        return Err(Error::DimensionMismatch {
            expected: cost.n(),
            got: n,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig(
            "rounding needs at least one trial".into(),
        ));
    }
    let width = factor.width();
    if width == 0 {
        return Err(Error::InvalidConfig("factor has no columns".into()));
    }
    let mut rng = seeded(seed);
    let mut proj = vec![0.0; n];
    let mut signs = vec![0.0; n];
    let mut best: Option<(f64, Vec<f64>, usize, usize)> = None;
    let mut candidates = 0;

    for k in 1..=width {
        for t in 1..=trials {
            proj.iter_mut().for_each(|v| *v = 0.0);
            for col in 0..k {
                let zc: f64 = StandardNormal.sample(&mut rng);
                for (p, &fv) in proj.iter_mut().zip(factor.f.column(col).iter()) {
                    *p += fv * zc;
                }
            }
            for (s, &p) in signs.iter_mut().zip(&proj) {
                *s = if p >= 0.0 { 1.0 } else { -1.0 };
            }
            let value = quad_form(cost.matrix(), &signs);
            candidates += 1;
            if best.as_ref().is_none_or(|(b, ..)| value < *b) {
                best = Some((value, signs.clone(), k, t));
            }
        }
    }

    let (objective, signs, best_k, best_trial) = best.expect("at least one candidate");
    Ok(Rounded {
        partition: Partition::from_signs(&signs),
        objective,
        candidates,
        best_k,
        best_trial,
    })
}
