//! ADMM on the vector splitting
//!
//! ```text
//! minimize x^T C x   subject to  y in {-1, 1}^n,  x = y
//! ```
//!
//! One iteration projects onto the sign set (y-step), solves the shifted
//! linear system `(rho I + 2C) x = rho y - mu` through a cached
//! eigendecomposition of `C` (x-step), then takes a dual ascent step and grows
//! `rho` geometrically up to `rho_cap`.
//!
//! Because the x-step is exact, `2 C x + mu = 0` holds after every full
//! iteration; the trace records that residual so callers can check it.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{quad_form, CostMatrix, SpectralMeta};
use crate::numerics::{eigen_with_constants, shifted_solve, SymEigen};
use crate::rng::{gaussian_vector, seeded};
use crate::trace::{Incumbent, RunStatus, RunTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorConfig {
    /// Initial penalty. `None` picks [`theorem1_default_rho`] when
    /// `enforce_theorem1` is set and [`heuristic_default_rho`] otherwise.
    pub rho0: Option<f64>,
    pub alpha: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub rho_cap: f64,
    /// Reject an initial penalty that does not satisfy the descent condition.
    pub enforce_theorem1: bool,
}

impl Default for VectorConfig {
    fn default() -> Self {
        Self {
            rho0: None,
            alpha: 1.05,
            eps: 1e-6,
            max_iter: 2000,
            seed: 0,
            rho_cap: 1e8,
            enforce_theorem1: false,
        }
    }
}

impl VectorConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(rho0) = self.rho0 {
            if !(rho0 > 0.0 && rho0.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "rho0 must be positive, got {rho0}"
                )));
            }
            if rho0 > self.rho_cap {
                return Err(Error::InvalidConfig(format!(
                    "rho0 = {rho0} exceeds rho_cap = {}",
                    self.rho_cap
                )));
            }
        }
        if !(self.alpha >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be >= 1, got {}",
                self.alpha
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Smallest penalty with `rho^2 - LH rho - (alpha + 1) L1^2 >= 0`.
pub fn theorem1_min_rho(meta: SpectralMeta, alpha: f64) -> f64 {
    let disc = meta.lh * meta.lh + 4.0 * (alpha + 1.0) * meta.l1 * meta.l1;
    0.5 * (meta.lh + disc.sqrt())
}

pub fn theorem1_default_rho(meta: SpectralMeta, alpha: f64) -> f64 {
    (1.1 * theorem1_min_rho(meta, alpha)).max(1.0)
}

/// `L1 / 2`, or 1 for a zero cost. Well below the descent-safe range, which
/// lets the sign pattern move for a few dozen iterations before the growing
/// penalty pins it; penalties above `L1` tend to freeze the random start.
pub fn heuristic_default_rho(meta: SpectralMeta) -> f64 {
    if meta.l1 > 0.0 {
        0.5 * meta.l1
    } else {
        1.0
    }
}

/// Checks the sufficient descent condition for a penalty `rho`; the error
/// names every clause that fails.
pub fn check_theorem1(meta: SpectralMeta, rho: f64, alpha: f64) -> Result<()> {
    let mut failed = Vec::new();
    let q = rho * rho - meta.lh * rho - (alpha + 1.0) * meta.l1 * meta.l1;
    if !(q > 0.0) {
        failed.push(format!(
            "rho^2 - LH*rho - (alpha+1)*L1^2 = {q:e} is not positive"
        ));
    }
    if !(rho > meta.lh) {
        failed.push(format!("rho = {rho} does not exceed LH = {}", meta.lh));
    }
    if !(rho > meta.l1) {
        failed.push(format!("rho = {rho} does not exceed L1 = {}", meta.l1));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::PenaltyCondition(failed.join("; ")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorState {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub mu: DVector<f64>,
    pub rho: f64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorRecord {
    pub k: usize,
    /// `x^T C x` at the relaxed iterate.
    pub objective: f64,
    /// `sign(x)^T C sign(x)`.
    pub sign_objective: f64,
    /// Lowest `sign_objective` so far.
    pub best_sign_objective: f64,
    pub lagrangian: f64,
    /// `||x - y||_2`
    pub primal_residual: f64,
    /// `||2 C x + mu||_2`
    pub dual_residual: f64,
    pub mu_norm: f64,
    pub rho: f64,
}

/// `x^0, y^0, mu^0` i.i.d. standard normal from the configured seed.
pub fn init_vector(cost: &CostMatrix, rho0: f64, seed: u64) -> VectorState {
    let n = cost.n();
    let mut rng = seeded(seed);
    let x = gaussian_vector(n, &mut rng);
    let y = gaussian_vector(n, &mut rng);
    let mu = gaussian_vector(n, &mut rng);
    VectorState {
        x,
        y,
        mu,
        rho: rho0,
        k: 0,
    }
}

impl VectorState {
    /// `y = sign(x + mu / rho)`, the exact minimizer of
    /// `||x - y + mu/rho||^2` over the sign vectors.
    pub fn update_y(&mut self) {
        let rho = self.rho;
        for ((yi, &xi), &mi) in self.y.iter_mut().zip(self.x.iter()).zip(self.mu.iter()) {
            *yi = if xi + mi / rho >= 0.0 { 1.0 } else { -1.0 };
        }
    }

    /// `x = (rho I + 2C)^{-1} (rho y - mu)`.
    pub fn update_x(&mut self, eigen: &SymEigen) -> Result<()> {
        let rhs = &self.y * self.rho - &self.mu;
        self.x = shifted_solve(eigen, self.rho, &rhs)?;
        Ok(())
    }

    /// `mu += rho (x - y)`, then `rho = min(alpha rho, rho_cap)`.
    pub fn update_dual(&mut self, alpha: f64, rho_cap: f64) {
        let step = (&self.x - &self.y) * self.rho;
        self.mu += step;
        self.rho = (alpha * self.rho).min(rho_cap);
        self.k += 1;
    }

    pub fn primal_residual(&self) -> f64 {
        (&self.x - &self.y).norm()
    }
}

/// `x^T C x + <mu, x - y> + (rho/2) ||x - y||^2`.
pub fn lagrangian_vector(s: &VectorState, cost: &CostMatrix) -> f64 {
    let diff = &s.x - &s.y;
    cost.quad(s.x.as_slice()) + s.mu.dot(&diff) + 0.5 * s.rho * diff.norm_squared()
}

/// First-order diagnostics at the current iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `min_i mu_i sign(x_i)`
    pub min_mu_x: f64,
    /// Whether `min_i mu_i sign(x_i) >= -rho`.
    pub complementarity_ok: bool,
    /// `||2 C x + mu||_2`
    pub stationarity: f64,
    /// `||x - y||_2`
    pub feasibility: f64,
}

pub fn kkt_report_vector(s: &VectorState, cost: &CostMatrix) -> KktReport {
    let min_mu_x =
        s.x.iter()
            .zip(s.mu.iter())
            .map(|(&x, &m)| if x >= 0.0 { m } else { -m })
            .fold(f64::INFINITY, f64::min);
    let min_mu_x = if min_mu_x.is_finite() { min_mu_x } else { 0.0 };
    KktReport {
        min_mu_x,
        complementarity_ok: min_mu_x >= -s.rho,
        stationarity: dual_identity_residual(s, cost),
        feasibility: s.primal_residual(),
    }
}

/// `||2 C x + mu||_2`.
pub fn dual_identity_residual(s: &VectorState, cost: &CostMatrix) -> f64 {
    (cost.matrix() * &s.x * 2.0 + &s.mu).norm()
}

/// Resolves the initial penalty and validates it when requested.
pub fn resolve_rho0(cfg: &VectorConfig, meta: SpectralMeta) -> Result<f64> {
    let rho0 = cfg.rho0.unwrap_or_else(|| {
        if cfg.enforce_theorem1 {
            theorem1_default_rho(meta, cfg.alpha)
        } else {
            heuristic_default_rho(meta)
        }
        .min(cfg.rho_cap)
    });
    if cfg.enforce_theorem1 {
        check_theorem1(meta, rho0, cfg.alpha)?;
    }
    Ok(rho0)
}

/// Runs y-step, x-step, dual step until `||x - y||_2 <= eps` or `max_iter`.
pub fn solve_vector(
    cost: &CostMatrix,
    cfg: &VectorConfig,
) -> Result<(VectorState, RunTrace<VectorRecord>)> {
    cfg.validate()?;
    let (eigen, meta) = eigen_with_constants(cost)?;
    solve_vector_with_eigen(cost, cfg, &eigen, meta)
}

/// Same as [`solve_vector`] with a precomputed decomposition of `C`.
pub fn solve_vector_with_eigen(
    cost: &CostMatrix,
    cfg: &VectorConfig,
    eigen: &SymEigen,
    meta: SpectralMeta,
) -> Result<(VectorState, RunTrace<VectorRecord>)> {
    cfg.validate()?;
    let rho0 = resolve_rho0(cfg, meta)?;
    let mut state = init_vector(cost, rho0, cfg.seed);
    let mut records = Vec::new();
    let mut status = RunStatus::MaxIter;
    let mut incumbent = None;

    for _ in 0..cfg.max_iter {
        state.update_y();
        state.update_x(eigen)?;
        state.update_dual(cfg.alpha, cfg.rho_cap);

        let cx = cost.matrix() * &state.x;
        let objective = state.x.dot(&cx);
        let diff = &state.x - &state.y;
        let primal_residual = diff.norm();
        let lagrangian = objective + state.mu.dot(&diff) + 0.5 * state.rho * diff.norm_squared();
        let signs: Vec<f64> = state
            .x
            .iter()
            .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let sign_objective = quad_form(cost.matrix(), &signs);
        Incumbent::offer(&mut incumbent, &signs, sign_objective, state.k);
        records.push(VectorRecord {
            k: state.k,
            objective,
            sign_objective,
            best_sign_objective: incumbent.as_ref().map_or(sign_objective, |b| b.objective),
            lagrangian,
            primal_residual,
            dual_residual: (cx * 2.0 + &state.mu).norm(),
            mu_norm: state.mu.norm(),
            rho: state.rho,
        });
        if primal_residual <= cfg.eps {
            status = RunStatus::Converged;
            break;
        }
    }
    Ok((
        state,
        RunTrace {
            records,
            status,
            incumbent,
        },
    ))
}
