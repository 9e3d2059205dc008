//! ADMM on the bilinear matrix splitting
//!
//! ```text
//! minimize Tr(C Z)  subject to  diag(Z) = 1,  Z = X Y^T,  X = Y
//! ```
//!
//! with `Z` an `n x n` matrix and `X, Y` of size `n x r`. With `r = 1` this is
//! the original sign problem; with `r = ceil(sqrt(2n))` it is a low-rank
//! factorization of the semidefinite relaxation.
//!
//! Each iteration has closed forms:
//!
//! * Y-step: `Y = ((Lam1^T X + Lam2)/rho + Z^T X + X) (I + X^T X)^{-1}`, an
//!   `r x r` SPD solve.
//! * (Z, X)-step: an equality-constrained quadratic in `(Z, X)`. Eliminating
//!   `Z` and `X` leaves a diagonal system for the multiplier `nu` of
//!   `diag(Z) = 1`:
//!   `G nu = rho (1 - diag(D Y^T)) + diag((C + Lam1)(I + Y Y^T))` where
//!   `D = (Lam1 Y - Lam2)/rho + Y` and `G = diag(I + Y Y^T)`. Then
//!   `B = -(C - Diag(nu) + Lam1)/rho`, `X = B Y + D` and `Z = X Y^T + B`.
//! * Dual step on both multipliers, then `rho = min(alpha rho, rho_cap)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{quad_form, CostMatrix};
use crate::numerics::small_spd_solve;
use crate::rng::{gaussian_matrix, seeded};
use crate::trace::{Incumbent, RunStatus, RunTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMode {
    /// `r = 1`
    One,
    /// `r = ceil(sqrt(2n))`, the smallest width with `r(r+1)/2 > n`.
    Full,
    Fixed(usize),
}

impl RankMode {
    pub fn rank(self, n: usize) -> usize {
        match self {
            RankMode::One => 1,
            RankMode::Full => full_rank(n),
            RankMode::Fixed(r) => r,
        }
    }
}

/// `ceil(sqrt(2n))` in exact integer arithmetic.
pub fn full_rank(n: usize) -> usize {
    let target = 2 * n;
    let mut r = (target as f64).sqrt() as usize;
    while r * r < target {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= target {
        r -= 1;
    }
    r.max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixConfig {
    pub rank: RankMode,
    pub rho0: f64,
    pub alpha: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub rho_cap: f64,
    /// A run is flagged when a dual norm exceeds this multiple of
    /// `1 + its initial norm`.
    pub dual_growth_limit: f64,
    /// Standard deviation of the initial multipliers. Zero starts from
    /// `Lam1 = 0, Lam2 = 0`.
    pub dual_init_scale: f64,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        Self {
            rank: RankMode::Full,
            rho0: 1.0,
            alpha: 1.1,
            eps: 1e-5,
            max_iter: 500,
            seed: 0,
            rho_cap: 1e10,
            dual_growth_limit: 1e6,
            dual_init_scale: 1.0,
        }
    }
}

impl MatrixConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rho0 must be positive, got {}",
                self.rho0
            )));
        }
        if self.rho0 > self.rho_cap {
            return Err(Error::InvalidConfig(format!(
                "rho0 = {} exceeds rho_cap = {}",
                self.rho0, self.rho_cap
            )));
        }
        // alpha > 1 makes both sum(rho^{k+1}/(rho^k)^2) and sum(1/rho^k)
        // finite for the geometric schedule.
        if !(self.alpha > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must exceed 1 for the penalty schedule to be summable, got {}",
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
        if !(self.dual_init_scale >= 0.0 && self.dual_init_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dual_init_scale must be finite and nonnegative, got {}",
                self.dual_init_scale
            )));
        }
        let r = self.rank.rank(n);
        if r == 0 {
            return Err(Error::InvalidConfig("rank must be positive".into()));
        }
        if self.rank == RankMode::Full && r * (r + 1) / 2 <= n {
            return Err(Error::InvalidConfig(format!(
                "full rank r = {r} does not satisfy r(r+1)/2 > n = {n}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixState {
    pub z: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub lam1: DMatrix<f64>,
    pub lam2: DMatrix<f64>,
    pub rho: f64,
    pub k: usize,
}

/// Intermediate quantities of the (Z, X)-step.
#[derive(Debug, Clone, PartialEq)]
pub struct KktWork {
    pub nu: DVector<f64>,
    pub d: DMatrix<f64>,
    /// Diagonal of `G`.
    pub g: DVector<f64>,
    pub b: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub k: usize,
    /// `Tr(C Z)`
    pub objective: f64,
    /// `sign(x)^T C sign(x)` when `r = 1`.
    pub sign_objective: Option<f64>,
    /// Lowest `sign_objective` so far.
    pub best_sign_objective: Option<f64>,
    pub lagrangian: f64,
    /// `||X - Y||_F`
    pub xy_residual: f64,
    /// `||Z - X Y^T||_F`
    pub z_residual: f64,
    pub lam1_norm: f64,
    pub lam2_norm: f64,
    pub rho: f64,
    pub rho_capped: bool,
    /// False once a dual norm has grown past the configured limit.
    pub duals_bounded: bool,
}

pub fn init_matrix(cost: &CostMatrix, cfg: &MatrixConfig) -> MatrixState {
    let n = cost.n();
    let r = cfg.rank.rank(n);
    let mut rng = seeded(cfg.seed);
    let z = gaussian_matrix(n, n, &mut rng);
    let x = gaussian_matrix(n, r, &mut rng);
    let lam1 = gaussian_matrix(n, n, &mut rng) * cfg.dual_init_scale;
    let lam2 = gaussian_matrix(n, r, &mut rng) * cfg.dual_init_scale;
    MatrixState {
        z,
        y: x.clone(),
        x,
        lam1,
        lam2,
        rho: cfg.rho0,
        k: 0,
    }
}

impl MatrixState {
    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn r(&self) -> usize {
        self.x.ncols()
    }

    /// Minimizes `||Z - X Y^T + Lam1/rho||^2 + ||X - Y + Lam2/rho||^2` over `Y`.
    pub fn update_y(&mut self) -> Result<()> {
        let r = self.r();
        let inv_rho = 1.0 / self.rho;
        let mut w = self.lam1.tr_mul(&self.x);
        w += &self.lam2;
        w *= inv_rho;
        w += self.z.tr_mul(&self.x);
        w += &self.x;
        let s = DMatrix::identity(r, r) + self.x.tr_mul(&self.x);
        let yt = small_spd_solve(&s, &w.transpose())?;
        self.y = yt.transpose();
        Ok(())
    }

    /// Exact minimizer of the augmented Lagrangian over `(Z, X)` subject to
    /// `diag(Z) = 1`, with `Y` and the duals fixed.
    pub fn update_zx(&mut self, cost: &CostMatrix) -> KktWork {
        let n = self.n();
        let rho = self.rho;
        let inv_rho = 1.0 / rho;

        let mut d = &self.lam1 * &self.y;
        d -= &self.lam2;
        d *= inv_rho;
        d += &self.y;

        let g = DVector::from_iterator(n, self.y.row_iter().map(|row| 1.0 + row.norm_squared()));

        // M = C + Lam1; diag(M (I + Y Y^T)) = diag(M) + rowsum((M Y) .* Y)
        let m = cost.matrix() + &self.lam1;
        let my = &m * &self.y;
        let nu = DVector::from_fn(n, |i, _| {
            let dyt = d.row(i).dot(&self.y.row(i));
            let rhs = rho * (1.0 - dyt) + m[(i, i)] + my.row(i).dot(&self.y.row(i));
            rhs / g[i]
        });

        let mut b = m;
        b *= -inv_rho;
        for i in 0..n {
            b[(i, i)] += nu[i] * inv_rho;
        }

        // X = B Y + D with B Y = -(M Y - Diag(nu) Y)/rho
        let mut x = my;
        for (i, mut row) in x.row_iter_mut().enumerate() {
            row -= self.y.row(i) * nu[i];
        }
        x *= -inv_rho;
        x += &d;

        let mut z = &x * self.y.transpose();
        z += &b;

        self.z = z;
        self.x = x;
        KktWork { nu, d, g, b }
    }

    /// Dual ascent on both multipliers; returns `(||X - Y||_F, ||Z - X Y^T||_F)`
    /// measured at the current primal iterate.
    pub fn update_duals(&mut self, alpha: f64, rho_cap: f64) -> (f64, f64) {
        let rho = self.rho;
        let mut r1 = &self.x * self.y.transpose();
        r1 -= &self.z;
        r1 *= -1.0;
        let r2 = &self.x - &self.y;
        let norms = (r2.norm(), r1.norm());
        self.lam1 += r1 * rho;
        self.lam2 += r2 * rho;
        self.rho = (alpha * rho).min(rho_cap);
        self.k += 1;
        norms
    }
}

/// Residuals of the (Z, X) optimality system at the current state, for the
/// multiplier `nu` returned by [`MatrixState::update_zx`]:
/// `[||C - Diag(nu) + Lam1 + rho(Z - XY^T)||_F,
///   ||Lam2 - Lam1 Y + rho(XY^T - Z) Y + rho(X - Y)||_F,
///   max_i |Z_ii - 1|]`.
pub fn zx_residuals(s: &MatrixState, cost: &CostMatrix, nu: &DVector<f64>) -> [f64; 3] {
    let xyt = &s.x * s.y.transpose();
    let gap = &s.z - &xyt;
    let mut rz = cost.matrix() + &s.lam1 + &gap * s.rho;
    for i in 0..s.n() {
        rz[(i, i)] -= nu[i];
    }
    let rx = &s.lam2 - &s.lam1 * &s.y - &gap * &s.y * s.rho + (&s.x - &s.y) * s.rho;
    let diag = (0..s.n())
        .map(|i| (s.z[(i, i)] - 1.0).abs())
        .fold(0.0, f64::max);
    [rz.norm(), rx.norm(), diag]
}

/// `Tr(CZ) + <Lam2, X - Y> + <Lam1, Z - XY^T> + rho/2 ||X - Y||^2
///  + rho/2 ||Z - XY^T||^2`.
pub fn lagrangian_matrix(s: &MatrixState, cost: &CostMatrix) -> f64 {
    let gap = &s.z - &s.x * s.y.transpose();
    let diff = &s.x - &s.y;
    cost.matrix().dot(&s.z)
        + s.lam2.dot(&diff)
        + s.lam1.dot(&gap)
        + 0.5 * s.rho * (diff.norm_squared() + gap.norm_squared())
}

/// Runs Y-step, (Z, X)-step and dual step until
/// `max(||X - Y||_F, ||Z - XY^T||_F) <= eps` or `max_iter`.
pub fn solve_matrix(
    cost: &CostMatrix,
    cfg: &MatrixConfig,
) -> Result<(MatrixState, RunTrace<MatrixRecord>)> {
    cfg.validate(cost.n())?;
    let mut state = init_matrix(cost, cfg);
    let lam1_bound = cfg.dual_growth_limit * (1.0 + state.lam1.norm());
    let lam2_bound = cfg.dual_growth_limit * (1.0 + state.lam2.norm());
    let mut duals_bounded = true;
    let mut records = Vec::new();
    let mut status = RunStatus::MaxIter;
    let mut incumbent = None;

    for _ in 0..cfg.max_iter {
        state.update_y()?;
        state.update_zx(cost);
        let objective = cost.matrix().dot(&state.z);
        let sign_objective = (state.r() == 1).then(|| {
            let signs: Vec<f64> = state
                .x
                .iter()
                .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let value = quad_form(cost.matrix(), &signs);
            Incumbent::offer(&mut incumbent, &signs, value, state.k + 1);
            value
        });
        let (xy_residual, z_residual) = state.update_duals(cfg.alpha, cfg.rho_cap);
        let lam1_norm = state.lam1.norm();
        let lam2_norm = state.lam2.norm();
        duals_bounded &= lam1_norm <= lam1_bound && lam2_norm <= lam2_bound;
        records.push(MatrixRecord {
            k: state.k,
            objective,
            sign_objective,
            best_sign_objective: incumbent.as_ref().map(|b| b.objective),
            lagrangian: lagrangian_matrix(&state, cost),
            xy_residual,
            z_residual,
            lam1_norm,
            lam2_norm,
            rho: state.rho,
            rho_capped: state.rho >= cfg.rho_cap,
            duals_bounded,
        });
        if xy_residual.max(z_residual) <= cfg.eps {
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
