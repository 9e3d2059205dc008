//! Nonconvex ADMM heuristics for binary quadratic problems
//! `minimize x^T C x` over `x in {-1, +1}^n`.
//!
//! Two splittings are provided: a vector form ([`vector`]) and a bilinear
//! low-rank matrix form ([`matrix`]). Relaxed iterates are turned into
//! partitions by [`rounding`]. Cost matrices for MAX-CUT, two-community
//! detection and image segmentation live in [`graph`]; generators, file
//! readers and an exact oracle live in [`instances`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod graph;
pub mod instances;
pub mod matrix;
pub mod numerics;
pub mod rng;
pub mod rounding;
pub mod trace;
pub mod vector;

pub use error::{Error, Result};
pub use graph::{
    build_community_cost, build_image_cost, build_maxcut_cost, cut_value, objective, recovery_rate,
    CostKind, CostMatrix, Graph, ImageCostMode, Partition,
};
pub use matrix::{solve_matrix, MatrixConfig, RankMode};
pub use trace::{Incumbent, RunStatus, RunTrace};
pub use vector::{solve_vector, VectorConfig};
