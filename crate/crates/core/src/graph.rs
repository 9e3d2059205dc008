//! Graphs, cost matrices for the supported applications, and the scores used
//! to judge a partition (objective, cut weight, community recovery).
//!
//! Every problem handled by this crate has the shape
//! `minimize x^T C x` over `x in {-1, +1}^n`; the builders below only differ
//! in how `C` is assembled from a graph or from pixel features.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::image::ImageFeatures;

/// Default cap on pixel count for dense image costs (n^2 doubles are stored).
pub const DEFAULT_PIXEL_CAP: usize = 4096;

/// One undirected weighted edge, stored with `i < j` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Weighted undirected graph without self-loops. Parallel edges are merged by
/// summing their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph with strictly positive weights.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        Self::build(n, edges, false)
    }

    /// Same as [`Graph::new`] but keeps zero and negative weights verbatim
    /// (the DIMACS `pm` instances carry +-1 weights).
    pub fn new_signed(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        Self::build(n, edges, true)
    }

    fn build(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        allow_nonpositive: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph(
                "graph must have at least one node".into(),
            ));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "non-finite weight on ({a}, {b})"
                )));
            }
            if !allow_nonpositive && w <= 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "weight {w} on ({a}, {b}) is not strictly positive"
                )));
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
        let edges = merged
            .into_iter()
            .map(|((i, j), w)| Edge { i, j, w })
            .collect();
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges sorted by `(i, j)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Dense symmetric adjacency matrix with zero diagonal.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.i, e.j)] = e.w;
            a[(e.j, e.i)] = e.w;
        }
        a
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    MaxCut,
    Community,
    Custom,
}

/// Spectral constants of `x^T C x`: `l1` bounds the gradient Lipschitz
/// constant (`2 max |lambda|`), `lh` is the smallest shift making the Hessian
/// `2C + lh I` positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeta {
    pub l1: f64,
    pub lh: f64,
}

impl SpectralMeta {
    pub fn from_eigenvalues(lambda: &[f64]) -> Self {
        let max_abs = lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
        let min = if min.is_finite() { min } else { 0.0 };
        Self {
            l1: 2.0 * max_abs,
            lh: (-2.0 * min).max(0.0),
        }
    }
}

/// Dense symmetric objective matrix `C`.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    c: DMatrix<f64>,
    kind: CostKind,
    spectral: OnceLock<SpectralMeta>,
}

impl CostMatrix {
    /// Wraps an arbitrary matrix; it must be exactly symmetric.
    pub fn custom(c: DMatrix<f64>) -> Result<Self> {
        Self::with_kind(c, CostKind::Custom)
    }

    fn with_kind(c: DMatrix<f64>, kind: CostKind) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::DimensionMismatch {
                expected: c.nrows(),
                got: c.ncols(),
            });
        }
        let asym = max_asymmetry(&c);
        if asym != 0.0 {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            c,
            kind,
            spectral: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.c.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    /// Cached spectral constants, if already computed.
    pub fn spectral_meta(&self) -> Option<SpectralMeta> {
        self.spectral.get().copied()
    }

    pub(crate) fn cache_spectral_meta(&self, meta: SpectralMeta) -> SpectralMeta {
        *self.spectral.get_or_init(|| meta)
    }

    /// `x^T C x` for a real vector.
    pub fn quad(&self, x: &[f64]) -> f64 {
        quad_form(&self.c, x)
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn quad_form(c: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = c.nrows();
    let mut total = 0.0;
    for j in 0..n {
        let col = c.column(j);
        let mut s = 0.0;
        for i in 0..n {
            s += col[i] * x[i];
        }
        total += s * x[j];
    }
    total
}

/// A two-way labelling `x in {-1, +1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Partition(Vec<i8>);

impl Partition {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidConfig(format!(
                "partition entries must be +1 or -1, found {bad}"
            )));
        }
        Ok(Self(labels))
    }

    /// Elementwise sign with `sign(0) = +1`.
    pub fn from_signs(x: &[f64]) -> Self {
        Self(x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_vec(self.to_f64())
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }
}

impl TryFrom<Vec<i8>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Partition> for Vec<i8> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// `C = (A - Diag(A 1)) / 4`, so that `-x^T C x` is the weight of the cut.
pub fn build_maxcut_cost(g: &Graph) -> CostMatrix {
    let n = g.n();
    let mut c = DMatrix::zeros(n, n);
    for e in g.edges() {
        let q = e.w / 4.0;
        c[(e.i, e.j)] += q;
        c[(e.j, e.i)] += q;
        c[(e.i, e.i)] -= q;
        c[(e.j, e.j)] -= q;
    }
    CostMatrix::with_kind(c, CostKind::MaxCut).expect("maxcut cost is symmetric by construction")
}

/// `C = ((p + q) / 2) 1 1^T - A` for the two-community block model.
pub fn build_community_cost(g: &Graph, p: f64, q: f64) -> CostMatrix {
    if !(0.0 < q && q < p && p < 1.0) {
        warn!("community cost built with p = {p}, q = {q}; expected 0 < q < p < 1");
    }
    let n = g.n();
    let mut c = DMatrix::from_element(n, n, (p + q) / 2.0);
    for e in g.edges() {
        c[(e.i, e.j)] -= e.w;
        c[(e.j, e.i)] -= e.w;
    }
    CostMatrix::with_kind(c, CostKind::Community)
        .expect("community cost is symmetric by construction")
}

/// Which cost to assemble from pixel affinities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageCostMode {
    MaxCut,
    Community,
}

/// Dense pixel cost built from squared feature distances
/// `A_uv = ||f_u - f_v||^2`.
///
/// MaxCut mode uses `C = A - Diag(A 1)` without the 1/4 factor of
/// [`build_maxcut_cost`]; a positive scale leaves the minimizer unchanged.
/// Community mode uses `C = a 1 1^T - A` where `a` is the mean entry of `A`.
pub fn build_image_cost(
    img: &ImageFeatures,
    mode: ImageCostMode,
    pixel_cap: usize,
) -> Result<CostMatrix> {
    let n = img.n_pixels();
    if n > pixel_cap {
        return Err(Error::TooLarge { n, cap: pixel_cap });
    }
    let f = img.features();
    let mut a = DMatrix::zeros(n, n);
    for u in 0..n {
        for v in (u + 1)..n {
            let d: f64 = (0..f.ncols())
                .map(|k| (f[(u, k)] - f[(v, k)]).powi(2))
                .sum();
            a[(u, v)] = d;
            a[(v, u)] = d;
        }
    }
    let (c, kind) = match mode {
        ImageCostMode::MaxCut => {
            let mut c = a;
            for u in 0..n {
                let deg: f64 = c.row(u).iter().sum();
                c[(u, u)] -= deg;
            }
            (c, CostKind::MaxCut)
        }
        ImageCostMode::Community => {
            let mean = a.sum() / (n as f64 * n as f64);
            (a.map(|v| mean - v), CostKind::Community)
        }
    };
    CostMatrix::with_kind(c, kind)
}

/// `x^T C x`.
pub fn objective(cost: &CostMatrix, p: &Partition) -> Result<f64> {
    check_len(cost.n(), p.len())?;
    Ok(cost.quad(&p.to_f64()))
}

/// Total weight of edges whose endpoints receive different labels.
pub fn cut_value(g: &Graph, p: &Partition) -> Result<f64> {
    check_len(g.n(), p.len())?;
    let x = p.labels();
    Ok(g.edges()
        .iter()
        .filter(|e| x[e.i] != x[e.j])
        .map(|e| e.w)
        .sum())
}

/// Fraction of nodes labelled like `truth`, up to a global flip.
pub fn recovery_rate(p: &Partition, truth: &Partition) -> Result<f64> {
    check_len(truth.len(), p.len())?;
    if p.is_empty() {
        return Ok(1.0);
    }
    let agree = p
        .labels()
        .iter()
        .zip(truth.labels())
        .filter(|(a, b)| a == b)
        .count();
    // integer counts keep the value exactly flip-invariant
    Ok(agree.max(p.len() - agree) as f64 / p.len() as f64)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
