//! Instance loading and the build-cost, solve, round, score pipeline.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::warn;
use serde::{Deserialize, Serialize};

use super::params::{Method, SolverParams};
use crate::error::{Error, Result};
use crate::graph::{
    build_community_cost, build_image_cost, build_maxcut_cost, cut_value, recovery_rate, CostKind,
    CostMatrix, Graph, ImageCostMode, Partition, SpectralMeta, DEFAULT_PIXEL_CAP,
};
use crate::instances::{
    load_image, read_rudy, sbm_generate, toroidal_grid_3d, RudyOptions, SbmSpec, TorusWeights,
};
use crate::matrix::{solve_matrix, MatrixConfig, MatrixRecord, RankMode};
use crate::numerics::{eigen_with_constants, spectral_constants};
use crate::rounding::{factor_from_rect, randomized_round, DEFAULT_TRIALS};
use crate::trace::{RunStatus, RunTrace};
use crate::vector::{resolve_rho0, solve_vector_with_eigen, VectorConfig, VectorRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CostChoice {
    Maxcut,
    Community,
}

/// Weight classes of the DIMACS toroidal instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TorusKind {
    /// `+-1` weights, half of them negative (the `pm3-*` class).
    Pm,
    /// Gaussian weights scaled by 100000 and rounded (the `g3-*` class).
    Gaussian,
}

impl TorusKind {
    pub fn weights(self) -> TorusWeights {
        match self {
            Self::Pm => TorusWeights::PlusMinusOne {
                negative_fraction: 0.5,
            },
            Self::Gaussian => TorusWeights::Gaussian { scale: 100_000.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Rudy {
        path: PathBuf,
    },
    Sbm {
        n: usize,
        m: usize,
        p: f64,
        q: f64,
        #[serde(default)]
        seed: u64,
    },
    Torus {
        side: usize,
        weights: TorusKind,
        #[serde(default)]
        seed: u64,
    },
    Image {
        path: PathBuf,
        /// Position weight.
        #[serde(default)]
        c: f64,
        #[serde(default = "default_pixel_cap")]
        pixel_cap: usize,
    },
}

fn default_pixel_cap() -> usize {
    DEFAULT_PIXEL_CAP
}

impl Source {
    /// Resolves relative file paths against `dir`.
    pub fn relative_to(&self, dir: &Path) -> Self {
        let mut out = self.clone();
        if let Self::Rudy { path } | Self::Image { path, .. } = &mut out {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
        out
    }
}

/// A loaded problem: the cost plus whatever is needed to score partitions.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub cost: CostMatrix,
    pub graph: Option<Graph>,
    pub truth: Option<Partition>,
    /// `(width, height)` for image instances.
    pub image_dims: Option<(usize, usize)>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.cost.n()
    }

    /// Cut weight when the instance is a MAX-CUT graph.
    pub fn cut(&self, p: &Partition) -> Result<Option<f64>> {
        match (&self.graph, self.cost.kind()) {
            (Some(g), CostKind::MaxCut) => cut_value(g, p).map(Some),
            _ => Ok(None),
        }
    }

    pub fn recovery(&self, p: &Partition) -> Result<Option<f64>> {
        self.truth.as_ref().map(|t| recovery_rate(p, t)).transpose()
    }
}

/// Builds an instance. Graph sources default to the MAX-CUT cost, SBM
/// sources to the community cost with their own `p, q`; `pq` overrides
/// those and is required for a community cost on a file graph.
pub fn load_instance(
    id: &str,
    source: &Source,
    cost: Option<CostChoice>,
    pq: Option<(f64, f64)>,
) -> Result<Instance> {
    let mut truth = None;
    let mut image_dims = None;
    let (graph, default_pq) = match source {
        Source::Rudy { path } => (Some(read_rudy(path, RudyOptions::default())?), None),
        Source::Sbm { n, m, p, q, seed } => {
            let spec = SbmSpec {
                n: *n,
                m: *m,
                p: *p,
                q: *q,
                seed: *seed,
            };
            let (g, t) = sbm_generate(&spec)?;
            truth = Some(t);
            (Some(g), Some((*p, *q)))
        }
        Source::Torus {
            side,
            weights,
            seed,
        } => (
            Some(toroidal_grid_3d(*side, weights.weights(), *seed)?),
            None,
        ),
        Source::Image { .. } => (None, None),
    };
    let choice = cost.unwrap_or(if default_pq.is_some() {
        CostChoice::Community
    } else {
        CostChoice::Maxcut
    });

    let cost = match (source, graph.as_ref()) {
        (Source::Image { path, c, pixel_cap }, _) => {
            let img = load_image(path, *c, *pixel_cap)?;
            image_dims = Some((img.width, img.height));
            let mode = match choice {
                CostChoice::Maxcut => ImageCostMode::MaxCut,
                CostChoice::Community => ImageCostMode::Community,
            };
            build_image_cost(&img, mode, *pixel_cap)?
        }
        (_, Some(g)) => match choice {
            CostChoice::Maxcut => {
                if truth.is_some() {
                    warn!("{id}: MAX-CUT cost on a block-model graph");
                }
                build_maxcut_cost(g)
            }
            CostChoice::Community => {
                let (p, q) = pq.or(default_pq).ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "{id}: the community cost needs edge probabilities p,q"
                    ))
                })?;
                build_community_cost(g, p, q)
            }
        },
        (_, None) => unreachable!("every non-image source yields a graph"),
    };
    Ok(Instance {
        id: id.to_string(),
        cost,
        graph,
        truth,
        image_dims,
    })
}

/// Solver settings after defaults and `L1` scaling are applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub rho0: f64,
    pub alpha: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub rho_cap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_init_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub enforce_theorem1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Eigendecomposition and other per-instance preparation.
    pub setup_s: f64,
    pub iterations_s: f64,
    pub rounding_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `||x - y||_2` (V) or `||X - Y||_F` (matrix methods).
    pub primal: f64,
    /// `||Z - X Y^T||_F`, matrix methods only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifted: Option<f64>,
    /// `||2 C x + mu||_2`, V only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_identity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub instance: String,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    pub iterations: usize,
    pub status: RunStatus,
    /// `x^T C x` of the reported partition.
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<f64>,
    /// Iteration that produced the reported partition (sign-rounded methods).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_iteration: Option<usize>,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralMeta>,
    pub config: ResolvedConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Vector(RunTrace<VectorRecord>),
    Matrix(RunTrace<MatrixRecord>),
}

impl Trace {
    pub fn iterations(&self) -> usize {
        match self {
            Self::Vector(t) => t.iterations(),
            Self::Matrix(t) => t.iterations(),
        }
    }

    pub fn write_jsonl<W: Write>(&self, out: W) -> std::io::Result<()> {
        match self {
            Self::Vector(t) => t.write_jsonl(out),
            Self::Matrix(t) => t.write_jsonl(out),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub partition: Partition,
    pub trace: Trace,
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Runs one method on one instance. Everything except `summary.timing` is a
/// deterministic function of the arguments.
pub fn run_method(
    inst: &Instance,
    method: Method,
    params: &SolverParams,
    seed: u64,
) -> Result<RunOutput> {
    let start = Instant::now();
    let cost = &inst.cost;
    let out = match method {
        Method::V => {
            let (eigen, meta) = eigen_with_constants(cost)?;
            if params.dual_init_scale.is_some() {
                warn!("dual_init_scale is ignored by method V");
            }
            let base = VectorConfig::default();
            let mut cfg = VectorConfig {
                rho0: params.rho0.map(|s| s.resolve(Some(meta))),
                alpha: params.alpha.unwrap_or(base.alpha),
                eps: params.eps.unwrap_or(base.eps),
                max_iter: params.max_iter.unwrap_or(base.max_iter),
                seed,
                rho_cap: params.rho_cap.unwrap_or(base.rho_cap),
                enforce_theorem1: params.enforce_theorem1,
            };
            cfg.validate()?;
            let rho0 = resolve_rho0(&cfg, meta)?;
            cfg.rho0 = Some(rho0);
            let setup = start.elapsed();

            let t = Instant::now();
            let (_, trace) = solve_vector_with_eigen(cost, &cfg, &eigen, meta)?;
            let iterating = t.elapsed();

            let t = Instant::now();
            let best = trace.incumbent.clone().expect("at least one iteration ran");
            let rounding = t.elapsed();
            let last = trace.last().expect("at least one iteration ran");
            let summary = RunSummary {
                method: method.label().into(),
                instance: inst.id.clone(),
                n: inst.n(),
                r: 1,
                seed,
                iterations: trace.iterations(),
                status: trace.status,
                objective: best.objective,
                cut: inst.cut(&best.partition)?,
                recovery: inst.recovery(&best.partition)?,
                best_iteration: Some(best.k),
                residuals: Residuals {
                    primal: last.primal_residual,
                    lifted: None,
                    dual_identity: Some(last.dual_residual),
                },
                spectral: Some(meta),
                config: ResolvedConfig {
                    rho0,
                    alpha: cfg.alpha,
                    eps: cfg.eps,
                    max_iter: cfg.max_iter,
                    rho_cap: cfg.rho_cap,
                    dual_init_scale: None,
                    trials: None,
                    enforce_theorem1: cfg.enforce_theorem1,
                },
                timing: Some(Timing {
                    setup_s: secs(setup),
                    iterations_s: secs(iterating),
                    rounding_s: secs(rounding),
                    total_s: secs(start.elapsed()),
                }),
            };
            RunOutput {
                summary,
                partition: best.partition,
                trace: Trace::Vector(trace),
            }
        }
        Method::Mr1 | Method::Mrr => {
            let meta = if params.needs_spectrum() {
                Some(spectral_constants(cost)?)
            } else {
                cost.spectral_meta()
            };
            if params.enforce_theorem1 {
                warn!("enforce_theorem1 only applies to method V");
            }
            let base = MatrixConfig::default();
            let cfg = MatrixConfig {
                rank: if method == Method::Mr1 {
                    RankMode::One
                } else {
                    RankMode::Full
                },
                rho0: params.rho0.map_or(base.rho0, |s| s.resolve(meta)),
                alpha: params.alpha.unwrap_or(base.alpha),
                eps: params.eps.unwrap_or(base.eps),
                max_iter: params.max_iter.unwrap_or(base.max_iter),
                seed,
                rho_cap: params.rho_cap.unwrap_or(base.rho_cap),
                dual_growth_limit: base.dual_growth_limit,
                dual_init_scale: params
                    .dual_init_scale
                    .map_or(base.dual_init_scale, |s| s.resolve(meta)),
            };
            let trials = (method == Method::Mrr).then(|| params.trials.unwrap_or(DEFAULT_TRIALS));
            if method == Method::Mr1 && params.trials.is_some() {
                warn!("trials is ignored by method MR1");
            }
            let setup = start.elapsed();

            let t = Instant::now();
            let (state, trace) = solve_matrix(cost, &cfg)?;
            let iterating = t.elapsed();

            let t = Instant::now();
            let (partition, objective, best_iteration) = match trials {
                None => {
                    let best = trace.incumbent.clone().expect("rank one records signs");
                    (best.partition, best.objective, Some(best.k))
                }
                Some(trials) => {
                    let factor = factor_from_rect(&state.x)?;
                    let rounded = randomized_round(&factor, cost, trials, seed)?;
                    (rounded.partition, rounded.objective, None)
                }
            };
            let rounding = t.elapsed();
            let last = trace.last().expect("at least one iteration ran");
            let summary = RunSummary {
                method: method.label().into(),
                instance: inst.id.clone(),
                n: inst.n(),
                r: state.r(),
                seed,
                iterations: trace.iterations(),
                status: trace.status,
                objective,
                cut: inst.cut(&partition)?,
                recovery: inst.recovery(&partition)?,
                best_iteration,
                residuals: Residuals {
                    primal: last.xy_residual,
                    lifted: Some(last.z_residual),
                    dual_identity: None,
                },
                spectral: meta,
                config: ResolvedConfig {
                    rho0: cfg.rho0,
                    alpha: cfg.alpha,
                    eps: cfg.eps,
                    max_iter: cfg.max_iter,
                    rho_cap: cfg.rho_cap,
                    dual_init_scale: Some(cfg.dual_init_scale),
                    trials,
                    enforce_theorem1: false,
                },
                timing: Some(Timing {
                    setup_s: secs(setup),
                    iterations_s: secs(iterating),
                    rounding_s: secs(rounding),
                    total_s: secs(start.elapsed()),
                }),
            };
            RunOutput {
                summary,
                partition,
                trace: Trace::Matrix(trace),
            }
        }
    };
    Ok(out)
}

/// Writes a binary plain-PGM mask: `+1` pixels white, `-1` black.
pub fn write_mask(path: &Path, dims: (usize, usize), p: &Partition) -> Result<()> {
    let (w, h) = dims;
    let mut text = format!("P2\n{w} {h}\n255\n");
    for row in p.labels().chunks(w) {
        let line: Vec<&str> = row
            .iter()
            .map(|&l| if l > 0 { "255" } else { "0" })
            .collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
