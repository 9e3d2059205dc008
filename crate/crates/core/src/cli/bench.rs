//! Manifest-driven benchmark runs.
//!
//! A manifest is a JSON file:
//!
//! ```json
//! {
//!   "instances": [
//!     {
//!       "id": "pm3-8-50",
//!       "source": { "kind": "rudy", "path": "pm3-8-50.rudy" },
//!       "cost": "maxcut",
//!       "seeds": [0, 1, 2, 3, 4],
//!       "methods": [
//!         { "method": "v", "params": { "rho0": "0.5L1", "alpha": 1.02 } },
//!         { "method": "mr1" }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Relative paths are resolved against the manifest's directory. Every
//! (instance, method, seed) triple becomes one row of `runs.csv`; one row per
//! (instance, method) in `summary.csv` aggregates over seeds and carries the
//! best-of-1000 random sign vectors baseline.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{Method, SolverParams};
use super::pipeline::{load_instance, run_method, CostChoice, Instance, RunOutput, Source};
use crate::error::{Error, Result};
use crate::instances::best_random_guess;
use crate::trace::RunStatus;

/// Number of random sign vectors in the baseline column.
pub const BASELINE_GUESSES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub instances: Vec<ManifestInstance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestInstance {
    pub id: String,
    pub source: Source,
    #[serde(default)]
    pub cost: Option<CostChoice>,
    /// Edge probabilities for a community cost on a file graph.
    #[serde(default)]
    pub pq: Option<(f64, f64)>,
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodEntry>,
    /// Seed of the random baseline.
    #[serde(default)]
    pub baseline_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub method: Method,
    #[serde(default)]
    pub params: SolverParams,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut m: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for inst in &mut m.instances {
            inst.source = inst.source.relative_to(dir);
        }
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        for inst in &self.instances {
            if !ids.insert(inst.id.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate instance id '{}'",
                    inst.id
                )));
            }
            if inst.seeds.is_empty() || inst.methods.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "instance '{}' needs at least one seed and one method",
                    inst.id
                )));
            }
        }
        Ok(())
    }
}

/// One line of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub instance: String,
    pub method: String,
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub iterations: usize,
    pub status: RunStatus,
    pub objective: f64,
    pub cut: Option<f64>,
    pub recovery: Option<f64>,
    pub best_iteration: Option<usize>,
    pub primal_residual: f64,
    pub lifted_residual: Option<f64>,
    pub rho0: f64,
    pub alpha: f64,
    pub setup_s: Option<f64>,
    pub iterations_s: Option<f64>,
    pub rounding_s: Option<f64>,
    pub total_s: Option<f64>,
}

impl RunRow {
    fn from_output(out: &RunOutput) -> Self {
        let s = &out.summary;
        Self {
            instance: s.instance.clone(),
            method: s.method.clone(),
            seed: s.seed,
            n: s.n,
            r: s.r,
            iterations: s.iterations,
            status: s.status,
            objective: s.objective,
            cut: s.cut,
            recovery: s.recovery,
            best_iteration: s.best_iteration,
            primal_residual: s.residuals.primal,
            lifted_residual: s.residuals.lifted,
            rho0: s.config.rho0,
            alpha: s.config.alpha,
            setup_s: s.timing.map(|t| t.setup_s),
            iterations_s: s.timing.map(|t| t.iterations_s),
            rounding_s: s.timing.map(|t| t.rounding_s),
            total_s: s.timing.map(|t| t.total_s),
        }
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: String,
    pub method: String,
    pub n: usize,
    pub runs: usize,
    pub best_objective: f64,
    pub best_cut: Option<f64>,
    pub mean_recovery: Option<f64>,
    pub exact_recoveries: Option<usize>,
    pub baseline_objective: f64,
    pub baseline_cut: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Drop wall-clock fields so reruns are byte-identical.
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            threads: None,
            timing: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchResult {
    pub runs: Vec<RunOutput>,
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
}

/// Best of [`BASELINE_GUESSES`] random sign vectors: `(objective, cut)`.
pub fn random_baseline(inst: &Instance, seed: u64) -> Result<(f64, Option<f64>)> {
    let (p, v) = best_random_guess(&inst.cost, BASELINE_GUESSES, seed)?;
    Ok((v, inst.cut(&p)?))
}

pub fn run_bench(manifest: &Manifest, opts: &BenchOptions) -> Result<BenchResult> {
    manifest.validate()?;
    let work = || -> Result<BenchResult> {
        let instances: Vec<Instance> = manifest
            .instances
            .par_iter()
            .map(|mi| load_instance(&mi.id, &mi.source, mi.cost, mi.pq))
            .collect::<Result<_>>()?;
        let baselines: Vec<(f64, Option<f64>)> = manifest
            .instances
            .par_iter()
            .zip(&instances)
            .map(|(mi, inst)| random_baseline(inst, mi.baseline_seed))
            .collect::<Result<_>>()?;

        let jobs: Vec<(usize, &MethodEntry, u64)> = manifest
            .instances
            .iter()
            .enumerate()
            .flat_map(|(i, mi)| {
                mi.methods
                    .iter()
                    .flat_map(move |me| mi.seeds.iter().map(move |&s| (i, me, s)))
            })
            .collect();
        // collect() on an indexed parallel iterator keeps manifest order
        let mut runs: Vec<RunOutput> = jobs
            .par_iter()
            .map(|&(i, me, seed)| run_method(&instances[i], me.method, &me.params, seed))
            .collect::<Result<_>>()?;
        if !opts.timing {
            for r in &mut runs {
                r.summary.timing = None;
            }
        }

        let rows: Vec<RunRow> = runs.iter().map(RunRow::from_output).collect();
        // rows are grouped by (instance, method entry) with one row per seed
        let mut summary = Vec::new();
        let mut offset = 0;
        for (i, mi) in manifest.instances.iter().enumerate() {
            for me in &mi.methods {
                let mine = &rows[offset..offset + mi.seeds.len()];
                offset += mi.seeds.len();
                summary.push(aggregate(
                    &mi.id,
                    me.method.label(),
                    instances[i].n(),
                    mine,
                    baselines[i],
                ));
            }
        }
        Ok(BenchResult {
            runs,
            rows,
            summary,
        })
    };
    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn aggregate(
    id: &str,
    method: &str,
    n: usize,
    rows: &[RunRow],
    baseline: (f64, Option<f64>),
) -> SummaryRow {
    let best_objective = rows
        .iter()
        .map(|r| r.objective)
        .fold(f64::INFINITY, f64::min);
    let cuts: Vec<f64> = rows.iter().filter_map(|r| r.cut).collect();
    let recs: Vec<f64> = rows.iter().filter_map(|r| r.recovery).collect();
    SummaryRow {
        instance: id.to_string(),
        method: method.to_string(),
        n,
        runs: rows.len(),
        best_objective,
        best_cut: (!cuts.is_empty()).then(|| cuts.iter().copied().fold(f64::MIN, f64::max)),
        mean_recovery: (!recs.is_empty()).then(|| recs.iter().sum::<f64>() / recs.len() as f64),
        exact_recoveries: (!recs.is_empty()).then(|| recs.iter().filter(|&&r| r == 1.0).count()),
        baseline_objective: baseline.0,
        baseline_cut: baseline.1,
    }
}

/// Writes `runs.csv`, `summary.csv` and, when `traces` is set, one JSON-lines
/// trace per run named `<instance>__<method>__<seed>.jsonl`.
pub fn write_bench(res: &BenchResult, dir: &Path, traces: bool) -> Result<Vec<PathBuf>> {
    let io = |path: &Path, e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();

    let runs_path = dir.join("runs.csv");
    write_csv(&runs_path, &res.rows)?;
    written.push(runs_path);
    let summary_path = dir.join("summary.csv");
    write_csv(&summary_path, &res.summary)?;
    written.push(summary_path);

    if traces {
        for run in &res.runs {
            let s = &run.summary;
            let path = dir.join(format!("{}__{}__{}.jsonl", s.instance, s.method, s.seed));
            let file = std::fs::File::create(&path).map_err(|e| io(&path, e))?;
            let mut w = std::io::BufWriter::new(file);
            run.trace.write_jsonl(&mut w).map_err(|e| io(&path, e))?;
            std::io::Write::flush(&mut w).map_err(|e| io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidConfig(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
