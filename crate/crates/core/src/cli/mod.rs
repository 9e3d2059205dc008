//! `bqp` command-line front end.
//!
//! Exit codes: 0 on success (for `solve`, a converged run), 2 when `solve`
//! stops at the iteration limit, 1 on any input or runtime error.

pub mod bench;
pub mod params;
pub mod pipeline;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Partition, DEFAULT_PIXEL_CAP};
use crate::instances::{brute_force, sbm_generate, to_rudy, toroidal_grid_3d, SbmSpec};
use crate::trace::RunStatus;
use bench::{run_bench, write_bench, BenchOptions, Manifest};
use params::{Method, SolverParams};
use pipeline::{load_instance, run_method, write_mask, CostChoice, Source, TorusKind};

#[derive(Debug, Parser)]
#[command(
    name = "bqp",
    version,
    about = "ADMM heuristics for x^T C x over {-1, 1}^n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a cost, run one method and round the result.
    Solve(SolveArgs),
    /// Exact optimum by enumeration (n <= 22).
    Oracle(OracleArgs),
    /// Run a manifest of instances, methods and seeds.
    Bench(BenchArgs),
    /// Write a generated graph in rudy format.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// Graph in rudy format ("n m" header, then "i j w" lines, 1-based).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Stochastic block model "n,m,p,q[,graph_seed]"; the graph seed
    /// defaults to --seed.
    #[arg(long)]
    sbm: Option<SbmArg>,
    /// 3D toroidal grid "side,pm|gaussian[,graph_seed]".
    #[arg(long)]
    torus: Option<TorusArg>,
    /// PGM/PPM image; every pixel becomes a node.
    #[arg(long)]
    image: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Objective to build. Defaults to community for --sbm, maxcut otherwise.
    #[arg(long, value_enum)]
    cost: Option<CostChoice>,
    /// Edge probabilities "p,q" for the community cost on a file graph.
    #[arg(long)]
    pq: Option<PairArg>,
    /// Position weight for image features.
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long, default_value_t = DEFAULT_PIXEL_CAP)]
    pixel_cap: usize,
    /// Instance label used in summaries.
    #[arg(long)]
    id: Option<String>,
}

impl InputArgs {
    fn source(&self, seed: u64) -> Source {
        let s = &self.source;
        if let Some(path) = &s.input {
            Source::Rudy { path: path.clone() }
        } else if let Some(a) = s.sbm {
            Source::Sbm {
                n: a.n,
                m: a.m,
                p: a.p,
                q: a.q,
                seed: a.seed.unwrap_or(seed),
            }
        } else if let Some(a) = s.torus {
            Source::Torus {
                side: a.side,
                weights: a.kind,
                seed: a.seed.unwrap_or(seed),
            }
        } else {
            Source::Image {
                path: s.image.clone().expect("clap enforces one source"),
                c: self.c,
                pixel_cap: self.pixel_cap,
            }
        }
    }

    fn id(&self, source: &Source) -> String {
        if let Some(id) = &self.id {
            return id.clone();
        }
        match source {
            Source::Rudy { path } | Source::Image { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            Source::Sbm { n, m, p, q, seed } => format!("sbm-{n}-{m}-{p}-{q}-s{seed}"),
            Source::Torus {
                side,
                weights,
                seed,
            } => {
                let k = match weights {
                    TorusKind::Pm => "pm",
                    TorusKind::Gaussian => "g",
                };
                format!("torus-{k}-{side}-s{seed}")
            }
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    method: Method,
    #[command(flatten)]
    params: SolverParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-iteration JSON-lines trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Run summary JSON; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition as a JSON array of +-1 labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Segmentation mask as plain PGM (image inputs only).
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Graph seed for generated inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result JSON; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for runs.csv, summary.csv and optional traces.
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Leave the wall-clock columns empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Also write one JSON-lines trace per run.
    #[arg(long)]
    traces: bool,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Two-community stochastic block model.
    Sbm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Planted labels as a JSON array of +-1.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// 3D toroidal grid with DIMACS-style weights.
    Torus {
        #[arg(long, default_value_t = 8)]
        side: usize,
        #[arg(long, value_enum)]
        weights: TorusKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy)]
struct SbmArg {
    n: usize,
    m: usize,
    p: f64,
    q: f64,
    seed: Option<u64>,
}

fn field<T: FromStr>(parts: &[&str], i: usize, what: &str) -> std::result::Result<T, String> {
    parts
        .get(i)
        .ok_or_else(|| format!("missing {what}"))?
        .trim()
        .parse()
        .map_err(|_| format!("invalid {what} '{}'", parts[i]))
}

impl FromStr for SbmArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!("expected n,m,p,q[,seed], got '{s}'"));
        }
        Ok(Self {
            n: field(&parts, 0, "n")?,
            m: field(&parts, 1, "m")?,
            p: field(&parts, 2, "p")?,
            q: field(&parts, 3, "q")?,
            seed: if parts.len() == 5 {
                Some(field(&parts, 4, "seed")?)
            } else {
                None
            },
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct TorusArg {
    side: usize,
    kind: TorusKind,
    seed: Option<u64>,
}

impl FromStr for TorusArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected side,pm|gaussian[,seed], got '{s}'"));
        }
        let kind = match parts[1].trim() {
            "pm" => TorusKind::Pm,
            "gaussian" | "g" => TorusKind::Gaussian,
            other => return Err(format!("unknown torus weights '{other}'")),
        };
        Ok(Self {
            side: field(&parts, 0, "side")?,
            kind,
            seed: if parts.len() == 3 {
                Some(field(&parts, 2, "seed")?)
            } else {
                None
            },
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct PairArg(f64, f64);

impl FromStr for PairArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("expected p,q, got '{s}'"));
        }
        Ok(Self(field(&parts, 0, "p")?, field(&parts, 1, "q")?))
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("serializing output: {e}")))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| io_err(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_labels(path: &Path, p: &Partition) -> Result<()> {
    write_json(Some(path), p)
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let source = a.input.source(a.seed);
    let id = a.input.id(&source);
    let inst = load_instance(&id, &source, a.input.cost, a.input.pq.map(|p| (p.0, p.1)))?;
    let out = run_method(&inst, a.method, &a.params, a.seed)?;

    if let Some(path) = &a.trace {
        let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        out.trace.write_jsonl(&mut w).map_err(|e| io_err(path, e))?;
        std::io::Write::flush(&mut w).map_err(|e| io_err(path, e))?;
    }
    if let Some(path) = &a.labels {
        write_labels(path, &out.partition)?;
    }
    if let Some(path) = &a.mask {
        let dims = inst
            .image_dims
            .ok_or_else(|| Error::InvalidConfig("--mask needs an --image input".into()))?;
        write_mask(path, dims, &out.partition)?;
    }
    write_json(a.out.as_deref(), &out.summary)?;
    Ok(match out.summary.status {
        RunStatus::Converged => 0,
        RunStatus::MaxIter => 2,
    })
}

#[derive(Debug, Serialize)]
struct OracleReport {
    instance: String,
    n: usize,
    optimal_objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovery: Option<f64>,
    partition: Partition,
}

fn cmd_oracle(a: &OracleArgs) -> Result<i32> {
    let source = a.input.source(a.seed);
    let id = a.input.id(&source);
    let inst = load_instance(&id, &source, a.input.cost, a.input.pq.map(|p| (p.0, p.1)))?;
    let (partition, value) = brute_force(&inst.cost)?;
    let report = OracleReport {
        instance: id,
        n: inst.n(),
        optimal_objective: value,
        cut: inst.cut(&partition)?,
        recovery: inst.recovery(&partition)?,
        partition,
    };
    write_json(a.out.as_deref(), &report)?;
    Ok(0)
}

fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    let manifest = Manifest::read(&a.manifest)?;
    let opts = BenchOptions {
        threads: a.threads,
        timing: !a.no_timing,
    };
    let res = run_bench(&manifest, &opts)?;
    write_bench(&res, &a.out_dir, a.traces)?;
    for row in &res.summary {
        let best = row
            .best_cut
            .map_or(format!("objective {}", row.best_objective), |c| {
                format!("cut {c}")
            });
        let base = row
            .baseline_cut
            .map_or(format!("objective {}", row.baseline_objective), |c| {
                format!("cut {c}")
            });
        let rec = row
            .mean_recovery
            .map_or(String::new(), |r| format!(", mean recovery {r:.4}"));
        println!(
            "{:<20} {:<4} best {best} over {} runs{rec} (random baseline {base})",
            row.instance, row.method, row.runs
        );
    }
    Ok(0)
}

fn cmd_gen(g: &GenCommand) -> Result<i32> {
    match g {
        GenCommand::Sbm {
            n,
            m,
            p,
            q,
            seed,
            out,
            truth,
        } => {
            let spec = SbmSpec {
                n: *n,
                m: *m,
                p: *p,
                q: *q,
                seed: *seed,
            };
            let (graph, labels) = sbm_generate(&spec)?;
            std::fs::write(out, to_rudy(&graph)).map_err(|e| io_err(out, e))?;
            if let Some(path) = truth {
                write_labels(path, &labels)?;
            }
        }
        GenCommand::Torus {
            side,
            weights,
            seed,
            out,
        } => {
            let graph = toroidal_grid_3d(*side, weights.weights(), *seed)?;
            std::fs::write(out, to_rudy(&graph)).map_err(|e| io_err(out, e))?;
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let res = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(g) => cmd_gen(g),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn argument_parsers() {
        let s: SbmArg = "100,50,0.9,0.05".parse().unwrap();
        assert_eq!((s.n, s.m, s.seed), (100, 50, None));
        assert_eq!("10,5,0.5,0.1,7".parse::<SbmArg>().unwrap().seed, Some(7));
        assert!("10,5,0.5".parse::<SbmArg>().is_err());
        assert!("10,x,0.5,0.1".parse::<SbmArg>().is_err());
        let t: TorusArg = "8,pm".parse().unwrap();
        assert_eq!((t.side, t.kind, t.seed), (8, TorusKind::Pm, None));
        assert!("8,uniform".parse::<TorusArg>().is_err());
        let p: PairArg = "0.6,0.2".parse().unwrap();
        assert_eq!((p.0, p.1), (0.6, 0.2));
    }

    #[test]
    fn exactly_one_source() {
        assert!(Cli::try_parse_from(["bqp", "solve", "--method", "v"]).is_err());
        assert!(Cli::try_parse_from([
            "bqp",
            "solve",
            "--method",
            "v",
            "--input",
            "a",
            "--sbm",
            "4,2,0.9,0.1"
        ])
        .is_err());
        assert!(Cli::try_parse_from(["bqp", "solve", "--method", "mrr", "--torus", "3,g"]).is_ok());
    }

    #[test]
    fn parse_failures_exit_one() {
        assert_eq!(run_from(["bqp", "solve", "--bogus"]), 1);
        assert_eq!(run_from(["bqp", "--help"]), 0);
    }
}
