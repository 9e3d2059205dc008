//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.
//!
//! The DIMACS criterion reads `pm3-8-50` and `g3-8` in rudy format from
//! `$BQP_DIMACS_DIR` or `crates/core/data/` when present; otherwise it runs
//! seeded toroidal-grid instances of the same two weight classes and says so.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use bqp_admm::cli::bench::{
    run_bench, write_bench, BenchOptions, Manifest, ManifestInstance, MethodEntry,
};
use bqp_admm::cli::params::{Method, Scaled, SolverParams};
use bqp_admm::cli::pipeline::{
    load_instance, run_method, CostChoice, Instance, Source, TorusKind, Trace,
};
use bqp_admm::instances::brute_force;
use bqp_admm::matrix::MatrixState;
use bqp_admm::numerics::{shifted_solve, spectral_constants, sym_eigen};
use bqp_admm::rng::{gaussian_matrix, seeded};
use bqp_admm::vector::{solve_vector, theorem1_min_rho};
use bqp_admm::{build_maxcut_cost, cut_value, CostMatrix, Graph, Partition, VectorConfig};
use common::{
    all_sign_vectors, random_graph, random_symmetric, random_unweighted_graph, sha256_hex,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

// 1: block-model recovery
const SBM_SEEDS: u64 = 10;
const SBM_MIN_EXACT: usize = 9;
const SBM_V_ITERS: usize = 50;
const SBM_MATRIX_ITERS: usize = 10;
const SBM_MAX_SECONDS: f64 = 300.0;

// 2: DIMACS toroidal instances
const PM_RANDOM_REFERENCE: f64 = 62.0;
const PM_RANDOM_TOL: f64 = 15.0;
const PM_MR1_MIN: f64 = 280.0;
const PM_V_MIN: f64 = 295.0;
const RANDOM_MULTIPLE: f64 = 3.0;
const G_MR1_MIN: f64 = 0.85 * 36_780_180.0;
const DIMACS_MAX_SECONDS: f64 = 600.0;
const DIMACS_SEEDS: u64 = 5;
const SURROGATE_GRAPH_SEED: u64 = 7;

// 3: descent with a constant penalty
const DESCENT_INSTANCES: u64 = 20;
const DESCENT_N: usize = 50;
const DESCENT_ITERS: usize = 200;
const DESCENT_SLACK: f64 = 1e-10;

// 4: dual identity, relative to 1 + ||mu||
const DUAL_IDENTITY_TOL: f64 = 1e-8;

// 5: matrix subproblems
const SUBPROBLEM_STATES: u64 = 50;
const ZX_ORACLE_TOL: f64 = 1e-6;
const DIAG_TOL: f64 = 1e-10;
const Y_GRAD_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-6;

// 6: agreement with the exact oracle
const ORACLE_GRAPHS: u64 = 50;
const ORACLE_N: usize = 10;
const ORACLE_MIN_OPTIMAL: f64 = 0.6;
const MRR_RATIO: f64 = 0.87;
const MRR_RATIO_SOFT: f64 = 0.85;

// 7: identities
const CUT_IDENTITY_TOL: f64 = 1e-12;
const SHIFTED_DRAWS: u64 = 100;
const SHIFTED_TOL: f64 = 1e-8;

enum Verdict {
    Pass,
    /// Below target but above the soft threshold; reported, not fatal.
    Soft,
    Fail,
}

struct Outcome {
    id: u8,
    name: &'static str,
    verdict: Verdict,
    detail: String,
}

fn outcome(id: u8, name: &'static str, ok: bool, detail: String) -> Outcome {
    Outcome {
        id,
        name,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

/// Worst `||2Cx + mu|| / (1 + ||mu||)` over every V iteration seen.
#[derive(Default)]
struct DualLog {
    worst: f64,
    checked: usize,
    violations: usize,
}

impl DualLog {
    fn record(&mut self, trace: &Trace) {
        if let Trace::Vector(t) = trace {
            for r in &t.records {
                let rel = r.dual_residual / (1.0 + r.mu_norm);
                self.worst = self.worst.max(rel);
                self.checked += 1;
                if rel > DUAL_IDENTITY_TOL {
                    self.violations += 1;
                }
            }
        }
    }
}

fn sbm_recovery(dual: &mut DualLog) -> Outcome {
    let instances: Vec<Instance> = (0..SBM_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let src = Source::Sbm {
                n: 1000,
                m: 500,
                p: 0.1,
                q: 0.01,
                seed,
            };
            load_instance(&format!("sbm-{seed}"), &src, None, None).unwrap()
        })
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for method in [Method::V, Method::Mr1, Method::Mrr] {
        let params = SolverParams {
            max_iter: Some(if method == Method::V {
                SBM_V_ITERS
            } else {
                SBM_MATRIX_ITERS
            }),
            ..Default::default()
        };
        let runs: Vec<_> = instances
            .par_iter()
            .enumerate()
            .map(|(seed, inst)| run_method(inst, method, &params, seed as u64).unwrap())
            .collect();
        let exact = runs
            .iter()
            .filter(|r| r.summary.recovery == Some(1.0))
            .count();
        let worst = runs
            .iter()
            .filter_map(|r| r.summary.recovery)
            .fold(1.0_f64, f64::min);
        let seconds: f64 = runs
            .iter()
            .filter_map(|r| r.summary.timing)
            .map(|t| t.total_s)
            .sum();
        for r in &runs {
            dual.record(&r.trace);
        }
        ok &= exact >= SBM_MIN_EXACT && seconds <= SBM_MAX_SECONDS;
        parts.push(format!(
            "{method} exact {exact}/{SBM_SEEDS} (worst {worst:.4}, {seconds:.1}s)"
        ));
    }
    outcome(1, "SBM n=1000 recovery", ok, parts.join("; "))
}

fn dimacs_file(name: &str) -> Option<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(d) = std::env::var_os("BQP_DIMACS_DIR") {
        dirs.push(PathBuf::from(d));
    }
    dirs.push(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    for d in dirs {
        for ext in ["", ".rudy", ".txt"] {
            let p = d.join(format!("{name}{ext}"));
            if p.is_file() {
                return Some(p);
            }
        }
    }
    None
}

fn dimacs_instance(
    name: &str,
    kind: TorusKind,
    methods: Vec<MethodEntry>,
) -> (ManifestInstance, bool) {
    let (source, real) = match dimacs_file(name) {
        Some(path) => (Source::Rudy { path }, true),
        None => (
            Source::Torus {
                side: 8,
                weights: kind,
                seed: SURROGATE_GRAPH_SEED,
            },
            false,
        ),
    };
    let inst = ManifestInstance {
        id: name.to_string(),
        source,
        cost: Some(CostChoice::Maxcut),
        pq: None,
        seeds: (0..DIMACS_SEEDS).collect(),
        methods,
        baseline_seed: 0,
    };
    (inst, real)
}

fn mr1_maxcut(alpha: f64) -> MethodEntry {
    MethodEntry {
        method: Method::Mr1,
        params: SolverParams {
            rho0: Some(Scaled::per_l1(0.025)),
            dual_init_scale: Some(Scaled::per_l1(0.0025)),
            alpha: Some(alpha),
            max_iter: Some(2000),
            ..Default::default()
        },
    }
}

fn v_default() -> MethodEntry {
    MethodEntry {
        method: Method::V,
        params: SolverParams::default(),
    }
}

fn dimacs(dual: &mut DualLog) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();

    let (pm, pm_real) = dimacs_instance(
        "pm3-8-50",
        TorusKind::Pm,
        vec![v_default(), mr1_maxcut(1.05)],
    );
    let t = Instant::now();
    let res = run_bench(
        &Manifest {
            instances: vec![pm],
        },
        &BenchOptions::default(),
    )
    .unwrap();
    let secs = t.elapsed().as_secs_f64();
    res.runs.iter().for_each(|r| dual.record(&r.trace));
    let random = res.summary[0].baseline_cut.unwrap();
    let v = res.summary[0].best_cut.unwrap();
    let mr1 = res.summary[1].best_cut.unwrap();
    let pm_ok = (random - PM_RANDOM_REFERENCE).abs() <= PM_RANDOM_TOL
        && v >= PM_V_MIN
        && mr1 >= PM_MR1_MIN
        && v > RANDOM_MULTIPLE * random
        && mr1 > RANDOM_MULTIPLE * random
        && secs <= DIMACS_MAX_SECONDS;
    ok &= pm_ok;
    parts.push(format!(
        "pm3-8-50{}: R {random} V {v} MR1 {mr1} ({secs:.1}s)",
        if pm_real { "" } else { " [surrogate]" }
    ));

    let (g, g_real) = dimacs_instance(
        "g3-8",
        TorusKind::Gaussian,
        vec![v_default(), mr1_maxcut(1.02)],
    );
    let t = Instant::now();
    let res = run_bench(&Manifest { instances: vec![g] }, &BenchOptions::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    res.runs.iter().for_each(|r| dual.record(&r.trace));
    let random = res.summary[0].baseline_cut.unwrap();
    let v = res.summary[0].best_cut.unwrap();
    let mr1 = res.summary[1].best_cut.unwrap();
    ok &= mr1 >= G_MR1_MIN && secs <= DIMACS_MAX_SECONDS;
    parts.push(format!(
        "g3-8{}: R {random} V {v} MR1 {mr1} (need {G_MR1_MIN}) ({secs:.1}s)",
        if g_real { "" } else { " [surrogate]" }
    ));
    outcome(2, "DIMACS cuts", ok, parts.join("; "))
}

fn descent(dual: &mut DualLog) -> Outcome {
    let mut violations = 0;
    let mut worst_rise = f64::NEG_INFINITY;
    let mut steps = 0;
    for seed in 0..DESCENT_INSTANCES {
        let mut rng = seeded(1000 + seed);
        let cost = CostMatrix::custom(random_symmetric(DESCENT_N, &mut rng)).unwrap();
        let meta = spectral_constants(&cost).unwrap();
        let rho = 1.1 * theorem1_min_rho(meta, 1.0);
        assert!(rho * rho - meta.lh * rho - 2.0 * meta.l1 * meta.l1 > 0.0);
        assert!(rho > meta.lh.max(meta.l1));
        let cfg = VectorConfig {
            rho0: Some(rho),
            alpha: 1.0,
            eps: 1e-12,
            max_iter: DESCENT_ITERS,
            seed,
            enforce_theorem1: true,
            ..Default::default()
        };
        let (_, trace) = solve_vector(&cost, &cfg).unwrap();
        dual.record(&Trace::Vector(trace.clone()));
        for w in trace.records.windows(2) {
            let rise = w[1].lagrangian - w[0].lagrangian;
            worst_rise = worst_rise.max(rise);
            steps += 1;
            if rise > DESCENT_SLACK {
                violations += 1;
            }
        }
    }
    outcome(
        3,
        "Lagrangian descent, constant rho",
        violations == 0,
        format!("{violations} violations over {steps} steps, largest rise {worst_rise:.3e}"),
    )
}

/// Dense equality-constrained solve of the (Z, X) subproblem: the quadratic
/// is assembled column by column from its gradient, then the KKT system with
/// the `diag(Z) = 1` rows is solved by LU.
fn zx_oracle(s: &MatrixState, c: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, r) = (s.z.nrows(), s.x.ncols());
    let nz = n * n;
    let nv = nz + n * r;
    let grad = |v: &DVector<f64>| -> DVector<f64> {
        let z = DMatrix::from_column_slice(n, n, &v.as_slice()[..nz]);
        let x = DMatrix::from_column_slice(n, r, &v.as_slice()[nz..]);
        let gap = &z - &x * s.y.transpose();
        let gz = c + &s.lam1 + &gap * s.rho;
        let gx = -(&s.lam1 * &s.y) + &s.lam2 + (&x - &s.y) * s.rho - &gap * &s.y * s.rho;
        DVector::from_iterator(nv, gz.iter().chain(gx.iter()).copied())
    };
    let g0 = grad(&DVector::zeros(nv));
    let mut kkt = DMatrix::zeros(nv + n, nv + n);
    for k in 0..nv {
        let mut e = DVector::zeros(nv);
        e[k] = 1.0;
        let col = grad(&e) - &g0;
        kkt.view_mut((0, k), (nv, 1)).copy_from(&col);
    }
    for i in 0..n {
        let idx = i + n * i;
        kkt[(nv + i, idx)] = 1.0;
        kkt[(idx, nv + i)] = 1.0;
    }
    let mut rhs = DVector::zeros(nv + n);
    rhs.rows_mut(0, nv).copy_from(&(-&g0));
    rhs.rows_mut(nv, n).fill(1.0);
    let sol = kkt.lu().solve(&rhs).expect("KKT system is nonsingular");
    (
        DMatrix::from_column_slice(n, n, &sol.as_slice()[..nz]),
        DMatrix::from_column_slice(n, r, &sol.as_slice()[nz..nv]),
    )
}

/// The part of the augmented Lagrangian that depends on `Y`.
fn y_objective(s: &MatrixState, y: &DMatrix<f64>) -> f64 {
    let gap = &s.z - &s.x * y.transpose();
    let d = &s.x - y;
    s.lam1.dot(&gap) + s.lam2.dot(&d) + 0.5 * s.rho * (d.norm_squared() + gap.norm_squared())
}

fn matrix_subproblems() -> Outcome {
    let mut worst_zx = 0.0_f64;
    let mut worst_diag = 0.0_f64;
    let mut worst_grad = 0.0_f64;
    for seed in 0..SUBPROBLEM_STATES {
        let mut rng = seeded(5000 + seed);
        let n = rng.random_range(2..=10);
        let r = rng.random_range(1..=4);
        let c = random_symmetric(n, &mut rng);
        let cost = CostMatrix::custom(c.clone()).unwrap();
        let mut s = MatrixState {
            z: gaussian_matrix(n, n, &mut rng),
            x: gaussian_matrix(n, r, &mut rng),
            y: gaussian_matrix(n, r, &mut rng),
            lam1: gaussian_matrix(n, n, &mut rng),
            lam2: gaussian_matrix(n, r, &mut rng),
            rho: rng.random_range(0.5..5.0),
            k: 0,
        };

        s.update_y().unwrap();
        let mut grad_sq = 0.0;
        for i in 0..n {
            for j in 0..r {
                let mut yp = s.y.clone();
                let mut ym = s.y.clone();
                yp[(i, j)] += FD_STEP;
                ym[(i, j)] -= FD_STEP;
                let g = (y_objective(&s, &yp) - y_objective(&s, &ym)) / (2.0 * FD_STEP);
                grad_sq += g * g;
            }
        }
        worst_grad = worst_grad.max(grad_sq.sqrt());

        let (z_ref, x_ref) = zx_oracle(&s, &c);
        s.update_zx(&cost);
        let rel = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a - b).norm() / (1.0 + b.norm());
        worst_zx = worst_zx.max(rel(&s.z, &z_ref)).max(rel(&s.x, &x_ref));
        for i in 0..n {
            worst_diag = worst_diag.max((s.z[(i, i)] - 1.0).abs());
        }
    }
    outcome(
        5,
        "matrix subproblem exactness",
        worst_zx <= ZX_ORACLE_TOL && worst_diag <= DIAG_TOL && worst_grad <= Y_GRAD_TOL,
        format!(
            "{SUBPROBLEM_STATES} states: (Z,X) vs KKT oracle {worst_zx:.2e}, diag(Z) {worst_diag:.2e}, Y gradient {worst_grad:.2e}"
        ),
    )
}

fn oracle_consistency(dual: &mut DualLog) -> Outcome {
    struct Row {
        opt: f64,
        v: f64,
        mr1: f64,
        mrr_ratio: f64,
    }
    // small instances reward a slowly growing penalty
    let mr1 = SolverParams {
        rho0: Some(Scaled::per_l1(0.025)),
        alpha: Some(1.002),
        max_iter: Some(3000),
        ..Default::default()
    };
    let rows: Vec<Row> = (0..ORACLE_GRAPHS)
        .into_par_iter()
        .map(|seed| {
            let mut rng = seeded(9000 + seed);
            let g = random_unweighted_graph(ORACLE_N, 0.5, &mut rng);
            let inst = Instance {
                id: format!("er-{seed}"),
                cost: build_maxcut_cost(&g),
                graph: Some(g),
                truth: None,
                image_dims: None,
            };
            let (best, opt) = brute_force(&inst.cost).unwrap();
            let max_cut = cut_value(inst.graph.as_ref().unwrap(), &best).unwrap();
            let v = run_method(&inst, Method::V, &SolverParams::default(), seed).unwrap();
            let m1 = run_method(&inst, Method::Mr1, &mr1, seed).unwrap();
            let mr = run_method(&inst, Method::Mrr, &SolverParams::default(), seed).unwrap();
            let mut log = DualLog::default();
            log.record(&v.trace);
            (
                Row {
                    opt,
                    v: v.summary.objective,
                    mr1: m1.summary.objective,
                    mrr_ratio: mr.summary.cut.unwrap() / max_cut,
                },
                log,
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|(row, log)| {
            dual.worst = dual.worst.max(log.worst);
            dual.checked += log.checked;
            dual.violations += log.violations;
            row
        })
        .collect();

    let tol = |opt: f64| 1e-9 * (1.0 + opt.abs());
    let below = rows
        .iter()
        .filter(|r| r.v < r.opt - tol(r.opt) || r.mr1 < r.opt - tol(r.opt))
        .count();
    let v_opt = rows.iter().filter(|r| r.v <= r.opt + tol(r.opt)).count();
    let mr1_opt = rows.iter().filter(|r| r.mr1 <= r.opt + tol(r.opt)).count();
    let mrr_mean = rows.iter().map(|r| r.mrr_ratio).sum::<f64>() / rows.len() as f64;
    let need = (ORACLE_MIN_OPTIMAL * ORACLE_GRAPHS as f64).ceil() as usize;
    let hard_ok = below == 0 && v_opt >= need && mr1_opt >= need;
    let detail = format!(
        "below optimum {below}; V optimal {v_opt}/{ORACLE_GRAPHS}, MR1 optimal {mr1_opt}/{ORACLE_GRAPHS} (need {need}); MRR mean cut ratio {mrr_mean:.4} (target {MRR_RATIO}, soft {MRR_RATIO_SOFT})"
    );
    let verdict = if !hard_ok || mrr_mean < MRR_RATIO_SOFT {
        Verdict::Fail
    } else if mrr_mean < MRR_RATIO {
        Verdict::Soft
    } else {
        Verdict::Pass
    };
    Outcome {
        id: 6,
        name: "oracle consistency n=10",
        verdict,
        detail,
    }
}

fn identities() -> Outcome {
    let mut worst_cut = 0.0_f64;
    let mut partitions = 0usize;
    for n in 1..=ORACLE_N {
        for rep in 0..3u64 {
            let mut rng = seeded(100 * n as u64 + rep);
            let g = if rep == 2 {
                // signed weights, as in the pm instances
                let edges: Vec<_> = (0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, if rng.random::<bool>() { 1.0 } else { -1.0 }))
                    .collect();
                Graph::new_signed(n, edges).unwrap()
            } else {
                random_graph(n, 0.6, &mut rng)
            };
            let cost = build_maxcut_cost(&g);
            for x in all_sign_vectors(n) {
                let p = Partition::from_signs(&x);
                let cut = cut_value(&g, &p).unwrap();
                let obj = cost.quad(&x);
                let scale = cut.abs().max(obj.abs()).max(1.0);
                worst_cut = worst_cut.max((cut + obj).abs() / scale);
                partitions += 1;
            }
        }
    }

    let mut worst_solve = 0.0_f64;
    for seed in 0..SHIFTED_DRAWS {
        let mut rng = seeded(7000 + seed);
        let n = rng.random_range(1..=50);
        let c = random_symmetric(n, &mut rng);
        let e = sym_eigen(&c).unwrap();
        let lh = (-2.0 * e.lambda.min()).max(0.0);
        let rho = lh + rng.random_range(0.01..10.0);
        let rhs = DVector::from_column_slice(gaussian_matrix(n, 1, &mut rng).as_slice());
        let v = shifted_solve(&e, rho, &rhs).unwrap();
        let resid = (&v * rho + &c * &v * 2.0 - &rhs).norm() / rhs.norm();
        worst_solve = worst_solve.max(resid);
    }
    outcome(
        7,
        "identities",
        worst_cut <= CUT_IDENTITY_TOL && worst_solve <= SHIFTED_TOL,
        format!(
            "cut = -x^T C x over {partitions} partitions (worst {worst_cut:.2e}); shifted solve over {SHIFTED_DRAWS} draws (worst {worst_solve:.2e})"
        ),
    )
}

fn trace_hash(trace: &Trace) -> String {
    let mut buf = Vec::new();
    trace.write_jsonl(&mut buf).unwrap();
    sha256_hex(&buf)
}

fn determinism() -> Outcome {
    let instances = [
        load_instance(
            "sbm",
            &Source::Sbm {
                n: 120,
                m: 60,
                p: 0.3,
                q: 0.05,
                seed: 3,
            },
            None,
            None,
        )
        .unwrap(),
        load_instance(
            "torus",
            &Source::Torus {
                side: 4,
                weights: TorusKind::Pm,
                seed: 3,
            },
            None,
            None,
        )
        .unwrap(),
    ];
    let mut mismatches = 0;
    let mut compared = 0;
    for inst in &instances {
        for method in [Method::V, Method::Mr1, Method::Mrr] {
            let params = SolverParams {
                max_iter: Some(300),
                ..Default::default()
            };
            let hashes: Vec<(String, String)> = (0..2)
                .map(|_| {
                    let mut out = run_method(inst, method, &params, 11).unwrap();
                    out.summary.timing = None;
                    (
                        trace_hash(&out.trace),
                        sha256_hex(serde_json::to_string(&out.summary).unwrap().as_bytes()),
                    )
                })
                .collect();
            compared += 1;
            if hashes[0] != hashes[1] {
                mismatches += 1;
            }
        }
    }

    // the same manifest on one and on four worker threads
    let manifest = Manifest {
        instances: vec![
            ManifestInstance {
                id: "sbm".into(),
                source: Source::Sbm {
                    n: 80,
                    m: 40,
                    p: 0.5,
                    q: 0.1,
                    seed: 1,
                },
                cost: None,
                pq: None,
                seeds: vec![0, 1, 2],
                methods: vec![
                    v_default(),
                    mr1_maxcut(1.05),
                    MethodEntry {
                        method: Method::Mrr,
                        params: SolverParams {
                            max_iter: Some(100),
                            ..Default::default()
                        },
                    },
                ],
                baseline_seed: 0,
            },
            ManifestInstance {
                id: "torus".into(),
                source: Source::Torus {
                    side: 4,
                    weights: TorusKind::Gaussian,
                    seed: 2,
                },
                cost: Some(CostChoice::Maxcut),
                pq: None,
                seeds: vec![5, 6],
                methods: vec![v_default(), mr1_maxcut(1.02)],
                baseline_seed: 4,
            },
        ],
    };
    let digests: Vec<Vec<(String, String)>> = [Some(1), Some(4)]
        .into_iter()
        .map(|threads| {
            let res = run_bench(
                &manifest,
                &BenchOptions {
                    threads,
                    timing: false,
                },
            )
            .unwrap();
            let dir = tempfile::tempdir().unwrap();
            let files = write_bench(&res, dir.path(), true).unwrap();
            files
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        sha256_hex(&std::fs::read(p).unwrap()),
                    )
                })
                .collect()
        })
        .collect();
    let bench_same = digests[0] == digests[1];
    outcome(
        8,
        "determinism",
        mismatches == 0 && bench_same,
        format!(
            "{compared} repeated solves, {mismatches} hash mismatches; bench on 1 vs 4 threads: {} files {}",
            digests[0].len(),
            if bench_same { "identical" } else { "differ" }
        ),
    )
}

type Stage = Box<dyn FnOnce(&mut DualLog) -> Outcome>;

fn main() {
    let start = Instant::now();
    let mut dual = DualLog::default();
    let mut results = Vec::new();
    let stages: Vec<(&str, Stage)> = vec![
        ("1", Box::new(sbm_recovery)),
        ("2", Box::new(dimacs)),
        ("3", Box::new(descent)),
        ("5", Box::new(|_: &mut DualLog| matrix_subproblems())),
        ("6", Box::new(oracle_consistency)),
        ("7", Box::new(|_: &mut DualLog| identities())),
        ("8", Box::new(|_: &mut DualLog| determinism())),
    ];
    for (id, stage) in stages {
        let t = Instant::now();
        results.push(stage(&mut dual));
        eprintln!(
            "criterion {id} finished in {:.1}s",
            t.elapsed().as_secs_f64()
        );
    }
    results.push(outcome(
        4,
        "dual identity 2Cx + mu = 0",
        dual.violations == 0 && dual.checked > 0,
        format!(
            "{} V iterations checked, {} above {DUAL_IDENTITY_TOL:e}, worst {:.2e}",
            dual.checked, dual.violations, dual.worst
        ),
    ));
    results.sort_by_key(|o| o.id);

    let mut failed = 0;
    for o in &results {
        let tag = match o.verdict {
            Verdict::Pass => "PASS",
            Verdict::Soft => "SOFT",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!("criterion {} [{tag}] {}: {}", o.id, o.name, o.detail);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
