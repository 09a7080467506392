//! Configuration, runners and output writers behind the `gcgs` binary.
//!
//! A run is configured from built-in defaults, then an optional JSON file,
//! then command-line flags, each layer overriding the previous one. The
//! fully resolved configuration is echoed into the summary JSON.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::elasticnet::{
    l1_lmo, load_csv_dataset, make_toy_classification, pg_solve, project_l1, spg_solve, DataError, Dataset,
    ElasticNetError, ElasticNetProblem, Loss,
};
use crate::gcg::{
    cg_adapter, check_fixed_point, estimate_curvature, solve, FixedPointReport, IterationRecord, OracleError,
    SolveError, SolveResult, SolverConfig, StepRule, Termination,
};
use crate::numerics::{Mat, Rng};
use crate::ot::{
    make_cluster_data, ot_split, sinkhorn_report, OtError, SinkhornParams, TransportProblem, DEFAULT_LAMBDA_ENT,
    DEFAULT_LAMBDA_LAP, DEFAULT_NEIGHBORS, DEFAULT_POSITION_SCALE,
};

/// Exit status for runs that stop without converging under `--strict`.
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_FAILURE: i32 = 1;

const CURVATURE_ALPHAS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Ot,
    Enet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Conditional gradient splitting.
    Cgs,
    /// Classic conditional gradient (Frank-Wolfe).
    Cg,
    /// Spectral projected gradient (elastic net only).
    Spg,
    /// Projected gradient (elastic net only).
    Pg,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cgs => "cgs",
            Self::Cg => "cg",
            Self::Spg => "spg",
            Self::Pg => "pg",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read config file {path}: {message}")]
    ConfigFile { path: PathBuf, message: String },
    #[error(transparent)]
    Ot(#[from] OtError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    ElasticNet(#[from] ElasticNetError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("curvature estimate failed: {0}")]
    Curvature(OracleError),
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
}

/// Everything a run needs. Tolerances left as `None` get experiment
/// specific defaults in [`RunConfig::effective`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub solver: SolverKind,
    pub step: StepRule,
    pub seed: u64,
    pub gap_tol: Option<f64>,
    pub gap_relative: Option<bool>,
    pub max_iter: Option<usize>,
    pub fp_tol: Option<f64>,
    pub armijo_sigma: f64,
    pub armijo_beta: f64,

    pub ns: usize,
    pub nt: usize,
    pub clusters: usize,
    pub noise: f64,
    pub lambda_ent: f64,
    pub lambda_lap: f64,
    pub neighbors: usize,
    pub position_scale: f64,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iter: usize,

    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub loss: Loss,
    pub lambda: f64,
    pub tau: f64,
    pub data: Option<PathBuf>,
    pub label_column: String,

    /// Sampled pairs for the curvature estimate; 0 skips it.
    pub curvature_samples: usize,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Ot,
            solver: SolverKind::Cgs,
            step: StepRule::Exact,
            seed: 0,
            gap_tol: None,
            gap_relative: None,
            max_iter: None,
            fp_tol: None,
            armijo_sigma: 1e-4,
            armijo_beta: 0.5,
            ns: 100,
            nt: 100,
            clusters: 3,
            noise: 0.1,
            lambda_ent: DEFAULT_LAMBDA_ENT,
            lambda_lap: DEFAULT_LAMBDA_LAP,
            neighbors: DEFAULT_NEIGHBORS,
            position_scale: DEFAULT_POSITION_SCALE,
            sinkhorn_tol: crate::ot::SINKHORN_TOL,
            sinkhorn_max_iter: crate::ot::SINKHORN_MAX_ITER,
            n: 200,
            d: 100,
            t: 10,
            loss: Loss::Logistic,
            lambda: 0.1,
            tau: 5.0,
            data: None,
            label_column: "label".into(),
            curvature_samples: 0,
            out: None,
            summary: None,
            strict: false,
        }
    }
}

impl RunConfig {
    /// Fills the experiment dependent defaults: OT stops on a gap 1e-6
    /// relative to the initial one, the elastic net on a fixed-point
    /// residual of 1e-5 within 10000 iterations.
    pub fn effective(&self) -> Self {
        let mut c = self.clone();
        match c.experiment {
            Experiment::Ot => {
                c.gap_tol.get_or_insert(1e-6);
                c.gap_relative.get_or_insert(true);
                c.max_iter.get_or_insert(1000);
            }
            Experiment::Enet => {
                c.gap_tol.get_or_insert(0.0);
                c.gap_relative.get_or_insert(false);
                c.max_iter.get_or_insert(10_000);
                c.fp_tol.get_or_insert(1e-5);
            }
        }
        c
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Config(msg.into()));
        match (self.experiment, self.solver) {
            (Experiment::Ot, SolverKind::Spg | SolverKind::Pg) => {
                return bad("solvers spg and pg are only available for the enet experiment")
            }
            // the first fixed step lands on a simplex vertex, where the
            // negentropy gradient is undefined
            (Experiment::Ot, SolverKind::Cg) if self.step == StepRule::Fixed => {
                return bad("solver cg with step fixed is not supported for ot; use exact or armijo")
            }
            _ => {}
        }
        if self.experiment == Experiment::Ot && self.fp_tol.is_some() {
            return bad("fp_tol applies to the enet experiment only");
        }
        if self.out.is_none() {
            return bad("missing trace output path (--out)");
        }
        if self.summary.is_none() {
            return bad("missing summary output path (--summary)");
        }
        self.solver_config().validate()?;
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        let e = self.effective();
        SolverConfig {
            step_rule: e.step,
            max_iter: e.max_iter.unwrap_or(1000),
            gap_tol: e.gap_tol.unwrap_or(0.0),
            gap_relative: e.gap_relative.unwrap_or(false),
            residual_tol: e.fp_tol,
            armijo_sigma: e.armijo_sigma,
            armijo_beta: e.armijo_beta,
            record_trace: true,
            seed: e.seed,
        }
    }

    fn sinkhorn(&self) -> SinkhornParams {
        SinkhornParams {
            tol: self.sinkhorn_tol,
            max_iter: self.sinkhorn_max_iter,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gcgs",
    version,
    about = "Conditional gradient splitting for regularized optimal transport and the elastic net"
)]
struct Cli {
    /// Experiment family.
    experiment: Experiment,
    /// JSON file with configuration keys; flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Args, Serialize)]
struct Flags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    solver: Option<SolverKind>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<StepRule>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_tol: Option<f64>,
    /// Measure gap_tol relative to the gap at the starting point.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_relative: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iter: Option<usize>,
    /// Fixed-point residual tolerance (enet).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    fp_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    armijo_sigma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    armijo_beta: Option<f64>,

    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    ns: Option<usize>,
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    nt: Option<usize>,
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    clusters: Option<usize>,
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<f64>,
    /// Entropic weight.
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_ent: Option<f64>,
    /// Laplacian weight.
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_lap: Option<f64>,
    /// Nearest neighbors in each domain graph.
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    neighbors: Option<usize>,
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    position_scale: Option<f64>,
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    sinkhorn_tol: Option<f64>,
    #[arg(long, help_heading = "Transport")]
    #[serde(skip_serializing_if = "Option::is_none")]
    sinkhorn_max_iter: Option<usize>,

    /// Toy samples.
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// Toy features.
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    /// Toy informative features.
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    loss: Option<Loss>,
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    /// CSV dataset instead of the toy generator.
    #[arg(long, value_name = "FILE", help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<PathBuf>,
    #[arg(long, help_heading = "Elastic net")]
    #[serde(skip_serializing_if = "Option::is_none")]
    label_column: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    curvature_samples: Option<usize>,
    /// Per-iteration trace CSV.
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    /// Run summary JSON.
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<PathBuf>,
    /// Exit with a nonzero status when the run does not converge.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    strict: bool,
}

/// Builds the run configuration from `argv` (program name first).
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let mut merged = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => Map::new(),
    };
    let flags = serde_json::to_value(&cli.flags).expect("flags serialize to JSON");
    if let Value::Object(flags) = flags {
        merged.extend(flags);
    }
    merged.insert(
        "experiment".into(),
        serde_json::to_value(cli.experiment).expect("enum serializes"),
    );
    let cfg: RunConfig = serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn read_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let err = |message: String| CliError::ConfigFile {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    match serde_json::from_str(&text).map_err(|e| err(e.to_string()))? {
        Value::Object(map) => Ok(map),
        _ => Err(err("top level must be a JSON object".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: Experiment,
    pub solver: SolverKind,
    pub termination: Termination,
    pub converged: bool,
    pub iterations: usize,
    pub final_objective: f64,
    pub final_gap: f64,
    /// Marginal violation (ot) or fixed-point residual (enet).
    pub final_residual: Option<f64>,
    pub elapsed_s: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixed_point: Option<FixedPointReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub curvature_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nonzeros: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub test_accuracy: Option<f64>,
    pub config: RunConfig,
}

/// Exit status for a finished run: 0 unless `strict` and the run did not
/// stop on a gap or residual test.
pub fn exit_code(termination: Termination, strict: bool) -> i32 {
    match termination {
        Termination::GapTol | Termination::ResidualTol => 0,
        Termination::MaxIter | Termination::Stalled if strict => EXIT_NOT_CONVERGED,
        Termination::MaxIter | Termination::Stalled => 0,
    }
}

/// Runs the configured experiment and writes both output files.
pub fn run(cfg: &RunConfig) -> Result<Summary, CliError> {
    match cfg.experiment {
        Experiment::Ot => run_ot(cfg),
        Experiment::Enet => run_enet(cfg),
    }
}

pub fn run_ot(cfg: &RunConfig) -> Result<Summary, CliError> {
    cfg.validate()?;
    let data = make_cluster_data(cfg.ns, cfg.nt, cfg.clusters, cfg.noise, cfg.seed)?;
    let problem =
        TransportProblem::from_clusters(&data, cfg.lambda_ent, cfg.lambda_lap, cfg.neighbors, cfg.position_scale)?;
    let split = ot_split(&problem)?.with_sinkhorn(cfg.sinkhorn());
    let x0 = problem.initial_plan(cfg.sinkhorn())?.into_mat().into_vec();
    let solver_cfg = cfg.solver_config();

    let start = Instant::now();
    let result = match cfg.solver {
        SolverKind::Cgs => solve(&split, &x0, &solver_cfg)?,
        SolverKind::Cg => solve(&split.classic(), &x0, &solver_cfg)?,
        SolverKind::Spg | SolverKind::Pg => unreachable!("rejected by validate"),
    };
    let elapsed = start.elapsed().as_secs_f64();

    let mut summary = summarize(cfg, &result, elapsed);
    if cfg.solver == SolverKind::Cgs {
        summary.fixed_point = check_fixed_point(&split, &result.x_final).ok();
    }
    if cfg.curvature_samples > 0 {
        let (r, c) = problem.shape();
        let params = cfg.sinkhorn();
        let mut failures = 0usize;
        // random feasible plans: Sinkhorn solutions of random costs
        let mut sampler = |rng: &mut Rng| {
            let mut draw = |rng: &mut Rng| {
                let cost = Mat::from_fn(r, c, |_, _| rng.uniform());
                match sinkhorn_report(&cost, problem.mu_s.weights(), problem.mu_t.weights(), 0.1, params) {
                    Ok(rep) => rep.plan.into_mat().into_vec(),
                    Err(_) => {
                        failures += 1;
                        x0.clone()
                    }
                }
            };
            (draw(rng), draw(rng))
        };
        let mut rng = Rng::new(cfg.seed);
        let est = estimate_curvature(&split, &mut sampler, &mut rng, cfg.curvature_samples, &CURVATURE_ALPHAS)
            .map_err(CliError::Curvature)?;
        summary.curvature_estimate = Some(est);
    }
    write_outputs(cfg, &result, &summary, "marginal_violation")?;
    Ok(summary)
}

fn enet_dataset(cfg: &RunConfig) -> Result<Dataset, CliError> {
    Ok(match &cfg.data {
        Some(path) => load_csv_dataset(path, &cfg.label_column)?,
        None => make_toy_classification(cfg.n, cfg.d, cfg.t, cfg.seed)?,
    })
}

pub fn run_enet(cfg: &RunConfig) -> Result<Summary, CliError> {
    cfg.validate()?;
    let data = enet_dataset(cfg)?;
    let problem = ElasticNetProblem::from_training(&data, cfg.loss, cfg.lambda, cfg.tau)?;
    let x0 = vec![0.0; problem.n_features()];
    let solver_cfg = cfg.solver_config();
    let tau = problem.tau();

    let start = Instant::now();
    let result = match cfg.solver {
        SolverKind::Cgs => solve(&problem, &x0, &solver_cfg)?,
        SolverKind::Cg => {
            let classic = cg_adapter(&problem, move |g: &[f64]| -> Result<Vec<f64>, OracleError> {
                Ok(l1_lmo(g, tau))
            });
            solve(&classic, &x0, &solver_cfg)?
        }
        SolverKind::Spg => spg_solve(&problem, &x0, &solver_cfg)?,
        SolverKind::Pg => pg_solve(&problem, &x0, &solver_cfg)?,
    };
    let elapsed = start.elapsed().as_secs_f64();

    let mut summary = summarize(cfg, &result, elapsed);
    summary.nonzeros = Some(result.x_final.iter().filter(|v| **v != 0.0).count());
    let (z_test, y_test) = data.test();
    if !y_test.is_empty() && cfg.loss != Loss::Squared {
        summary.test_accuracy = Some(ElasticNetProblem::accuracy(&z_test, &y_test, &result.x_final));
    }
    if cfg.solver == SolverKind::Cgs {
        summary.fixed_point = check_fixed_point(&problem, &result.x_final).ok();
    }
    if cfg.curvature_samples > 0 {
        let dim = problem.n_features();
        let ball_point = move |rng: &mut Rng| {
            let v: Vec<f64> = rng.normal_vec(dim).iter().map(|v| v * tau).collect();
            project_l1(&v, tau)
        };
        let mut rng = Rng::new(cfg.seed);
        let est = estimate_curvature(
            &problem,
            |rng: &mut Rng| (ball_point(rng), ball_point(rng)),
            &mut rng,
            cfg.curvature_samples,
            &CURVATURE_ALPHAS,
        )
        .map_err(CliError::Curvature)?;
        summary.curvature_estimate = Some(est);
    }
    write_outputs(cfg, &result, &summary, "fp_residual")?;
    Ok(summary)
}

fn summarize(cfg: &RunConfig, result: &SolveResult, elapsed_s: f64) -> Summary {
    let last = result.last();
    Summary {
        experiment: cfg.experiment,
        solver: cfg.solver,
        termination: result.termination,
        converged: result.termination.converged(),
        iterations: result.iterations(),
        final_objective: last.objective,
        final_gap: last.surrogate_gap,
        final_residual: last.extra_residual,
        elapsed_s,
        fixed_point: None,
        curvature_estimate: None,
        nonzeros: None,
        test_accuracy: None,
        config: cfg.effective(),
    }
}

fn write_outputs(
    cfg: &RunConfig,
    result: &SolveResult,
    summary: &Summary,
    residual_column: &str,
) -> Result<(), CliError> {
    let out = cfg.out.as_deref().expect("validated");
    let summary_path = cfg.summary.as_deref().expect("validated");
    let file = File::create(out).map_err(|e| output_err(out, e))?;
    write_trace(BufWriter::new(file), &result.trace, residual_column).map_err(|e| output_err(out, e))?;

    let file = File::create(summary_path).map_err(|e| output_err(summary_path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, summary).map_err(|e| output_err(summary_path, e))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| output_err(summary_path, e))
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e16)`.
fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Writes `iter,elapsed_s,objective,surrogate_gap,step_alpha,<residual>`.
pub fn write_trace<W: Write>(w: W, trace: &[IterationRecord], residual_column: &str) -> Result<(), csv::Error> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "iter",
        "elapsed_s",
        "objective",
        "surrogate_gap",
        "step_alpha",
        residual_column,
    ])?;
    for r in trace {
        csv.write_record([
            r.k.to_string(),
            fmt_f64(r.elapsed_s),
            fmt_f64(r.objective),
            fmt_f64(r.surrogate_gap),
            fmt_f64(r.alpha),
            r.extra_residual.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}
