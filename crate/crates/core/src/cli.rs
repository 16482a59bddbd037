//! Command-line front end shared by the binary and the tests.
//!
//! Every subcommand produces a [`RunReport`]. Its `results` payload depends only
//! on the inputs, flags and seed; wall-clock time is kept apart in `timings`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::anticonc::{self, SignConfiguration};
use crate::embedding::{self, UnitEmbedding, FEASIBILITY_TOL, UNIT_NORM_TOL};
use crate::error::Error;
use crate::extremal::{self, ExtremalSearchConfig};
use crate::gegenbauer::{self, GegenbauerBasis};
use crate::graph::{self, WeightedGraph};
use crate::rng::DEFAULT_SEED;
use crate::rounding::{self, RoundingConfig};
use crate::solver::{self, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status: every assertion held.
pub const EXIT_PASS: i32 = 0;
/// Exit status: a mathematical assertion failed.
pub const EXIT_ASSERTION: i32 = 1;
/// Exit status: bad input, unreadable file or invalid flags.
pub const EXIT_USAGE: i32 = 2;

/// Largest graph for which `round` also reports the exact maximum cut.
const BRUTE_FORCE_REPORT_LIMIT: usize = 20;
/// Fewer trials than this make the standard error meaningless.
const MIN_TRIALS_FOR_STATISTICS: usize = 30;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub timings: Timings,
    pub results: Value,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_ASSERTION
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: Error },

    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "lowdim-maxcut", version, about = "Low-dimensional Max-Cut rounding and its anti-concentration bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the rank-d SDP relaxation of a graph.
    Solve(SolveArgs),
    /// Hyperplane rounding with local improvement.
    Round(RoundArgs),
    /// Second-moment identity, Monte Carlo check and every lower-bound certificate.
    VerifyGeom(GeomArgs),
    /// The certificate part of verify-geom, without Monte Carlo sampling.
    Powerseries(GeomArgs),
    /// Gegenbauer coefficient table, sign and ratio reports, Q construction.
    Gegenbauer(GegenbauerArgs),
    /// Cap tail bound, mean second-moment identity and flat configurations.
    Extremal(ExtremalArgs),
    /// Merge the JSON reports of a run directory into one table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub json_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    #[serde(skip)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Solve the basic relaxation without triangle inequalities.
    #[arg(long)]
    pub no_triangles: bool,
    #[arg(long, default_value_t = 200_000)]
    pub max_iters: usize,
    /// Target on the worst triangle violation.
    #[arg(long, default_value_t = FEASIBILITY_TOL)]
    pub feasibility_target: f64,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            enforce_triangles: !self.no_triangles,
            max_iters: self.max_iters,
            feasibility_target: self.feasibility_target,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub d: usize,
    /// Write the embedding JSON here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RoundArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Embedding JSON; when absent the SDP is solved first in dimension `--d`.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Candidate threshold; defaults to 2^(-3d).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeomArgs {
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub embedding: Option<PathBuf>,
    /// Draw a random configuration with every inner product at least `--min-rho`.
    #[arg(long)]
    pub random: bool,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = anticonc::ADMISSIBLE_MIN_RHO, allow_negative_numbers = true)]
    pub min_rho: f64,
    /// Rejection attempts per vector before an accepted vector is reused.
    #[arg(long, default_value_t = 1000)]
    pub retries: usize,
    /// Comma-separated vertex weights (default all ones).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Monte Carlo samples of X^2 (0 skips the estimate).
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Largest odd exponent in the termwise search.
    #[arg(long)]
    pub p_max: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GegenbauerArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Last degree in the coefficient table (default 10d + 3).
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Degrees up to this are cross-checked against quadrature.
    #[arg(long, default_value_t = 12)]
    pub quad_kmax: usize,
    /// Grid points for the check Q(t) <= arcsin(t).
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    /// Vectors in the zonal-kernel spot check.
    #[arg(long, default_value_t = 30)]
    pub zonal_n: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtremalArgs {
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub configs: usize,
    /// Monte Carlo samples per configuration.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Sampled pairs per cap tail estimate.
    #[arg(long, default_value_t = 200_000)]
    pub pairs: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_retries: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Directory holding the JSON reports to merge.
    pub dir: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Solve(a) => &a.common,
            Command::Round(a) => &a.common,
            Command::VerifyGeom(a) | Command::Powerseries(a) => &a.common,
            Command::Gegenbauer(a) => &a.common,
            Command::Extremal(a) => &a.common,
            Command::Report(a) => &a.common,
        }
    }
}

/// Parses `args` (program name first), runs the command, prints a summary and
/// writes `--json-out`. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let json_out = cli.command.common().json_out.clone();
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    print!("{}", summary(&report));
    if let Some(path) = json_out {
        if let Err(e) = write_report(&report, &path) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    report.exit_code()
}

pub fn run(command: &Command) -> CliResult<RunReport> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Round(a) => cmd_round(a),
        Command::VerifyGeom(a) => cmd_verify_geom(a),
        Command::Powerseries(a) => cmd_powerseries(a),
        Command::Gegenbauer(a) => cmd_gegenbauer(a),
        Command::Extremal(a) => cmd_extremal(a),
        Command::Report(a) => cmd_report(a),
    }
}

pub fn write_report(report: &RunReport, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).map_err(Error::from)?;
    std::fs::write(path, text + "\n").map_err(|e| file_error(path, e.into()))
}

fn file_error(path: &Path, source: Error) -> CliError {
    CliError::File { path: path.to_path_buf(), source }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| file_error(path, e.into()))
}

pub fn load_graph(path: &Path) -> CliResult<WeightedGraph> {
    graph::parse_graph(&read_file(path)?).map_err(|e| file_error(path, e))
}

pub fn load_embedding_file(path: &Path) -> CliResult<UnitEmbedding> {
    embedding::load_embedding(&read_file(path)?).map_err(|e| file_error(path, e))
}

fn finish(command: &str, parameters: &impl Serialize, seed: u64, start: Instant, results: Value, passed: bool) -> RunReport {
    RunReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        parameters: serde_json::to_value(parameters).expect("flags serialize"),
        seed,
        timings: Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 },
        results,
        passed,
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn solve_payload(g: &WeightedGraph, d: usize, args: &SolverArgs, seed: u64) -> CliResult<(UnitEmbedding, Value, bool)> {
    let cfg = args.config(seed);
    let rep = solver::solve_low_rank(g, d, &cfg)?;
    let v = rep.embedding;
    let feasibility = embedding::check_feasibility(&v, FEASIBILITY_TOL);
    let gram_rank = v.gram_rank(embedding::RANK_TOL);
    let norms_ok = v.max_norm_deviation() <= UNIT_NORM_TOL;
    let passed = norms_ok && gram_rank <= d && (!cfg.enforce_triangles || feasibility.is_feasible());
    let payload = json!({
        "n": g.n(),
        "d": d,
        "total_weight": g.total_weight(),
        "triangles_enforced": cfg.enforce_triangles,
        "objective": rep.objective,
        "worst_violation": rep.worst_violation,
        "iterations": rep.iterations,
        "penalty_weight": rep.penalty_weight,
        "converged": rep.converged,
        "warning": rep.warning,
        "gram_rank": gram_rank,
        "feasibility": to_value(&feasibility),
        "embedding": to_value(&embedding::EmbeddingFile::from(&v)),
    });
    Ok((v, payload, passed))
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let g = load_graph(&args.graph)?;
    if args.d == 0 {
        return Err(CliError::Usage("--d must be at least 1".into()));
    }
    let seed = args.common.seed;
    let (v, mut payload, passed) = solve_payload(&g, args.d, &args.solver, seed)?;
    if let Some(out) = &args.out {
        std::fs::write(out, embedding::save_embedding(&v)).map_err(|e| file_error(out, e.into()))?;
        payload["embedding_path"] = json!(out);
    }
    Ok(finish("solve", args, seed, start, payload, passed))
}

pub fn cmd_round(args: &RoundArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let g = load_graph(&args.graph)?;
    let seed = args.common.seed;
    let (v, solve) = match (&args.embedding, args.d) {
        (Some(path), d) => {
            let v = load_embedding_file(path)?;
            if d.is_some_and(|d| d != v.d()) {
                return Err(CliError::Usage(format!("--d {} does not match the embedding dimension {}", d.unwrap(), v.d())));
            }
            (v, Value::Null)
        }
        (None, Some(d)) if d > 0 => {
            let (v, payload, _) = solve_payload(&g, d, &args.solver, seed)?;
            (v, payload)
        }
        (None, _) => return Err(CliError::Usage("round needs --embedding or a positive --d".into())),
    };
    if v.n() != g.n() {
        return Err(CliError::Usage(format!("embedding has {} vectors but the graph has {} vertices", v.n(), g.n())));
    }
    let epsilon = args.epsilon.unwrap_or_else(|| rounding::default_epsilon(v.d()));
    let cfg = RoundingConfig { epsilon, trials: args.trials, seed };
    let stats = rounding::rounding_trials(&g, &v, &cfg)?;
    let sdp = embedding::sdp_objective(&g, &v)?;
    let alpha = rounding::alpha_gw();

    let monotone = stats.decreases == 0 && stats.mean_final >= stats.mean_initial;
    // E[initial] >= alpha * SDP(V) holds edge by edge for every embedding.
    let gw_check = (args.trials >= MIN_TRIALS_FOR_STATISTICS).then(|| {
        let lhs = stats.mean_initial;
        let rhs = alpha * sdp - 4.0 * stats.stderr_initial;
        json!({ "mean_initial": lhs, "threshold": rhs, "holds": lhs >= rhs - 1e-12 * sdp.abs() })
    });
    let exact = if g.n() <= BRUTE_FORCE_REPORT_LIMIT {
        let (opt, cut) = graph::brute_force_maxcut(&g)?;
        Some(json!({ "max_cut": opt, "cut": cut, "best_within": stats.best_value <= opt + 1e-9 * opt.abs().max(1.0) }))
    } else {
        None
    };
    let passed = monotone
        && gw_check.as_ref().is_none_or(|c| c["holds"] == true)
        && exact.as_ref().is_none_or(|c| c["best_within"] == true);
    let results = json!({
        "n": g.n(),
        "d": v.d(),
        "epsilon": epsilon,
        "trials": args.trials,
        "sdp_objective": sdp,
        "alpha_gw": alpha,
        "mean_initial_over_sdp": if sdp > 0.0 { stats.mean_initial / sdp } else { f64::NAN },
        "mean_final_over_sdp": if sdp > 0.0 { stats.mean_final / sdp } else { f64::NAN },
        "final_at_least_initial": monotone,
        "gw_check": gw_check,
        "exact": exact,
        "statistics": to_value(&stats),
        "solve": solve,
    });
    Ok(finish("round", args, seed, start, results, passed))
}

fn geom_configuration(args: &GeomArgs) -> CliResult<SignConfiguration> {
    let v = match &args.embedding {
        Some(path) => load_embedding_file(path)?,
        None => {
            if args.n == 0 || args.d == 0 {
                return Err(CliError::Usage("--n and --d must be positive".into()));
            }
            anticonc::random_admissible_configuration(args.n, args.d, args.min_rho, args.common.seed, args.retries)?
        }
    };
    Ok(match &args.weights {
        Some(w) => SignConfiguration::weighted(v, w.clone())?,
        None => SignConfiguration::new(v),
    })
}

fn geom_report(command: &str, args: &GeomArgs, samples: u64) -> CliResult<RunReport> {
    let start = Instant::now();
    let seed = args.common.seed;
    let cfg = geom_configuration(args)?;
    let v = cfg.embedding();
    let (n, d) = (cfg.n(), cfg.d());
    let p_max = args.p_max.unwrap_or_else(|| anticonc::default_p_max(d));
    let theorem = anticonc::theorem_lower_bound_report(&cfg, p_max)?;
    let exact = theorem.exact_second_moment;

    let termwise = (1..=p_max.max(1))
        .step_by(2)
        .map(|p| {
            let s = anticonc::power_sum(&cfg, p)?;
            let c = anticonc::arcsin_coeff((p - 1) / 2);
            Ok(json!({ "p": p, "s_p": s, "coefficient": c, "bound": 2.0 / std::f64::consts::PI * c * s }))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mc = (samples > 0).then(|| anticonc::mc_second_moment(&cfg, samples, seed)).transpose()?;
    let mc_ok = mc.is_none_or(|m| m.within(exact, 4.0));

    let hadamard: Vec<_> = (1..=3).map(|p| anticonc::hadamard_rank_check(v, p, anticonc::RANK_TOL, 1e-9)).collect();
    let hadamard_ok = hadamard.iter().all(|h| h.rank_ok && h.psd_ok);

    // The matrix argument applied to G^(p) for p = 1 and the certificate exponent.
    let mut psd = Vec::new();
    for p in [1, anticonc::matrix_exponent(d)] {
        let a = anticonc::hadamard_power(v, p);
        let min_off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j])
            .fold(0.0f64, f64::min);
        let rank_bound = anticonc::binomial(d + p - 1, p).min(usize::MAX as f64) as usize;
        psd.push((p, anticonc::psd_sum_check(&a, n, rank_bound, -min_off, 1e-9)?));
    }
    let psd_ok = psd.iter().all(|(_, c)| !c.preconditions_met() || c.holds);

    let passed = theorem.passed && mc_ok && hadamard_ok && psd_ok;
    let results = json!({
        "n": n,
        "d": d,
        "p_max": p_max,
        "total_weight": cfg.total_weight(),
        "min_rho": cfg.min_pairwise_inner(),
        "admissible": cfg.is_admissible(),
        "exact_second_moment": exact,
        "normalized_second_moment": theorem.normalized_second_moment,
        "theorem": to_value(&theorem),
        "monte_carlo": mc.map(|m| json!({
            "samples": m.samples,
            "estimate": m.estimate,
            "stderr": m.stderr,
            "within_4_sigma": m.within(exact, 4.0),
        })),
        "net_constants": to_value(&anticonc::net_constants(d)),
        "hadamard_rank": to_value(&hadamard),
        "psd_sum": psd.iter().map(|(p, c)| json!({ "p": p, "check": to_value(c) })).collect::<Vec<_>>(),
        "termwise": termwise,
    });
    Ok(finish(command, args, seed, start, results, passed))
}

pub fn cmd_verify_geom(args: &GeomArgs) -> CliResult<RunReport> {
    geom_report("verify-geom", args, args.samples)
}

/// Same certificates as `verify-geom`, without sampling.
pub fn cmd_powerseries(args: &GeomArgs) -> CliResult<RunReport> {
    geom_report("powerseries", args, 0)
}

pub fn cmd_gegenbauer(args: &GegenbauerArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let seed = args.common.seed;
    let basis = GegenbauerBasis::new(args.d)?;
    let a = basis.penalty_exponent();
    let kmax = args.kmax.unwrap_or(a + 3);
    let table = basis.coefficient_table(kmax);
    let signs = table.sign_report();
    let ratio = gegenbauer::ratio_table(&basis, a);
    let delta0 = gegenbauer::delta0_bound(&basis);
    let q = gegenbauer::construct_q(&basis, args.grid);

    let scale = basis.i_closed(0, a);
    let quadrature: Vec<Value> = (0..=args.quad_kmax.min(kmax))
        .map(|k| {
            let closed = basis.i_closed(k, a);
            let r = basis.i_quadrature(k, a);
            let ok = if k <= a {
                (r.value - closed).abs() <= 1e-8 * closed.abs()
            } else {
                r.value.abs() <= 1e-20 * scale
            };
            json!({ "k": k, "closed": closed, "quadrature": r.value, "error_estimate": r.error_estimate, "ok": ok })
        })
        .collect();
    let quadrature_ok = quadrature.iter().all(|c| c["ok"] == true);

    let zonal_n = args.zonal_n.max(1);
    let v = extremal::sample_sphere(zonal_n, args.d, seed)?;
    let floor = -1e-6 * (zonal_n * zonal_n) as f64;
    let zonal = (0..=kmax.min(10))
        .map(|k| gegenbauer::zonal_kernel_sum(&basis, k, &v).map(|s| json!({ "k": k, "sum": s, "ok": s >= floor })))
        .collect::<Result<Vec<_>, Error>>()?;
    let zonal_ok = zonal.iter().all(|z| z["ok"] == true);

    let passed = signs.passed && ratio.passed && ratio.exceeds_slope && delta0.holds && q.passed && quadrature_ok && zonal_ok;
    let results = json!({
        "d": args.d,
        "w": basis.w(),
        "lambda": basis.lambda(),
        "a": a,
        "kmax": kmax,
        "sign_pattern_ok": signs.passed,
        "ratio_minimum": ratio.minimum,
        "ratio_exceeds_slope": ratio.exceeds_slope,
        "delta0_bound_holds": delta0.holds,
        "q_constant": q.c,
        "q_nonnegative": q.q_nonnegative,
        "coefficient_table": to_value(&table),
        "sign_report": to_value(&signs),
        "ratio_report": to_value(&ratio),
        "delta0": to_value(&delta0),
        "q_construction": to_value(&q),
        "quadrature_checks": quadrature,
        "zonal_checks": zonal,
    });
    Ok(finish("gegenbauer", args, seed, start, results, passed))
}

pub fn cmd_extremal(args: &ExtremalArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let seed = args.common.seed;
    let search = ExtremalSearchConfig {
        d: args.d,
        n: args.n,
        seed: crate::rng::derive_seed(seed, 2),
        max_retries: args.max_retries,
        mc_samples: args.samples,
    };
    search.validate()?;
    let tails = [0.5, 0.7, 0.9]
        .iter()
        .enumerate()
        .map(|(i, &a)| extremal::cap_tail_empirical(a, args.d, args.pairs, crate::rng::derive_seed(seed, 10 + i as u64)))
        .collect::<Result<Vec<_>, Error>>()?;
    let tails_ok = tails.iter().all(|t| t.within_bound);
    let identity =
        extremal::mean_second_moment_identity(args.d, args.n, args.configs, args.samples, crate::rng::derive_seed(seed, 1))?;
    let (_, flat) = extremal::find_flat_configuration(&search)?;
    let passed = tails_ok && identity.within && flat.certificates_hold;
    let results = json!({
        "d": args.d,
        "n": args.n,
        "tail_bound_ok": tails_ok,
        "identity_mean": identity.mean,
        "identity_stderr": identity.stderr,
        "identity_ok": identity.within,
        "flat_found": flat.found,
        "flat_ratio": flat.ratio,
        "cap_tails": to_value(&tails),
        "identity": to_value(&identity),
        "flat": to_value(&flat),
    });
    Ok(finish("extremal", args, seed, start, results, passed))
}

/// One row of the merged table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub file: String,
    pub command: String,
    pub seed: u64,
    pub tool_version: String,
    pub passed: bool,
    pub total_ms: f64,
}

/// Reads every `*.json` run report in `dir` and orders rows by command, then
/// file name. Files without a `command` field and earlier `report` outputs are
/// skipped; a report with another schema version is an error.
pub fn merge_reports(dir: &Path) -> CliResult<(Vec<ReportRow>, Vec<String>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| file_error(dir, e.into()))?;
    let mut rows = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| file_error(dir, e.into()))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") || !path.is_file() {
            continue;
        }
        let text = read_file(&path)?;
        let raw: Value = serde_json::from_str(&text).map_err(|e| file_error(&path, e.into()))?;
        if raw.get("command").is_none() {
            // Embeddings and other artifacts share run directories.
            continue;
        }
        match raw.get("schema").and_then(Value::as_u64) {
            Some(s) if s == u64::from(SCHEMA_VERSION) => {}
            other => {
                return Err(file_error(
                    &path,
                    Error::InvalidArgument(format!("schema {other:?} does not match version {SCHEMA_VERSION}")),
                ))
            }
        }
        let report: RunReport = serde_json::from_value(raw).map_err(|e| file_error(&path, e.into()))?;
        if report.command == "report" {
            continue;
        }
        rows.push(ReportRow {
            file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            command: report.command,
            seed: report.seed,
            tool_version: report.tool_version,
            passed: report.passed,
            total_ms: report.timings.total_ms,
        });
    }
    rows.sort_by(|a, b| (&a.command, &a.file).cmp(&(&b.command, &b.file)));
    let versions: BTreeSet<&str> = rows.iter().map(|r| r.tool_version.as_str()).collect();
    let warnings = if versions.len() > 1 {
        vec![format!("reports come from mixed tool versions: {}", versions.into_iter().collect::<Vec<_>>().join(", "))]
    } else {
        Vec::new()
    };
    Ok((rows, warnings))
}

pub fn format_table(rows: &[ReportRow]) -> String {
    let mut out = format!("{:<14} {:<28} {:>20} {:<6} {:>12}\n", "command", "file", "seed", "status", "ms");
    for r in rows {
        out += &format!(
            "{:<14} {:<28} {:>20} {:<6} {:>12.1}\n",
            r.command,
            r.file,
            r.seed,
            if r.passed { "pass" } else { "FAIL" },
            r.total_ms
        );
    }
    out
}

pub fn cmd_report(args: &ReportArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let (rows, warnings) = merge_reports(&args.dir)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let passed = rows.iter().all(|r| r.passed);
    let results = json!({
        "runs": rows.len(),
        "failed": rows.iter().filter(|r| !r.passed).count(),
        "table": format_table(&rows),
        "rows": to_value(&rows),
        "warnings": warnings,
    });
    Ok(finish("report", args, args.common.seed, start, results, passed))
}

/// Human-readable digest: the status line, then every scalar result field.
pub fn summary(report: &RunReport) -> String {
    let mut out = format!(
        "{} {} (seed {}, {:.0} ms)\n",
        report.command,
        if report.passed { "PASS" } else { "FAIL" },
        report.seed,
        report.timings.total_ms
    );
    if let Some(table) = report.results.get("table").and_then(Value::as_str) {
        out += table;
    }
    if let Value::Object(map) = &report.results {
        for (k, v) in map {
            if matches!(v, Value::Bool(_) | Value::Number(_)) {
                out += &format!("  {k} = {v}\n");
            }
        }
    }
    out
}
