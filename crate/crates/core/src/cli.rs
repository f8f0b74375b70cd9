//! The `mle-phase` command line.
//!
//! Every subcommand reads its settings from flags, then from the matching
//! table of an optional TOML `--config` file, then from built-in defaults.
//! Results go to stdout or, with `--output`, to a file that is written to
//! a temporary sibling and renamed into place only once complete.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 partial solver failure
//! (`boundary`, `phase-diagram`), 3 separated data (`separable`).
//!
//! ```toml
//! seed = 7
//! workers = 2
//!
//! [boundary]
//! rho = 0.5
//! gamma_max = 10.0
//! steps = 101
//!
//! [phase_diagram]
//! rho = 0.0
//! n = 400
//! kappa_values = [0.1, 0.2, 0.3]
//! ```

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_curve, solve_boundary, CurveSpec, DEFAULT_TOL, GAMMA_CAP};
use crate::cone::{
    estimate_qn, kinematic_predict, statistical_dimension, KinematicVerdict, QnEstimate, StatDimEstimate,
    DEFAULT_EPSILON, DEFAULT_QN_TOL,
};
use crate::error::{Error, Result};
use crate::phase::{run_phase_diagram, GridSpec, PhaseDiagram};
use crate::prob::{draw_yv, ModelParams, QuadratureRule, RngSeed};
use crate::report;
use crate::separability::{check_separation, Dataset, SeparabilityVerdict, SeparationOptions, DEFAULT_DECISION_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_SEPARATED: i32 = 3;

pub const DEFAULT_SEED: u64 = 20_190_101;
const DEFAULT_STEPS: usize = 101;
const DEFAULT_GAMMA_MAX: f64 = 10.0;
const CURVE_POINTS: usize = 201;

#[derive(Debug, Parser)]
#[command(name = "mle-phase", version, about = "MLE existence phase transition for high-dimensional logistic regression")]
struct Cli {
    /// TOML file with defaults for any subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for simulations.
    #[arg(long, global = true, env = "MLE_PHASE_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Boundary curve gamma -> h_MLE along a ray beta0 = rho gamma.
    Boundary(BoundaryArgs),
    /// Empirical MLE-existence probabilities on a (kappa, gamma) grid.
    PhaseDiagram(DiagramArgs),
    /// Separation check for a CSV dataset.
    Separable(SeparableArgs),
    /// Monte Carlo estimate of Q_n.
    Qn(QnArgs),
    /// Monte Carlo statistical dimension of C(W).
    Statdim(StatdimArgs),
    /// Boundary and kinematic-formula predictions for an n x p problem.
    Check(CheckArgs),
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BoundaryArgs {
    /// Ray through the parameter quadrant: beta0 = rho gamma.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Explicit gamma values, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["gamma_max", "steps", "prob_values"])]
    gamma_values: Option<Vec<f64>>,
    /// Explicit values of P(y = 1) in [0.5, 1); requires rho = 1.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["gamma_max", "steps"])]
    prob_values: Option<Vec<f64>>,
    /// Prefix each row with the marginal P(y = 1).
    #[arg(long)]
    prob_axis: bool,
    /// Allow gamma beyond the default cap.
    #[arg(long)]
    no_gamma_cap: bool,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DiagramArgs {
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    kappa_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', conflicts_with = "prob_values")]
    gamma_values: Option<Vec<f64>>,
    /// Rows given as P(y = 1) in [0.5, 1); requires rho = 1.
    #[arg(long, value_delimiter = ',')]
    prob_values: Option<Vec<f64>>,
    /// n = 4000 with 50 replicates unless set explicitly.
    #[arg(long)]
    paper_scale: bool,
    /// Fit without an intercept.
    #[arg(long)]
    no_intercept: bool,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SeparableArgs {
    /// CSV with a `y` column and covariate columns.
    #[serde(skip)]
    path: Option<PathBuf>,
    #[arg(long)]
    no_intercept: bool,
    /// Separated iff the LP optimum exceeds tol * n.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QnArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta0: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Basis {
    /// W = {0}.
    Orthant,
    /// W = span(1).
    Ones,
    /// W = span(Y, V) sampled from --beta0/--gamma0.
    Yv,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct StatdimArgs {
    #[arg(long, value_enum)]
    basis: Option<Basis>,
    #[arg(long, allow_hyphen_values = true)]
    beta0: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CheckArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta0: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo draws of Z for the statistical dimension.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    workers: Option<usize>,
    format: Option<Format>,
    boundary: BoundaryArgs,
    phase_diagram: DiagramArgs,
    separable: SeparableArgs,
    qn: QnArgs,
    statdim: StatdimArgs,
    check: CheckArgs,
}

/// Settings shared by every subcommand after merging.
struct Common {
    seed: u64,
    format: Option<Format>,
    output: Option<PathBuf>,
}

/// What a subcommand produced.
struct Outcome {
    body: String,
    code: i32,
}

/// Failures before any result exists; reported on stderr with exit 1.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let config = match cli.config.as_deref().map(load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let common = Common {
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        format: cli.format.or(config.format),
        output: cli.output.clone(),
    };
    let workers = cli.workers.or(config.workers);
    let subcommand = subcommand_name(&cli.command);

    let pool = match workers {
        Some(0) => {
            let _ = writeln!(stderr, "error: --workers must be at least 1");
            return EXIT_USAGE;
        }
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    let result = pool.install(|| dispatch(cli.command, config, &common));
    match result {
        Ok(outcome) => match emit(common.output.as_deref(), &outcome.body, stdout) {
            Ok(()) => outcome.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(subcommand)
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            let _ = writeln!(stderr, "error: {msg}\n\n{usage}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Boundary(_) => "boundary",
        Command::PhaseDiagram(_) => "phase-diagram",
        Command::Separable(_) => "separable",
        Command::Qn(_) => "qn",
        Command::Statdim(_) => "statdim",
        Command::Check(_) => "check",
    }
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command, config: ConfigFile, common: &Common) -> std::result::Result<Outcome, Failure> {
    match cmd {
        Command::Boundary(a) => cmd_boundary(a, config.boundary, common),
        Command::PhaseDiagram(a) => cmd_phase_diagram(a, config.phase_diagram, common),
        Command::Separable(a) => cmd_separable(a, config.separable, common),
        Command::Qn(a) => cmd_qn(a, config.qn, common),
        Command::Statdim(a) => cmd_statdim(a, config.statdim, common),
        Command::Check(a) => cmd_check(a, config.check, common),
    }
}

/// Writes `body` to `path` atomically, or to `stdout`.
fn emit(path: Option<&Path>, body: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        None => Ok(stdout.write_all(body.as_bytes())?),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn format_or(common: &Common, default: Format, allowed: &[Format]) -> std::result::Result<Format, Failure> {
    let f = common.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!("format {f:?} is not available for this command").to_lowercase()))
    }
}

fn json<T: Serialize>(value: &T) -> std::result::Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

/// `gamma = logit(p)` along the `rho = 1` ray.
fn gammas_from_probs(rho: f64, probs: &[f64]) -> std::result::Result<Vec<f64>, Failure> {
    if rho != 1.0 {
        return Err(Failure::Usage("--prob-values requires --rho 1".into()));
    }
    probs
        .iter()
        .map(|&p| {
            if (0.5..1.0).contains(&p) {
                Ok((p / (1.0 - p)).ln())
            } else {
                Err(Failure::Usage(format!("P(y = 1) values must lie in [0.5, 1), got {p}")))
            }
        })
        .collect()
}

#[derive(Serialize)]
struct BoundaryConfig<'a> {
    rho: f64,
    gammas: &'a [f64],
    tol: f64,
    prob_axis: bool,
}

fn cmd_boundary(a: BoundaryArgs, c: BoundaryArgs, common: &Common) -> std::result::Result<Outcome, Failure> {
    let format = format_or(common, Format::Csv, &[Format::Csv, Format::Json])?;
    let rho = a.rho.or(c.rho).ok_or_else(|| Failure::Usage("--rho is required".into()))?;
    let tol = a.tol.or(c.tol).unwrap_or(DEFAULT_TOL);
    let prob_axis = a.prob_axis || c.prob_axis;
    let spec = if let Some(gammas) = a.gamma_values.clone() {
        CurveSpec { rho, gammas }
    } else if let Some(probs) = a.prob_values.as_deref() {
        CurveSpec { rho, gammas: gammas_from_probs(rho, probs)? }
    } else if a.gamma_max.is_none() && a.steps.is_none() && (c.gamma_values.is_some() || c.prob_values.is_some()) {
        match (c.gamma_values, c.prob_values) {
            (Some(gammas), _) => CurveSpec { rho, gammas },
            (None, Some(probs)) => CurveSpec { rho, gammas: gammas_from_probs(rho, &probs)? },
            (None, None) => unreachable!(),
        }
    } else {
        let gamma_max = a.gamma_max.or(c.gamma_max).unwrap_or(DEFAULT_GAMMA_MAX);
        let steps = a.steps.or(c.steps).unwrap_or(DEFAULT_STEPS);
        CurveSpec::equispaced(rho, gamma_max, steps).map_err(|e| Failure::Usage(e.to_string()))?
    };
    if !(a.no_gamma_cap || c.no_gamma_cap) {
        if let Some(g) = spec.gammas.iter().find(|&&g| g > GAMMA_CAP) {
            return Err(Failure::Usage(format!(
                "gamma = {g} exceeds the cap of {GAMMA_CAP}; pass --no-gamma-cap to go further"
            )));
        }
    }
    let rule = QuadratureRule::default();
    let points = boundary_curve(&spec, &rule, tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = report::boundary_rows(rho, &points, prob_axis, &rule);
    let code = if rows.iter().all(|r| r.converged) { EXIT_OK } else { EXIT_PARTIAL };
    let body = match format {
        Format::Json => {
            let cfg = BoundaryConfig {
                rho,
                gammas: &spec.gammas,
                tol,
                prob_axis,
            };
            report::boundary_json(&cfg, &rows).map_err(Error::from)?
        }
        _ => report::boundary_csv(&rows),
    };
    Ok(Outcome { body, code })
}

fn cmd_phase_diagram(a: DiagramArgs, c: DiagramArgs, common: &Common) -> std::result::Result<Outcome, Failure> {
    let format = format_or(common, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let rho = a.rho.or(c.rho).ok_or_else(|| Failure::Usage("--rho is required".into()))?;
    let base = if a.paper_scale || c.paper_scale {
        GridSpec::paper_scale(rho, common.seed)
    } else {
        GridSpec::desk(rho, common.seed)
    };
    let gamma_grid = match (a.gamma_values, a.prob_values, c.gamma_values, c.prob_values) {
        (Some(g), _, _, _) => g,
        (None, Some(p), _, _) => gammas_from_probs(rho, &p)?,
        (None, None, Some(g), _) => g,
        (None, None, None, Some(p)) => gammas_from_probs(rho, &p)?,
        (None, None, None, None) => base.gamma_grid.clone(),
    };
    let spec = GridSpec {
        n: a.n.or(c.n).unwrap_or(base.n),
        replicates: a.replicates.or(c.replicates).unwrap_or(base.replicates),
        kappa_grid: a.kappa_values.or(c.kappa_values).unwrap_or(base.kappa_grid.clone()),
        gamma_grid,
        fit_intercept: !(a.no_intercept || c.no_intercept),
        ..base
    };
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let diagram = run_phase_diagram(&spec)?;
    let code = if diagram.failure_count() == 0 { EXIT_OK } else { EXIT_PARTIAL };
    let body = match format {
        Format::Csv => report::diagram_csv(&diagram),
        Format::Json => report::diagram_json(&diagram).map_err(Error::from)?,
        Format::Svg => report::diagram_svg(&diagram, &theory_curve(&diagram)),
    };
    Ok(Outcome { body, code })
}

/// `(gamma, h)` along the diagram's ray, densely enough for a smooth line.
fn theory_curve(diagram: &PhaseDiagram) -> Vec<(f64, f64)> {
    let grid = &diagram.spec.gamma_grid;
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Extend half a grid step past the outer rows to cover whole cells.
    let pad = if grid.len() > 1 { (hi - lo) / (grid.len() - 1) as f64 / 2.0 } else { 0.5 };
    let (lo, hi) = ((lo - pad).max(0.0), hi + pad);
    let gammas: Vec<f64> = (0..CURVE_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (CURVE_POINTS - 1) as f64)
        .collect();
    let spec = CurveSpec {
        rho: diagram.spec.rho,
        gammas,
    };
    match boundary_curve(&spec, &QuadratureRule::default(), DEFAULT_TOL) {
        Ok(points) => points
            .iter()
            .filter_map(|pt| pt.best_effort().map(|s| (pt.gamma, s.h)))
            .collect(),
        Err(_) => Vec::new(),
    }
}

#[derive(Serialize)]
struct SeparableReport<'a> {
    mle_exists: bool,
    n: usize,
    p: usize,
    fit_intercept: bool,
    #[serde(flatten)]
    verdict: &'a SeparabilityVerdict,
}

fn cmd_separable(a: SeparableArgs, c: SeparableArgs, common: &Common) -> std::result::Result<Outcome, Failure> {
    format_or(common, Format::Json, &[Format::Json])?;
    let path = a.path.ok_or_else(|| Failure::Usage("a CSV path is required".into()))?;
    let data = Dataset::from_csv_path(&path)?;
    let opts = SeparationOptions {
        fit_intercept: !(a.no_intercept || c.no_intercept),
        tol: a.tol.or(c.tol).unwrap_or(DEFAULT_DECISION_TOL),
    };
    let verdict = check_separation(&data, &opts)?;
    let body = json(&SeparableReport {
        mle_exists: verdict.mle_exists(),
        n: data.n(),
        p: data.p(),
        fit_intercept: opts.fit_intercept,
        verdict: &verdict,
    })?;
    let code = if verdict.separated { EXIT_SEPARATED } else { EXIT_OK };
    Ok(Outcome { body, code })
}

fn params_from(beta0: Option<f64>, gamma0: Option<f64>) -> std::result::Result<ModelParams, Failure> {
    ModelParams::new(beta0.unwrap_or(0.0), gamma0.unwrap_or(0.0)).map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(Serialize)]
struct QnReport {
    seed: u64,
    tol: f64,
    h_mle: Option<f64>,
    estimate: QnEstimate,
}

fn cmd_qn(a: QnArgs, c: QnArgs, common: &Common) -> std::result::Result<Outcome, Failure> {
    format_or(common, Format::Json, &[Format::Json])?;
    let params = params_from(a.beta0.or(c.beta0), a.gamma0.or(c.gamma0))?;
    let n = a.n.or(c.n).unwrap_or(1000);
    let trials = a.trials.or(c.trials).unwrap_or(20);
    let tol = a.tol.or(c.tol).unwrap_or(DEFAULT_QN_TOL);
    let estimate =
        estimate_qn(&params, n, trials, RngSeed::new(common.seed), tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let h_mle = solve_boundary(&params, &QuadratureRule::default(), DEFAULT_TOL).ok().map(|s| s.h);
    let body = json(&QnReport {
        seed: common.seed,
        tol,
        h_mle,
        estimate,
    })?;
    Ok(Outcome { body, code: EXIT_OK })
}

#[derive(Serialize)]
struct StatdimReport {
    seed: u64,
    basis: Basis,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<ModelParams>,
    estimate: StatDimEstimate,
}

fn cmd_statdim(a: StatdimArgs, c: StatdimArgs, common: &Common) -> std::result::Result<Outcome, Failure> {
    format_or(common, Format::Json, &[Format::Json])?;
    let basis = a.basis.or(c.basis).unwrap_or(Basis::Orthant);
    let n = a.n.or(c.n).unwrap_or(1000);
    let trials = a.trials.or(c.trials).unwrap_or(200);
    let seed = RngSeed::new(common.seed);
    let mut params = None;
    let vectors = match basis {
        Basis::Orthant => Vec::new(),
        Basis::Ones => vec![vec![1.0; n]],
        Basis::Yv => {
            let p = params_from(a.beta0.or(c.beta0), a.gamma0.or(c.gamma0))?;
            params = Some(p);
            let mut rng = seed.substream(&[0]).rng();
            let (y, v): (Vec<f64>, Vec<f64>) = (0..n).map(|_| draw_yv(&p, &mut rng)).unzip();
            vec![y, v]
        }
    };
    let estimate =
        statistical_dimension(&vectors, n, trials, seed.substream(&[1])).map_err(|e| Failure::Usage(e.to_string()))?;
    let body = json(&StatdimReport {
        seed: common.seed,
        basis,
        params,
        estimate,
    })?;
    Ok(Outcome { body, code: EXIT_OK })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BoundaryPrediction {
    MleExists,
    NoMle,
}

#[derive(Serialize)]
struct CheckReport {
    params: ModelParams,
    n: usize,
    p: usize,
    kappa: f64,
    h_mle: f64,
    boundary_prediction: BoundaryPrediction,
    kinematic: KinematicVerdict,
}

fn cmd_check(a: CheckArgs, c: CheckArgs, common: &Common) -> std::result::Result<Outcome, Failure> {
    format_or(common, Format::Json, &[Format::Json])?;
    let params = params_from(a.beta0.or(c.beta0), a.gamma0.or(c.gamma0))?;
    let n = a.n.or(c.n).ok_or_else(|| Failure::Usage("--n is required".into()))?;
    let p = a.p.or(c.p).ok_or_else(|| Failure::Usage("--p is required".into()))?;
    let epsilon = a.epsilon.or(c.epsilon).unwrap_or(DEFAULT_EPSILON);
    let trials = a.trials.or(c.trials).unwrap_or(100);
    let kinematic = kinematic_predict(&params, n, p, epsilon, trials, RngSeed::new(common.seed))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let h_mle = solve_boundary(&params, &QuadratureRule::default(), DEFAULT_TOL)?.h;
    let kappa = p as f64 / n as f64;
    let body = json(&CheckReport {
        params,
        n,
        p,
        kappa,
        h_mle,
        boundary_prediction: if kappa < h_mle {
            BoundaryPrediction::MleExists
        } else {
            BoundaryPrediction::NoMle
        },
        kinematic,
    })?;
    Ok(Outcome { body, code: EXIT_OK })
}
