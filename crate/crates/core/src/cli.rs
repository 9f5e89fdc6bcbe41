//! Batch front end behind the `nso` binary.
//!
//! Every option may also come from a JSON config file (`--config`), whose keys
//! are the long flag names with underscores; flags given on the command line
//! win. The config may name the command too, as `"command": "verify"`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage, 3 I/O or parse failure,
//! 4 inadmissible data, 5 solver or oracle failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::initdata::{extract_coefficients, octant_decompose, random_admissible, recompose, InitialData};
use crate::io;
use crate::lattice::{modes_up_to, MultiIndex};
use crate::recursion::{solve, solve_exact, CoefficientTable};
use crate::scalar::Scalar;
use crate::verify::{self, bounds, identities};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INADMISSIBLE: i32 = 4;
pub const EXIT_SOLVER: i32 = 5;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "NSO_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Run(e) => match e {
                Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_IO,
                Error::InvalidInput(_) | Error::Divergence { .. } | Error::Hypothesis(_) | Error::GridMismatch { .. } => {
                    EXIT_INADMISSIBLE
                }
                Error::TableIncomplete(_) | Error::NonFinite(_) | Error::TermLimit { .. } | Error::StepRejected { .. } => {
                    EXIT_SOLVER
                }
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Solve,
    Verify,
    Decompose,
    OracleCompare,
    Eval,
    Identities,
}

/// Options shared by all commands. Each command reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct Options {
    /// Initial data JSON (full-lattice JSON for `decompose`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Grid samples CSV for `decompose`.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// A table written by `solve`, for `eval`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Use random admissible data with this seed instead of `--input`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest shell carrying random data.
    #[arg(long)]
    pub support: Option<u32>,
    /// Size of random data relative to the smallness threshold, in (0, 1].
    #[arg(long)]
    pub margin: Option<f64>,
    /// Cut order N: solve every shell |k|₁ ≤ N.
    #[arg(long, short = 'n')]
    pub order: Option<u32>,
    /// Override the viscosity of the data.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub times: Option<Vec<f64>>,
    /// Number of random probe points.
    #[arg(long)]
    pub probes: Option<usize>,
    /// Evaluate on the uniform M³ grid of the periodic box.
    #[arg(long)]
    pub probe_grid: Option<usize>,
    /// Oracle step size.
    #[arg(long)]
    pub step: Option<f64>,
    /// Oracle agreement tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest k for the binomial identities.
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Largest component for the product bound.
    #[arg(long)]
    pub corollary_max: Option<u32>,
    /// Solve over exact complex rationals.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact: Option<bool>,
    /// Output file; standard output when absent.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Per-mode summary CSV for `solve`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

impl Options {
    /// Fields set here win over `base`.
    fn over(self, base: Options) -> Options {
        macro_rules! pick {
            ($($f:ident),*) => { Options { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            input, grid, table, seed, support, margin, order, nu, times, probes, probe_grid, step, tol, kmax,
            corollary_max, exact, output, summary
        )
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "nso", version, about = "Exact Fourier-coefficient solver for octant Navier-Stokes problems")]
pub struct Cli {
    /// JSON config file; flags win over its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (overridden by NSO_THREADS). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Option<CommandArgs>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum CommandArgs {
    /// Solve to order N and write the coefficient table as JSON.
    Solve(Options),
    /// Solve and run the residual, divergence, bound and conjugation checks.
    Verify(Options),
    /// Split ℤ³ data (JSON or grid CSV) into its eight octant problems.
    Decompose(Options),
    /// Compare the series with fourth-order Runge-Kutta on the same system.
    OracleCompare(Options),
    /// Evaluate velocity and pressure at points and times, as CSV.
    Eval(Options),
    /// Check the binomial identities and the product bound exactly.
    Identities(Options),
}

impl CommandArgs {
    fn split(self) -> (CommandKind, Options) {
        match self {
            CommandArgs::Solve(o) => (CommandKind::Solve, o),
            CommandArgs::Verify(o) => (CommandKind::Verify, o),
            CommandArgs::Decompose(o) => (CommandKind::Decompose, o),
            CommandArgs::OracleCompare(o) => (CommandKind::OracleCompare, o),
            CommandArgs::Eval(o) => (CommandKind::Eval, o),
            CommandArgs::Identities(o) => (CommandKind::Identities, o),
        }
    }
}

/// A fully merged run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(flatten)]
    pub options: Options,
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    command: Option<CommandKind>,
    #[serde(default)]
    threads: Option<usize>,
    #[serde(flatten)]
    options: Options,
}

impl RunConfig {
    /// Merges parsed flags with the config file they name, if any.
    pub fn from_cli(cli: Cli) -> CliResult<RunConfig> {
        let file = match &cli.config {
            Some(path) => serde_json::from_str::<ConfigFile>(&io::read_to_string(path)?).map_err(Error::from)?,
            None => ConfigFile::default(),
        };
        let (command, flags) = match cli.command {
            Some(c) => {
                let (kind, o) = c.split();
                (Some(kind), o)
            }
            None => (None, Options::default()),
        };
        let command = command
            .or(file.command)
            .ok_or_else(|| CliError::Usage("no command given on the command line or in the config".into()))?;
        let config = RunConfig {
            command,
            options: flags.over(file.options),
            threads: cli.threads.or(file.threads),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        let o = &self.options;
        if let Some(nu) = o.nu {
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(CliError::Usage(format!("--nu must be positive, got {nu}")));
            }
        }
        if let Some(m) = o.margin {
            if !(m > 0.0 && m <= 1.0) {
                return Err(CliError::Usage(format!("--margin must lie in (0, 1], got {m}")));
            }
        }
        if let Some(h) = o.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Usage(format!("--step must be positive, got {h}")));
            }
        }
        if let Some(times) = &o.times {
            if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return Err(CliError::Usage("--times must be finite and nonnegative".into()));
            }
        }
        for path in [&o.input, &o.grid, &o.table, &o.output, &o.summary].into_iter().flatten() {
            if path.as_os_str().is_empty() {
                return Err(CliError::Usage("paths must be non-empty".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }

    /// `NSO_THREADS` if set, else `--threads`.
    pub fn thread_count(&self) -> CliResult<Option<usize>> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(CliError::Usage(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
            },
            Err(_) => Ok(self.threads),
        }
    }
}

/// Parses arguments, runs the command, reports errors on stderr, and returns
/// the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match RunConfig::from_cli(cli).and_then(|config| run(&config)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nso: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command on a pool of the configured size.
pub fn run(config: &RunConfig) -> CliResult<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| dispatch(config))
}

fn dispatch(config: &RunConfig) -> CliResult<i32> {
    let o = &config.options;
    match config.command {
        CommandKind::Solve => cmd_solve(o),
        CommandKind::Verify => cmd_verify(o),
        CommandKind::Decompose => cmd_decompose(o),
        CommandKind::OracleCompare => cmd_oracle(o),
        CommandKind::Eval => cmd_eval(o),
        CommandKind::Identities => cmd_identities(o),
    }
}

const DEFAULT_ORDER: u32 = 6;
const DEFAULT_SUPPORT: u32 = 3;
const DEFAULT_VERIFY_TIMES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const DEFAULT_ORACLE_TIMES: [f64; 3] = [0.1, 0.5, 1.0];
const DEFAULT_PROBES: usize = 20;
const DEFAULT_STEP: f64 = 1e-3;
const DEFAULT_ORACLE_TOL: f64 = 1e-6;
/// In-band residuals of a floating-point table must stay below this.
const IN_BAND_TOL: f64 = 1e-10;
/// Pointwise residual allowance, in units of the tail bound.
const POINTWISE_FACTOR: f64 = 10.0;
/// Pointwise residuals are compared with the tail bound from this time on.
const POINTWISE_FROM: f64 = 0.5;
/// Relative tolerance of the evaluated divergence of a floating-point table.
const DIVERGENCE_TOL: f64 = 1e-12;

fn load_data(o: &Options) -> CliResult<InitialData> {
    let data = match (&o.input, o.seed) {
        (Some(path), _) => io::read_initial_data(path)?,
        (None, Some(seed)) => random_admissible(seed, o.support.unwrap_or(DEFAULT_SUPPORT), o.margin.unwrap_or(1.0)),
        (None, None) => return Err(CliError::Usage("give --input or --seed".into())),
    };
    Ok(match o.nu {
        Some(nu) => data.with_nu(nu),
        None => data,
    })
}

fn emit(o: &Options, text: &str) -> CliResult<()> {
    write_to(o.output.as_deref(), text.as_bytes())
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(Error::from)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).map_err(Error::from)?;
            out.flush().map_err(Error::from)?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn status(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_solve(o: &Options) -> CliResult<i32> {
    let data = load_data(o)?;
    let order = o.order.unwrap_or(DEFAULT_ORDER);
    let (json, summary) = if o.exact.unwrap_or(false) {
        let t = solve_exact(&data, order)?;
        (io::table_json(&t)?, summary_csv(&t)?)
    } else {
        let t = solve(&data, order)?;
        (io::table_json(&t)?, summary_csv(&t)?)
    };
    if let Some(path) = &o.summary {
        write_to(Some(path), &summary)?;
    }
    emit(o, &(json + "\n"))?;
    Ok(EXIT_OK)
}

fn summary_csv<C: Scalar>(t: &CoefficientTable<C>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    io::write_summary_csv(t, &mut buf)?;
    Ok(buf)
}

#[derive(Debug, Serialize)]
struct CheckLine {
    name: &'static str,
    /// `pass`, `fail` or `skipped`.
    status: &'static str,
    detail: String,
}

impl CheckLine {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        CheckLine {
            name,
            status: if pass { "pass" } else { "fail" },
            detail,
        }
    }

    fn skipped(name: &'static str, detail: String) -> Self {
        CheckLine {
            name,
            status: "skipped",
            detail,
        }
    }
}

#[derive(Debug, Serialize)]
struct TimeResidual {
    t: f64,
    in_band_max: f64,
    out_of_band_max: f64,
    sample_point_max: f64,
    tail_bound: f64,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    order: u32,
    exact: bool,
    pass: bool,
    checks: Vec<CheckLine>,
    residuals: Vec<TimeResidual>,
    in_band_symbolic_zero: bool,
    bounds: Option<bounds::BoundReport>,
    conjugation: Option<verify::ConjugateReport>,
}

fn probe_points(seed: u64, count: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.gen_range(0.0..tau)))
        .collect()
}

fn cmd_verify(o: &Options) -> CliResult<i32> {
    let data = load_data(o)?;
    let order = o.order.unwrap_or(DEFAULT_ORDER);
    let exact = o.exact.unwrap_or(false);
    if exact {
        verify_table(o, &solve_exact(&data, order)?, true)
    } else {
        verify_table(o, &solve(&data, order)?, false)
    }
}

fn verify_table<C: Scalar>(o: &Options, table: &CoefficientTable<C>, exact: bool) -> CliResult<i32> {
    let init = table.init();
    let order = table.order();
    let times = o.times.clone().unwrap_or_else(|| DEFAULT_VERIFY_TIMES.to_vec());
    let points = probe_points(o.seed.unwrap_or(0), o.probes.unwrap_or(DEFAULT_PROBES));
    let mut checks = Vec::new();

    // continuity
    let modes = modes_up_to(order);
    let div_ok = if exact {
        modes.iter().all(|k| table.divergence(k).map(|d| d.is_zero()).unwrap_or(false))
    } else {
        let float = table.to_c64();
        let scale = float
            .iter()
            .flat_map(|(_, f)| f[..3].iter().map(|p| p.max_abs_coeff()))
            .fold(0.0, f64::max);
        modes.iter().all(|k| {
            float
                .divergence(k)
                .map(|d| d.max_abs_coeff() <= DIVERGENCE_TOL * scale.max(f64::MIN_POSITIVE))
                .unwrap_or(false)
        })
    };
    checks.push(CheckLine::new(
        "divergence",
        div_ok,
        if exact { "k·T_k is the empty sum for every mode" } else { "k·T_k is negligible for every mode" }.into(),
    ));

    // momentum residual
    let symbolic_zero = verify::symbolic_residual_vanishes(table);
    let mut residuals = Vec::new();
    for &t in &times {
        let r = verify::residual(table, &[t], &points);
        residuals.push(TimeResidual {
            t,
            in_band_max: r.in_band_max,
            out_of_band_max: r.out_of_band_max,
            sample_point_max: r.sample_point_max,
            tail_bound: bounds::tail_bound(order, t, init.nu),
        });
    }
    let in_band = residuals.iter().map(|r| r.in_band_max).fold(0.0, f64::max);
    if exact {
        checks.push(CheckLine::new("in-band residual", symbolic_zero, format!("symbolically zero: {symbolic_zero}")));
    } else {
        checks.push(CheckLine::new(
            "in-band residual",
            in_band <= IN_BAND_TOL,
            format!("max {in_band:e}, tolerance {IN_BAND_TOL:e}"),
        ));
    }

    // decay bounds, pointwise residual and conjugation need the hypothesis
    let hypothesis = bounds::check_hypothesis(init);
    let bound_report = match &hypothesis {
        Ok(()) => {
            let r = bounds::check_decay_bounds(table, &times)?;
            checks.push(CheckLine::new(
                "decay bounds",
                r.pass,
                format!("worst ratio {:e}, {} violations", r.worst_ratio, r.violations),
            ));
            let late: Vec<&TimeResidual> = residuals.iter().filter(|r| r.t >= POINTWISE_FROM).collect();
            let ok = late.iter().all(|r| r.sample_point_max <= POINTWISE_FACTOR * r.tail_bound);
            checks.push(CheckLine::new(
                "pointwise residual",
                ok,
                format!("{} probes at {} times t ≥ {POINTWISE_FROM}, within {POINTWISE_FACTOR} × tail bound", points.len(), late.len()),
            ));
            Some(r)
        }
        Err(e) => {
            checks.push(CheckLine::skipped("decay bounds", e.to_string()));
            checks.push(CheckLine::skipped("pointwise residual", e.to_string()));
            None
        }
    };
    let conjugation = if init.mean_is_real() {
        let r = verify::conjugate_check(init, order.min(DEFAULT_ORDER), points.len().max(1), o.seed.unwrap_or(0))?;
        checks.push(CheckLine::new(
            "conjugation",
            r.pass,
            format!("max probe difference {:e}", r.probe_max_diff),
        ));
        Some(r)
    } else {
        checks.push(CheckLine::skipped("conjugation", "mean velocity is not real".into()));
        None
    };

    let pass = checks.iter().all(|c| c.status != "fail");
    let report = VerifyReport {
        order,
        exact,
        pass,
        checks,
        residuals,
        in_band_symbolic_zero: symbolic_zero,
        bounds: bound_report,
        conjugation,
    };
    for c in &report.checks {
        eprintln!("{:>8}  {}: {}", c.status, c.name, c.detail);
    }
    emit(o, &to_json(&report)?)?;
    Ok(status(pass))
}

#[derive(Debug, Serialize)]
struct OctantPiece {
    octant: crate::lattice::Octant,
    divergence_pass: bool,
    data: io::InitialDataFile,
}

#[derive(Debug, Serialize)]
struct DecomposeReport {
    reality_defect: f64,
    round_trip_exact: bool,
    pass: bool,
    pieces: Vec<OctantPiece>,
}

fn cmd_decompose(o: &Options) -> CliResult<i32> {
    let nu = o.nu.unwrap_or(1.0);
    let data = match (&o.input, &o.grid) {
        (Some(path), None) => {
            let mut d = io::read_full_lattice(path)?;
            if let Some(nu) = o.nu {
                d.nu = nu;
            }
            d
        }
        (None, Some(path)) => {
            let file = std::fs::File::open(path).map_err(Error::from)?;
            extract_coefficients(&io::read_grid_csv(file)?, nu)?
        }
        _ => return Err(CliError::Usage("give exactly one of --input or --grid".into())),
    };
    let pieces = octant_decompose(&data);
    let back = recompose(&pieces, data.nu);
    let nonzero = |m: &std::collections::BTreeMap<MultiIndex, [Complex64; 3]>| {
        m.iter()
            .filter(|(_, v)| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            .map(|(k, v)| (*k, *v))
            .collect::<Vec<_>>()
    };
    let round_trip_exact = nonzero(&back.coeffs) == nonzero(&data.coeffs);
    let pieces: Vec<OctantPiece> = pieces
        .iter()
        .map(|p| OctantPiece {
            octant: p.octant,
            divergence_pass: p.check_divergence().pass,
            data: io::InitialDataFile::from_data(p),
        })
        .collect();
    let pass = round_trip_exact && pieces.iter().all(|p| p.divergence_pass);
    let report = DecomposeReport {
        reality_defect: data.reality_defect(),
        round_trip_exact,
        pass,
        pieces,
    };
    emit(o, &to_json(&report)?)?;
    Ok(status(pass))
}

#[derive(Debug, Serialize)]
struct OracleReport {
    order: u32,
    step: f64,
    tolerance: f64,
    pass: bool,
    comparison: verify::OracleComparison,
}

fn cmd_oracle(o: &Options) -> CliResult<i32> {
    let data = load_data(o)?;
    let order = o.order.unwrap_or(5);
    let times = o.times.clone().unwrap_or_else(|| DEFAULT_ORACLE_TIMES.to_vec());
    let step = o.step.unwrap_or(DEFAULT_STEP);
    let tolerance = o.tol.unwrap_or(DEFAULT_ORACLE_TOL);
    let table = solve(&data, order)?;
    let trajectory = verify::galerkin_oracle(&data, order, &times, step)?;
    let comparison = verify::compare_with_oracle(&table, &trajectory);
    let pass = comparison.max_abs_diff <= tolerance;
    emit(
        o,
        &to_json(&OracleReport {
            order,
            step,
            tolerance,
            pass,
            comparison,
        })?,
    )?;
    Ok(status(pass))
}

fn grid_points(m: usize) -> Vec<[f64; 3]> {
    let h = std::f64::consts::TAU / m as f64;
    let mut out = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                out.push([i as f64 * h, j as f64 * h, l as f64 * h]);
            }
        }
    }
    out
}

fn cmd_eval(o: &Options) -> CliResult<i32> {
    let table = match &o.table {
        Some(path) => io::parse_table(&io::read_to_string(path)?)?,
        None => solve(&load_data(o)?, o.order.unwrap_or(DEFAULT_ORDER))?,
    };
    let times = o.times.clone().unwrap_or_else(|| vec![0.0]);
    let points = match (o.probe_grid, o.probes) {
        (Some(m), _) => grid_points(m),
        (None, Some(n)) => probe_points(o.seed.unwrap_or(0), n),
        (None, None) => grid_points(4),
    };
    let mut buf = Vec::new();
    io::write_field_csv(&table, &points, &times, &mut buf)?;
    write_to(o.output.as_deref(), &buf)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct IdentityReport {
    kmax: u32,
    corollary_max: u32,
    first_all_equal: bool,
    second_all_equal: bool,
    second_all_bounded: bool,
    corollary_checked: usize,
    corollary_all_hold: bool,
    corollary_failures: Vec<Vec<u32>>,
    pass: bool,
    abel: Vec<identities::AbelRow>,
}

/// All `k ∈ ℕ₊ⁿ`, `n = 1, 2, 3`, with components at most `max`.
pub fn corollary_cases(max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for a in 1..=max {
        out.push(vec![a]);
        for b in 1..=max {
            out.push(vec![a, b]);
            for c in 1..=max {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

fn cmd_identities(o: &Options) -> CliResult<i32> {
    let kmax = o.kmax.unwrap_or(200);
    let corollary_max = o.corollary_max.unwrap_or(8);
    if kmax == 0 {
        return Err(CliError::Usage("--kmax must be at least 1".into()));
    }
    let abel = identities::abel_identity(kmax);
    let cases = corollary_cases(corollary_max);
    let mut failures = Vec::new();
    for k in &cases {
        if !identities::corollary_bound(k)?.holds {
            failures.push(k.clone());
        }
    }
    let first_all_equal = abel.iter().all(|r| r.first_equal);
    let second_all_equal = abel.iter().all(|r| r.second_equal);
    let second_all_bounded = abel.iter().all(|r| r.second_bounded);
    let pass = first_all_equal && second_all_equal && second_all_bounded && failures.is_empty();
    let report = IdentityReport {
        kmax,
        corollary_max,
        first_all_equal,
        second_all_equal,
        second_all_bounded,
        corollary_checked: cases.len(),
        corollary_all_hold: failures.is_empty(),
        corollary_failures: failures,
        pass,
        abel,
    };
    emit(o, &to_json(&report)?)?;
    Ok(status(pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> CliResult<RunConfig> {
        RunConfig::from_cli(Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?)
    }

    #[test]
    fn flags_parse() {
        let c = parse(&["nso", "verify", "--seed", "7", "-n", "4", "--times", "0,0.5,1"]).unwrap();
        assert_eq!(c.command, CommandKind::Verify);
        assert_eq!(c.options.seed, Some(7));
        assert_eq!(c.options.order, Some(4));
        assert_eq!(c.options.times, Some(vec![0.0, 0.5, 1.0]));
        assert_eq!(c.options.exact, None);
        let e = parse(&["nso", "solve", "--exact", "--seed", "1"]).unwrap();
        assert_eq!(e.options.exact, Some(true));
    }

    #[test]
    fn flags_win_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"command": "oracle-compare", "order": 3, "seed": 1, "step": 0.01, "threads": 2}"#).unwrap();
        let c = parse(&["nso", "--config", path.to_str().unwrap(), "oracle-compare", "--order", "5"]).unwrap();
        assert_eq!(c.options.order, Some(5));
        assert_eq!(c.options.seed, Some(1));
        assert_eq!(c.options.step, Some(0.01));
        assert_eq!(c.threads, Some(2));
        let from_file = parse(&["nso", "--config", path.to_str().unwrap()]).unwrap();
        assert_eq!(from_file.command, CommandKind::OracleCompare);
        assert_eq!(from_file.options.order, Some(3));
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        assert_eq!(parse(&["nso", "solve", "--nu", "-1"]).unwrap_err().exit_code(), EXIT_USAGE);
        assert_eq!(parse(&["nso", "solve", "--margin", "2"]).unwrap_err().exit_code(), EXIT_USAGE);
        assert_eq!(parse(&["nso"]).unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn error_classes_map_to_codes() {
        let code = |e: Error| CliError::from(e).exit_code();
        assert_eq!(code(Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(code(Error::Hypothesis("x".into())), EXIT_INADMISSIBLE);
        assert_eq!(
            code(Error::Divergence {
                mode: MultiIndex::new(1, 0, 0),
                residual: 1.0
            }),
            EXIT_INADMISSIBLE
        );
        assert_eq!(code(Error::TableIncomplete(MultiIndex::ZERO)), EXIT_SOLVER);
        assert_eq!(
            code(Error::StepRejected {
                t: 0.0,
                reason: "x".into()
            }),
            EXIT_SOLVER
        );
    }

    #[test]
    fn corollary_case_count() {
        assert_eq!(corollary_cases(8).len(), 8 + 64 + 512);
    }
}
