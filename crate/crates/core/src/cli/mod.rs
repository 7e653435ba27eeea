//! Command-line front end. Every command prints one JSON [`Report`].
//!
//! Exit codes: 0 certificate/value/holds, 1 witness/fails, 2 usage or input
//! error, 3 numerical failure.

mod report;
mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

pub use report::{Report, Verdict};

use crate::instance::{
    combined_family, generate_convex_demo, generate_paper_example, parse_csv_matrix, parse_grid, parse_instance,
    InstanceError, Matrix, ProgramInstance,
};
use crate::konig::{check_infsup_convexity, konig_functional, mazur_orlicz_functional, KonigError, KonigOutcome, VerdictKind};
use crate::lp::{minimax, LpError};
use crate::multipliers::{check_saddle, fritz_john, kkt, slater_check, truncation_study, MultiplierError};
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_TOL: &str = "1e-9";
pub const PAPER_GRID: &str = "-2,-1,-0.5,0,0.5,1,2,10";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::Dimension(_) | LpError::NonFinite(_) => CliError::Input(e.to_string()),
            LpError::IterationLimit(_) | LpError::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<KonigError> for CliError {
    fn from(e: KonigError) -> Self {
        match e {
            KonigError::Dimension(_) | KonigError::Hypothesis { .. } => CliError::Input(e.to_string()),
            KonigError::Lp(lp) => lp.into(),
            KonigError::Inconclusive { .. } | KonigError::Verification(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<MultiplierError> for CliError {
    fn from(e: MultiplierError) -> Self {
        match e {
            MultiplierError::Lp(lp) => lp.into(),
            MultiplierError::Numerical(_) => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// Cubic family `-x^3/n`, objective `x`, optimum at 0.
    Paper,
    /// Objective `x^2` under the single constraint `x + 1 <= 0`.
    Convex,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Exact rational arithmetic instead of float64.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Tolerance; parsed exactly in `--exact` mode.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Program instance in JSON.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Matrix in CSV (for mazur-orlicz: one point per line).
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Built-in instance.
    #[arg(long, global = true)]
    pub example: Option<Example>,
    /// Comma-separated sample grid for `--example` and `study`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Truncation level for `--example paper`.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pure and mixed values of the matrix game.
    Minimax,
    /// Infsup-convexity verdict with a witness when it fails.
    Convexity,
    /// Functional Φ with f + alpha <= Φ(g) on the sample, or a witness.
    Konig {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: String,
    },
    /// Linear functional dominated by the coordinate maximum.
    MazurOrlicz,
    /// Fritz John multipliers at x0, or a witness that none exist.
    FritzJohn,
    /// KKT multiplier under the Slater condition, or a witness.
    Kkt,
    /// Saddle-point check of the Lagrangian at (x0, phi).
    Saddle {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
    },
    /// Strong and weak Slater conditions.
    Slater,
    /// Cubic family across truncation levels.
    Study {
        #[arg(long, default_value = "1,2,4,8")]
        ns: String,
    },
    /// Re-check a saved report by direct arithmetic.
    Verify {
        #[arg(long, value_name = "PATH")]
        report: PathBuf,
    },
}

#[derive(Debug, Parser)]
#[command(name = "infsup", version, about = "Minimax, infsup-convexity and multiplier certificates on sampled programs")]
pub struct Cli {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli).and_then(|report| emit(&report, cli.inputs.out.as_deref()).map(|_| report)) {
        Ok(report) => report.verdict.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    let text = report.to_json_string();
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command and builds its report.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    if let Command::Verify { report } = &cli.command {
        let saved = Report::parse(&read_file(report)?)?;
        return verify::verify_report(&saved, &cli.inputs);
    }
    if cli.inputs.exact {
        execute_with::<Rational>(&cli.command, &cli.inputs)
    } else {
        execute_with::<f64>(&cli.command, &cli.inputs)
    }
}

pub(crate) fn parse_tol<T: Scalar>(text: &str) -> Result<T, CliError> {
    let tol = T::parse_literal(text).map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
    if tol.is_negative() {
        return Err(CliError::Usage("--tol must be nonnegative".into()));
    }
    Ok(tol)
}

fn execute_with<T: Scalar>(command: &Command, inputs: &InputArgs) -> Result<Report, CliError> {
    let tol: T = parse_tol(inputs.tol.as_deref().unwrap_or(DEFAULT_TOL))?;
    let (name, verdict, payload) = match command {
        Command::Minimax => {
            let (a, _) = load_matrix::<T>(inputs)?;
            let game = minimax(&a, &tol)?;
            ("minimax", Verdict::Value, report::minimax_json(&game, a.n_rows(), a.n_cols()))
        }
        Command::Convexity => {
            let (a, labels) = load_matrix::<T>(inputs)?;
            let v = check_infsup_convexity(&a, &tol)?;
            let verdict = match v.kind {
                VerdictKind::ConvexOnSample => Verdict::Convex,
                VerdictKind::Witness => Verdict::Witness,
            };
            ("convexity", verdict, report::verdict_json(&v, labels.as_deref()))
        }
        Command::Konig { alpha } => {
            let inst = load_instance::<T>(inputs)?;
            let alpha = T::parse_literal(alpha).map_err(|e| CliError::Usage(format!("--alpha: {e}")))?;
            let out = konig_functional(inst.objective(), inst.constraints(), &alpha, &tol)?;
            let mut payload = json!({ "alpha": alpha.to_json() });
            let verdict = match out {
                KonigOutcome::Functional(phi) => {
                    payload["outcome"] = json!("functional");
                    payload["phi"] = report::vec_json(phi.weights());
                    Verdict::Certificate
                }
                KonigOutcome::Witness(w) => {
                    payload["outcome"] = json!("witness");
                    payload["witness"] = report::witness_json(&w, Some(inst.x_labels()));
                    Verdict::Witness
                }
            };
            ("konig", verdict, payload)
        }
        Command::MazurOrlicz => {
            let points = load_points::<T>(inputs)?;
            let m = mazur_orlicz_functional(&points, &tol)?;
            ("mazur-orlicz", Verdict::Value, report::mazur_orlicz_json(&m))
        }
        Command::FritzJohn => {
            let inst = load_instance::<T>(inputs)?;
            let (verdict, payload) = report::outcome_json(&fritz_john(&inst, &tol)?, &inst);
            ("fritz-john", verdict, payload)
        }
        Command::Kkt => {
            let inst = load_instance::<T>(inputs)?;
            let (verdict, mut payload) = report::outcome_json(&kkt(&inst, &tol)?, &inst);
            payload["slater"] = report::slater_json(&slater_check(&inst, &tol), inst.x_labels());
            ("kkt", verdict, payload)
        }
        Command::Saddle { phi } => {
            let inst = load_instance::<T>(inputs)?;
            let phi = parse_grid::<T>(phi).map_err(|e| CliError::Usage(format!("--phi: {e}")))?;
            let s = check_saddle(&inst, &phi, &tol)?;
            ("saddle", Verdict::holds(s.is_saddle()), report::saddle_json(&s, &phi))
        }
        Command::Slater => {
            let inst = load_instance::<T>(inputs)?;
            let s = slater_check(&inst, &tol);
            ("slater", Verdict::holds(s.strong_holds), report::slater_json(&s, inst.x_labels()))
        }
        Command::Study { ns } => {
            let ns = parse_levels(ns)?;
            let grid = parse_grid::<T>(inputs.grid.as_deref().unwrap_or(PAPER_GRID))?;
            let study = truncation_study(&ns, &grid, &tol)?;
            ("study", Verdict::holds(study.trend_holds), report::study_json(&study, &grid))
        }
        Command::Verify { .. } => unreachable!("handled by execute"),
    };
    Ok(Report::new(name, verdict, payload, &tol))
}

fn parse_levels(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--ns: `{}` is not a truncation level", s.trim())))
        })
        .collect()
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn convex_grid<T: Scalar>() -> Vec<T> {
    (-12..=4).map(|k| T::from_i64(k) / T::from_i64(4)).collect()
}

fn check_single_source(inputs: &InputArgs) -> Result<(), CliError> {
    let given = [inputs.json.is_some(), inputs.csv.is_some(), inputs.example.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    match given {
        0 => Err(CliError::Usage("one of --json, --csv or --example is required".into())),
        1 => Ok(()),
        _ => Err(CliError::Usage("--json, --csv and --example are mutually exclusive".into())),
    }
}

pub(crate) fn load_instance<T: Scalar>(inputs: &InputArgs) -> Result<ProgramInstance<T>, CliError> {
    check_single_source(inputs)?;
    if let Some(path) = &inputs.json {
        return Ok(parse_instance(&read_file(path)?)?);
    }
    match inputs.example {
        Some(Example::Paper) => {
            let grid = parse_grid::<T>(inputs.grid.as_deref().unwrap_or(PAPER_GRID))?;
            let n = inputs.n.unwrap_or(1);
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            Ok(generate_paper_example(n, &grid)?)
        }
        Some(Example::Convex) => {
            let grid = match &inputs.grid {
                Some(text) => parse_grid::<T>(text)?,
                None => convex_grid(),
            };
            Ok(generate_convex_demo(&grid)?)
        }
        None => Err(CliError::Usage("this command needs a program instance (--json or --example)".into())),
    }
}

/// The CSV matrix as given, or the combined family of an instance.
pub(crate) fn load_matrix<T: Scalar>(inputs: &InputArgs) -> Result<(Matrix<T>, Option<Vec<String>>), CliError> {
    check_single_source(inputs)?;
    if let Some(path) = &inputs.csv {
        return Ok((parse_csv_matrix(&read_file(path)?)?, None));
    }
    let inst = load_instance::<T>(inputs)?;
    Ok((combined_family(&inst)?, Some(inst.x_labels().to_vec())))
}

/// CSV lines as points, or the columns of an instance's combined family.
pub(crate) fn load_points<T: Scalar>(inputs: &InputArgs) -> Result<Vec<Vec<T>>, CliError> {
    check_single_source(inputs)?;
    if let Some(path) = &inputs.csv {
        return Ok(parse_csv_matrix::<T>(&read_file(path)?)?.rows().to_vec());
    }
    let (a, _) = load_matrix::<T>(inputs)?;
    Ok((0..a.n_cols()).map(|j| a.column(j)).collect())
}
