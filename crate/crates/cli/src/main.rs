//! `isotopy`: JSON-in, JSON-out front end to the isotopy library.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use isotopy::batch::Sampler;
use isotopy::{Backend, Error};
use serde_json::Value;

use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "isotopy", version, about = "Hurwitz algebras, their isotopes and their classification")]
struct Cli {
    /// JSON file of named algebras: {"algebras": {"id": {"dim", "params", "backend"}}}
    #[arg(long, global = true)]
    session: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algebra construction.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Norm, trace, conjugate and inverse of an element, and optionally a product.
    Element(ElementArgs),
    /// Build or inspect a linear map.
    Map(MapArgs),
    /// Principal isotopes.
    #[command(subcommand)]
    Isotope(IsotopeCmd),
    /// Similitude certificates.
    #[command(subcommand)]
    Similitude(SimilitudeCmd),
    /// Triality components.
    #[command(subcommand)]
    Triality(TrialityCmd),
    /// Polar factorisation of an invertible map (approximate backend).
    Polar(MapInput),
    /// Factor a special orthogonal map of the quaternions as L_p R_q.
    #[command(name = "so4-factor")]
    So4Factor(MapInput),
    /// Canonical forms.
    #[command(subcommand)]
    Classify(ClassifyCmd),
    /// Decide whether two isotopes or canonical forms are isomorphic.
    IsoTest(IsoTestArgs),
    /// Find s with s a s⁻¹ ∝ a' and s b s⁻¹ ∝ b' for quaternion pairs.
    PairConjugacy(PairArgs),
    /// Brute-force identity checks over random exact elements.
    Oracle(OracleArgs),
    /// Batch drivers.
    #[command(subcommand)]
    Batch(BatchCmd),
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    /// Build the algebra with the given Cayley-Dickson parameters.
    New {
        /// Comma-separated parameters, e.g. `-1,-1`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<String>,
        #[arg(long, default_value = "exact")]
        backend: Backend,
    },
}

#[derive(Args, Debug)]
struct ElementArgs {
    #[arg(long)]
    element: PathBuf,
    /// Second element; the product element * times is reported.
    #[arg(long)]
    times: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct MapSource {
    /// Map given by its rows.
    #[arg(long, group = "source")]
    map: Option<PathBuf>,
    /// Left multiplication by the element in this file.
    #[arg(long, group = "source")]
    left: Option<PathBuf>,
    /// Right multiplication by the element in this file.
    #[arg(long, group = "source")]
    right: Option<PathBuf>,
    /// Inner automorphism x ↦ s x s⁻¹ by the element in this file.
    #[arg(long, group = "source")]
    inner: Option<PathBuf>,
    #[arg(long, group = "source")]
    identity: bool,
    #[arg(long, group = "source")]
    conjugation: bool,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[command(flatten)]
    source: MapSource,
    /// Algebra id or inline JSON; needed when the input does not name one.
    #[arg(long)]
    algebra: Option<String>,
}

#[derive(Args, Debug)]
struct MapInput {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    algebra: Option<String>,
}

#[derive(Subcommand, Debug)]
enum IsotopeCmd {
    /// Isotope from two map files.
    New {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        beta: PathBuf,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Identity element, if the isotope is unital.
    Identity {
        #[arg(long)]
        isotope: PathBuf,
    },
    /// Determinant classes of α and β.
    DoubleSign {
        #[arg(long)]
        isotope: PathBuf,
        /// Power whose cosets are used instead of the default.
        #[arg(long)]
        exponent: Option<u32>,
    },
    /// Nuclear w with (γ, δ) = (R_w⁻¹ α, L_w β), if it exists.
    Same {
        #[arg(long)]
        isotope: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Transport an isotope along a proper similitude.
    Transport {
        #[arg(long)]
        isotope: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        /// Triality triple for phi; computed when absent.
        #[arg(long)]
        triple: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum SimilitudeCmd {
    /// Multiplier, properness and residual of a similitude.
    Check(MapInput),
}

#[derive(Subcommand, Debug)]
enum TrialityCmd {
    /// Components (φ₁, φ₂) of a proper similitude.
    Solve {
        #[command(flatten)]
        input: MapInput,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Residual of a triality triple.
    Verify {
        #[arg(long)]
        triple: PathBuf,
    },
    /// Nuclear element relating two triples of the same map.
    Align {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ClassifyCmd {
    /// Canonical form of an isotope of Euclidean quaternions.
    Quaternion {
        #[arg(long)]
        isotope: PathBuf,
    },
    /// Canonical form of a four-dimensional composition isotope.
    Composition {
        #[arg(long)]
        isotope: PathBuf,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormKind {
    Quaternion,
    Composition,
}

#[derive(Args, Debug)]
struct IsoTestArgs {
    /// Isotope or canonical form.
    #[arg(long)]
    first: PathBuf,
    #[arg(long)]
    second: PathBuf,
    /// How isotopes are canonicalised; defaults to `quaternion` on the
    /// approximate backend and `composition` on the exact one.
    #[arg(long, value_enum)]
    kind: Option<FormKind>,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// {"algebra", "first": [a, b], "second": [a', b']} with coordinate lists.
    #[arg(long)]
    pairs: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// norm-multiplicativity, alternativity, moufang, conjugation or identity-round-trip.
    property: String,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Cayley-Dickson parameters; all -1 when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<String>>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum BatchCmd {
    /// Canonicalise random isotopes and bucket them by class.
    Classify {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "composition")]
        sampler: Sampler,
        #[arg(long, default_value = "exact")]
        backend: Backend,
    },
}

/// Failure of a command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::ParseScalar(_)
                | Error::DimensionMismatch { .. }
                | Error::ParameterCount(_) => 2,
                Error::BackendMismatch { .. } | Error::ExactUnsupported(_) => 3,
                Error::TrialitySolverFailed { .. } => 4,
                _ => 1,
            },
        }
    }
}

fn verdict_label(e: &Error) -> &'static str {
    match e {
        Error::NotUnital(_) => "not-unital",
        Error::NotSimilitude { .. } => "not-similitude",
        Error::Distinct(_) => "distinct",
        Error::NotComposition(_) => "not-composition",
        Error::NotRelated(_) => "not-related",
        Error::NotInner(_) => "not-inner",
        Error::NotConjugate => "not-conjugate",
        Error::NotInvertible { .. } => "not-invertible",
        Error::ImproperSimilitude => "improper-similitude",
        Error::IsotropicIdentity => "isotropic-identity",
        _ => "error",
    }
}

/// Subcommand path (e.g. `isotope identity`) and the arguments given.
fn describe(matches: &ArgMatches) -> (String, Vec<(String, Value)>) {
    let mut names = Vec::new();
    let mut inputs = Vec::new();
    let mut command = Cli::command();
    let mut m = matches;
    loop {
        for arg in command.get_arguments() {
            let id = arg.get_id().as_str();
            if let Ok(Some(raw)) = m.try_get_raw(id) {
                let mut values: Vec<Value> = raw.map(|v| Value::String(v.to_string_lossy().into_owned())).collect();
                let value = if values.len() == 1 { values.remove(0) } else { Value::Array(values) };
                inputs.push((id.to_string(), value));
            }
        }
        let Some((name, sub)) = m.subcommand() else { break };
        names.push(name.to_string());
        command = command.find_subcommand(name).expect("matched subcommands exist").clone();
        m = sub;
    }
    (names.join(" "), inputs)
}

struct Output {
    stdout: Option<String>,
    stderr: Option<String>,
    code: u8,
}

fn failure(operation: &str, e: CliError) -> Output {
    let body = serde_json::json!({ "operation": operation, "error": e.to_string(), "exit_code": e.exit_code() });
    Output {
        stdout: Some(serde_json::to_string_pretty(&body).expect("error report serialises")),
        stderr: Some(format!("error: {e}")),
        code: e.exit_code(),
    }
}

fn run(args: Vec<OsString>) -> Output {
    let parsed = Cli::command().try_get_matches_from(args).and_then(|m| Ok((Cli::from_arg_matches(&m)?, m)));
    let (cli, matches) = match parsed {
        Ok(pair) => pair,
        Err(e) if e.use_stderr() => return Output { stdout: None, stderr: Some(e.render().to_string()), code: 2 },
        Err(e) => return Output { stdout: Some(e.render().to_string()), stderr: None, code: 0 },
    };
    let (operation, inputs) = describe(&matches);
    let ctx = match commands::Context::new(cli.session.as_deref()) {
        Ok(ctx) => ctx,
        Err(e) => return failure(&operation, e),
    };
    let result = commands::execute(&ctx, &operation, cli.command).or_else(|e| match e {
        CliError::Core(core) if core.is_verdict() => {
            Ok(Report::new(&operation, verdict_label(&core), ctx.tol).reason(core.to_string()))
        }
        other => Err(other),
    });
    match result {
        Ok(mut report) => {
            report.inputs.extend(inputs);
            Output { stdout: Some(report.to_json()), stderr: None, code: 0 }
        }
        Err(e) => failure(&operation, e),
    }
}

fn main() -> ExitCode {
    let out = run(std::env::args_os().collect());
    // A closed pipe is not worth a panic.
    if let Some(s) = out.stdout {
        let _ = writeln!(std::io::stdout(), "{}", s.trim_end());
    }
    if let Some(s) = out.stderr {
        let _ = writeln!(std::io::stderr(), "{}", s.trim_end());
    }
    ExitCode::from(out.code)
}
