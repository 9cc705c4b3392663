//! Command-line driver for the renorm-core suites. Every subcommand writes a
//! JSON report that embeds its own configuration; the exit code is 0 when
//! every assertion passed, 1 on an assertion failure, 2 on a configuration
//! error and 3 on a numerical failure.

pub mod algebra;
pub mod battery;
pub mod kernels;
pub mod probability;
pub mod report;
pub mod simulation;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

use renorm_core::finitevol::FvError;
use renorm_core::graphcalc::GraphCalcError;
use renorm_core::kernels::KernelError;
use renorm_core::opalgebra::OpError;
use renorm_core::probtools::ProbError;

pub use algebra::{ConstantsKind, GraphsArgs, OffsetsArgs, Suite, VerifyArgs};
pub use battery::{VerifyAllArgs, WATSON_G0};
pub use kernels::{ConstantsArgs, GeometryKind, KernelArgs, KernelFormat};
pub use probability::{ProbSuite, ProbabilityArgs};
pub use simulation::{BoundaryKind, ExtstateArgs, SimulateArgs, StageArg};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "RENORM_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "renorm-lab",
    version,
    about = "Verification laboratory for the sixth-order renormalized random Schrödinger operator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// σ, ρ, η and their defining residuals for one kernel.
    Constants(ConstantsArgs),
    /// Kernel values on the nonnegative orthant (CSV or JSON).
    Kernel(KernelArgs),
    /// Order-6/7 coefficient tables against the published rows.
    Graphs(GraphsArgs),
    /// Offset cancellation certificates and the η negative control.
    VerifyOffsets(OffsetsArgs),
    /// Operator identities on a ring, or the summation lemmas.
    Verify(VerifyArgs),
    /// Bonami and generalized Khintchine checks by exact enumeration.
    Probability(ProbabilityArgs),
    /// Green's-function decay survey on a finite box.
    Simulate(SimulateArgs),
    /// Extended-state κ sweep.
    Extstate(ExtstateArgs),
    /// The full acceptance battery.
    VerifyAll(VerifyAllArgs),
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Io(_) => 2,
            LabError::Numerical(_) => 3,
        }
    }
}

impl From<KernelError> for LabError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::DimensionTooSmall(_)
            | KernelError::ParameterViolation(_)
            | KernelError::InvalidParameter(_) => LabError::Config(e.to_string()),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}

impl From<FvError> for LabError {
    fn from(e: FvError) -> Self {
        match e {
            FvError::InvalidParameter(_) | FvError::TooLarge(_) => LabError::Config(e.to_string()),
            FvError::Kernel(k) => k.into(),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}

impl From<OpError> for LabError {
    fn from(e: OpError) -> Self {
        match e {
            OpError::UnknownToken(_)
            | OpError::MalformedWord(_)
            | OpError::TooLarge(_)
            | OpError::DegreeOverflow(_)
            | OpError::InvalidParameter(_) => LabError::Config(e.to_string()),
            OpError::Kernel(k) => k.into(),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}

impl From<ProbError> for LabError {
    fn from(e: ProbError) -> Self {
        LabError::Config(e.to_string())
    }
}

impl From<GraphCalcError> for LabError {
    fn from(e: GraphCalcError) -> Self {
        match e {
            GraphCalcError::OrderOutOfRange(_) => LabError::Config(e.to_string()),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}

/// What a suite produced: pass flag, one-line summary, report body.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub report: Value,
}

fn configure_threads() -> Result<(), LabError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Config(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(name: &str, args: &impl serde::Serialize, out: Option<&PathBuf>, o: &Outcome) -> Result<(), LabError> {
    if let Some(path) = out {
        let cfg = report::RunConfig::new(name, args)?;
        let body = report::envelope(&cfg, o.pass, o.report.clone())?;
        report::write_atomic(path, &report::to_json(&body))?;
    }
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<Outcome, LabError> {
    match cmd {
        Command::Constants(a) => {
            let o = kernels::constants(a)?;
            emit("constants", a, a.out.as_ref(), &o)?;
            Ok(o)
        }
        Command::Kernel(a) => kernels::kernel(a),
        Command::Graphs(a) => {
            let o = algebra::graphs(a)?;
            emit("graphs", a, a.emit.as_ref(), &o)?;
            Ok(o)
        }
        Command::VerifyOffsets(a) => {
            let o = algebra::offsets(a)?;
            emit("verify-offsets", a, a.emit.as_ref(), &o)?;
            Ok(o)
        }
        Command::Verify(a) => {
            let o = algebra::verify(a)?;
            emit("verify", a, a.report.as_ref(), &o)?;
            Ok(o)
        }
        Command::Probability(a) => {
            let o = probability::probability(a)?;
            emit("probability", a, a.report.as_ref(), &o)?;
            Ok(o)
        }
        Command::Simulate(a) => {
            let o = simulation::simulate(a)?;
            emit("simulate", a, a.out.as_ref(), &o)?;
            Ok(o)
        }
        Command::Extstate(a) => {
            let o = simulation::extstate(a)?;
            emit("extstate", a, a.out.as_ref(), &o)?;
            Ok(o)
        }
        Command::VerifyAll(a) => battery::verify_all(a),
    }
}

/// Parse `argv`, run the subcommand and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("renorm-lab: {e}");
        return e.exit_code();
    }
    match dispatch(&cli.command) {
        Ok(o) => {
            eprintln!("{} {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("renorm-lab: {e}");
            e.exit_code()
        }
    }
}
