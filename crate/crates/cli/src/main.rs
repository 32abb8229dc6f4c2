//! Command-line harness for the block operator toolkit.
//!
//! Subcommands: `solve-sylvester`, `solve-riccati`, `diagonalize`,
//! `verify-tpi`, `oscillator`, `sweep`, `reproduce`. Matrices and reports
//! travel as JSON documents (matrix schema: `rows`, `cols`, `entries` as
//! flat row-major `[re, im]` pairs); sweeps can emit CSV.
//!
//! Exit codes: 0 when all assertions pass, 1 on usage/config/hypothesis
//! errors, 2 when a guarantee fails inside the asserted regime.
//!
//! `BLOCKOP_TOL` overrides the Riccati fixed-point tolerance (default
//! 1e-12) for every solver-backed subcommand.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use blockop::harness::{
    self, ExperimentConfig, OutputFormat, ReproduceId, ReproduceParams, Tolerances,
};
use blockop::krein::KreinError;
use blockop::linalg::CMatrix;
use blockop::oscillator::{self, PTPotential};
use blockop::riccati::{self, BlockOperator};
use blockop::sylvester::{self, SylvesterProblem};
use blockop::decomp;

#[derive(Parser)]
#[command(
    name = "blockop",
    version,
    about = "Sylvester/Riccati solvers, block diagonalization and spectral subspace bounds \
             for 2x2 block operator matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Kron,
    Contour,
    Semigroup,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReproduceArg {
    Ex1,
    Ex2,
    Exns,
}

#[derive(Subcommand)]
enum Command {
    /// Solve X A0 - A1 X = Y by the chosen method
    SolveSylvester {
        #[arg(long)]
        a0: PathBuf,
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Certified bound ‖S⁻¹‖ ≤ 1/delta (required by the semigroup method)
        #[arg(long)]
        delta: Option<f64>,
        /// Starting node count for the contour method
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Riccati equation of a block operator document
    SolveRiccati {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Solve the dual equation K'A1 - A0K' + K'CK' = B instead
        #[arg(long)]
        dual: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block diagonalization L = W diag(Z0, Z1) W⁻¹ with angles and residuals
    Diagonalize {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify reality, enclosures and the angle bound for a J-self-adjoint block operator
    VerifyTpi {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated PT-symmetric harmonic oscillator case study
    Oscillator {
        /// Truncation level (number of Hermite states)
        #[arg(long)]
        n: usize,
        /// Potential amplitude
        #[arg(long)]
        beta: f64,
        /// builtin:xgauss or file:<path> (JSON {"coeffs": [...], "gauss": bool})
        #[arg(long, default_value = "builtin:xgauss")]
        potential: String,
        #[arg(long)]
        quad_points: Option<usize>,
        /// Include the truncated block matrices in the report
        #[arg(long)]
        emit_matrices: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configuration-driven sweep
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rebuild a reference example and check it against its closed forms
    Reproduce {
        #[arg(value_enum)]
        id: ReproduceArg,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output is not an error.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code)
        }
    }
}

struct CliError {
    message: String,
    exit_code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit_code: 1 }
    }

    fn assertion(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit_code: 2 }
    }
}

/// A broken guarantee (as opposed to bad usage or an unmet hypothesis)
/// maps to exit code 2.
fn is_assertion(e: &dyn std::any::Any) -> bool {
    use blockop::decomp::DecompError;
    use blockop::harness::HarnessError;
    use blockop::oscillator::OscillatorError;
    use blockop::riccati::RiccatiError;

    fn decomp_assertion(e: &DecompError) -> bool {
        matches!(
            e,
            DecompError::SimilarityResidual { .. }
                | DecompError::EnclosureViolated { .. }
                | DecompError::SpectrumMismatch(_)
        ) || matches!(e, DecompError::Riccati(r) if riccati_assertion(r))
    }
    fn riccati_assertion(e: &RiccatiError) -> bool {
        matches!(e, RiccatiError::VerificationFailed(_))
    }
    fn krein_assertion(e: &KreinError) -> bool {
        match e {
            KreinError::AssertionFailure { .. } => true,
            KreinError::Decomp(d) => decomp_assertion(d),
            KreinError::Riccati(r) => riccati_assertion(r),
            _ => false,
        }
    }

    if let Some(e) = e.downcast_ref::<KreinError>() {
        return krein_assertion(e);
    }
    if let Some(e) = e.downcast_ref::<HarnessError>() {
        return match e {
            HarnessError::MismatchWithClosedForm(_) => true,
            HarnessError::Krein(k) => krein_assertion(k),
            HarnessError::Decomp(d) => decomp_assertion(d),
            HarnessError::Riccati(r) => riccati_assertion(r),
            _ => false,
        };
    }
    if let Some(e) = e.downcast_ref::<OscillatorError>() {
        return match e {
            OscillatorError::Krein(k) => krein_assertion(k),
            OscillatorError::Riccati(r) => riccati_assertion(r),
            _ => false,
        };
    }
    if let Some(e) = e.downcast_ref::<DecompError>() {
        return decomp_assertion(e);
    }
    if let Some(e) = e.downcast_ref::<RiccatiError>() {
        return riccati_assertion(e);
    }
    false
}

macro_rules! impl_from_error {
    ($($ty:ty),+) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                let code = if is_assertion(&e) { 2 } else { 1 };
                Self { message: e.to_string(), exit_code: code }
            }
        }
    )+};
}

impl_from_error!(
    blockop::harness::HarnessError,
    blockop::krein::KreinError,
    blockop::oscillator::OscillatorError,
    blockop::riccati::RiccatiError,
    blockop::sylvester::SylvesterError,
    blockop::decomp::DecompError,
    blockop::linalg::LinalgError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::usage(format!("document: {e}"))
    }
}

fn env_tolerances() -> Result<Tolerances, CliError> {
    match std::env::var("BLOCKOP_TOL") {
        Ok(s) => {
            let tol: f64 = s
                .parse()
                .map_err(|_| CliError::usage(format!("BLOCKOP_TOL is not a number: {s}")))?;
            if tol.is_nan() || tol <= 0.0 {
                return Err(CliError::usage("BLOCKOP_TOL must be positive"));
            }
            Ok(Tolerances { solver_tol: Some(tol), max_iter: None })
        }
        Err(_) => Ok(Tolerances::default()),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(CliError::from)
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = env_tolerances()?;
    match cli.command {
        Command::SolveSylvester { a0, a1, y, method, delta, nodes, out } => {
            let problem = SylvesterProblem::new(
                read_json::<CMatrix>(&a0)?,
                read_json::<CMatrix>(&a1)?,
                read_json::<CMatrix>(&y)?,
            )?;
            let solution = match method {
                MethodArg::Kron => sylvester::solve_kron(&problem)?,
                MethodArg::Contour => sylvester::solve_contour(
                    &problem,
                    nodes.unwrap_or_else(sylvester::contour_default_nodes),
                )?,
                MethodArg::Semigroup => {
                    let delta = delta.ok_or_else(|| {
                        CliError::usage("--delta is required for the semigroup method")
                    })?;
                    sylvester::solve_semigroup(&problem, delta)?
                }
            };
            emit(&solution, out.as_ref())
        }
        Command::SolveRiccati { block, delta, dual, out } => {
            let op: BlockOperator = read_json(&block)?;
            let solution = if dual {
                riccati::solve_dual(&op, delta, tol.solver_tol(), tol.max_iter())?
            } else {
                riccati::solve_fixed_point(&op, delta, tol.solver_tol(), tol.max_iter())?
            };
            emit(&solution, out.as_ref())
        }
        Command::Diagonalize { block, delta, out } => {
            let op: BlockOperator = read_json(&block)?;
            let diag = decomp::block_diagonalize_tol(&op, delta, tol.solver_tol(), tol.max_iter())?;
            emit(&diag, out.as_ref())
        }
        Command::VerifyTpi { block, out } => {
            let op: BlockOperator = read_json(&block)?;
            let report = verify_with_tol(&op, &tol)?;
            emit(&report, out.as_ref())
        }
        Command::Oscillator { n, beta, potential, quad_points, emit_matrices, out } => {
            let model = oscillator::build_model(n)?;
            let pot = parse_potential(&potential, beta)?;
            let quad = quad_points.unwrap_or_else(|| oscillator::default_quad_points(n));
            let (report, op) =
                oscillator::run_case_tol(&model, &pot, quad, tol.solver_tol(), tol.max_iter())?;
            if emit_matrices {
                #[derive(Serialize)]
                struct WithMatrices<'a> {
                    report: &'a blockop::krein::KreinReport,
                    operator: &'a BlockOperator,
                }
                emit(&WithMatrices { report: &report, operator: &op }, out.as_ref())
            } else {
                emit(&report, out.as_ref())
            }
        }
        Command::Sweep { config } => {
            let doc: SweepConfigDoc = read_json(&config)?;
            let mut experiment = doc.experiment;
            if experiment.tolerances.solver_tol.is_none() {
                experiment.tolerances.solver_tol = tol.solver_tol;
            }
            let table = harness::run_sweep(&experiment)?;
            let format = doc.output.as_ref().map(|o| o.format).unwrap_or(OutputFormat::Csv);
            let path = doc.output.as_ref().map(|o| o.path.clone());
            match format {
                OutputFormat::Csv => {
                    let csv = harness::sweep_to_csv(&table);
                    match path {
                        Some(p) => fs::write(p, csv)?,
                        None => print!("{csv}"),
                    }
                }
                OutputFormat::Report => emit(&table, path.as_ref())?,
            }
            if !table.all_guaranteed_pass {
                return Err(CliError::assertion(
                    "sweep contains failing cells inside the guaranteed regime",
                ));
            }
            Ok(())
        }
        Command::Reproduce { id, d, b, c, out } => {
            let id = match id {
                ReproduceArg::Ex1 => ReproduceId::Ex1,
                ReproduceArg::Ex2 => ReproduceId::Ex2,
                ReproduceArg::Exns => ReproduceId::Exns,
            };
            let mut params = ReproduceParams::defaults_for(id);
            if let Some(d) = d {
                params.d = d;
            }
            if let Some(b) = b {
                params.b = b;
                if c.is_none() && id != ReproduceId::Exns {
                    params.c = Some(b);
                }
            }
            if let Some(c) = c {
                params.c = Some(c);
            }
            let report = harness::reproduce(id, params, &tol)?;
            emit(&report, out.as_ref())
        }
    }
}

fn verify_with_tol(
    op: &BlockOperator,
    tol: &Tolerances,
) -> Result<blockop::krein::KreinReport, KreinError> {
    let spec0 = blockop::linalg::hermitian_eig(op.a0())?.eigenvalues;
    let spec1 = blockop::linalg::hermitian_eig(op.a1())?.eigenvalues;
    let guarantee = sylvester::guarantee(&spec0, &spec1)?;
    blockop::krein::verify_tpi_tol(op, guarantee, tol.solver_tol(), tol.max_iter())
}

/// Sweep configuration document: the experiment plus an optional output
/// destination.
#[derive(Deserialize)]
struct SweepConfigDoc {
    #[serde(flatten)]
    experiment: ExperimentConfig,
    #[serde(default)]
    output: Option<OutputSpec>,
}

#[derive(Deserialize)]
struct OutputSpec {
    path: PathBuf,
    format: OutputFormat,
}

#[derive(Deserialize)]
struct PotentialFile {
    coeffs: Vec<f64>,
    #[serde(default)]
    gauss: bool,
}

fn parse_potential(spec: &str, beta: f64) -> Result<PTPotential, CliError> {
    if spec == "builtin:xgauss" {
        return Ok(PTPotential::xgauss(beta));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let file: PotentialFile = read_json(&PathBuf::from(path))?;
        for (i, &c) in file.coeffs.iter().enumerate() {
            if i % 2 == 0 && c != 0.0 {
                return Err(CliError::usage(format!(
                    "potential polynomial must be odd; coefficient of x^{i} is {c}"
                )));
            }
        }
        let coeffs = file.coeffs.clone();
        let gauss = file.gauss;
        let b = move |x: f64| {
            let mut acc = 0.0;
            let mut pw = 1.0;
            for &c in &coeffs {
                acc += c * pw;
                pw *= x;
            }
            if gauss {
                acc * (-0.5 * x * x).exp()
            } else {
                acc
            }
        };
        return PTPotential::odd_only(Box::new(b), beta)
            .map_err(|e| CliError::usage(e.to_string()));
    }
    Err(CliError::usage(format!(
        "unknown potential spec '{spec}' (expected builtin:xgauss or file:<path>)"
    )))
}
