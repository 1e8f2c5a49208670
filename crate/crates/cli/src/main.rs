use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqm_core::harness::{run_suite, Suite, SuiteSpec};
use fqm_core::heisenberg::{gamma_p, HWParams};
use fqm_core::magnetic::{j_odd, j_twisted, TorusPoint};
use fqm_core::matrix::{Backend, OpMatrix};
use fqm_core::metaplectic::{u_general, weil_odd_general};
use fqm_core::sl2::SL2Literal;
use fqm_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "fqm", version, about = "Finite Heisenberg-Weyl and metaplectic operators, with verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(flatten)]
    Matrix(MatrixCommand),
    /// Run a verification suite and print its JSON report.
    Verify(VerifyArgs),
    /// Write a matrix as JSON or CSV.
    Export(ExportArgs),
}

#[derive(Subcommand, Clone)]
enum MatrixCommand {
    /// Heisenberg-Weyl element z^m x^r y^s in the label-p representation.
    Gamma {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        backend: Option<Backend>,
    },
    /// Magnetic translation J_{r,s}: twisted for N = 2^n, or odd-N with --odd-N.
    Jrs {
        #[arg(long, required_unless_present = "odd_n")]
        n: Option<u32>,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long = "odd-N", conflicts_with = "n")]
        odd_n: Option<u64>,
        #[arg(long)]
        backend: Option<Backend>,
    },
    /// Metaplectic operator U(A) for N = 2^n.
    U {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        p: u64,
        /// Element literal a,b,c,d (reduced mod N).
        #[arg(long, allow_hyphen_values = true)]
        elem: SL2Literal,
        #[arg(long)]
        backend: Option<Backend>,
    },
    /// Weil operator U(A) for an odd prime N (floating point).
    WeilOdd {
        #[arg(long = "N")]
        modulus: u64,
        #[arg(long, allow_hyphen_values = true)]
        elem: SL2Literal,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, conflicts_with = "modulus")]
    n: Option<u32>,
    #[arg(long = "N")]
    modulus: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    /// Sample count; omitted means exhaustive where the suite allows.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "FQM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    backend: Option<Backend>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the wall time to stderr.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    matrix: MatrixCommand,
}

fn even_params(n: u32, p: u64) -> Result<HWParams, Error> {
    HWParams::qubits(n, p)
}

fn default_backend(n: u32, backend: Option<Backend>) -> Backend {
    backend.unwrap_or(if n <= 3 { Backend::Exact } else { Backend::Float })
}

fn build(cmd: &MatrixCommand) -> Result<OpMatrix, Error> {
    match cmd {
        MatrixCommand::Gamma { n, p, m, r, s, backend } => {
            let params = even_params(*n, *p)?;
            gamma_p(&params, params.zmod(*m), params.zmod(*r), params.zmod(*s), default_backend(*n, *backend))
        }
        MatrixCommand::Jrs { n, p, r, s, odd_n, backend } => match (odd_n, n) {
            (Some(modulus), _) => {
                HWParams::odd_prime(*modulus)?;
                let pt = TorusPoint::from_ints(*r, *s, *modulus)?;
                j_odd(*modulus, pt, backend.unwrap_or(Backend::Exact))
            }
            (None, Some(n)) => {
                let params = even_params(*n, *p)?;
                let pt = TorusPoint::from_ints(*r, *s, params.modulus())?;
                j_twisted(&params, pt, default_backend(*n, *backend))
            }
            (None, None) => Err(Error::InvalidParams("jrs needs --n or --odd-N".into())),
        },
        MatrixCommand::U { n, p, elem, backend } => {
            let params = even_params(*n, *p)?;
            let elem = elem.reduce(params.modulus())?;
            u_general(&params, &elem, default_backend(*n, *backend))
        }
        MatrixCommand::WeilOdd { modulus, elem } => {
            let elem = elem.reduce(*modulus)?;
            weil_odd_general(*modulus, &elem)
        }
    }
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_USAGE)
}

fn write_out(path: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().write_all(bytes),
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    let suite: Suite = match args.suite.parse() {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let spec = SuiteSpec {
        suite,
        n: args.n,
        modulus: args.modulus,
        p: args.p,
        samples: args.samples,
        seed: args.seed,
        backend: args.backend,
        tol: args.tol,
    };
    let report = match run_suite(&spec) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let mut json = report.to_json_pretty();
    json.push('\n');
    if let Err(e) = write_out(args.out.as_ref(), json.as_bytes()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAIL);
    }
    if args.out.is_some() {
        println!(
            "{}: {} checks, {} failures, {}",
            report.suite,
            report.checks_run,
            report.failure_count,
            if report.passed { "passed" } else { "FAILED" }
        );
    }
    if args.timing {
        eprintln!("runtime_ms: {}", report.runtime_ms);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn export(args: ExportArgs) -> ExitCode {
    let m = match build(&args.matrix) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    let bytes = match args.format {
        Format::Json => {
            let mut s = m.to_json();
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => match m.to_csv() {
            Ok(s) => s.into_bytes(),
            Err(e) => return usage(e),
        },
    };
    match write_out(args.out.as_ref(), &bytes) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Matrix(cmd) => match build(&cmd) {
            Ok(m) => {
                print!("{m}");
                ExitCode::SUCCESS
            }
            Err(e) => usage(e),
        },
        Command::Verify(args) => verify(args),
        Command::Export(args) => export(args),
    }
}
