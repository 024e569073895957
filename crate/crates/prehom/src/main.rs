use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use prehom::commands::{self, AlgebraKind, ApproximateArgs, CommandError, SignArg};
use prehom::format::{parse_target, read_form, read_text};
use prehom::parallel::RayonEvaluator;
use prehom::pretty;

#[derive(Parser)]
#[command(name = "prehom", version, about = "Invariants, orbits and lattice bases for alternating forms")]
struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named representative as a form file.
    Rep {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Relative invariants of a form.
    Invariant { form: PathBuf },
    /// Real orbit, k(x) and irrationality flags.
    Classify {
        form: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_den: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Stabilizer Lie algebra.
    Stab {
        form: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Forms fixed by the stabilizer Lie algebra.
    Fixed {
        form: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Octonion algebras attached to trivectors in dimension 7.
    Octonion {
        #[command(subcommand)]
        what: OctonionCommand,
    },
    /// Extend a partial target to a semistable point of a chosen real orbit.
    Perturb {
        case: u8,
        target: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "+", allow_hyphen_values = true)]
        sign: SignArg,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Beam search for an integral basis on which x approximates a target.
    Approximate {
        x: PathBuf,
        target: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        beam: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Move the target onto the real orbit of x first.
        #[arg(long)]
        via_orbit: bool,
        /// Also extend words on the left.
        #[arg(long)]
        both_sides: bool,
        #[arg(long, default_value_t = 100_000)]
        max_den: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Recompute every golden identity.
    Verify,
}

#[derive(Subcommand)]
enum OctonionCommand {
    /// Structure constants of the algebra built from a form, with checks.
    Table {
        form: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The trilinear form C of an octonion algebra.
    CForm {
        #[arg(long, value_enum)]
        algebra: AlgebraKind,
    },
}

fn run(cli: &Cli) -> Result<(Value, bool), CommandError> {
    let ok = |v| Ok((v, true));
    match &cli.command {
        Command::Rep { name, d, n } => ok(commands::rep(name, *d, *n)?),
        Command::Invariant { form } => ok(commands::invariant(&read_form(form)?)?),
        Command::Classify { form, max_den, tol } => ok(commands::classify(&read_form(form)?, *max_den, *tol)?),
        Command::Stab { form, tol } => ok(commands::stab(&read_form(form)?, *tol)?),
        Command::Fixed { form, tol } => ok(commands::fixed(&read_form(form)?, *tol)?),
        Command::Octonion { what: OctonionCommand::Table { form, tol } } => {
            ok(commands::octonion_table(&read_form(form)?, *tol)?)
        }
        Command::Octonion { what: OctonionCommand::CForm { algebra } } => ok(commands::octonion_c_form(*algebra)?),
        Command::Perturb { case, target, epsilon, sign, n } => {
            let shape = commands::shape_for(*case, *n)?;
            let y = parse_target(&read_text(target)?, shape)?;
            ok(commands::perturb(&y, *epsilon, (*sign).into())?)
        }
        Command::Approximate { x, target, epsilon, depth, beam, seed, via_orbit, both_sides, max_den, tol } => {
            let x = read_form(x)?;
            let y = parse_target(&read_text(target)?, x.shape()?)?;
            let args = ApproximateArgs {
                epsilon: *epsilon,
                depth: *depth,
                beam: *beam,
                seed: *seed,
                via_orbit: *via_orbit,
                both_sides: *both_sides,
                max_den: *max_den,
                tol: *tol,
            };
            let eval = RayonEvaluator::from_env().map_err(|e| CommandError::Other(e.to_string()))?;
            ok(commands::approximate(&x, &y, &args, &eval)?)
        }
        Command::Verify => {
            let (report, v) = commands::verify();
            Ok((v, report.all_pass()))
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, success)) => {
            if cli.pretty {
                let text = match cli.command {
                    Command::Verify => pretty::verify_table(&v),
                    _ => pretty::to_text(&v),
                };
                emit(&text);
            } else {
                emit(&format!("{v}\n"));
            }
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
