//! `sepcm`: runs scenario files and computes reduced Gröbner bases.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use sepcm::gf::FieldCtx;
use sepcm::groebner::{buchberger, Ideal};
use sepcm::mpoly::{MonomialOrder, PolyRing};
use sepcm::scenario::{run, RunOptions, Scenario, ScenarioLoadError};

/// Exit code for errors: unreadable input, parse errors, failed tasks' errors.
const EXIT_ERROR: u8 = 1;
/// Exit code when a timeout interrupts the run, matching inconclusive tasks.
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "sepcm", version, about = "Separating invariants, group cohomology and Cohen-Macaulay checks over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Grevlex,
    Lex,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a scenario file. Exit code 0 if every task passes or
    /// completes, 2 on a failed verdict, 3 on an inconclusive one, 1 on errors.
    Run {
        scenario: PathBuf,
        /// Only report tasks of this kind.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Degree cap for Gröbner basis computations (default 40).
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Largest Frobenius exponent tried.
        #[arg(long)]
        mmax: Option<u32>,
        /// Accept Frobenius checks that are not proofs, labelling results conditional.
        #[arg(long)]
        heuristic: bool,
        /// Wall-clock limit in seconds; exceeding it exits with code 3.
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Print the reduced Gröbner basis of the given polynomials and statistics.
    Gb {
        /// Field characteristic.
        #[arg(long)]
        p: u64,
        /// Extension degree; the generator is `w`.
        #[arg(long, default_value_t = 1)]
        deg: u32,
        /// Comma-separated variable names.
        #[arg(long)]
        vars: String,
        /// Comma-separated positive weights.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, value_enum, default_value = "grevlex")]
        order: Order,
        /// Eliminate the first K variables with a block order (overrides --order).
        #[arg(long)]
        elim: Option<usize>,
        #[arg(long)]
        degree_cap: Option<u32>,
        polys: Vec<String>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { scenario, task, format, degree_cap, mmax, heuristic, timeout } => {
            let opts = RunOptions { task, degree_cap, m_max: mmax, heuristic };
            run_scenario(scenario, opts, format, timeout)
        }
        Command::Gb { p, deg, vars, weights, order, elim, degree_cap, polys } => {
            match groebner_basis(p, deg, &vars, weights.as_deref(), order, elim, degree_cap, &polys) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_ERROR)
                }
            }
        }
    }
}

fn run_scenario(path: PathBuf, opts: RunOptions, format: Format, timeout: Option<u64>) -> ExitCode {
    let scenario = match Scenario::load(&path) {
        Ok(s) => s,
        Err(ScenarioLoadError::Parse(e)) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_ERROR);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let (tx, rx) = mpsc::channel();
    // The worker is detached on timeout; the process exits right after.
    std::thread::spawn(move || {
        let _ = tx.send(run(&scenario, &opts));
    });
    let report = match timeout {
        None => rx.recv().expect("runner thread reports"),
        Some(secs) => match rx.recv_timeout(Duration::from_secs(secs)) {
            Ok(r) => r,
            Err(_) => {
                eprintln!("{}: timed out after {secs} s", path.display());
                return ExitCode::from(EXIT_TIMEOUT);
            }
        },
    };
    let text = match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_structured(),
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(EXIT_ERROR);
    }
    ExitCode::from(report.exit_code() as u8)
}

#[allow(clippy::too_many_arguments)]
fn groebner_basis(
    p: u64,
    deg: u32,
    vars: &str,
    weights: Option<&str>,
    order: Order,
    elim: Option<usize>,
    cap: Option<u32>,
    polys: &[String],
) -> Result<String, String> {
    let field = FieldCtx::new(p, deg).map_err(|e| e.to_string())?;
    let names: Vec<String> = vars.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    let weights: Vec<u32> = match weights {
        Some(w) => w.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad weight `{x}`"))).collect::<Result<_, _>>()?,
        None => vec![1; names.len()],
    };
    let order = match (elim, order) {
        (Some(k), _) => MonomialOrder::Elim(k),
        (None, Order::Grevlex) => MonomialOrder::Grevlex,
        (None, Order::Lex) => MonomialOrder::Lex,
    };
    let ring = PolyRing::with_options(&field, names, order, weights).map_err(|e| e.to_string())?;
    let gens = polys.iter().map(|s| ring.parse(s).map_err(|e| format!("`{s}`: {e}"))).collect::<Result<Vec<_>, _>>()?;
    let ideal = Ideal::new(&ring, gens).map_err(|e| e.to_string())?;
    let gb = buchberger(&ideal, order, cap).map_err(|e| e.to_string())?;
    let mut out = format!("ring: {}\n", ring.describe());
    for g in gb.basis() {
        out.push_str(&format!("{g}\n"));
    }
    out.push_str(&format!("stats: {}\n", gb.stats()));
    Ok(out)
}
