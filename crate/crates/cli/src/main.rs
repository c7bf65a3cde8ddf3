//! `vortexloop`: orbit invariants, equivalence tests, intertwiners, flows and
//! self-verification for decorated vortex loops.

mod commands;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vortexloop::flow::Scheme;

use crate::verify::Suite;

const DETAILS: &str = "\
Units: angles and curve parameters are in radians; areas are in squared length
units of the input coordinates; circulations (partial vorticities) are
dimensionless.

Exit codes: 0 success or equivalent, 1 negative verdict or failed suite,
2 parse, schema, I/O or validation error, 3 Morse violation,
4 profile mismatch, 5 flow failure.";

#[derive(Debug, Parser)]
#[command(name = "vortexloop", version, about, after_long_help = DETAILS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct LoadOptions {
    /// Reverse clockwise input curves (and their densities) instead of rejecting them.
    #[arg(long)]
    auto_orient: bool,
    /// Relative threshold on |β'| at a zero, as a fraction of max |β'|.
    #[arg(long, default_value_t = 1e-8)]
    morse_tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the orbit label of a loop: enclosed area, partial vorticities,
    /// total circulation, zero count and symmetry step.
    Invariants {
        loop_file: PathBuf,
        /// Relative tolerance for detecting the symmetry step.
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        #[command(flatten)]
        load: LoadOptions,
    },
    /// Decide whether two loops lie on the same orbit (exit 0 if so, 1 if not).
    Equiv {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Relative tolerance on area and on the circular profile match.
        #[arg(long, alias = "rel-tol", default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        load: LoadOptions,
    },
    /// Build the reparametrization carrying a model density onto a target loop's density.
    Intertwine {
        /// Density file (`{"beta": ...}`) or a loop file whose density is used.
        model_file: PathBuf,
        target_file: PathBuf,
        /// Target segment receiving model segment 0; the first profile match when omitted.
        #[arg(long)]
        shift: Option<usize>,
        /// Where to write the circle map; it is embedded in the report when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Relative tolerance for the profile match.
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        #[command(flatten)]
        load: LoadOptions,
    },
    /// Advect a loop by the flow of a bump Hamiltonian and report drifts.
    Flow {
        loop_file: PathBuf,
        ham_file: PathBuf,
        /// Final time.
        #[arg(short = 'T', long = "time", default_value_t = 1.0)]
        t_final: f64,
        /// Step size (at most T).
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// rk4 or implicit-midpoint.
        #[arg(long, default_value = "rk4")]
        scheme: Scheme,
        /// Where to write the evolved loop.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Write per-step area and Hamiltonian pairing as CSV.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        /// Write an SVG overlay of the initial and final curves.
        #[arg(long)]
        emit_svg: Option<PathBuf>,
        #[command(flatten)]
        load: LoadOptions,
    },
    /// Run the built-in property suites and print a pass/fail report (exit 0 iff all pass).
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, env = "VORTEXLOOP_SEED", default_value_t = 0)]
        seed: u64,
        /// Density file replacing sin 2t in the nondegeneracy check.
        #[arg(long)]
        beta: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Invariants { loop_file, rel_tol, load } => commands::invariants(&loop_file, rel_tol, &load),
        Command::Equiv { file_a, file_b, tol, load } => commands::equiv(&file_a, &file_b, tol, &load),
        Command::Intertwine { model_file, target_file, shift, output, rel_tol, load } => {
            commands::intertwine(&model_file, &target_file, shift, output.as_deref(), rel_tol, &load)
        }
        Command::Flow { loop_file, ham_file, t_final, dt, scheme, output, emit_csv, emit_svg, load } => {
            let outputs = commands::FlowOutputs {
                evolved: output.as_deref(),
                csv: emit_csv.as_deref(),
                svg: emit_svg.as_deref(),
            };
            commands::flow(&loop_file, &ham_file, t_final, dt, scheme, outputs, &load)
        }
        Command::Verify { suite, seed, beta } => verify::run(suite, seed, beta.as_deref()),
    };
    match outcome {
        Ok(done) => {
            println!("{}", done.json);
            ExitCode::from(done.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
