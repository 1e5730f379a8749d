//! The `almac` command line.
//!
//! Exit codes: 0 at least one solution, 1 no solution, 2 runtime error,
//! 3 the program could not be loaded (unreadable, syntax or type error,
//! or bad command-line usage).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::runtime::{self, LabelOrder, Mode, Outcome, RunOptions, ValueOrder};
use crate::syntax::{self, ir::Program};

pub const EXIT_SUCCEEDED: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_RUNTIME_ERROR: i32 = 2;
pub const EXIT_COMPILE_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "almac", version, about = "Run programs with backtracking and constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check and run a program.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::First)]
        mode: ModeArg,
        /// Stop after this many solutions (all and count modes).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_solutions: Option<u64>,
        /// Trace tells and choice points on standard error.
        #[arg(long)]
        trace: bool,
        /// Print the constraint store at every solution.
        #[arg(long)]
        dump_store: bool,
        #[arg(long, value_enum, default_value_t = LabelOrderArg::Textual)]
        label_order: LabelOrderArg,
        #[arg(long, value_enum, default_value_t = ValueOrderArg::Ascending)]
        value_order: ValueOrderArg,
    },
    /// Parse and type-check a program without running it.
    Check { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    All,
    Count,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LabelOrderArg {
    Textual,
    FirstFail,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ValueOrderArg {
    Ascending,
    Descending,
}

fn load(file: &Path, err: &mut dyn Write) -> Result<Program, i32> {
    let source = std::fs::read_to_string(file).map_err(|e| {
        let _ = writeln!(err, "{}: {e}", file.display());
        EXIT_COMPILE_ERROR
    })?;
    syntax::compile(&source).map_err(|e| {
        let _ = writeln!(err, "{}:{e}", file.display());
        EXIT_COMPILE_ERROR
    })
}

/// Runs the command line `argv` (including the program name), writing
/// program output to `out` and diagnostics and traces to `err`. Returns
/// the exit code.
pub fn main<I, T>(argv: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_COMPILE_ERROR } else { EXIT_SUCCEEDED };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match cli.command {
        Command::Check { file } => match load(&file, err) {
            Ok(_) => EXIT_SUCCEEDED,
            Err(code) => code,
        },
        Command::Run { file, mode, max_solutions, trace, dump_store, label_order, value_order } => {
            let program = match load(&file, err) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let options = RunOptions {
                mode: match mode {
                    ModeArg::First => Mode::First,
                    ModeArg::All => Mode::All,
                    ModeArg::Count => Mode::Count,
                },
                max_solutions,
                trace,
                dump_store,
                label_order: match label_order {
                    LabelOrderArg::Textual => LabelOrder::Textual,
                    LabelOrderArg::FirstFail => LabelOrder::FirstFail,
                },
                value_order: match value_order {
                    ValueOrderArg::Ascending => ValueOrder::Ascending,
                    ValueOrderArg::Descending => ValueOrder::Descending,
                },
            };
            let report = runtime::run_program(&program, &options, out, err);
            match report.outcome {
                Outcome::Succeeded => EXIT_SUCCEEDED,
                Outcome::Failed => {
                    let _ = writeln!(err, "{}: no solution", file.display());
                    EXIT_FAILED
                }
                Outcome::Error(e) => {
                    let _ = writeln!(err, "{}:{e}", file.display());
                    EXIT_RUNTIME_ERROR
                }
            }
        }
    }
}
