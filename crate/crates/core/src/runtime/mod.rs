//! Execution of checked programs: storage, trail, choice points and the
//! continuation-passing statement interpreter.

pub(crate) mod constraint;
mod eval;
mod exec;
pub(crate) mod machine;
pub mod value;

use std::io::Write;

use thiserror::Error;

use crate::syntax::ir::Program;
use crate::syntax::token::Loc;

pub use machine::Machine;
pub use value::Value;

/// Aborts the run; unlike failure it is never caught by backtracking.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{loc}: runtime error: {message}")]
pub struct RuntimeError {
    pub loc: Loc,
    pub message: String,
}

impl RuntimeError {
    pub fn new(loc: Loc, message: impl Into<String>) -> Self {
        RuntimeError { loc, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Stop after the first solution.
    #[default]
    First,
    /// Backtrack into the program after every solution.
    All,
    /// As `All`, then report the number of solutions.
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelOrder {
    #[default]
    Textual,
    /// Smallest current domain first; ties in textual order.
    FirstFail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub mode: Mode,
    pub max_solutions: Option<u64>,
    pub trace: bool,
    pub dump_store: bool,
    pub label_order: LabelOrder,
    pub value_order: ValueOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Succeeded,
    Failed,
    Error(RuntimeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outcome: Outcome,
    pub solutions: u64,
}

/// Stack reserved for the interpreter thread; nondeterministic code nests
/// one native frame per pending continuation.
const STACK_SIZE: usize = 1 << 29;

/// Runs `program`, writing program output (and solution separators) to
/// `out` and trace lines to `trace`.
pub fn run_program(
    program: &Program,
    options: &RunOptions,
    out: &mut (dyn Write + Send),
    trace: &mut (dyn Write + Send),
) -> RunReport {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(STACK_SIZE)
            .spawn_scoped(scope, || Machine::new(program, options, out, trace).run())
            .expect("failed to spawn the interpreter thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// Parses, checks and runs `source` in one step, collecting the output.
pub fn run_source(source: &str, options: &RunOptions) -> Result<(RunReport, String), String> {
    let program = crate::syntax::compile(source).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let mut trace = std::io::sink();
    let report = run_program(&program, options, &mut out, &mut trace);
    Ok((report, String::from_utf8_lossy(&out).into_owned()))
}

#[cfg(test)]
mod tests;
