//! Interpreter for a Modula-2 subset extended with backtracking and
//! finite-domain constraints.

pub mod builtins;
pub mod cli;
pub mod runtime;
pub mod solvers;
pub mod store;
pub mod syntax;
