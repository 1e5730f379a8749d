//! Front end: lexer, parser, pretty-printer and semantic checker.

pub mod ast;
pub mod check;
pub mod ir;
pub mod parser;
pub mod pretty;
pub mod token;
pub mod types;

use thiserror::Error;

/// Any error that stops a program before it runs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Lex(#[from] token::LexError),
    #[error(transparent)]
    Parse(#[from] parser::ParseError),
    #[error(transparent)]
    Semantic(#[from] check::SemanticError),
}

/// Tokenizes, parses and checks a source text.
pub fn compile(source: &str) -> Result<ir::Program, CompileError> {
    let tokens = token::tokenize(source)?;
    let module = parser::parse(&tokens)?;
    Ok(check::check(&module)?)
}
