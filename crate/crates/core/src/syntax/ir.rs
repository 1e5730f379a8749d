//! Checked program representation: names resolved to storage, every
//! expression typed, statements annotated with determinism.

use super::ast::{BinOp, ParamMode};
use super::token::Loc;
use super::types::{TypeId, TypeTable};

/// A compile-time constant or literal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Const {
    Int(i64),
    Bool(bool),
    Real(f64),
    Enum(u32),
}

#[derive(Debug, Clone)]
pub struct Program {
    pub name: String,
    pub types: TypeTable,
    pub globals: Vec<Variable>,
    pub global_size: usize,
    pub procs: Vec<Procedure>,
    pub body: Vec<Stmt>,
}

/// A declared variable. `offset` is absolute for globals and frame-relative
/// for locals and parameters.
#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub ty: TypeId,
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub mode: ParamMode,
    pub ty: TypeId,
    /// Frame offset of the local copy (used in value mode and by MIX when
    /// the actual is fully initialized).
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub struct Procedure {
    pub name: String,
    pub params: Vec<Param>,
    pub locals: Vec<Variable>,
    pub frame_size: usize,
    pub body: Vec<Stmt>,
    /// Succeeds at most once and leaves no choice points.
    pub det: bool,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Root {
    Global(usize),
    Local(usize),
    Param(usize),
}

#[derive(Debug, Clone)]
pub enum Step {
    Index { index: Expr, lo: i64, hi: i64, stride: usize },
    Field { name: String, offset: usize },
}

#[derive(Debug, Clone)]
pub struct Designator {
    pub name: String,
    pub root: Root,
    pub steps: Vec<Step>,
    pub ty: TypeId,
    pub loc: Loc,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: TypeId,
    pub loc: Loc,
    /// Mentions an unknown (outside `KNOWN`).
    pub unknown: bool,
    /// Contains an embedded statement.
    pub has_stmt: bool,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Const(Const),
    Str(String),
    Load(Designator),
    ToReal(Box<Expr>),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Known(Designator),
    Stmt(Box<Stmt>),
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Loc,
    pub det: bool,
}

#[derive(Debug, Clone)]
pub struct Arg {
    pub mode: ParamMode,
    pub expr: Expr,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    Assign { target: Designator, value: Expr },
    Test(Expr),
    If { arms: Vec<(Expr, Vec<Stmt>)>, otherwise: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    For { var: Designator, from: Expr, to: Expr, body: Vec<Stmt> },
    Some { var: Designator, from: Expr, to: Expr, body: Vec<Stmt> },
    Either(Vec<Vec<Stmt>>),
    Forall { generator: Vec<Stmt>, body: Vec<Stmt> },
    Commit(Vec<Stmt>),
    Not(Box<Stmt>),
    Call { proc: usize, args: Vec<Arg> },
    Write { args: Vec<Expr>, newline: bool },
    Indomain(Designator),
    AllDifferent(Designator),
    AtMost { k: Expr, items: Designator, value: Expr },
    Sum { items: Designator, rel: BinOp, bound: Expr },
    Empty(Designator),
    Insert { list: Designator, item: Designator },
}

impl Expr {
    pub fn constant(c: Const, ty: TypeId, loc: Loc) -> Self {
        Expr { kind: ExprKind::Const(c), ty, loc, unknown: false, has_stmt: false }
    }

    pub fn as_const(&self) -> Option<Const> {
        match self.kind {
            ExprKind::Const(c) => Some(c),
            _ => None,
        }
    }
}
