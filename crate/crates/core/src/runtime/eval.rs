//! Evaluation of expressions to values.

use std::cmp::Ordering;

use super::machine::{Machine, R};
use super::value::Value;
use super::RuntimeError;
use crate::store::Kind;
use crate::syntax::ast::BinOp;
use crate::syntax::check::relation_holds;
use crate::syntax::ir::{Const, Designator, Expr, ExprKind};
use crate::syntax::token::Loc;
use crate::syntax::types::TypeId;

pub(crate) fn const_value(c: Const) -> Value {
    match c {
        Const::Int(n) => Value::Int(n),
        Const::Bool(b) => Value::Bool(b),
        Const::Real(x) => Value::Real(x),
        Const::Enum(e) => Value::Enum(e),
    }
}

fn overflow(loc: Loc) -> RuntimeError {
    RuntimeError::new(loc, "integer overflow")
}

impl<'p> Machine<'p> {
    pub(crate) fn eval(&mut self, e: &'p Expr) -> R<Value> {
        let loc = e.loc;
        Ok(match &e.kind {
            ExprKind::Const(c) => const_value(*c),
            ExprKind::Str(_) => return Err(RuntimeError::new(loc, "a string is not a value")),
            ExprKind::Load(d) => {
                let addr = self.address(d)?;
                self.read(addr, d)?
            }
            ExprKind::ToReal(x) => match self.eval(x)? {
                Value::Int(n) => Value::Real(n as f64),
                v => v,
            },
            ExprKind::Neg(x) => match self.eval(x)? {
                Value::Int(n) => Value::Int(n.checked_neg().ok_or_else(|| overflow(loc))?),
                Value::Real(r) => Value::Real(-r),
                _ => unreachable!("checked: negation of a number"),
            },
            ExprKind::Abs(x) => match self.eval(x)? {
                Value::Int(n) => Value::Int(n.checked_abs().ok_or_else(|| overflow(loc))?),
                Value::Real(r) => Value::Real(r.abs()),
                _ => unreachable!("checked: abs of a number"),
            },
            ExprKind::Not(x) => Value::Bool(!self.eval_bool(x)?),
            ExprKind::Binary(BinOp::And, a, b) => Value::Bool(self.eval_bool(a)? && self.eval_bool(b)?),
            ExprKind::Binary(BinOp::Or, a, b) => Value::Bool(self.eval_bool(a)? || self.eval_bool(b)?),
            ExprKind::Binary(op, a, b) if op.is_relation() => Value::Bool(self.compare(*op, a, b, loc)?),
            ExprKind::Binary(op, a, b) => {
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                arith(*op, x, y, loc)?
            }
            ExprKind::Known(d) => Value::Bool(self.known(d)?),
            ExprKind::Stmt(s) => Value::Bool(self.solve_stmt(s)?),
        })
    }

    pub(crate) fn eval_bool(&mut self, e: &'p Expr) -> R<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            v => unreachable!("checked: boolean expected, got {v:?}"),
        }
    }

    pub(crate) fn eval_ordinal(&mut self, e: &'p Expr) -> R<i64> {
        let v = self.eval(e)?;
        v.ordinal().ok_or_else(|| RuntimeError::new(e.loc, "expected an ordinal value"))
    }

    pub(crate) fn known(&mut self, d: &'p Designator) -> R<bool> {
        let addr = self.address(d)?;
        Ok(match &self.mem[addr] {
            Value::Uninit => false,
            Value::Unknown(u) => self.store.is_determined(*u),
            _ => true,
        })
    }

    /// The value of a simple slot; unknowns must be determined.
    pub(crate) fn read(&self, addr: usize, d: &Designator) -> R<Value> {
        match &self.mem[addr] {
            Value::Uninit => Err(RuntimeError::new(d.loc, format!("'{}' is not initialized", d.name))),
            Value::Unknown(u) => self.determined(*u, d.loc),
            v => Ok(v.clone()),
        }
    }

    pub(crate) fn determined(&self, u: usize, loc: Loc) -> R<Value> {
        let undetermined = || RuntimeError::new(loc, format!("unknown {} is not determined", self.store.name(u)));
        let info = self.store.info(u);
        if info.kind == Kind::Real {
            return self.store.real_value(u).map(Value::Real).ok_or_else(undetermined);
        }
        let v = self.store.value(u).ok_or_else(undetermined)?;
        Ok(match info.kind {
            Kind::Bool => Value::Bool(v != 0),
            Kind::Enum(_) => Value::Enum(v as u32),
            _ => Value::Int(v),
        })
    }

    /// A slot copied into a location without unknowns: unknowns are read
    /// as their determined values, uninitialized slots stay so.
    pub(crate) fn copy_slot(&self, addr: usize, loc: Loc) -> R<Value> {
        match &self.mem[addr] {
            Value::Unknown(u) => self.determined(*u, loc),
            v => Ok(v.clone()),
        }
    }

    fn compare(&mut self, op: BinOp, a: &'p Expr, b: &'p Expr, loc: Loc) -> R<bool> {
        let types = &self.program.types;
        if !types.is_simple(a.ty) {
            let (ExprKind::Load(da), ExprKind::Load(db)) = (&a.kind, &b.kind) else {
                unreachable!("checked: compound operands are variables")
            };
            let (x, y) = (self.address(da)?, self.address(db)?);
            let size = types.size(a.ty);
            let mut equal = true;
            for i in 0..size {
                let vx = self.copy_slot(x + i, loc)?;
                let vy = self.copy_slot(y + i, loc)?;
                if !vx.is_init() || !vy.is_init() {
                    return Err(RuntimeError::new(loc, "comparison of partially uninitialized values"));
                }
                equal &= vx == vy;
            }
            return Ok(if op == BinOp::Eq { equal } else { !equal });
        }
        let x = self.eval(a)?;
        let y = self.eval(b)?;
        Ok(relation_holds(op, order(&x, &y, loc)?))
    }

    /// Checks that `v` fits the subrange `ty`, if it is one.
    pub(crate) fn check_range(&self, ty: TypeId, v: &Value, loc: Loc) -> R<()> {
        if let (crate::syntax::types::TypeKind::Subrange { lo, hi }, Value::Int(n)) = (self.program.types.kind(ty), v) {
            if n < lo || n > hi {
                return Err(RuntimeError::new(loc, format!("value {n} is outside [{lo}..{hi}]")));
            }
        }
        Ok(())
    }
}

pub(crate) fn order(x: &Value, y: &Value, loc: Loc) -> R<Ordering> {
    match (x, y) {
        (Value::Real(a), Value::Real(b)) => a.partial_cmp(b).ok_or_else(|| RuntimeError::new(loc, "comparison with NaN")),
        _ => match (x.ordinal(), y.ordinal()) {
            (Some(a), Some(b)) => Ok(a.cmp(&b)),
            _ => Err(RuntimeError::new(loc, "incomparable values")),
        },
    }
}

fn arith(op: BinOp, x: Value, y: Value, loc: Loc) -> R<Value> {
    let zero = || RuntimeError::new(loc, "division by zero");
    Ok(match (x, y) {
        (Value::Int(a), Value::Int(b)) => Value::Int(match op {
            BinOp::Add => a.checked_add(b).ok_or_else(|| overflow(loc))?,
            BinOp::Sub => a.checked_sub(b).ok_or_else(|| overflow(loc))?,
            BinOp::Mul => a.checked_mul(b).ok_or_else(|| overflow(loc))?,
            BinOp::Slash | BinOp::Div => {
                if b == 0 {
                    return Err(zero());
                }
                a.checked_div(b).ok_or_else(|| overflow(loc))?
            }
            BinOp::Mod => {
                if b == 0 {
                    return Err(zero());
                }
                a.checked_rem(b).ok_or_else(|| overflow(loc))?
            }
            _ => unreachable!("not arithmetic"),
        }),
        (Value::Real(a), Value::Real(b)) => Value::Real(match op {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Slash => {
                if b == 0.0 {
                    return Err(zero());
                }
                a / b
            }
            _ => unreachable!("checked: integer operator on reals"),
        }),
        (x, y) => unreachable!("checked: mixed operands {x:?} {y:?}"),
    })
}
