//! Boolean expressions executed as statements: constraints are told to the
//! store, `=` without unknowns is generalized equality, the rest is tested.

use super::machine::{Machine, R};
use super::value::Value;
use super::RuntimeError;
use crate::store::{Form, Rel, TellResult};
use crate::syntax::ast::BinOp;
use crate::syntax::ir::{Designator, Expr, ExprKind, Step};
use crate::syntax::token::Loc;
use crate::syntax::types::Scalar;

pub(crate) fn rel_of(op: BinOp) -> Rel {
    match op {
        BinOp::Eq => Rel::Eq,
        BinOp::Ne => Rel::Ne,
        BinOp::Lt => Rel::Lt,
        BinOp::Le => Rel::Le,
        BinOp::Gt => Rel::Gt,
        BinOp::Ge => Rel::Ge,
        _ => unreachable!("not a relation"),
    }
}

fn value_form(v: Value, loc: Loc) -> R<Form> {
    Ok(match v {
        Value::Real(x) => Form::Real(x),
        v => Form::Int(v.ordinal().ok_or_else(|| RuntimeError::new(loc, "not a constraint operand"))?),
    })
}

/// One step of a designator path, for display.
enum Seg {
    Index(String),
    Field(String),
    Hole,
}

/// Renders `name` followed by `segs`, merging consecutive subscripts into
/// one bracket. Returns the text before and after the hole.
fn render(name: &str, segs: &[Seg]) -> (String, String) {
    let mut parts = (name.to_string(), String::new());
    let mut in_hole = false;
    let mut open = false;
    for seg in segs {
        let s = if in_hole { &mut parts.1 } else { &mut parts.0 };
        match seg {
            Seg::Index(_) | Seg::Hole => {
                s.push(if open { ',' } else { '[' });
                open = true;
            }
            Seg::Field(_) => {
                if open {
                    s.push(']');
                    open = false;
                }
            }
        }
        match seg {
            Seg::Index(label) => s.push_str(label),
            Seg::Field(f) => {
                s.push('.');
                s.push_str(f);
            }
            Seg::Hole => in_hole = true,
        }
    }
    if open {
        let s = if in_hole { &mut parts.1 } else { &mut parts.0 };
        s.push(']');
    }
    parts
}

impl<'p> Machine<'p> {
    /// Executes a boolean expression without statement alternatives as a
    /// statement.
    pub(crate) fn test(&mut self, e: &'p Expr) -> R<bool> {
        match &e.kind {
            ExprKind::Binary(BinOp::And, a, b) => Ok(self.test(a)? && self.test(b)?),
            ExprKind::Not(x) if x.unknown => self.tell_expr(x, true),
            ExprKind::Not(x) => {
                // negation as failure, leaving no trace
                let m = self.mark();
                let r = self.test(x);
                self.undo(m);
                self.release(m);
                Ok(!r?)
            }
            _ if e.unknown => self.tell_expr(e, false),
            ExprKind::Binary(BinOp::Eq, a, b) => self.generalized_eq(a, b, e.loc),
            ExprKind::Binary(BinOp::Or, ..) if e.has_stmt => self.solve_once(|m, k| m.exec_test(e, k)),
            ExprKind::Stmt(s) => self.solve_stmt(s),
            _ => self.eval_bool(e),
        }
    }

    pub(crate) fn report_tell(&mut self, r: TellResult) -> R<bool> {
        let ok = r.ok;
        self.trace_line(|| format!("TELL {} -> {}", r.display, if ok { "ok" } else { "fail" }))?;
        Ok(ok)
    }

    /// Tells the constraint `e` (negated if `negate`).
    pub(crate) fn tell_expr(&mut self, e: &'p Expr, negate: bool) -> R<bool> {
        match &e.kind {
            ExprKind::Not(x) => self.tell_expr(x, !negate),
            ExprKind::Binary(op, a, b) if op.is_relation() => {
                let types = &self.program.types;
                let real = types.scalar(a.ty) == Some(Scalar::Real) || types.scalar(b.ty) == Some(Scalar::Real);
                let rel = if negate { rel_of(*op).negate() } else { rel_of(*op) };
                if real && rel != Rel::Eq {
                    return Err(RuntimeError::new(e.loc, "only equations are supported over reals"));
                }
                let l = self.form(a)?;
                let r = self.form(b)?;
                let res = self.store.tell_relation(&l, rel, &r, real);
                self.report_tell(res)
            }
            ExprKind::Binary(BinOp::And, a, b) if !negate => Ok(self.test(a)? && self.test(b)?),
            ExprKind::Load(_) => {
                let f = self.form(e)?;
                let res = self.store.tell_relation(&f, Rel::Eq, &Form::Int(!negate as i64), false);
                self.report_tell(res)
            }
            _ => Err(RuntimeError::new(e.loc, "unsupported constraint")),
        }
    }

    /// The evaluated form of a constraint operand: program variables and
    /// determined subscripts replaced by their values.
    pub(crate) fn form(&mut self, e: &'p Expr) -> R<Form> {
        if !e.unknown {
            let v = self.eval(e)?;
            return value_form(v, e.loc);
        }
        let bin = |a: Form, b: Form| (Box::new(a), Box::new(b));
        Ok(match &e.kind {
            ExprKind::Load(d) => {
                let unknown_index =
                    d.steps.iter().any(|s| matches!(s, Step::Index { index, .. } if index.unknown));
                if unknown_index {
                    self.element(d)?
                } else {
                    let addr = self.address(d)?;
                    self.slot_form(addr, d.loc, &d.name)?
                }
            }
            ExprKind::ToReal(x) => self.form(x)?,
            ExprKind::Neg(x) => Form::Neg(Box::new(self.form(x)?)),
            ExprKind::Abs(x) => Form::Abs(Box::new(self.form(x)?)),
            ExprKind::Binary(op, a, b) => {
                let (x, y) = bin(self.form(a)?, self.form(b)?);
                match op {
                    BinOp::Add => Form::Add(x, y),
                    BinOp::Sub => Form::Sub(x, y),
                    BinOp::Mul => Form::Mul(x, y),
                    BinOp::Slash if self.program.types.scalar(e.ty) == Some(Scalar::Real) => Form::RealDiv(x, y),
                    BinOp::Slash | BinOp::Div => Form::Div(x, y),
                    BinOp::Mod => Form::Mod(x, y),
                    _ => return Err(RuntimeError::new(e.loc, "unsupported constraint operand")),
                }
            }
            _ => return Err(RuntimeError::new(e.loc, "unsupported constraint operand")),
        })
    }

    fn slot_form(&self, addr: usize, loc: Loc, name: &str) -> R<Form> {
        match &self.mem[addr] {
            Value::Unknown(u) => Ok(Form::Unknown(*u)),
            Value::Uninit => Err(RuntimeError::new(loc, format!("'{name}' is not initialized"))),
            v => value_form(v.clone(), loc),
        }
    }

    /// An array element selected by an unknown subscript.
    fn element(&mut self, d: &'p Designator) -> R<Form> {
        let unknown_steps: Vec<usize> = d
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Step::Index { index, .. } if index.unknown))
            .map(|(i, _)| i)
            .collect();
        if unknown_steps.len() > 1 {
            return Err(RuntimeError::new(d.loc, "only one subscript may depend on unknowns"));
        }
        let k = unknown_steps[0];
        let mut segs = Vec::new();
        let mut addr = self.root_addr(d.root);
        for step in &d.steps[..k] {
            segs.push(self.seg(step)?);
            addr = self.step(addr, step, d)?;
        }
        let Step::Index { index, lo, hi, stride } = &d.steps[k] else { unreachable!() };
        let index_form = self.form(index)?;
        segs.push(Seg::Hole);
        let mut suffix_offset = 0;
        for step in &d.steps[k + 1..] {
            segs.push(self.seg(step)?);
            suffix_offset = self.step(suffix_offset, step, d)?;
        }
        let mut table = Vec::with_capacity((hi - lo + 1) as usize);
        for i in 0..(hi - lo + 1) as usize {
            table.push(self.slot_form(addr + i * stride + suffix_offset, d.loc, &d.name)?);
        }
        let (prefix, suffix) = render(&d.name, &segs);
        Ok(Form::Element { prefix, index: Box::new(index_form), suffix, low: *lo, table })
    }

    fn seg(&mut self, step: &'p Step) -> R<Seg> {
        Ok(match step {
            Step::Index { index, .. } => {
                let v = self.eval_ordinal(index)?;
                Seg::Index(self.ordinal_label(index.ty, v))
            }
            Step::Field { name, .. } => Seg::Field(name.clone()),
        })
    }

    /// `a = b` in statement position without unknowns: assigns an
    /// uninitialized side, compares otherwise.
    fn generalized_eq(&mut self, a: &'p Expr, b: &'p Expr, loc: Loc) -> R<bool> {
        if !self.program.types.is_simple(a.ty) {
            return self.generalized_eq_compound(a, b, loc);
        }
        let ua = self.uninit_load(a)?;
        let ub = self.uninit_load(b)?;
        match (ua, ub) {
            (Some(_), Some(_)) => Err(RuntimeError::new(loc, "both sides of '=' are uninitialized")),
            (Some((addr, d)), None) => {
                let v = self.eval(b)?;
                self.check_range(d.ty, &v, loc)?;
                self.set(addr, v);
                Ok(true)
            }
            (None, Some((addr, d))) => {
                let v = self.eval(a)?;
                self.check_range(d.ty, &v, loc)?;
                self.set(addr, v);
                Ok(true)
            }
            (None, None) => {
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                Ok(super::eval::order(&x, &y, loc)? == std::cmp::Ordering::Equal)
            }
        }
    }

    /// The address of `e` if it is a variable holding no value yet.
    fn uninit_load(&mut self, e: &'p Expr) -> R<Option<(usize, &'p Designator)>> {
        if let ExprKind::Load(d) = &e.kind {
            let addr = self.address(d)?;
            if !self.mem[addr].is_init() {
                return Ok(Some((addr, d)));
            }
        }
        Ok(None)
    }

    fn generalized_eq_compound(&mut self, a: &'p Expr, b: &'p Expr, loc: Loc) -> R<bool> {
        let (ExprKind::Load(da), ExprKind::Load(db)) = (&a.kind, &b.kind) else {
            unreachable!("checked: compound operands are variables")
        };
        let (x, y) = (self.address(da)?, self.address(db)?);
        for i in 0..self.program.types.size(a.ty) {
            let vx = self.copy_slot(x + i, loc)?;
            let vy = self.copy_slot(y + i, loc)?;
            match (vx.is_init(), vy.is_init()) {
                (false, false) => return Err(RuntimeError::new(loc, "both sides of '=' are uninitialized")),
                (false, true) => self.set(x + i, vy),
                (true, false) => self.set(y + i, vx),
                (true, true) => {
                    if vx != vy {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}
