//! Statement execution in continuation-passing style.
//!
//! `exec(s, k)` runs `s` and calls `k` on each success; the signal `k`
//! returns says whether to try further alternatives. Backtracking into a
//! choice point is simply returning `Fail` to it. Statements known to
//! succeed at most once take the direct `exec_det` path.

use super::machine::{Cont, Machine, Signal, R};
use super::value::Value;
use crate::syntax::ast::{BinOp, ParamMode};
use crate::syntax::ir::{Arg, Designator, Expr, ExprKind, Stmt, StmtKind};
use crate::syntax::types::TypeKind;

/// How an actual parameter is bound.
enum Binding {
    Alias(usize),
    Copy(Vec<Value>),
}

impl<'p> Machine<'p> {
    pub(crate) fn exec_seq(&mut self, ss: &'p [Stmt], k: Cont<'_, 'p>) -> R<Signal> {
        let mut i = 0;
        while i < ss.len() && ss[i].det {
            if !self.exec_det(&ss[i])? {
                return Ok(Signal::Fail);
            }
            i += 1;
        }
        if i == ss.len() {
            return k(self);
        }
        let rest = &ss[i + 1..];
        self.exec(&ss[i], &mut |m: &mut Machine<'p>| m.exec_seq(rest, k))
    }

    pub(crate) fn exec_det_seq(&mut self, ss: &'p [Stmt]) -> R<bool> {
        for s in ss {
            if !self.exec_det(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Runs `f` up to its first success, discarding the choice points it
    /// leaves; the effects of that success are kept.
    pub(crate) fn solve_once(&mut self, f: impl FnOnce(&mut Self, Cont<'_, 'p>) -> R<Signal>) -> R<bool> {
        let id = self.new_cut();
        match f(self, &mut |_: &mut Machine<'p>| Ok(Signal::Cut(id)))? {
            Signal::Cut(c) if c == id => Ok(true),
            Signal::Fail => Ok(false),
            s => unreachable!("signal {s:?} escaped a nested computation"),
        }
    }

    /// Runs a statement once; on failure its effects are undone.
    pub(crate) fn solve_stmt(&mut self, s: &'p Stmt) -> R<bool> {
        let m = self.mark();
        let ok = if s.det { self.exec_det(s)? } else { self.solve_once(|m, k| m.exec(s, k))? };
        if !ok {
            self.undo(m);
        }
        self.release(m);
        Ok(ok)
    }

    pub(crate) fn solve_seq(&mut self, ss: &'p [Stmt]) -> R<bool> {
        if ss.iter().all(|s| s.det) {
            self.exec_det_seq(ss)
        } else {
            self.solve_once(|m, k| m.exec_seq(ss, k))
        }
    }

    /// An IF or WHILE condition: a test whose effects are kept only when it
    /// succeeds.
    fn condition(&mut self, c: &'p Expr) -> R<bool> {
        if c.as_const() == Some(crate::syntax::ir::Const::Bool(true)) {
            return Ok(true);
        }
        let m = self.mark();
        let ok = if c.has_stmt { self.solve_once(|m, k| m.exec_test(c, k))? } else { self.test(c)? };
        if !ok {
            self.undo(m);
        }
        self.release(m);
        Ok(ok)
    }

    /// A boolean expression in statement position, with alternatives for
    /// disjunctions over statements.
    pub(crate) fn exec_test(&mut self, e: &'p Expr, k: Cont<'_, 'p>) -> R<Signal> {
        match &e.kind {
            ExprKind::Binary(BinOp::And, a, b) => self.exec_test(a, &mut |m: &mut Machine<'p>| m.exec_test(b, k)),
            ExprKind::Binary(BinOp::Or, a, b) if e.has_stmt => {
                let id = self.new_choice(e.loc)?;
                let m = self.mark();
                let r = self.exec_test(a, k)?;
                if r != Signal::Fail {
                    self.release(m);
                    return Ok(r);
                }
                self.undo(m);
                self.trace_line(|| format!("BACKTRACK {id}"))?;
                let r = self.exec_test(b, k);
                self.release(m);
                r
            }
            ExprKind::Stmt(s) => self.exec(s, k),
            _ => {
                if self.test(e)? {
                    k(self)
                } else {
                    Ok(Signal::Fail)
                }
            }
        }
    }

    pub(crate) fn exec(&mut self, s: &'p Stmt, k: Cont<'_, 'p>) -> R<Signal> {
        if s.det {
            return if self.exec_det(s)? { k(self) } else { Ok(Signal::Fail) };
        }
        match &s.kind {
            StmtKind::Test(e) => self.exec_test(e, k),
            StmtKind::If { arms, otherwise } => {
                for (cond, body) in arms {
                    if self.condition(cond)? {
                        return self.exec_seq(body, k);
                    }
                }
                self.exec_seq(otherwise, k)
            }
            StmtKind::While { cond, body } => self.while_loop(cond, body, k),
            StmtKind::For { var, from, to, body } => {
                let (lo, hi) = (self.eval_ordinal(from)?, self.eval_ordinal(to)?);
                let addr = self.address(var)?;
                self.for_loop(addr, var, lo, hi, body, k)
            }
            StmtKind::Some { var, from, to, body } => {
                let (lo, hi) = (self.eval_ordinal(from)?, self.eval_ordinal(to)?);
                if lo > hi {
                    return Ok(Signal::Fail);
                }
                let addr = self.address(var)?;
                let id = self.new_choice(s.loc)?;
                let m = self.mark();
                for v in lo..=hi {
                    self.set_index(addr, var, v)?;
                    let r = self.exec_seq(body, k)?;
                    if r != Signal::Fail {
                        self.release(m);
                        return Ok(r);
                    }
                    self.undo(m);
                    if v < hi {
                        self.trace_line(|| format!("BACKTRACK {id}"))?;
                    }
                }
                self.release(m);
                Ok(Signal::Fail)
            }
            StmtKind::Either(branches) => {
                let id = self.new_choice(s.loc)?;
                let m = self.mark();
                for (i, branch) in branches.iter().enumerate() {
                    let r = self.exec_seq(branch, k)?;
                    if r != Signal::Fail {
                        self.release(m);
                        return Ok(r);
                    }
                    self.undo(m);
                    if i + 1 < branches.len() {
                        self.trace_line(|| format!("BACKTRACK {id}"))?;
                    }
                }
                self.release(m);
                Ok(Signal::Fail)
            }
            StmtKind::Call { proc, args } => {
                let (base, params) = self.bind(*proc, args)?;
                let t0 = self.trail_len();
                self.push_frame(*proc, params, base);
                let body = &self.program.procs[*proc].body;
                let r = self.exec_seq(body, &mut |m: &mut Machine<'p>| {
                    // the caller's continuation runs in the caller's frame
                    let frame = m.frames.pop().expect("no active frame");
                    let r = k(m);
                    m.frames.push(frame);
                    r
                });
                self.pop_frame(t0);
                r
            }
            StmtKind::Indomain(d) => self.indomain(d, s.loc, k),
            _ => unreachable!("statement kind is always deterministic"),
        }
    }

    fn while_loop(&mut self, cond: &'p Expr, body: &'p [Stmt], k: Cont<'_, 'p>) -> R<Signal> {
        if !self.condition(cond)? {
            return k(self);
        }
        self.exec_seq(body, &mut |m: &mut Machine<'p>| m.while_loop(cond, body, k))
    }

    fn for_loop(
        &mut self,
        addr: usize,
        var: &'p Designator,
        v: i64,
        hi: i64,
        body: &'p [Stmt],
        k: Cont<'_, 'p>,
    ) -> R<Signal> {
        if v > hi {
            return k(self);
        }
        self.set_index(addr, var, v)?;
        self.exec_seq(body, &mut |m: &mut Machine<'p>| m.for_loop(addr, var, v + 1, hi, body, k))
    }

    fn set_index(&mut self, addr: usize, var: &Designator, v: i64) -> R<()> {
        let value = match self.program.types.kind(var.ty) {
            TypeKind::Enumeration { .. } => Value::Enum(v as u32),
            _ => Value::Int(v),
        };
        self.check_range(var.ty, &value, var.loc)?;
        self.set(addr, value);
        Ok(())
    }

    pub(crate) fn exec_det(&mut self, s: &'p Stmt) -> R<bool> {
        match &s.kind {
            StmtKind::Assign { target, value } => {
                self.assign(target, value)?;
                Ok(true)
            }
            StmtKind::Test(e) => self.test(e),
            StmtKind::If { arms, otherwise } => {
                for (cond, body) in arms {
                    if self.condition(cond)? {
                        return self.exec_det_seq(body);
                    }
                }
                self.exec_det_seq(otherwise)
            }
            StmtKind::While { cond, body } => {
                while self.condition(cond)? {
                    if !self.exec_det_seq(body)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            StmtKind::For { var, from, to, body } => {
                let (lo, hi) = (self.eval_ordinal(from)?, self.eval_ordinal(to)?);
                let addr = self.address(var)?;
                for v in lo..=hi {
                    self.set_index(addr, var, v)?;
                    if !self.exec_det_seq(body)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            StmtKind::Forall { generator, body } => self.forall(generator, body),
            StmtKind::Commit(body) => {
                let first = self.choice_count();
                let ok = self.solve_seq(body)?;
                let last = self.choice_count();
                if ok && last > first {
                    self.trace_line(|| format!("COMMIT {}..{}", first + 1, last))?;
                }
                Ok(ok)
            }
            StmtKind::Not(inner) => {
                if let StmtKind::Test(e) = &inner.kind {
                    if e.unknown {
                        return self.tell_expr(e, true);
                    }
                }
                let m = self.mark();
                let ok = self.solve_stmt(inner);
                self.undo(m);
                self.release(m);
                Ok(!ok?)
            }
            StmtKind::Call { proc, args } => {
                let (base, params) = self.bind(*proc, args)?;
                let t0 = self.trail_len();
                self.push_frame(*proc, params, base);
                let ok = self.exec_det_seq(&self.program.procs[*proc].body);
                self.pop_frame(t0);
                ok
            }
            StmtKind::Write { args, newline } => {
                self.write(args, *newline, s.loc)?;
                Ok(true)
            }
            StmtKind::AllDifferent(d) => self.all_different(d),
            StmtKind::AtMost { k, items, value } => self.at_most(k, items, value),
            StmtKind::Sum { items, rel, bound } => self.sum(items, *rel, bound),
            StmtKind::Empty(d) => {
                self.list_empty(d)?;
                Ok(true)
            }
            StmtKind::Insert { list, item } => {
                self.list_insert(list, item)?;
                Ok(true)
            }
            StmtKind::Some { .. } | StmtKind::Either(_) | StmtKind::Indomain(_) => {
                unreachable!("nondeterministic statement on the deterministic path")
            }
        }
    }

    fn assign(&mut self, target: &'p Designator, value: &'p Expr) -> R<()> {
        let addr = self.address(target)?;
        let types = &self.program.types;
        if types.is_simple(target.ty) {
            let v = self.eval(value)?;
            self.check_range(target.ty, &v, value.loc)?;
            self.set(addr, v);
            return Ok(());
        }
        let size = types.size(target.ty);
        let ExprKind::Load(src) = &value.kind else { unreachable!("checked: compound values are variables") };
        let src = self.address(src)?;
        for i in 0..size {
            let v = self.copy_slot(src + i, value.loc)?;
            self.set(addr + i, v);
        }
        Ok(())
    }

    /// FORALL: every success of the generator runs the body once. Body
    /// effects on variables are kept: their trail entries are moved out of
    /// the way of the generator's backtracking and put back at the end.
    fn forall(&mut self, generator: &'p [Stmt], body: &'p [Stmt]) -> R<bool> {
        let id = self.new_cut();
        let m0 = self.mark();
        let mut kept = Vec::new();
        let r = self.exec_seq(generator, &mut |m: &mut Machine<'p>| {
            let t0 = m.trail_len();
            if !m.solve_seq(body)? {
                return Ok(Signal::Cut(id));
            }
            kept.extend(m.take_trail(t0));
            Ok(Signal::Fail)
        })?;
        self.undo(m0);
        self.release(m0);
        self.append_trail(kept);
        match r {
            Signal::Fail => Ok(true),
            Signal::Cut(c) if c == id => Ok(false),
            s => unreachable!("signal {s:?} escaped FORALL"),
        }
    }

    /// Evaluates the actual parameters and allocates the callee's frame.
    fn bind(&mut self, proc: usize, args: &'p [Arg]) -> R<(usize, Vec<usize>)> {
        let p = &self.program.procs[proc];
        let types = &self.program.types;
        let mut bindings = Vec::with_capacity(args.len());
        for (param, arg) in p.params.iter().zip(args) {
            let load = match &arg.expr.kind {
                ExprKind::Load(d) => Some(d),
                _ => None,
            };
            let binding = match (param.mode, load) {
                (ParamMode::Var, Some(d)) => Binding::Alias(self.address(d)?),
                (ParamMode::Var, None) => unreachable!("checked: VAR actuals are variables"),
                (ParamMode::Mix, Some(d)) => {
                    let addr = self.address(d)?;
                    let size = types.size(d.ty);
                    let open = self.mem[addr..addr + size].iter().any(|v| matches!(v, Value::Uninit | Value::Unknown(_)));
                    if open {
                        Binding::Alias(addr)
                    } else {
                        Binding::Copy(self.mem[addr..addr + size].to_vec())
                    }
                }
                (_, Some(d)) if !types.is_simple(param.ty) => {
                    let addr = self.address(d)?;
                    let size = types.size(d.ty);
                    let mut values = Vec::with_capacity(size);
                    for i in 0..size {
                        values.push(self.copy_slot(addr + i, arg.expr.loc)?);
                    }
                    Binding::Copy(values)
                }
                _ => {
                    let v = self.eval(&arg.expr)?;
                    self.check_range(param.ty, &v, arg.expr.loc)?;
                    Binding::Copy(vec![v])
                }
            };
            bindings.push(binding);
        }
        let base = self.mem.len();
        self.mem.resize(base + p.frame_size, Value::Uninit);
        let mut params = Vec::with_capacity(bindings.len());
        for (param, b) in p.params.iter().zip(bindings) {
            match b {
                Binding::Alias(a) => params.push(a),
                Binding::Copy(values) => {
                    let at = base + param.offset;
                    for (i, v) in values.into_iter().enumerate() {
                        self.mem[at + i] = v;
                    }
                    params.push(at);
                }
            }
        }
        Ok((base, params))
    }
}

