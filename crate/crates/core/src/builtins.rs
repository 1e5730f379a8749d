//! Built-in procedures: output, labeling, global constraints and lists.

use std::rc::Rc;

use crate::runtime::machine::{Cont, Machine, Signal, R};
use crate::runtime::value::{fmt_real, Value};
use crate::runtime::{LabelOrder, RuntimeError, ValueOrder};
use crate::store::UnknownId;
use crate::syntax::ast::BinOp;
use crate::syntax::ir::{Designator, Expr, ExprKind};
use crate::syntax::token::Loc;

impl<'p> Machine<'p> {
    fn format_value(&self, v: &Value, e: &Expr) -> String {
        match v {
            Value::Uninit => "-".to_string(),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => if *b { "TRUE" } else { "FALSE" }.to_string(),
            Value::Real(x) => fmt_real(*x),
            Value::Enum(i) => self.ordinal_label(e.ty, *i as i64),
            Value::Unknown(u) => self.store.value_text(*u),
            Value::List(items) => {
                let names: Vec<String> = items.iter().map(|u| self.store.name(*u)).collect();
                format!("[{}]", names.join(", "))
            }
        }
    }

    /// WRITE / WRITELN. A plain variable is printed as stored: `-` when
    /// uninitialized, the domain of an undetermined unknown.
    pub(crate) fn write(&mut self, args: &'p [Expr], newline: bool, loc: Loc) -> R<()> {
        let mut text = String::new();
        for e in args {
            match &e.kind {
                ExprKind::Str(s) => text.push_str(s),
                ExprKind::Load(d) => {
                    let addr = self.address(d)?;
                    let v = match &self.mem[addr] {
                        Value::Unknown(u) if self.store.is_determined(*u) => self.determined(*u, e.loc)?,
                        v => v.clone(),
                    };
                    text.push_str(&self.format_value(&v, e));
                }
                _ => {
                    let v = self.eval(e)?;
                    text.push_str(&self.format_value(&v, e));
                }
            }
        }
        if newline {
            text.push('\n');
        }
        self.output(&text, loc)
    }

    /// The unknowns designated by `d`: one for a simple designator, all
    /// elements for an array, record or list.
    fn unknowns_of(&mut self, d: &'p Designator) -> R<Vec<UnknownId>> {
        let addr = self.address(d)?;
        let mut us = Vec::new();
        self.unknowns_at(addr, d.ty, d.loc, &mut us)?;
        Ok(us)
    }

    pub(crate) fn indomain(&mut self, d: &'p Designator, loc: Loc, k: Cont<'_, 'p>) -> R<Signal> {
        let us = self.unknowns_of(d)?;
        self.label(&us, loc, k)
    }

    fn next_unlabeled(&self, us: &[UnknownId]) -> Option<UnknownId> {
        let open = us.iter().copied().filter(|&u| !self.store.is_determined(u));
        match self.options.label_order {
            LabelOrder::Textual => open.take(1).next(),
            // min_by_key keeps the first of equal sizes
            LabelOrder::FirstFail => open.min_by_key(|&u| self.store.domain(u).size()),
        }
    }

    /// Labels the unknowns `us` one at a time, with a choice point over the
    /// domain of each.
    fn label(&mut self, us: &[UnknownId], loc: Loc, k: Cont<'_, 'p>) -> R<Signal> {
        let Some(u) = self.next_unlabeled(us) else {
            return k(self);
        };
        let mut values: Vec<i64> = self.store.domain(u).values().collect();
        if self.options.value_order == ValueOrder::Descending {
            values.reverse();
        }
        let id = self.new_choice(loc)?;
        let m = self.mark();
        for (i, &v) in values.iter().enumerate() {
            let ok = self.store.tell_value(u, v);
            if self.options.trace {
                let line = format!("TELL {} = {} -> {}", self.store.name(u), self.store.value_label(u, v), if ok { "ok" } else { "fail" });
                self.trace_line(|| line)?;
            }
            if ok {
                let r = self.label(us, loc, k)?;
                if r != Signal::Fail {
                    self.release(m);
                    return Ok(r);
                }
            }
            self.undo(m);
            if i + 1 < values.len() {
                self.trace_line(|| format!("BACKTRACK {id}"))?;
            }
        }
        self.release(m);
        Ok(Signal::Fail)
    }

    pub(crate) fn all_different(&mut self, d: &'p Designator) -> R<bool> {
        let us = self.unknowns_of(d)?;
        let r = self.store.tell_all_different(us);
        self.report_tell(r)
    }

    pub(crate) fn at_most(&mut self, k: &'p Expr, items: &'p Designator, value: &'p Expr) -> R<bool> {
        let n = self.eval_ordinal(k)?;
        if n < 0 {
            return Err(RuntimeError::new(k.loc, format!("AT_MOST bound {n} is negative")));
        }
        let v = self.eval_ordinal(value)?;
        let us = self.unknowns_of(items)?;
        let r = self.store.tell_at_most(n, us, v);
        self.report_tell(r)
    }

    pub(crate) fn sum(&mut self, items: &'p Designator, rel: BinOp, bound: &'p Expr) -> R<bool> {
        let b = self.eval_ordinal(bound)?;
        let us = self.unknowns_of(items)?;
        let r = self.store.tell_sum(&us, crate::runtime::constraint::rel_of(rel), b);
        self.report_tell(r)
    }

    pub(crate) fn list_empty(&mut self, d: &'p Designator) -> R<()> {
        let addr = self.address(d)?;
        self.set(addr, Value::List(Rc::new(Vec::new())));
        Ok(())
    }

    pub(crate) fn list_insert(&mut self, list: &'p Designator, item: &'p Designator) -> R<()> {
        let at = self.address(item)?;
        let Value::Unknown(u) = self.mem[at] else {
            return Err(RuntimeError::new(item.loc, format!("'{}' is not an unknown", item.name)));
        };
        let addr = self.address(list)?;
        let Value::List(old) = &self.mem[addr] else { unreachable!("checked: list variable") };
        let mut items = Vec::with_capacity(old.len() + 1);
        items.extend(old.iter().copied());
        items.push(u);
        self.set(addr, Value::List(Rc::new(items)));
        Ok(())
    }
}

