//! Interpreter state: storage, variable trail, frames and the solution
//! driver.

use std::io::Write;
use std::rc::Rc;

use super::value::Value;
use super::{Mode, Outcome, RunOptions, RunReport, RuntimeError};
use crate::store::{self, Kind, Store, UnknownId};
use crate::syntax::ir::{Designator, Program, Root, Step};
use crate::syntax::token::Loc;
use crate::syntax::types::{TypeId, TypeKind};

pub(crate) type R<T> = Result<T, RuntimeError>;

/// How a continuation chain ended. Success is not a signal: a successful
/// statement calls its continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Signal {
    /// Try the next alternative of the most recent choice point.
    Fail,
    /// Unwind to the construct that issued this id, discarding the choice
    /// points in between.
    Cut(u32),
    /// Stop the run.
    Halt,
}

/// A variable name with its trailing subscripts, which are written in one
/// bracket: `X[1,2].No`.
#[derive(Debug, Clone)]
pub(crate) struct Path {
    pub base: String,
    pub indices: Vec<String>,
}

impl Path {
    pub fn render(&self) -> String {
        if self.indices.is_empty() {
            self.base.clone()
        } else {
            format!("{}[{}]", self.base, self.indices.join(","))
        }
    }
}

pub(crate) type Cont<'k, 'p> = &'k mut dyn FnMut(&mut Machine<'p>) -> R<Signal>;

#[derive(Debug, Clone)]
pub(crate) struct Frame {
    pub base: usize,
    /// Address of each parameter's storage (the actual's, for aliases).
    pub params: Vec<usize>,
}

/// A state to which the machine can be restored.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Mark {
    vars: usize,
    store: store::Mark,
}

pub struct Machine<'p> {
    pub(crate) program: &'p Program,
    pub(crate) options: &'p RunOptions,
    pub(crate) mem: Vec<Value>,
    trail: Vec<(usize, Value)>,
    /// Marks that may still be restored; assignments made while none is
    /// live need no trail entry.
    live_marks: usize,
    pub(crate) frames: Vec<Frame>,
    pub(crate) store: Store,
    out: &'p mut (dyn Write + Send),
    trace: &'p mut (dyn Write + Send),
    next_choice: u32,
    next_cut: u32,
    solutions: u64,
}

impl<'p> Machine<'p> {
    pub fn new(
        program: &'p Program,
        options: &'p RunOptions,
        out: &'p mut (dyn Write + Send),
        trace: &'p mut (dyn Write + Send),
    ) -> Self {
        let mut m = Machine {
            program,
            options,
            mem: vec![Value::Uninit; program.global_size],
            trail: Vec::new(),
            live_marks: 0,
            frames: Vec::new(),
            store: Store::new(),
            out,
            trace,
            next_choice: 0,
            next_cut: 0,
            solutions: 0,
        };
        for g in &program.globals {
            m.init_storage(g.ty, g.offset, Some(g.name.clone()));
        }
        m
    }

    /// Initializes fresh storage: unknowns are created (when `name` is
    /// given, i.e. for globals), lists start empty, the rest uninitialized.
    fn init_storage(&mut self, ty: TypeId, addr: usize, name: Option<String>) {
        let path = name.map(|base| Path { base, indices: Vec::new() });
        self.init_path(ty, addr, path.as_ref());
    }

    fn init_path(&mut self, ty: TypeId, addr: usize, path: Option<&Path>) {
        let types = &self.program.types;
        match types.kind(ty) {
            TypeKind::Array { lo, hi, index, elem } => {
                let stride = types.size(*elem);
                let (lo, hi, index, elem) = (*lo, *hi, *index, *elem);
                for v in lo..=hi {
                    let sub = path.map(|p| {
                        let mut p = p.clone();
                        p.indices.push(self.ordinal_label(index, v));
                        p
                    });
                    self.init_path(elem, addr + (v - lo) as usize * stride, sub.as_ref());
                }
            }
            TypeKind::Record { fields } => {
                for f in fields.clone() {
                    let sub = path.map(|p| Path { base: format!("{}.{}", p.render(), f.name), indices: Vec::new() });
                    self.init_path(f.ty, addr + f.offset, sub.as_ref());
                }
            }
            TypeKind::List { .. } => self.mem[addr] = Value::List(Rc::new(Vec::new())),
            _ if types.is_constrained(ty) => {
                if let Some(path) = path {
                    let (kind, range) = match types.kind(ty) {
                        TypeKind::Boolean => (Kind::Bool, None),
                        TypeKind::Enumeration { members, .. } => (Kind::Enum(Rc::new(members.clone())), None),
                        TypeKind::Real => (Kind::Real, None),
                        TypeKind::Subrange { lo, hi } => (Kind::Int, Some((*lo, *hi))),
                        _ => (Kind::Int, None),
                    };
                    let u = self.store.add_unknown(path.render(), types.display(ty).to_string(), kind, range);
                    self.mem[addr] = Value::Unknown(u);
                }
            }
            _ => {}
        }
    }

    /// Source text of an ordinal of type `ty`.
    pub(crate) fn ordinal_label(&self, ty: TypeId, v: i64) -> String {
        match self.program.types.kind(ty) {
            TypeKind::Enumeration { members, .. } => members.get(v as usize).cloned().unwrap_or_else(|| v.to_string()),
            TypeKind::Boolean => if v != 0 { "TRUE" } else { "FALSE" }.to_string(),
            _ => v.to_string(),
        }
    }

    // ---- trail and marks ----

    pub(crate) fn set(&mut self, addr: usize, v: Value) {
        if self.live_marks > 0 {
            let old = std::mem::replace(&mut self.mem[addr], v);
            self.trail.push((addr, old));
        } else {
            self.mem[addr] = v;
        }
    }

    /// Takes a mark; it stays live until [`Machine::release`].
    pub(crate) fn mark(&mut self) -> Mark {
        self.live_marks += 1;
        Mark { vars: self.trail.len(), store: self.store.mark() }
    }

    pub(crate) fn release(&mut self, _m: Mark) {
        self.live_marks -= 1;
    }

    /// Restores variables and store to `m`.
    pub(crate) fn undo(&mut self, m: Mark) {
        while self.trail.len() > m.vars {
            let (addr, old) = self.trail.pop().unwrap();
            // slots of frames that have since been popped are gone
            if addr < self.mem.len() {
                self.mem[addr] = old;
            }
        }
        self.store.restore(m.store);
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    /// Removes and returns the trail entries after `len`.
    pub(crate) fn take_trail(&mut self, len: usize) -> Vec<(usize, Value)> {
        self.trail.split_off(len)
    }

    pub(crate) fn append_trail(&mut self, entries: Vec<(usize, Value)>) {
        if self.live_marks > 0 {
            self.trail.extend(entries);
        }
    }

    /// Drops trail entries after `len` that refer to storage at or above
    /// `base` (a frame being popped).
    pub(crate) fn compact_trail(&mut self, len: usize, base: usize) {
        if self.trail.len() > len {
            let mut i = len;
            for j in len..self.trail.len() {
                if self.trail[j].0 < base {
                    self.trail.swap(i, j);
                    i += 1;
                }
            }
            self.trail.truncate(i);
        }
    }

    pub(crate) fn new_cut(&mut self) -> u32 {
        self.next_cut += 1;
        self.next_cut
    }

    pub(crate) fn choice_count(&self) -> u32 {
        self.next_choice
    }

    /// Allocates a choice point id and traces its creation.
    pub(crate) fn new_choice(&mut self, loc: Loc) -> R<u32> {
        self.next_choice += 1;
        let id = self.next_choice;
        self.trace_line(|| format!("CHOICE {id} @{}:{}", loc.line, loc.column))?;
        Ok(id)
    }

    pub(crate) fn trace_line(&mut self, line: impl FnOnce() -> String) -> R<()> {
        if self.options.trace {
            writeln!(self.trace, "{}", line()).map_err(|e| RuntimeError::new(Loc::default(), e.to_string()))?;
        }
        Ok(())
    }

    pub(crate) fn output(&mut self, s: &str, loc: Loc) -> R<()> {
        self.out.write_all(s.as_bytes()).map_err(|e| RuntimeError::new(loc, e.to_string()))
    }

    // ---- storage access ----

    pub(crate) fn root_addr(&self, root: Root) -> usize {
        match root {
            Root::Global(a) => a,
            Root::Local(off) => self.frames.last().expect("no active frame").base + off,
            Root::Param(i) => self.frames.last().expect("no active frame").params[i],
        }
    }

    /// Address of a designator whose subscripts are all evaluable.
    pub(crate) fn address(&mut self, d: &'p Designator) -> R<usize> {
        let mut addr = self.root_addr(d.root);
        for step in &d.steps {
            addr = self.step(addr, step, d)?;
        }
        Ok(addr)
    }

    pub(crate) fn step(&mut self, addr: usize, step: &'p Step, d: &Designator) -> R<usize> {
        Ok(match step {
            Step::Index { index, lo, hi, stride } => {
                let v = self.eval_ordinal(index)?;
                if v < *lo || v > *hi {
                    return Err(RuntimeError::new(
                        index.loc,
                        format!("subscript {v} of '{}' is outside [{lo}..{hi}]", d.name),
                    ));
                }
                addr + (v - lo) as usize * stride
            }
            Step::Field { offset, .. } => addr + offset,
        })
    }

    /// Every unknown stored in `ty` at `addr`, in storage order; list
    /// slots contribute their elements.
    pub(crate) fn unknowns_at(&self, addr: usize, ty: TypeId, loc: Loc, out: &mut Vec<UnknownId>) -> R<()> {
        let types = &self.program.types;
        match types.kind(ty) {
            TypeKind::Array { lo, hi, elem, .. } => {
                let stride = types.size(*elem);
                for i in 0..(hi - lo + 1) as usize {
                    self.unknowns_at(addr + i * stride, *elem, loc, out)?;
                }
            }
            TypeKind::Record { fields } => {
                for f in fields {
                    self.unknowns_at(addr + f.offset, f.ty, loc, out)?;
                }
            }
            _ => match &self.mem[addr] {
                Value::Unknown(u) => out.push(*u),
                Value::List(items) => out.extend(items.iter().copied()),
                _ => return Err(RuntimeError::new(loc, "expected unknowns")),
            },
        }
        Ok(())
    }

    // ---- procedures ----

    /// Allocates a frame of `size` slots for `proc`, with locals set up.
    pub(crate) fn push_frame(&mut self, proc: usize, params: Vec<usize>, base: usize) {
        let p = &self.program.procs[proc];
        debug_assert_eq!(self.mem.len(), base + p.frame_size);
        for local in &p.locals {
            self.init_storage(local.ty, base + local.offset, None);
        }
        self.frames.push(Frame { base, params });
    }

    /// Pops the current frame and frees its storage.
    pub(crate) fn pop_frame(&mut self, trail_len: usize) {
        let f = self.frames.pop().expect("no active frame");
        self.mem.truncate(f.base);
        self.compact_trail(trail_len, f.base);
    }

    // ---- driver ----

    pub fn run(mut self) -> RunReport {
        let body = &self.program.body;
        let result = self.exec_seq(body, &mut |m: &mut Machine<'p>| m.solution());
        let outcome = match result {
            Err(e) => Outcome::Error(e),
            Ok(_) if self.solutions > 0 => Outcome::Succeeded,
            Ok(_) => Outcome::Failed,
        };
        let mut report = RunReport { outcome, solutions: self.solutions };
        if self.options.mode == Mode::Count && !matches!(report.outcome, Outcome::Error(_)) {
            let line = format!("solutions: {}\n", self.solutions);
            if let Err(e) = self.output(&line, Loc::default()) {
                report.outcome = Outcome::Error(e);
            }
        }
        if let Err(e) = self.out.flush() {
            report.outcome = Outcome::Error(RuntimeError::new(Loc::default(), e.to_string()));
        }
        report
    }

    /// The continuation of the whole program.
    fn solution(&mut self) -> R<Signal> {
        if let Some(c) = self.store.suspended_pending() {
            return Err(RuntimeError::new(
                Loc::default(),
                format!("constraint '{c}' is still waiting for an undetermined subscript"),
            ));
        }
        self.solutions += 1;
        if self.options.dump_store {
            let dump = self.store.dump();
            self.output(&dump, Loc::default())?;
        }
        if self.options.mode == Mode::First {
            return Ok(Signal::Halt);
        }
        let line = format!("--- solution {} ---\n", self.solutions);
        self.output(&line, Loc::default())?;
        if self.options.max_solutions.is_some_and(|n| self.solutions >= n) {
            return Ok(Signal::Halt);
        }
        Ok(Signal::Fail)
    }
}
