use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;
use std::rc::Rc;

use super::constraint::{normalize, Constraint, ConstraintId, Normalized};
use super::domain::write_set;
use super::form::{fmt_real, linearize_real, Form, Rel, UnknownId};
use super::{Domain, Entry, Failed, Status, Vars};
use crate::solvers::real::{RealSolver, RESIDUAL_TOLERANCE};
use crate::solvers::{alldiff, atmost, linear, nonlinear};

/// Domain given to integer unknowns of unrestricted type.
pub const DEFAULT_MIN: i64 = -(1 << 24);
pub const DEFAULT_MAX: i64 = 1 << 24;

/// The value sort of an unknown; booleans and enumerations are encoded by
/// their ordinal.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Int,
    Bool,
    Enum(Rc<Vec<String>>),
    Real,
}

#[derive(Debug, Clone)]
pub struct UnknownInfo {
    pub name: String,
    /// Type name as written in the program, for dumps.
    pub ty: String,
    pub kind: Kind,
}

/// A point to which the store can be restored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mark(usize);

/// Result of telling a constraint: whether the store is still consistent,
/// and the constraint as it was stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TellResult {
    pub ok: bool,
    pub display: String,
}

enum Built {
    Trivial(bool),
    Real(BTreeMap<UnknownId, f64>, f64),
    Con(Constraint),
}

#[derive(Default)]
pub struct Store {
    unknowns: Vec<UnknownInfo>,
    doms: Vec<Domain>,
    constraints: Vec<Rc<Constraint>>,
    active: Vec<bool>,
    watchers: Vec<Vec<ConstraintId>>,
    queue: VecDeque<ConstraintId>,
    in_queue: Vec<bool>,
    real: RealSolver,
    failed: bool,
    trail: Vec<Entry>,
    changed: Vec<UnknownId>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates an unknown. `range` bounds integer unknowns of subrange type.
    pub fn add_unknown(&mut self, name: String, ty: String, kind: Kind, range: Option<(i64, i64)>) -> UnknownId {
        let dom = match (&kind, range) {
            (_, Some((lo, hi))) => Domain::range(lo, hi),
            (Kind::Bool, None) => Domain::range(0, 1),
            (Kind::Enum(names), None) => Domain::range(0, names.len() as i64 - 1),
            (Kind::Int | Kind::Real, None) => Domain::range(DEFAULT_MIN, DEFAULT_MAX),
        };
        self.unknowns.push(UnknownInfo { name, ty, kind });
        self.doms.push(dom);
        self.watchers.push(Vec::new());
        self.unknowns.len() - 1
    }

    pub fn info(&self, u: UnknownId) -> &UnknownInfo {
        &self.unknowns[u]
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn is_real(&self, u: UnknownId) -> bool {
        self.unknowns[u].kind == Kind::Real
    }

    pub fn name(&self, u: UnknownId) -> String {
        self.unknowns[u].name.clone()
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn domain(&self, u: UnknownId) -> &Domain {
        &self.doms[u]
    }

    /// The value of a determined non-real unknown.
    pub fn value(&self, u: UnknownId) -> Option<i64> {
        if self.is_real(u) {
            None
        } else {
            self.doms[u].value()
        }
    }

    pub fn real_value(&self, u: UnknownId) -> Option<f64> {
        self.real.value(u)
    }

    pub fn is_determined(&self, u: UnknownId) -> bool {
        if self.is_real(u) {
            self.real.value(u).is_some()
        } else {
            self.doms[u].value().is_some()
        }
    }

    pub fn mark(&self) -> Mark {
        debug_assert!(self.queue.is_empty());
        Mark(self.trail.len())
    }

    /// Undoes everything done since `mark`.
    pub fn restore(&mut self, mark: Mark) {
        assert!(mark.0 <= self.trail.len(), "restoring to a mark from an undone branch");
        self.queue.clear();
        self.in_queue.iter_mut().for_each(|q| *q = false);
        while self.trail.len() > mark.0 {
            match self.trail.pop().unwrap() {
                Entry::Domain(u, old) => self.doms[u] = old,
                Entry::Added => {
                    let c = self.constraints.pop().unwrap();
                    self.active.pop();
                    self.in_queue.pop();
                    for u in c.watched() {
                        self.watchers[u].pop();
                    }
                }
                Entry::Deactivated(c) => self.active[c] = true,
                Entry::Real(old) => self.real = *old,
                Entry::Failed => self.failed = false,
            }
        }
    }

    fn fail(&mut self) {
        if !self.failed {
            self.failed = true;
            self.trail.push(Entry::Failed);
        }
        self.queue.clear();
        self.in_queue.iter_mut().for_each(|q| *q = false);
    }

    fn deactivate(&mut self, c: ConstraintId) {
        if self.active[c] {
            self.active[c] = false;
            self.trail.push(Entry::Deactivated(c));
        }
    }

    fn enqueue(&mut self, c: ConstraintId) {
        if self.active[c] && !self.in_queue[c] {
            self.in_queue[c] = true;
            self.queue.push_back(c);
        }
    }

    fn wake_changed(&mut self) {
        let changed = std::mem::take(&mut self.changed);
        for &u in &changed {
            for i in 0..self.watchers[u].len() {
                let c = self.watchers[u][i];
                self.enqueue(c);
            }
        }
        self.changed = changed;
        self.changed.clear();
    }

    fn push(&mut self, c: Constraint) -> ConstraintId {
        let id = self.constraints.len();
        for u in c.watched() {
            self.watchers[u].push(id);
        }
        self.constraints.push(Rc::new(c));
        self.active.push(true);
        self.in_queue.push(false);
        self.trail.push(Entry::Added);
        id
    }

    /// Adds a constraint without propagating.
    fn add(&mut self, c: Constraint) -> ConstraintId {
        let is_false = c == Constraint::False;
        let id = self.push(c);
        if is_false {
            self.fail();
        } else {
            self.enqueue(id);
        }
        id
    }

    fn add_real(&mut self, terms: BTreeMap<UnknownId, f64>, constant: f64) -> ConstraintId {
        let display = Constraint::RealEq { terms: terms.iter().map(|(u, c)| (*c, *u)).collect(), rhs: -constant };
        let id = self.push(display);
        self.trail.push(Entry::Real(Box::new(self.real.clone())));
        if self.real.add(&terms, constant).is_err() {
            self.fail();
        }
        id
    }

    fn add_built(&mut self, b: Built) -> Option<ConstraintId> {
        match b {
            Built::Trivial(true) => None,
            Built::Trivial(false) => Some(self.add(Constraint::False)),
            Built::Real(terms, c) => Some(self.add_real(terms, c)),
            Built::Con(c) => Some(self.add(c)),
        }
    }

    /// Runs propagators until a fixpoint or a failure. Returns whether the
    /// store is consistent.
    pub fn propagate(&mut self) -> bool {
        while let Some(c) = self.queue.pop_front() {
            if self.failed {
                break;
            }
            self.in_queue[c] = false;
            if !self.active[c] {
                continue;
            }
            let con = Rc::clone(&self.constraints[c]);
            let mut vars = Vars::new(&mut self.doms, &mut self.trail, &mut self.changed);
            let result = match &*con {
                Constraint::Linear { terms, rel, rhs } => linear::propagate(terms, *rel, *rhs, &mut vars),
                Constraint::AllDifferent(items) => alldiff::propagate(items, &mut vars),
                Constraint::AtMost { k, items, value } => atmost::propagate(*k, items, *value, &mut vars),
                Constraint::Nonlinear { lhs, rel, rhs } => nonlinear::propagate(lhs, *rel, rhs, &mut vars),
                Constraint::RealEq { .. } => Ok(Status::Active),
                Constraint::False => Err(Failed),
                Constraint::Suspended { lhs, rel, rhs, real } => {
                    let b = self.build(lhs, *rel, rhs, *real);
                    if !matches!(b, Built::Con(Constraint::Suspended { .. })) {
                        self.deactivate(c);
                        self.add_built(b);
                    }
                    Ok(Status::Active)
                }
            };
            match result {
                Err(Failed) => {
                    self.changed.clear();
                    self.fail();
                    return false;
                }
                Ok(Status::Solved) => self.deactivate(c),
                Ok(Status::Active) => {}
            }
            self.wake_changed();
        }
        !self.failed
    }

    fn build(&self, lhs: &Form, rel: Rel, rhs: &Form, real: bool) -> Built {
        let det = |u: UnknownId| self.value(u);
        if real {
            let subst = |u: UnknownId| !self.is_real(u);
            let (Ok(l), Ok(r)) = (lhs.resolve(&det, &subst), rhs.resolve(&det, &subst)) else {
                return Built::Trivial(false);
            };
            let suspended = || Built::Con(Constraint::Suspended { lhs: l.clone(), rel, rhs: r.clone(), real: true });
            if l.has_element() || r.has_element() {
                return suspended();
            }
            let is_real = |u: UnknownId| self.is_real(u);
            let (Some(a), Some(b)) = (linearize_real(&l, &is_real), linearize_real(&r, &is_real)) else {
                return suspended();
            };
            let mut terms = a.terms;
            for (u, c) in b.terms {
                *terms.entry(u).or_insert(0.0) -= c;
            }
            let largest = terms.values().fold(0.0f64, |m, c| m.max(c.abs()));
            terms.retain(|_, c| *c != 0.0 && c.abs() > 1e-12 * largest);
            let constant = a.constant - b.constant;
            if terms.is_empty() {
                let scale = a.constant.abs().max(b.constant.abs());
                let ord = if constant.abs() <= RESIDUAL_TOLERANCE * (1.0 + scale) {
                    std::cmp::Ordering::Equal
                } else {
                    constant.total_cmp(&0.0)
                };
                return Built::Trivial(rel.holds(ord));
            }
            if rel != Rel::Eq {
                return suspended();
            }
            return Built::Real(terms, constant);
        }
        let (Ok(l), Ok(r)) = (lhs.resolve(&det, &|_| false), rhs.resolve(&det, &|_| false)) else {
            return Built::Trivial(false);
        };
        if l.has_element() || r.has_element() {
            return Built::Con(Constraint::Suspended { lhs: l, rel, rhs: r, real: false });
        }
        match normalize(&l, rel, &r) {
            Some(Normalized::Trivial(b)) => Built::Trivial(b),
            Some(Normalized::Linear(c)) => Built::Con(c),
            None => Built::Con(Constraint::Nonlinear { lhs: l, rel, rhs: r }),
        }
    }

    fn finish_tell(&mut self, id: Option<ConstraintId>, trivial: bool) -> TellResult {
        let ok = self.propagate();
        let display = match id {
            Some(id) => self.display_constraint(id),
            None => if trivial { "TRUE" } else { "FALSE" }.to_string(),
        };
        TellResult { ok, display }
    }

    /// Tells `lhs REL rhs`; `real` selects arithmetic over reals.
    pub fn tell_relation(&mut self, lhs: &Form, rel: Rel, rhs: &Form, real: bool) -> TellResult {
        if self.failed {
            return TellResult { ok: false, display: "FALSE".into() };
        }
        let b = self.build(lhs, rel, rhs, real);
        let id = self.add_built(b);
        self.finish_tell(id, true)
    }

    pub fn tell_all_different(&mut self, items: Vec<UnknownId>) -> TellResult {
        let id = self.add(Constraint::AllDifferent(items));
        self.finish_tell(Some(id), true)
    }

    pub fn tell_at_most(&mut self, k: i64, items: Vec<UnknownId>, value: i64) -> TellResult {
        let id = self.add(Constraint::AtMost { k, items, value });
        self.finish_tell(Some(id), true)
    }

    /// `Σ items REL bound`, repeated unknowns counted with multiplicity.
    pub fn tell_sum(&mut self, items: &[UnknownId], rel: Rel, bound: i64) -> TellResult {
        let sum = items
            .iter()
            .map(|&u| Form::Unknown(u))
            .reduce(|a, b| Form::Add(Box::new(a), Box::new(b)))
            .unwrap_or(Form::Int(0));
        self.tell_relation(&sum, rel, &Form::Int(bound), false)
    }

    /// Fixes `u` to `v` (used for labeling).
    pub fn tell_value(&mut self, u: UnknownId, v: i64) -> bool {
        if self.failed {
            return false;
        }
        let mut vars = Vars::new(&mut self.doms, &mut self.trail, &mut self.changed);
        if vars.restrict(u, &Domain::singleton(v)).is_err() {
            self.changed.clear();
            self.fail();
            return false;
        }
        self.wake_changed();
        self.propagate()
    }

    /// Active constraints still waiting for a subscript (or an integer
    /// unknown inside a real equation) to be determined.
    pub fn suspended_pending(&self) -> Option<String> {
        (0..self.constraints.len())
            .find(|&c| self.active[c] && matches!(*self.constraints[c], Constraint::Suspended { .. }))
            .map(|c| self.display_constraint(c))
    }

    pub fn display_constraint(&self, c: ConstraintId) -> String {
        let names = |u: UnknownId| self.name(u);
        self.constraints[c].display(&names).to_string()
    }

    /// Ids of the constraints that are still active.
    pub fn active_constraints(&self) -> impl Iterator<Item = ConstraintId> + '_ {
        (0..self.constraints.len()).filter(|&c| self.active[c])
    }

    fn write_value(&self, u: UnknownId, v: i64, out: &mut dyn std::fmt::Write) -> std::fmt::Result {
        match &self.unknowns[u].kind {
            Kind::Bool => out.write_str(if v != 0 { "TRUE" } else { "FALSE" }),
            Kind::Enum(names) => match names.get(v as usize) {
                Some(n) => out.write_str(n),
                None => write!(out, "{v}"),
            },
            Kind::Int | Kind::Real => write!(out, "{v}"),
        }
    }

    /// Source text of value `v` of unknown `u`.
    pub fn value_label(&self, u: UnknownId, v: i64) -> String {
        let mut s = String::new();
        self.write_value(u, v, &mut s).unwrap();
        s
    }

    /// The value of `u` if determined, otherwise its domain (`?` for an
    /// undetermined real).
    pub fn value_text(&self, u: UnknownId) -> String {
        let mut s = String::new();
        if self.unknowns[u].kind == Kind::Real {
            match self.real.value(u) {
                Some(x) => s.push_str(&fmt_real(x)),
                None => s.push('?'),
            }
        } else if let Some(v) = self.doms[u].value() {
            self.write_value(u, v, &mut s).unwrap();
        } else {
            write_set(&mut s, &self.doms[u], &|v, out| self.write_value(u, v, out)).unwrap();
        }
        s
    }

    /// Unknowns with their domains, then the active constraints.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (u, info) in self.unknowns.iter().enumerate() {
            writeln!(s, "{} : {} = {}", info.name, info.ty, self.value_text(u)).unwrap();
        }
        for c in self.active_constraints() {
            s.push_str(&self.display_constraint(c));
            s.push('\n');
        }
        s
    }

    /// Complete observable state, for checking that restoration is exact.
    pub fn fingerprint(&self) -> String {
        let mut s = self.dump();
        for (c, con) in self.constraints.iter().enumerate() {
            writeln!(s, "{c} {} {con:?}", self.active[c]).unwrap();
        }
        writeln!(s, "{:?} failed={}", self.real.rows(), self.failed).unwrap();
        for d in &self.doms {
            writeln!(s, "{d:?}").unwrap();
        }
        s
    }
}
