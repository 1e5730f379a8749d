//! The constraint store: unknowns, their domains, told constraints and
//! the propagation loop, all undoable through a trail.

pub mod constraint;
pub mod domain;
pub mod form;
#[allow(clippy::module_inception)]
mod store;

pub use constraint::{Constraint, ConstraintId};
pub use domain::Domain;
pub use form::{Form, Rel, UnknownId};
pub use store::{Kind, Mark, Store, TellResult, UnknownInfo};

/// Propagation found the store inconsistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Failed;

/// What a propagator concluded about its constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Active,
    /// Satisfied by every combination of current domain values.
    Solved,
}

pub(crate) enum Entry {
    Domain(UnknownId, Domain),
    Added,
    Deactivated(ConstraintId),
    Real(Box<crate::solvers::real::RealSolver>),
    Failed,
}

/// Trailed, change-tracking access to domains, handed to propagators.
pub struct Vars<'a> {
    doms: &'a mut [Domain],
    trail: &'a mut Vec<Entry>,
    changed: &'a mut Vec<UnknownId>,
}

impl<'a> Vars<'a> {
    pub(crate) fn new(doms: &'a mut [Domain], trail: &'a mut Vec<Entry>, changed: &'a mut Vec<UnknownId>) -> Self {
        Vars { doms, trail, changed }
    }

    pub fn get(&self, u: UnknownId) -> &Domain {
        &self.doms[u]
    }

    pub fn value(&self, u: UnknownId) -> Option<i64> {
        self.doms[u].value()
    }

    fn commit(&mut self, u: UnknownId, new: Domain) -> Result<bool, Failed> {
        if new == self.doms[u] {
            return Ok(false);
        }
        let old = std::mem::replace(&mut self.doms[u], new);
        self.trail.push(Entry::Domain(u, old));
        self.changed.push(u);
        if self.doms[u].is_empty() {
            return Err(Failed);
        }
        Ok(true)
    }

    /// Replaces the domain of `u` by its intersection with `d`.
    pub fn restrict(&mut self, u: UnknownId, d: &Domain) -> Result<bool, Failed> {
        let new = self.doms[u].intersect(d);
        self.commit(u, new)
    }

    pub fn remove(&mut self, u: UnknownId, v: i64) -> Result<bool, Failed> {
        if !self.doms[u].contains(v) {
            return Ok(false);
        }
        let mut new = self.doms[u].clone();
        new.remove(v);
        self.commit(u, new)
    }

    pub fn clamp(&mut self, u: UnknownId, lo: i64, hi: i64) -> Result<bool, Failed> {
        let d = &self.doms[u];
        if d.min().is_some_and(|m| m >= lo) && d.max().is_some_and(|m| m <= hi) {
            return Ok(false);
        }
        let mut new = d.clone();
        new.clamp(lo, hi);
        self.commit(u, new)
    }
}
