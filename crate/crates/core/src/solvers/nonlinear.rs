//! Non-linear integer relations (products of unknowns, abs, DIV, MOD):
//! checked once determined, filtered exactly while the joint domain is
//! small, left alone otherwise.

use super::exact;
use crate::store::{Failed, Form, Rel, Status, UnknownId, Vars};

fn holds(lhs: &Form, rel: Rel, rhs: &Form, val: &dyn Fn(UnknownId) -> i64) -> bool {
    match (lhs.eval(val), rhs.eval(val)) {
        (Some(a), Some(b)) => rel.holds(a.cmp(&b)),
        _ => false,
    }
}

pub fn propagate(lhs: &Form, rel: Rel, rhs: &Form, vars: &mut Vars) -> Result<Status, Failed> {
    let mut us = Vec::new();
    lhs.unknowns(&mut us);
    rhs.unknowns(&mut us);
    us.sort_unstable();
    us.dedup();
    if exact::candidates(&us, vars) > exact::EXACT_LIMIT {
        return Ok(Status::Active);
    }
    let order = us.clone();
    exact::filter(&us, vars, &|vals| {
        let val = |u: UnknownId| vals[order.binary_search(&u).unwrap()];
        holds(lhs, rel, rhs, &val)
    })
}
