//! Exact filtering by enumeration, used when the undetermined unknowns of a
//! constraint have a small joint domain.

use crate::store::{Domain, Failed, Status, UnknownId, Vars};

/// Largest number of candidate tuples enumerated per propagation.
pub const EXACT_LIMIT: u64 = 4096;

/// Number of candidate tuples over the distinct unknowns in `us`, capped
/// just above [`EXACT_LIMIT`].
pub fn candidates(us: &[UnknownId], vars: &Vars) -> u64 {
    let mut distinct: Vec<UnknownId> = us.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut product: u64 = 1;
    for u in distinct {
        product = product.saturating_mul(vars.get(u).size());
        if product > EXACT_LIMIT {
            return EXACT_LIMIT + 1;
        }
    }
    product
}

/// Restricts every unknown in `us` to the values occurring in some tuple
/// that satisfies `pred`. `pred` receives one value per position of `us`
/// (repeated unknowns get the same value). Reports `Solved` when every
/// tuple satisfies `pred`.
pub fn filter(us: &[UnknownId], vars: &mut Vars, pred: &dyn Fn(&[i64]) -> bool) -> Result<Status, Failed> {
    let mut distinct: Vec<UnknownId> = us.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let pos: Vec<usize> = us.iter().map(|u| distinct.binary_search(u).unwrap()).collect();
    let values: Vec<Vec<i64>> = distinct.iter().map(|&u| vars.get(u).values().collect()).collect();
    if values.iter().any(|v| v.is_empty()) {
        return Err(Failed);
    }
    let mut supported: Vec<Vec<bool>> = values.iter().map(|v| vec![false; v.len()]).collect();
    let mut odometer = vec![0usize; distinct.len()];
    let mut tuple = vec![0i64; us.len()];
    let mut all = true;
    let mut any = false;
    loop {
        for (i, &p) in pos.iter().enumerate() {
            tuple[i] = values[p][odometer[p]];
        }
        if pred(&tuple) {
            any = true;
            for (k, &o) in odometer.iter().enumerate() {
                supported[k][o] = true;
            }
        } else {
            all = false;
        }
        // advance
        let mut k = 0;
        loop {
            if k == odometer.len() {
                break;
            }
            odometer[k] += 1;
            if odometer[k] < values[k].len() {
                break;
            }
            odometer[k] = 0;
            k += 1;
        }
        if k == odometer.len() {
            break;
        }
    }
    if !any {
        return Err(Failed);
    }
    for (k, &u) in distinct.iter().enumerate() {
        if supported[k].iter().all(|s| *s) {
            continue;
        }
        let keep = Domain::from_values(values[k].iter().zip(&supported[k]).filter(|(_, s)| **s).map(|(v, _)| *v));
        vars.restrict(u, &keep)?;
    }
    Ok(if all { Status::Solved } else { Status::Active })
}
