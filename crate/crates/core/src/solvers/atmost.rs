//! AT_MOST(k, items, v): at most `k` of the items take the value `v`.
//!
//! Only items already determined to `v` are counted; an unknown listed
//! several times counts once per occurrence.

use std::collections::BTreeMap;

use crate::store::{Failed, Status, UnknownId, Vars};

pub fn propagate(k: i64, items: &[UnknownId], value: i64, vars: &mut Vars) -> Result<Status, Failed> {
    let mut multiplicity: BTreeMap<UnknownId, i64> = BTreeMap::new();
    for &u in items {
        *multiplicity.entry(u).or_insert(0) += 1;
    }
    let fixed: i64 = multiplicity.iter().filter(|(u, _)| vars.value(**u) == Some(value)).map(|(_, m)| m).sum();
    if fixed > k {
        return Err(Failed);
    }
    let mut possible = 0;
    for (&u, &m) in &multiplicity {
        if vars.value(u).is_some() || !vars.get(u).contains(value) {
            continue;
        }
        if fixed + m > k {
            vars.remove(u, value)?;
        } else {
            possible += m;
        }
    }
    Ok(if fixed + possible <= k { Status::Solved } else { Status::Active })
}
