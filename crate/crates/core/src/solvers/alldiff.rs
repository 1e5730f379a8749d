//! ALL_DIFFERENT: pairwise disequality reasoning, and exact filtering
//! when the joint domain is small.

use super::exact;
use crate::store::{Failed, Status, UnknownId, Vars};

pub fn propagate(items: &[UnknownId], vars: &mut Vars) -> Result<Status, Failed> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        // An unknown listed twice can never differ from itself.
        return Err(Failed);
    }
    if exact::candidates(items, vars) <= exact::EXACT_LIMIT {
        return exact::filter(items, vars, &|vals| {
            let mut v = vals.to_vec();
            v.sort_unstable();
            v.windows(2).all(|w| w[0] != w[1])
        });
    }
    // Remove every determined value from the other members until nothing
    // new becomes determined.
    let mut done = vec![false; items.len()];
    loop {
        let mut progress = false;
        for i in 0..items.len() {
            if done[i] {
                continue;
            }
            let Some(v) = vars.value(items[i]) else { continue };
            done[i] = true;
            progress = true;
            for (j, &other) in items.iter().enumerate() {
                if j != i {
                    vars.remove(other, v)?;
                }
            }
        }
        if !progress {
            break;
        }
    }
    Ok(if done.iter().all(|d| *d) { Status::Solved } else { Status::Active })
}
