//! Propagation for `Σ a·x REL c` over finite domains.
//!
//! Inequalities get bounds reasoning, which is exact for them. Equalities
//! get bounds reasoning plus exact filtering for one or two undetermined
//! unknowns with unit coefficients or small joint domains. Disequalities
//! act once at most one unknown is undetermined.

use super::exact;
use crate::store::{Domain, Failed, Rel, Status, UnknownId, Vars};

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

fn clamp_i64(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// Range of `a·x`.
fn term_range(a: i64, d: &Domain) -> (i128, i128) {
    let (lo, hi) = (d.min().unwrap() as i128, d.max().unwrap() as i128);
    let a = a as i128;
    if a > 0 {
        (a * lo, a * hi)
    } else {
        (a * hi, a * lo)
    }
}

fn sum_range(terms: &[(i64, UnknownId)], vars: &Vars) -> (i128, i128) {
    terms.iter().fold((0, 0), |(lo, hi), &(a, u)| {
        let (l, h) = term_range(a, vars.get(u));
        (lo + l, hi + h)
    })
}

/// `Σ sign·a·x <= c`: one bounds pass. Returns whether anything changed.
fn bounds_le(terms: &[(i64, UnknownId)], sign: i64, c: i128, vars: &mut Vars) -> Result<bool, Failed> {
    let mins: Vec<i128> = terms.iter().map(|&(a, u)| term_range(sign * a, vars.get(u)).0).collect();
    let total: i128 = mins.iter().sum();
    if total > c {
        return Err(Failed);
    }
    let mut changed = false;
    for (i, &(a, u)) in terms.iter().enumerate() {
        let a = (sign * a) as i128;
        let slack = c - (total - mins[i]);
        // a·x <= slack
        changed |= if a > 0 {
            vars.clamp(u, i64::MIN, clamp_i64(floor_div(slack, a)))?
        } else {
            vars.clamp(u, clamp_i64(ceil_div(slack, a)), i64::MAX)?
        };
    }
    Ok(changed)
}

pub fn propagate(terms: &[(i64, UnknownId)], rel: Rel, rhs: i64, vars: &mut Vars) -> Result<Status, Failed> {
    let c = rhs as i128;
    match rel {
        Rel::Le | Rel::Lt => {
            let c = if rel == Rel::Lt { c - 1 } else { c };
            bounds_le(terms, 1, c, vars)?;
            Ok(if sum_range(terms, vars).1 <= c { Status::Solved } else { Status::Active })
        }
        Rel::Ge | Rel::Gt => {
            let c = if rel == Rel::Gt { c + 1 } else { c };
            bounds_le(terms, -1, -c, vars)?;
            Ok(if sum_range(terms, vars).0 >= c { Status::Solved } else { Status::Active })
        }
        Rel::Ne => disequality(terms, c, vars),
        Rel::Eq => equality(terms, c, vars),
    }
}

fn split(terms: &[(i64, UnknownId)], vars: &Vars) -> (i128, Vec<(i64, UnknownId)>) {
    let mut fixed = 0i128;
    let mut open = Vec::new();
    for &(a, u) in terms {
        match vars.value(u) {
            Some(v) => fixed += a as i128 * v as i128,
            None => open.push((a, u)),
        }
    }
    (fixed, open)
}

fn disequality(terms: &[(i64, UnknownId)], c: i128, vars: &mut Vars) -> Result<Status, Failed> {
    let (fixed, open) = split(terms, vars);
    match open.as_slice() {
        [] => {
            if fixed == c {
                Err(Failed)
            } else {
                Ok(Status::Solved)
            }
        }
        [(a, u)] => {
            let rest = c - fixed;
            if rest % (*a as i128) == 0 {
                let v = rest / *a as i128;
                if let Ok(v) = i64::try_from(v) {
                    vars.remove(*u, v)?;
                }
            }
            Ok(Status::Solved)
        }
        _ => {
            let (lo, hi) = sum_range(terms, vars);
            if c < lo || c > hi {
                Ok(Status::Solved)
            } else {
                Ok(Status::Active)
            }
        }
    }
}

fn equality(terms: &[(i64, UnknownId)], c: i128, vars: &mut Vars) -> Result<Status, Failed> {
    loop {
        let a = bounds_le(terms, 1, c, vars)?;
        let b = bounds_le(terms, -1, -c, vars)?;
        if !a && !b {
            break;
        }
    }
    let (fixed, open) = split(terms, vars);
    match open.as_slice() {
        [] => {
            if fixed == c {
                Ok(Status::Solved)
            } else {
                Err(Failed)
            }
        }
        [(a, u)] => {
            let rest = c - fixed;
            let a = *a as i128;
            if rest % a != 0 {
                return Err(Failed);
            }
            let v = i64::try_from(rest / a).map_err(|_| Failed)?;
            vars.restrict(*u, &Domain::singleton(v))?;
            Ok(Status::Solved)
        }
        [(a, x), (b, y)] if a.abs() == 1 && b.abs() == 1 && x != y => {
            let r = i64::try_from(c - fixed).map_err(|_| Failed)?;
            // a·x + b·y = r  ⇒  x = a·r − a·b·y
            loop {
                let dx = vars.get(*y).affine(-a * b, a * r);
                let cx = vars.restrict(*x, &dx)?;
                let dy = vars.get(*x).affine(-a * b, b * r);
                let cy = vars.restrict(*y, &dy)?;
                if !cx && !cy {
                    break;
                }
            }
            Ok(if vars.value(*x).is_some() { Status::Solved } else { Status::Active })
        }
        _ => {
            let us: Vec<UnknownId> = open.iter().map(|t| t.1).collect();
            if exact::candidates(&us, vars) > exact::EXACT_LIMIT {
                return Ok(Status::Active);
            }
            let coefs: Vec<i128> = open.iter().map(|t| t.0 as i128).collect();
            let target = c - fixed;
            exact::filter(&us, vars, &|vals| {
                vals.iter().zip(&coefs).map(|(v, a)| *v as i128 * a).sum::<i128>() == target
            })
        }
    }
}
