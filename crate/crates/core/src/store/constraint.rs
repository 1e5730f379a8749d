//! Stored constraints and their normalized display.

use std::fmt::{self, Write};

use super::form::{fmt_real, linearize, Form, FormDisplay, Lin, Rel, UnknownId};

pub type ConstraintId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `Σ coef·x REL rhs` with `REL` one of `=`, `<>`, `<=`, `>=`;
    /// terms sorted by unknown, coefficients non-zero and coprime.
    Linear { terms: Vec<(i64, UnknownId)>, rel: Rel, rhs: i64 },
    AllDifferent(Vec<UnknownId>),
    AtMost { k: i64, items: Vec<UnknownId>, value: i64 },
    /// `Σ coef·x = rhs` over real unknowns.
    RealEq { terms: Vec<(f64, UnknownId)>, rhs: f64 },
    /// Non-linear integer relation, filtered by enumeration when small.
    Nonlinear { lhs: Form, rel: Rel, rhs: Form },
    /// Waits for subscripts (or integer unknowns inside a real equation)
    /// to become determined, then is rewritten.
    Suspended { lhs: Form, rel: Rel, rhs: Form, real: bool },
    /// ⊥
    False,
}

impl Constraint {
    /// Unknowns whose domain changes should wake this constraint.
    pub fn watched(&self) -> Vec<UnknownId> {
        let mut us = match self {
            Constraint::Linear { terms, .. } => terms.iter().map(|t| t.1).collect(),
            Constraint::AllDifferent(items) | Constraint::AtMost { items, .. } => items.clone(),
            Constraint::RealEq { .. } | Constraint::False => Vec::new(),
            Constraint::Nonlinear { lhs, rhs, .. } | Constraint::Suspended { lhs, rhs, .. } => {
                let mut v = Vec::new();
                lhs.unknowns(&mut v);
                rhs.unknowns(&mut v);
                v
            }
        };
        us.sort_unstable();
        us.dedup();
        us
    }

    pub fn display<'a>(&'a self, names: &'a dyn Fn(UnknownId) -> String) -> ConstraintDisplay<'a> {
        ConstraintDisplay { c: self, names }
    }
}

pub struct ConstraintDisplay<'a> {
    c: &'a Constraint,
    names: &'a dyn Fn(UnknownId) -> String,
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[UnknownId], names: &dyn Fn(UnknownId) -> String) -> fmt::Result {
    f.write_char('[')?;
    for (i, u) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&names(*u))?;
    }
    f.write_char(']')
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names;
        match self.c {
            Constraint::Linear { terms, rel, rhs } => {
                for (i, &(c, u)) in terms.iter().enumerate() {
                    let name = names(u);
                    match (i, c) {
                        (0, 1) => write!(f, "{name}")?,
                        (0, -1) => write!(f, "-{name}")?,
                        (0, c) => write!(f, "{c}*{name}")?,
                        (_, 1) => write!(f, " + {name}")?,
                        (_, -1) => write!(f, " - {name}")?,
                        (_, c) if c < 0 => write!(f, " - {}*{name}", -c)?,
                        (_, c) => write!(f, " + {c}*{name}")?,
                    }
                }
                write!(f, " {rel} {rhs}")
            }
            Constraint::AllDifferent(items) => {
                f.write_str("ALL_DIFFERENT(")?;
                write_list(f, items, names)?;
                f.write_char(')')
            }
            Constraint::AtMost { k, items, value } => {
                write!(f, "AT_MOST({k}, ")?;
                write_list(f, items, names)?;
                write!(f, ", {value})")
            }
            Constraint::RealEq { terms, rhs } => {
                for (i, &(c, u)) in terms.iter().enumerate() {
                    let name = names(u);
                    if i == 0 {
                        if c == 1.0 {
                            write!(f, "{name}")?;
                        } else if c == -1.0 {
                            write!(f, "-{name}")?;
                        } else {
                            write!(f, "{}*{name}", fmt_real(c))?;
                        }
                    } else if c == 1.0 {
                        write!(f, " + {name}")?;
                    } else if c == -1.0 {
                        write!(f, " - {name}")?;
                    } else if c < 0.0 {
                        write!(f, " - {}*{name}", fmt_real(-c))?;
                    } else {
                        write!(f, " + {}*{name}", fmt_real(c))?;
                    }
                }
                write!(f, " = {}", fmt_real(*rhs))
            }
            Constraint::Nonlinear { lhs, rel, rhs } | Constraint::Suspended { lhs, rel, rhs, .. } => {
                write!(
                    f,
                    "{} {rel} {}",
                    FormDisplay { form: lhs, names },
                    FormDisplay { form: rhs, names }
                )
            }
            Constraint::False => f.write_str("FALSE"),
        }
    }
}

/// Outcome of normalizing `lhs REL rhs` where both sides are linear.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    Trivial(bool),
    Linear(Constraint),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Brings `lhs REL rhs` into the form `Σ coef·x REL' c` with `REL'` one
/// of `=`, `<>`, `<=`, `>=` and coprime coefficients.
pub fn normalize(lhs: &Form, rel: Rel, rhs: &Form) -> Option<Normalized> {
    let l = linearize(lhs)?;
    let r = linearize(rhs)?;
    let mut diff = Lin::default();
    for (u, c) in l.terms {
        *diff.terms.entry(u).or_insert(0) += c;
    }
    for (u, c) in r.terms {
        let e = diff.terms.entry(u).or_insert(0);
        *e = e.checked_sub(c)?;
    }
    diff.terms.retain(|_, c| *c != 0);
    // Σ terms REL r.constant - l.constant
    let mut bound = r.constant.checked_sub(l.constant)?;
    let mut rel = rel;
    match rel {
        Rel::Lt => {
            rel = Rel::Le;
            bound = bound.checked_sub(1)?;
        }
        Rel::Gt => {
            rel = Rel::Ge;
            bound = bound.checked_add(1)?;
        }
        _ => {}
    }
    if diff.terms.is_empty() {
        return Some(Normalized::Trivial(rel.holds(0.cmp(&bound))));
    }
    let g = diff.terms.values().fold(0, |g, c| gcd(g, *c));
    if g > 1 {
        let divisible = bound % g == 0;
        match rel {
            Rel::Eq if !divisible => return Some(Normalized::Trivial(false)),
            Rel::Ne if !divisible => return Some(Normalized::Trivial(true)),
            Rel::Le => bound = bound.div_euclid(g),
            Rel::Ge => bound = -((-bound).div_euclid(g)),
            _ => bound /= g,
        }
        for c in diff.terms.values_mut() {
            *c /= g;
        }
    }
    Some(Normalized::Linear(Constraint::Linear {
        terms: diff.terms.into_iter().map(|(u, c)| (c, u)).collect(),
        rel,
        rhs: bound,
    }))
}
