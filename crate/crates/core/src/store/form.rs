//! Evaluated forms: constraint operands after program variables have been
//! replaced by their values. Only unknowns and literals remain.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub type UnknownId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "<>",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }

    pub fn negate(self) -> Rel {
        match self {
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
        }
    }

    /// The relation with its operands swapped.
    pub fn flip(self) -> Rel {
        match self {
            Rel::Lt => Rel::Gt,
            Rel::Le => Rel::Ge,
            Rel::Gt => Rel::Lt,
            Rel::Ge => Rel::Le,
            r => r,
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Rel::Eq => ord == Ordering::Equal,
            Rel::Ne => ord != Ordering::Equal,
            Rel::Lt => ord == Ordering::Less,
            Rel::Le => ord != Ordering::Greater,
            Rel::Gt => ord == Ordering::Greater,
            Rel::Ge => ord != Ordering::Less,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Int(i64),
    Real(f64),
    Unknown(UnknownId),
    Add(Box<Form>, Box<Form>),
    Sub(Box<Form>, Box<Form>),
    Mul(Box<Form>, Box<Form>),
    /// Truncating integer division.
    Div(Box<Form>, Box<Form>),
    Mod(Box<Form>, Box<Form>),
    RealDiv(Box<Form>, Box<Form>),
    Neg(Box<Form>),
    Abs(Box<Form>),
    /// An array element selected by an unknown subscript. `table[i]` is the
    /// element at index `low + i`; `prefix`/`suffix` reproduce the source
    /// designator around the subscript for display.
    Element { prefix: String, index: Box<Form>, suffix: String, low: i64, table: Vec<Form> },
}

/// A subscript outside the array bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfRange;

impl Form {
    pub fn unknowns(&self, out: &mut Vec<UnknownId>) {
        match self {
            Form::Int(_) | Form::Real(_) => {}
            Form::Unknown(u) => out.push(*u),
            Form::Add(a, b)
            | Form::Sub(a, b)
            | Form::Mul(a, b)
            | Form::Div(a, b)
            | Form::Mod(a, b)
            | Form::RealDiv(a, b) => {
                a.unknowns(out);
                b.unknowns(out);
            }
            Form::Neg(a) | Form::Abs(a) => a.unknowns(out),
            Form::Element { index, table, .. } => {
                index.unknowns(out);
                for t in table {
                    t.unknowns(out);
                }
            }
        }
    }

    pub fn has_element(&self) -> bool {
        match self {
            Form::Int(_) | Form::Real(_) | Form::Unknown(_) => false,
            Form::Add(a, b)
            | Form::Sub(a, b)
            | Form::Mul(a, b)
            | Form::Div(a, b)
            | Form::Mod(a, b)
            | Form::RealDiv(a, b) => a.has_element() || b.has_element(),
            Form::Neg(a) | Form::Abs(a) => a.has_element(),
            Form::Element { .. } => true,
        }
    }

    /// Replaces element selections whose subscript is determined, and (in
    /// real forms) determined integer unknowns, by what they denote.
    pub fn resolve(
        &self,
        det: &dyn Fn(UnknownId) -> Option<i64>,
        substitute: &dyn Fn(UnknownId) -> bool,
    ) -> Result<Form, OutOfRange> {
        let bin = |a: &Form, b: &Form, f: fn(Box<Form>, Box<Form>) -> Form| -> Result<Form, OutOfRange> {
            Ok(f(Box::new(a.resolve(det, substitute)?), Box::new(b.resolve(det, substitute)?)))
        };
        Ok(match self {
            Form::Unknown(u) if substitute(*u) => match det(*u) {
                Some(v) => Form::Int(v),
                None => self.clone(),
            },
            Form::Int(_) | Form::Real(_) | Form::Unknown(_) => self.clone(),
            Form::Add(a, b) => bin(a, b, Form::Add)?,
            Form::Sub(a, b) => bin(a, b, Form::Sub)?,
            Form::Mul(a, b) => bin(a, b, Form::Mul)?,
            Form::Div(a, b) => bin(a, b, Form::Div)?,
            Form::Mod(a, b) => bin(a, b, Form::Mod)?,
            Form::RealDiv(a, b) => bin(a, b, Form::RealDiv)?,
            Form::Neg(a) => Form::Neg(Box::new(a.resolve(det, substitute)?)),
            Form::Abs(a) => Form::Abs(Box::new(a.resolve(det, substitute)?)),
            Form::Element { prefix, index, suffix, low, table } => {
                let index = index.resolve(det, substitute)?;
                let at = match &index {
                    Form::Int(v) => Some(*v),
                    Form::Unknown(u) => det(*u),
                    _ => None,
                };
                match at {
                    Some(v) => {
                        let i = v.checked_sub(*low).ok_or(OutOfRange)?;
                        if i < 0 || i as usize >= table.len() {
                            return Err(OutOfRange);
                        }
                        table[i as usize].resolve(det, substitute)?
                    }
                    None => Form::Element {
                        prefix: prefix.clone(),
                        index: Box::new(index),
                        suffix: suffix.clone(),
                        low: *low,
                        table: table.clone(),
                    },
                }
            }
        })
    }

    /// Integer value under a total assignment; `None` when undefined
    /// (division by zero, overflow, subscript out of range).
    pub fn eval(&self, val: &dyn Fn(UnknownId) -> i64) -> Option<i64> {
        Some(match self {
            Form::Int(n) => *n,
            Form::Real(_) | Form::RealDiv(..) => return None,
            Form::Unknown(u) => val(*u),
            Form::Add(a, b) => a.eval(val)?.checked_add(b.eval(val)?)?,
            Form::Sub(a, b) => a.eval(val)?.checked_sub(b.eval(val)?)?,
            Form::Mul(a, b) => a.eval(val)?.checked_mul(b.eval(val)?)?,
            Form::Div(a, b) => a.eval(val)?.checked_div(b.eval(val)?)?,
            Form::Mod(a, b) => a.eval(val)?.checked_rem(b.eval(val)?)?,
            Form::Neg(a) => a.eval(val)?.checked_neg()?,
            Form::Abs(a) => a.eval(val)?.checked_abs()?,
            Form::Element { index, low, table, .. } => {
                let i = index.eval(val)?.checked_sub(*low)?;
                if i < 0 {
                    return None;
                }
                table.get(i as usize)?.eval(val)?
            }
        })
    }
}

/// `Σ coef·unknown + constant` over integers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lin {
    pub terms: BTreeMap<UnknownId, i64>,
    pub constant: i64,
}

impl Lin {
    fn constant(c: i64) -> Self {
        Lin { terms: BTreeMap::new(), constant: c }
    }

    fn scale(mut self, k: i64) -> Option<Self> {
        self.constant = self.constant.checked_mul(k)?;
        for c in self.terms.values_mut() {
            *c = c.checked_mul(k)?;
        }
        Some(self)
    }

    fn add(mut self, other: Lin, sign: i64) -> Option<Self> {
        self.constant = self.constant.checked_add(other.constant.checked_mul(sign)?)?;
        for (u, c) in other.terms {
            let e = self.terms.entry(u).or_insert(0);
            *e = e.checked_add(c.checked_mul(sign)?)?;
        }
        self.terms.retain(|_, c| *c != 0);
        Some(self)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Integer linearization; `None` for non-linear forms or on overflow.
pub fn linearize(f: &Form) -> Option<Lin> {
    match f {
        Form::Int(n) => Some(Lin::constant(*n)),
        Form::Unknown(u) => {
            let mut terms = BTreeMap::new();
            terms.insert(*u, 1);
            Some(Lin { terms, constant: 0 })
        }
        Form::Add(a, b) => linearize(a)?.add(linearize(b)?, 1),
        Form::Sub(a, b) => linearize(a)?.add(linearize(b)?, -1),
        Form::Neg(a) => linearize(a)?.scale(-1),
        Form::Mul(a, b) => {
            let (a, b) = (linearize(a)?, linearize(b)?);
            if a.is_constant() {
                b.scale(a.constant)
            } else if b.is_constant() {
                a.scale(b.constant)
            } else {
                None
            }
        }
        Form::Div(a, b) | Form::Mod(a, b) => {
            let (x, y) = (linearize(a)?, linearize(b)?);
            if !x.is_constant() || !y.is_constant() {
                return None;
            }
            let v = match f {
                Form::Div(..) => x.constant.checked_div(y.constant)?,
                _ => x.constant.checked_rem(y.constant)?,
            };
            Some(Lin::constant(v))
        }
        Form::Abs(a) => {
            let x = linearize(a)?;
            x.is_constant().then_some(())?;
            Some(Lin::constant(x.constant.checked_abs()?))
        }
        Form::Real(_) | Form::RealDiv(..) | Form::Element { .. } => None,
    }
}

/// `Σ coef·unknown + constant` over reals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealLin {
    pub terms: BTreeMap<UnknownId, f64>,
    pub constant: f64,
}

impl RealLin {
    fn constant(c: f64) -> Self {
        RealLin { terms: BTreeMap::new(), constant: c }
    }

    fn scale(mut self, k: f64) -> Self {
        self.constant *= k;
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self
    }

    fn add(mut self, other: RealLin, sign: f64) -> Self {
        self.constant += sign * other.constant;
        for (u, c) in other.terms {
            *self.terms.entry(u).or_insert(0.0) += sign * c;
        }
        self.terms.retain(|_, c| *c != 0.0);
        self
    }
}

/// Real linearization. Every unknown must be real (`is_real`); integer
/// unknowns must already have been resolved to constants.
pub fn linearize_real(f: &Form, is_real: &dyn Fn(UnknownId) -> bool) -> Option<RealLin> {
    let lin = |x: &Form| linearize_real(x, is_real);
    match f {
        Form::Int(n) => Some(RealLin::constant(*n as f64)),
        Form::Real(x) => Some(RealLin::constant(*x)),
        Form::Unknown(u) if is_real(*u) => {
            let mut terms = BTreeMap::new();
            terms.insert(*u, 1.0);
            Some(RealLin { terms, constant: 0.0 })
        }
        Form::Unknown(_) | Form::Element { .. } => None,
        Form::Add(a, b) => Some(lin(a)?.add(lin(b)?, 1.0)),
        Form::Sub(a, b) => Some(lin(a)?.add(lin(b)?, -1.0)),
        Form::Neg(a) => Some(lin(a)?.scale(-1.0)),
        Form::Mul(a, b) => {
            let (a, b) = (lin(a)?, lin(b)?);
            if a.terms.is_empty() {
                Some(b.scale(a.constant))
            } else if b.terms.is_empty() {
                Some(a.scale(b.constant))
            } else {
                None
            }
        }
        Form::RealDiv(a, b) => {
            let (a, b) = (lin(a)?, lin(b)?);
            if b.terms.is_empty() && b.constant != 0.0 {
                Some(a.scale(1.0 / b.constant))
            } else {
                None
            }
        }
        Form::Div(..) | Form::Mod(..) | Form::Abs(_) => {
            let v = linearize(f)?;
            v.is_constant().then(|| RealLin::constant(v.constant as f64))
        }
    }
}

/// Formats a real number compactly (shortest round-trip representation).
pub fn fmt_real(x: f64) -> String {
    format!("{x}")
}

/// Display adapter for a form, resolving unknown names through `names`.
pub struct FormDisplay<'a> {
    pub form: &'a Form,
    pub names: &'a dyn Fn(UnknownId) -> String,
}

fn prec(f: &Form) -> u8 {
    match f {
        Form::Add(..) | Form::Sub(..) => 1,
        Form::Mul(..) | Form::Div(..) | Form::Mod(..) | Form::RealDiv(..) => 2,
        Form::Neg(_) => 1,
        Form::Int(n) if *n < 0 => 1,
        Form::Real(x) if *x < 0.0 => 1,
        _ => 3,
    }
}

fn write_form(out: &mut fmt::Formatter<'_>, f: &Form, min: u8, names: &dyn Fn(UnknownId) -> String) -> fmt::Result {
    let wrap = prec(f) < min;
    if wrap {
        out.write_str("(")?;
    }
    let mut bin = |a: &Form, b: &Form, op: &str, p: u8| -> fmt::Result {
        write_form(out, a, p, names)?;
        write!(out, " {op} ")?;
        write_form(out, b, p + 1, names)
    };
    match f {
        Form::Int(n) => write!(out, "{n}")?,
        Form::Real(x) => out.write_str(&fmt_real(*x))?,
        Form::Unknown(u) => out.write_str(&names(*u))?,
        Form::Add(a, b) => bin(a, b, "+", 1)?,
        Form::Sub(a, b) => bin(a, b, "-", 1)?,
        Form::Mul(a, b) => bin(a, b, "*", 2)?,
        Form::Div(a, b) => bin(a, b, "DIV", 2)?,
        Form::Mod(a, b) => bin(a, b, "MOD", 2)?,
        Form::RealDiv(a, b) => bin(a, b, "/", 2)?,
        Form::Neg(a) => {
            out.write_str("-")?;
            write_form(out, a, 2, names)?;
        }
        Form::Abs(a) => {
            out.write_str("abs(")?;
            write_form(out, a, 0, names)?;
            out.write_str(")")?;
        }
        Form::Element { prefix, index, suffix, .. } => {
            out.write_str(prefix)?;
            write_form(out, index, 0, names)?;
            out.write_str(suffix)?;
        }
    }
    if wrap {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_form(f, self.form, 0, self.names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: UnknownId) -> Box<Form> {
        Box::new(Form::Unknown(i))
    }

    fn n(v: i64) -> Box<Form> {
        Box::new(Form::Int(v))
    }

    fn names(u: UnknownId) -> String {
        format!("X[{u}]")
    }

    #[test]
    fn linearizes_sums_and_scalings() {
        // X0 - (X1 + 2) * 3 + X0
        let f = Form::Add(Box::new(Form::Sub(u(0), Box::new(Form::Mul(Box::new(Form::Add(u(1), n(2))), n(3))))), u(0));
        let l = linearize(&f).unwrap();
        assert_eq!(l.terms.into_iter().collect::<Vec<_>>(), vec![(0, 2), (1, -3)]);
        assert_eq!(l.constant, -6);
        assert!(linearize(&Form::Mul(u(0), u(1))).is_none());
        assert_eq!(linearize(&Form::Sub(u(0), u(0))).unwrap().terms.len(), 0);
    }

    #[test]
    fn element_resolution_and_display() {
        let e = Form::Element {
            prefix: "Y[".into(),
            index: u(3),
            suffix: "]".into(),
            low: 1,
            table: vec![Form::Unknown(10), Form::Unknown(11)],
        };
        let shown = FormDisplay { form: &e, names: &names }.to_string();
        assert_eq!(shown, "Y[X[3]]");
        let det = |x: UnknownId| if x == 3 { Some(2) } else { None };
        assert_eq!(e.resolve(&det, &|_| false).unwrap(), Form::Unknown(11));
        let out = |x: UnknownId| if x == 3 { Some(5) } else { None };
        assert_eq!(e.resolve(&out, &|_| false), Err(OutOfRange));
        assert_eq!(e.eval(&|x| if x == 3 { 1 } else { 7 }), Some(7));
    }

    #[test]
    fn real_linearization_divides_by_constants() {
        let f = Form::RealDiv(Box::new(Form::Add(u(0), u(1))), Box::new(Form::Real(4.0)));
        let l = linearize_real(&f, &|_| true).unwrap();
        assert_eq!(l.terms[&0], 0.25);
        assert!(linearize_real(&Form::RealDiv(n(1), u(0)), &|_| true).is_none());
    }

    #[test]
    fn display_parenthesizes() {
        let f = Form::Mul(Box::new(Form::Sub(u(0), n(1))), n(2));
        assert_eq!(FormDisplay { form: &f, names: &names }.to_string(), "(X[0] - 1) * 2");
    }
}
