//! Pretty-printer for the surface syntax tree. Its output reparses to a
//! structurally identical tree.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

pub fn module_to_string(m: &Module) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "MODULE {};", m.name);
    decls(&mut out, &m.decls, 0);
    out.push_str("BEGIN\n");
    stmt_seq(&mut out, &m.body, 1);
    let _ = writeln!(out, "END {}.", m.name);
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    stmt(&mut out, s, 0);
    out
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn decls(out: &mut String, ds: &[Decl], depth: usize) {
    for d in ds {
        match d {
            Decl::Const(items) => {
                pad(out, depth);
                out.push_str("CONST\n");
                for c in items {
                    pad(out, depth + 1);
                    let _ = writeln!(out, "{} = {};", c.name, expr_to_string(&c.value));
                }
            }
            Decl::Type(items) => {
                pad(out, depth);
                out.push_str("TYPE\n");
                for t in items {
                    pad(out, depth + 1);
                    let _ = writeln!(out, "{} = {};", t.name, type_to_string(&t.ty));
                }
            }
            Decl::Var(items) => {
                pad(out, depth);
                out.push_str("VAR\n");
                for v in items {
                    pad(out, depth + 1);
                    let _ = writeln!(out, "{}: {};", v.names.join(", "), type_to_string(&v.ty));
                }
            }
            Decl::Procedure(p) => {
                pad(out, depth);
                let _ = write!(out, "PROCEDURE {}", p.name);
                if !p.params.is_empty() {
                    let sections: Vec<String> = p
                        .params
                        .iter()
                        .map(|s| {
                            let mode = match s.mode {
                                ParamMode::Value => "",
                                ParamMode::Var => "VAR ",
                                ParamMode::Mix => "MIX ",
                            };
                            format!("{mode}{}: {}", s.names.join(", "), type_to_string(&s.ty))
                        })
                        .collect();
                    let _ = write!(out, "({})", sections.join("; "));
                }
                out.push_str(";\n");
                decls(out, &p.decls, depth + 1);
                pad(out, depth);
                out.push_str("BEGIN\n");
                stmt_seq(out, &p.body, depth + 1);
                pad(out, depth);
                let _ = writeln!(out, "END {};", p.name);
            }
        }
    }
}

pub fn type_to_string(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Named(n, _) => n.clone(),
        TypeExpr::Subrange(lo, hi) => format!("[{}..{}]", expr_to_string(lo), expr_to_string(hi)),
        TypeExpr::Enumeration(names, _) => format!("({})", names.join(", ")),
        TypeExpr::Array(idx, elem) => {
            let idx: Vec<String> = idx.iter().map(type_to_string).collect();
            format!("ARRAY {} OF {}", idx.join(", "), type_to_string(elem))
        }
        TypeExpr::Record(fields) => {
            let mut s = String::from("RECORD ");
            for f in fields {
                let _ = write!(s, "{}: {}; ", f.names.join(", "), type_to_string(&f.ty));
            }
            s.push_str("END");
            s
        }
        TypeExpr::Constrained(inner, _) => format!("CONSTRAINED {}", type_to_string(inner)),
        TypeExpr::List(inner) => format!("LIST OF {}", type_to_string(inner)),
    }
}

fn stmt_seq(out: &mut String, ss: &[Stmt], depth: usize) {
    for (i, s) in ss.iter().enumerate() {
        pad(out, depth);
        stmt(out, s, depth);
        if i + 1 < ss.len() {
            out.push(';');
        }
        out.push('\n');
    }
}

fn block(out: &mut String, ss: &[Stmt], depth: usize) {
    out.push('\n');
    stmt_seq(out, ss, depth + 1);
    pad(out, depth);
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    match &s.kind {
        StmtKind::Assign(lhs, rhs) => {
            expr(out, lhs, 0);
            out.push_str(" := ");
            expr(out, rhs, 0);
        }
        StmtKind::Test(e) => expr(out, e, 0),
        StmtKind::If(arms, otherwise) => {
            for (i, (cond, body)) in arms.iter().enumerate() {
                out.push_str(if i == 0 { "IF " } else { "ELSIF " });
                expr(out, cond, 0);
                out.push_str(" THEN");
                block(out, body, depth);
            }
            if let Some(body) = otherwise {
                out.push_str("ELSE");
                block(out, body, depth);
            }
            out.push_str("END");
        }
        StmtKind::While(cond, body) => {
            out.push_str("WHILE ");
            expr(out, cond, 0);
            out.push_str(" DO");
            block(out, body, depth);
            out.push_str("END");
        }
        StmtKind::For(q) | StmtKind::Some(q) => {
            out.push_str(if matches!(s.kind, StmtKind::For(_)) { "FOR " } else { "SOME " });
            let _ = write!(out, "{} := ", q.index);
            expr(out, &q.from, 0);
            out.push_str(" TO ");
            expr(out, &q.to, 0);
            out.push_str(" DO");
            block(out, &q.body, depth);
            out.push_str("END");
        }
        StmtKind::Either(branches) => {
            out.push_str("EITHER");
            for (i, b) in branches.iter().enumerate() {
                if i > 0 {
                    out.push_str("ORELSE");
                }
                block(out, b, depth);
            }
            out.push_str("END");
        }
        StmtKind::Forall(generator, body) => {
            out.push_str("FORALL");
            block(out, generator, depth);
            out.push_str("DO");
            block(out, body, depth);
            out.push_str("END");
        }
        StmtKind::Commit(body) => {
            out.push_str("COMMIT");
            block(out, body, depth);
            out.push_str("END");
        }
        StmtKind::Not(inner) => {
            out.push_str("NOT ");
            match &inner.kind {
                StmtKind::Test(e) => expr(out, e, 3),
                StmtKind::Call(..)
                | StmtKind::For(_)
                | StmtKind::Some(_)
                | StmtKind::Either(_)
                | StmtKind::Forall(..)
                | StmtKind::Commit(_) => stmt(out, inner, depth),
                StmtKind::Not(_) => stmt(out, inner, depth),
                _ => {
                    // Not reachable from the parser; keep output parseable.
                    out.push_str("COMMIT ");
                    stmt(out, inner, depth);
                    out.push_str(" END");
                }
            }
        }
        StmtKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            args_list(out, args);
            out.push(')');
        }
    }
}

fn args_list(out: &mut String, args: &[Expr]) {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, a, 0);
    }
}

fn real_literal(x: f64) -> String {
    let s = format!("{x:?}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let mantissa = if mantissa.contains('.') { mantissa.to_string() } else { format!("{mantissa}.0") };
            format!("{mantissa}E{exp}")
        }
        None => s,
    }
}

fn expr(out: &mut String, e: &Expr, min_prec: u8) {
    match &e.kind {
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Real(x) => out.push_str(&real_literal(*x)),
        ExprKind::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        ExprKind::Str(s) => {
            let q = if s.contains('\'') { '"' } else { '\'' };
            let _ = write!(out, "{q}{s}{q}");
        }
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Index(base, idx) => {
            expr(out, base, 9);
            out.push('[');
            args_list(out, idx);
            out.push(']');
        }
        ExprKind::Field(base, f) => {
            expr(out, base, 9);
            let _ = write!(out, ".{f}");
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            args_list(out, args);
            out.push(')');
        }
        ExprKind::Unary(UnOp::Not, inner) => {
            let wrap = min_prec > 3;
            if wrap {
                out.push('(');
            }
            out.push_str("NOT ");
            expr(out, inner, 3);
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Unary(UnOp::Neg, inner) => {
            let wrap = min_prec > 5;
            if wrap {
                out.push('(');
            }
            out.push('-');
            expr(out, inner, 6);
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let p = op.precedence();
            let wrap = p < min_prec;
            if wrap {
                out.push('(');
            }
            let lhs_prec = if op.is_relation() { p + 1 } else { p };
            expr(out, lhs, lhs_prec);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, rhs, p + 1);
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Stmt(s) => stmt(out, s, 0),
    }
}
