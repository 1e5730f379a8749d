//! Name resolution, type checking and the placement rules for unknowns.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::{self, BinOp, ParamMode, UnOp};
use super::ir::*;
use super::token::Loc;
use super::types::*;

/// Which rule a rejected program violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Name,
    Type,
    /// An unknown on the left of `:=`.
    AssignToUnknown,
    /// A constrained type or unknown declared inside a procedure.
    LocalUnknown,
    /// An unknown where only ordinary values may appear.
    UnknownPosition,
    /// A constraint of a form the store cannot represent.
    ConstraintForm,
    Call,
    Constant,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Name => "name resolution",
            Rule::Type => "type mismatch",
            Rule::AssignToUnknown => "assignment to an unknown",
            Rule::LocalUnknown => "local unknown",
            Rule::UnknownPosition => "unknown outside a constraint",
            Rule::ConstraintForm => "unsupported constraint",
            Rule::Call => "call",
            Rule::Constant => "constant expression",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{loc}: {rule}: {message}")]
pub struct SemanticError {
    pub rule: Rule,
    pub message: String,
    pub loc: Loc,
}

type CResult<T> = Result<T, SemanticError>;

fn err<T>(rule: Rule, loc: Loc, message: impl Into<String>) -> CResult<T> {
    Err(SemanticError { rule, message: message.into(), loc })
}

const BUILTIN_PROCS: &[&str] =
    &["WRITE", "WRITELN", "INDOMAIN", "ALL_DIFFERENT", "AT_MOST", "Empty", "Insert", "Sum"];

#[derive(Debug, Clone)]
enum Entity {
    Const(Const, TypeId),
    Type(TypeId),
    Var(Root, TypeId),
    Proc(usize),
}

struct Checker {
    types: TypeTable,
    globals: HashMap<String, Entity>,
    locals: Option<HashMap<String, Entity>>,
    global_vars: Vec<Variable>,
    global_size: usize,
    procs: Vec<Procedure>,
    enum_count: usize,
}

/// Checks a parsed module and produces the executable program.
pub fn check(module: &ast::Module) -> CResult<Program> {
    let mut c = Checker {
        types: TypeTable::new(),
        globals: HashMap::new(),
        locals: None,
        global_vars: Vec::new(),
        global_size: 0,
        procs: Vec::new(),
        enum_count: 0,
    };
    let mut bodies = Vec::new();
    for d in &module.decls {
        c.decl(d, &mut bodies)?;
    }
    for (index, decl) in bodies {
        c.proc_body(index, decl)?;
    }
    let body = c.stmts(&module.body)?;
    let mut program = Program {
        name: module.name.clone(),
        types: c.types,
        globals: c.global_vars,
        global_size: c.global_size,
        procs: c.procs,
        body,
    };
    mark_determinism(&mut program);
    Ok(program)
}

impl Checker {
    // ---- scopes ----

    fn lookup(&self, name: &str) -> Option<&Entity> {
        self.locals.as_ref().and_then(|l| l.get(name)).or_else(|| self.globals.get(name))
    }

    fn define(&mut self, name: &str, entity: Entity, loc: Loc) -> CResult<()> {
        if BUILTIN_PROCS.contains(&name) || matches!(name, "abs" | "KNOWN") {
            return err(Rule::Name, loc, format!("'{name}' is a reserved built-in name"));
        }
        let scope = match &mut self.locals {
            Some(l) => l,
            None => &mut self.globals,
        };
        if scope.insert(name.to_string(), entity).is_some() {
            return err(Rule::Name, loc, format!("'{name}' is declared twice"));
        }
        Ok(())
    }

    fn in_procedure(&self) -> bool {
        self.locals.is_some()
    }

    // ---- declarations ----

    fn decl<'a>(&mut self, d: &'a ast::Decl, bodies: &mut Vec<(usize, &'a ast::ProcDecl)>) -> CResult<()> {
        match d {
            ast::Decl::Const(items) => {
                for item in items {
                    let e = self.expr(&item.value)?;
                    let Some(value) = e.as_const() else {
                        return err(Rule::Constant, item.loc, format!("value of '{}' is not constant", item.name));
                    };
                    self.define(&item.name, Entity::Const(value, e.ty), item.loc)?;
                }
            }
            ast::Decl::Type(items) => {
                for item in items {
                    let ty = self.type_expr(&item.ty, false)?;
                    self.types.set_name(ty, &item.name);
                    self.define(&item.name, Entity::Type(ty), item.loc)?;
                }
            }
            ast::Decl::Var(items) => {
                for item in items {
                    let ty = self.type_expr(&item.ty, false)?;
                    for name in &item.names {
                        self.global_var(name, ty, item.loc)?;
                    }
                }
            }
            ast::Decl::Procedure(p) => {
                let index = self.proc_header(p)?;
                bodies.push((index, p));
            }
        }
        Ok(())
    }

    fn global_var(&mut self, name: &str, ty: TypeId, loc: Loc) -> CResult<()> {
        let offset = self.global_size;
        self.global_size += self.types.size(ty);
        self.global_vars.push(Variable { name: name.to_string(), ty, offset });
        self.define(name, Entity::Var(Root::Global(offset), ty), loc)
    }

    fn proc_header(&mut self, p: &ast::ProcDecl) -> CResult<usize> {
        let mut params = Vec::new();
        let mut offset = 0;
        for section in &p.params {
            let ty = self.type_expr(&section.ty, false)?;
            if self.types.contains_lists(ty) && section.mode != ParamMode::Var {
                return err(Rule::Type, section.loc, "lists can only be passed as VAR parameters");
            }
            for name in &section.names {
                if params.iter().any(|q: &Param| &q.name == name) {
                    return err(Rule::Name, section.loc, format!("parameter '{name}' is declared twice"));
                }
                params.push(Param { name: name.clone(), mode: section.mode, ty, offset });
                offset += self.types.size(ty);
            }
        }
        let index = self.procs.len();
        self.define(&p.name, Entity::Proc(index), p.loc)?;
        self.procs.push(Procedure {
            name: p.name.clone(),
            params,
            locals: Vec::new(),
            frame_size: offset,
            body: Vec::new(),
            det: true,
            loc: p.loc,
        });
        Ok(index)
    }

    fn proc_body(&mut self, index: usize, p: &ast::ProcDecl) -> CResult<()> {
        let mut scope = HashMap::new();
        for (i, param) in self.procs[index].params.iter().enumerate() {
            scope.insert(param.name.clone(), Entity::Var(Root::Param(i), param.ty));
        }
        self.locals = Some(scope);
        let mut frame_size = self.procs[index].frame_size;
        let mut locals = Vec::new();
        for d in &p.decls {
            match d {
                ast::Decl::Var(items) => {
                    for item in items {
                        let ty = self.type_expr(&item.ty, true)?;
                        if self.types.contains_unknowns(ty) {
                            return err(
                                Rule::LocalUnknown,
                                item.loc,
                                "unknowns can only be declared at the outer level",
                            );
                        }
                        for name in &item.names {
                            locals.push(Variable { name: name.clone(), ty, offset: frame_size });
                            self.define(name, Entity::Var(Root::Local(frame_size), ty), item.loc)?;
                            frame_size += self.types.size(ty);
                        }
                    }
                }
                ast::Decl::Procedure(inner) => {
                    return err(Rule::Name, inner.loc, "procedures cannot be nested");
                }
                other => {
                    let mut none = Vec::new();
                    self.decl(other, &mut none)?;
                }
            }
        }
        let body = self.stmts(&p.body)?;
        self.locals = None;
        let proc = &mut self.procs[index];
        proc.locals = locals;
        proc.frame_size = frame_size;
        proc.body = body;
        Ok(())
    }

    // ---- types ----

    fn type_expr(&mut self, t: &ast::TypeExpr, local: bool) -> CResult<TypeId> {
        let local = local || self.in_procedure();
        self.type_expr_inner(t, local, false)
    }

    fn type_expr_inner(&mut self, t: &ast::TypeExpr, local: bool, in_list: bool) -> CResult<TypeId> {
        match t {
            ast::TypeExpr::Named(name, loc) => match self.lookup(name) {
                Some(Entity::Type(ty)) => Ok(*ty),
                None if name == "INTEGER" => Ok(INTEGER),
                None if name == "BOOLEAN" => Ok(BOOLEAN),
                None if name == "REAL" => Ok(REAL),
                _ => err(Rule::Name, *loc, format!("'{name}' is not a type")),
            },
            ast::TypeExpr::Subrange(lo, hi) => {
                let loc = lo.loc;
                let lo = self.const_int(lo)?;
                let hi = self.const_int(hi)?;
                if lo > hi {
                    return err(Rule::Type, loc, format!("empty subrange [{lo}..{hi}]"));
                }
                Ok(self.types.add(TypeDescriptor {
                    kind: TypeKind::Subrange { lo, hi },
                    constrained: false,
                    size: 1,
                    name: None,
                }))
            }
            ast::TypeExpr::Enumeration(names, loc) => {
                let id = self.enum_count;
                self.enum_count += 1;
                let ty = self.types.add(TypeDescriptor {
                    kind: TypeKind::Enumeration { id, members: names.clone() },
                    constrained: false,
                    size: 1,
                    name: None,
                });
                for (i, n) in names.iter().enumerate() {
                    self.define(n, Entity::Const(Const::Enum(i as u32), ty), *loc)?;
                }
                Ok(ty)
            }
            ast::TypeExpr::Array(indices, elem) => {
                let mut ty = self.type_expr_inner(elem, local, in_list)?;
                for index in indices.iter().rev() {
                    let index_ty = self.type_expr_inner(index, local, in_list)?;
                    let Some((lo, hi)) = self.types.ordinal_range(index_ty) else {
                        return err(Rule::Type, type_loc(index), "array index type must be a subrange or enumeration");
                    };
                    if self.types.is_constrained(index_ty) {
                        return err(Rule::Type, type_loc(index), "array index type cannot be constrained");
                    }
                    let size = (hi - lo + 1) as usize * self.types.size(ty);
                    ty = self.types.add(TypeDescriptor {
                        kind: TypeKind::Array { lo, hi, index: index_ty, elem: ty },
                        constrained: false,
                        size,
                        name: None,
                    });
                }
                Ok(ty)
            }
            ast::TypeExpr::Record(decls) => {
                let mut fields: Vec<Field> = Vec::new();
                let mut offset = 0;
                for d in decls {
                    let ty = self.type_expr_inner(&d.ty, local, in_list)?;
                    for name in &d.names {
                        if fields.iter().any(|f| &f.name == name) {
                            return err(Rule::Name, d.loc, format!("field '{name}' is declared twice"));
                        }
                        fields.push(Field { name: name.clone(), ty, offset });
                        offset += self.types.size(ty);
                    }
                }
                Ok(self.types.add(TypeDescriptor {
                    kind: TypeKind::Record { fields },
                    constrained: false,
                    size: offset,
                    name: None,
                }))
            }
            ast::TypeExpr::Constrained(inner, loc) => {
                if local && !in_list {
                    return err(
                        Rule::LocalUnknown,
                        *loc,
                        "constrained types can only be introduced at the outer level",
                    );
                }
                let ty = self.type_expr_inner(inner, local, in_list)?;
                if !self.types.is_simple(ty) {
                    return err(Rule::Type, *loc, "only simple types can be constrained");
                }
                Ok(self.types.constrained_of(ty))
            }
            ast::TypeExpr::List(inner) => {
                let elem = self.type_expr_inner(inner, local, true)?;
                if !self.types.is_constrained(elem) {
                    return err(Rule::Type, type_loc(inner), "list elements must be of a constrained simple type");
                }
                Ok(self.types.add(TypeDescriptor {
                    kind: TypeKind::List { elem },
                    constrained: false,
                    size: 1,
                    name: None,
                }))
            }
        }
    }

    fn const_int(&mut self, e: &ast::Expr) -> CResult<i64> {
        let checked = self.expr(e)?;
        match checked.as_const() {
            Some(Const::Int(n)) => Ok(n),
            Some(Const::Enum(n)) => Ok(n as i64),
            _ => err(Rule::Constant, e.loc, "expected a constant integer"),
        }
    }

    // ---- statements ----

    fn stmts(&mut self, ss: &[ast::Stmt]) -> CResult<Vec<Stmt>> {
        ss.iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: &ast::Stmt) -> CResult<Stmt> {
        let loc = s.loc;
        let kind = match &s.kind {
            ast::StmtKind::Assign(lhs, rhs) => {
                let target = self.designator(lhs)?;
                if self.types.contains_unknowns(target.ty) {
                    return err(
                        Rule::AssignToUnknown,
                        lhs.loc,
                        format!("'{}' is an unknown and cannot be assigned; use a constraint", target.name),
                    );
                }
                if self.types.contains_lists(target.ty) {
                    return err(Rule::Type, lhs.loc, "lists can only be changed with Empty and Insert");
                }
                self.no_unknowns_in_indices(&target, "an assignment target")?;
                let value = self.expr(rhs)?;
                let value = self.coerce(value, target.ty)?;
                StmtKind::Assign { target, value }
            }
            ast::StmtKind::Test(e) => {
                if let ast::ExprKind::Name(name) = &e.kind {
                    if let Some(kind) = self.bare_call(name, e.loc)? {
                        return Ok(Stmt { kind, loc, det: true });
                    }
                }
                let e = self.condition(e)?;
                StmtKind::Test(e)
            }
            ast::StmtKind::If(arms, otherwise) => {
                let mut checked = Vec::new();
                for (cond, body) in arms {
                    checked.push((self.condition(cond)?, self.stmts(body)?));
                }
                let otherwise = match otherwise {
                    Some(b) => self.stmts(b)?,
                    None => Vec::new(),
                };
                StmtKind::If { arms: checked, otherwise }
            }
            ast::StmtKind::While(cond, body) => {
                let cond = self.bool_expr(cond)?;
                self.no_unknowns(&cond, "a WHILE condition")?;
                StmtKind::While { cond, body: self.stmts(body)? }
            }
            ast::StmtKind::For(q) | ast::StmtKind::Some(q) => {
                let (var, from, to) = self.quantifier(q, loc)?;
                let body = self.stmts(&q.body)?;
                if matches!(s.kind, ast::StmtKind::For(_)) {
                    StmtKind::For { var, from, to, body }
                } else {
                    StmtKind::Some { var, from, to, body }
                }
            }
            ast::StmtKind::Either(branches) => {
                StmtKind::Either(branches.iter().map(|b| self.stmts(b)).collect::<CResult<_>>()?)
            }
            ast::StmtKind::Forall(generator, body) => {
                StmtKind::Forall { generator: self.stmts(generator)?, body: self.stmts(body)? }
            }
            ast::StmtKind::Commit(body) => StmtKind::Commit(self.stmts(body)?),
            ast::StmtKind::Not(inner) => {
                let inner = self.stmt(inner)?;
                if let StmtKind::Test(e) = &inner.kind {
                    if e.unknown {
                        self.negatable(e)?;
                    }
                }
                if let StmtKind::AllDifferent(_) | StmtKind::AtMost { .. } | StmtKind::Sum { .. } = inner.kind {
                    return err(Rule::ConstraintForm, loc, "built-in constraints cannot be negated");
                }
                StmtKind::Not(Box::new(inner))
            }
            ast::StmtKind::Call(name, args) => self.call(name, args, loc)?,
        };
        Ok(Stmt { kind, loc, det: true })
    }

    fn bare_call(&mut self, name: &str, loc: Loc) -> CResult<Option<StmtKind>> {
        match self.lookup(name) {
            Some(Entity::Proc(_)) => self.call(name, &[], loc).map(Some),
            None if name == "WRITELN" => Ok(Some(StmtKind::Write { args: Vec::new(), newline: true })),
            None if BUILTIN_PROCS.contains(&name) => self.call(name, &[], loc).map(Some),
            _ => Ok(None),
        }
    }

    fn quantifier(&mut self, q: &ast::Quantifier, loc: Loc) -> CResult<(Designator, Expr, Expr)> {
        let var = self.designator(&ast::Expr::new(ast::ExprKind::Name(q.index.clone()), loc))?;
        if self.types.is_constrained(var.ty) {
            return err(Rule::AssignToUnknown, loc, format!("'{}' is an unknown and cannot be a loop index", var.name));
        }
        if !matches!(self.types.scalar(var.ty), Some(Scalar::Int | Scalar::Enum(_))) {
            return err(Rule::Type, loc, format!("loop index '{}' must be of an integer or enumeration type", var.name));
        }
        let from = self.expr(&q.from)?;
        let to = self.expr(&q.to)?;
        for bound in [&from, &to] {
            self.no_unknowns(bound, "a loop bound")?;
            if self.types.scalar(bound.ty) != self.types.scalar(var.ty) {
                return err(Rule::Type, bound.loc, "loop bound does not match the index type");
            }
        }
        Ok((var, from, to))
    }

    fn call(&mut self, name: &str, args: &[ast::Expr], loc: Loc) -> CResult<StmtKind> {
        match self.lookup(name) {
            Some(Entity::Proc(index)) => {
                let index = *index;
                return self.user_call(index, args, loc);
            }
            Some(_) => return err(Rule::Call, loc, format!("'{name}' is not a procedure")),
            None => {}
        }
        let arity = |n: usize| -> CResult<()> {
            if args.len() != n {
                return err(Rule::Call, loc, format!("{name} expects {n} argument(s), got {}", args.len()));
            }
            Ok(())
        };
        match name {
            "WRITE" | "WRITELN" => {
                let mut checked = Vec::new();
                for a in args {
                    let e = self.expr(a)?;
                    if !self.types.is_simple(e.ty) && e.ty != STRING {
                        return err(Rule::Type, a.loc, "only simple values and strings can be written");
                    }
                    checked.push(e);
                }
                Ok(StmtKind::Write { args: checked, newline: name == "WRITELN" })
            }
            "INDOMAIN" => {
                arity(1)?;
                let d = self.designator(&args[0])?;
                self.unknown_leaves(d.ty, args[0].loc, true, "INDOMAIN")?;
                Ok(StmtKind::Indomain(d))
            }
            "ALL_DIFFERENT" => {
                arity(1)?;
                let d = self.designator(&args[0])?;
                self.unknown_collection(d.ty, args[0].loc, "ALL_DIFFERENT")?;
                Ok(StmtKind::AllDifferent(d))
            }
            "AT_MOST" => {
                arity(3)?;
                let k = self.expr(&args[0])?;
                let k = self.coerce(k, INTEGER)?;
                let items = self.designator(&args[1])?;
                let elem = self.unknown_collection(items.ty, args[1].loc, "AT_MOST")?;
                let value = self.expr(&args[2])?;
                if self.types.scalar(value.ty) != self.types.scalar(elem) {
                    return err(Rule::Type, args[2].loc, "AT_MOST value does not match the element type");
                }
                Ok(StmtKind::AtMost { k, items, value })
            }
            "Sum" => {
                arity(3)?;
                let items = self.designator(&args[0])?;
                let elem = self.unknown_collection(items.ty, args[0].loc, "Sum")?;
                if self.types.scalar(elem) != Some(Scalar::Int) {
                    return err(Rule::Type, args[0].loc, "Sum needs integer unknowns");
                }
                let rel = match &args[1].kind {
                    ast::ExprKind::Str(s) if s == "=" => BinOp::Eq,
                    ast::ExprKind::Str(s) if s == "<=" => BinOp::Le,
                    ast::ExprKind::Str(s) if s == ">=" => BinOp::Ge,
                    _ => return err(Rule::Call, args[1].loc, "Sum relation must be '=', '<=' or '>='"),
                };
                let bound = self.expr(&args[2])?;
                let bound = self.coerce(bound, INTEGER)?;
                Ok(StmtKind::Sum { items, rel, bound })
            }
            "Empty" => {
                arity(1)?;
                let list = self.list_designator(&args[0])?;
                Ok(StmtKind::Empty(list))
            }
            "Insert" => {
                arity(2)?;
                let list = self.list_designator(&args[0])?;
                let item = self.designator(&args[1])?;
                let TypeKind::List { elem } = *self.types.kind(list.ty) else { unreachable!() };
                if !self.types.is_constrained(item.ty) || self.types.scalar(item.ty) != self.types.scalar(elem) {
                    return err(
                        Rule::Type,
                        args[1].loc,
                        format!("Insert expects an unknown of type {}", self.types.display(elem)),
                    );
                }
                Ok(StmtKind::Insert { list, item })
            }
            "abs" | "KNOWN" => err(Rule::Call, loc, format!("'{name}' is a function and cannot be used as a statement")),
            _ => err(Rule::Name, loc, format!("undeclared procedure '{name}'")),
        }
    }

    fn list_designator(&mut self, e: &ast::Expr) -> CResult<Designator> {
        let d = self.designator(e)?;
        if !matches!(self.types.kind(d.ty), TypeKind::List { .. }) {
            return err(Rule::Type, e.loc, format!("'{}' is not a list", d.name));
        }
        Ok(d)
    }

    /// Checks that every slot of `ty` is an unknown; returns the element type.
    fn unknown_leaves(&self, ty: TypeId, loc: Loc, finite: bool, what: &str) -> CResult<TypeId> {
        match self.types.kind(ty) {
            TypeKind::Array { elem, .. } => self.unknown_leaves(*elem, loc, finite, what),
            TypeKind::List { elem } => self.unknown_leaves(*elem, loc, finite, what),
            TypeKind::Record { fields } => {
                let mut last = None;
                for f in fields {
                    last = Some(self.unknown_leaves(f.ty, loc, finite, what)?);
                }
                last.map_or_else(|| err(Rule::Type, loc, format!("{what} expects unknowns")), Ok)
            }
            _ if !self.types.is_constrained(ty) => err(Rule::Type, loc, format!("{what} expects unknowns")),
            _ if finite && self.types.ordinal_range(ty).is_none() => err(
                Rule::Type,
                loc,
                format!("{what} needs unknowns of a finite type (BOOLEAN, enumeration or subrange)"),
            ),
            _ => Ok(ty),
        }
    }

    /// An array (possibly nested) or list of finite-domain unknowns.
    fn unknown_collection(&self, ty: TypeId, loc: Loc, what: &str) -> CResult<TypeId> {
        let ok = matches!(self.types.kind(ty), TypeKind::Array { .. } | TypeKind::List { .. });
        if !ok || matches!(self.types.kind(ty), TypeKind::Record { .. }) {
            return err(Rule::Type, loc, format!("{what} expects an array or list of unknowns"));
        }
        let elem = self.unknown_leaves(ty, loc, false, what)?;
        if self.types.scalar(elem) == Some(Scalar::Real) {
            return err(Rule::Type, loc, format!("{what} needs integer, boolean or enumeration unknowns"));
        }
        Ok(elem)
    }

    fn user_call(&mut self, index: usize, args: &[ast::Expr], loc: Loc) -> CResult<StmtKind> {
        let params = self.procs[index].params.clone();
        let name = self.procs[index].name.clone();
        if params.len() != args.len() {
            return err(
                Rule::Call,
                loc,
                format!("{name} expects {} argument(s), got {}", params.len(), args.len()),
            );
        }
        let mut checked = Vec::new();
        for (p, a) in params.iter().zip(args) {
            let expr = match p.mode {
                ParamMode::Var => {
                    let d = self.designator(a)?;
                    if !self.types.equivalent(d.ty, p.ty, true) {
                        return err(
                            Rule::Type,
                            a.loc,
                            format!(
                                "VAR parameter '{}' needs type {}, got {}",
                                p.name,
                                self.types.display(p.ty),
                                self.types.display(d.ty)
                            ),
                        );
                    }
                    self.load(d)
                }
                ParamMode::Value | ParamMode::Mix => {
                    let e = self.expr(a)?;
                    if p.mode == ParamMode::Mix && self.types.contains_unknowns(e.ty) {
                        if !matches!(e.kind, ExprKind::Load(_)) || !self.types.equivalent(e.ty, p.ty, true) {
                            return err(Rule::Type, a.loc, format!("MIX parameter '{}' type mismatch", p.name));
                        }
                        e
                    } else {
                        self.coerce(e, p.ty)?
                    }
                }
            };
            checked.push(Arg { mode: p.mode, expr });
        }
        Ok(StmtKind::Call { proc: index, args: checked })
    }

    // ---- constraint placement ----

    fn no_unknowns(&self, e: &Expr, what: &str) -> CResult<()> {
        if e.unknown {
            return err(Rule::UnknownPosition, e.loc, format!("unknowns cannot appear in {what}"));
        }
        Ok(())
    }

    fn no_unknowns_in_indices(&self, d: &Designator, what: &str) -> CResult<()> {
        for step in &d.steps {
            if let Step::Index { index, .. } = step {
                self.no_unknowns(index, &format!("the subscripts of {what}"))?;
            }
        }
        Ok(())
    }

    /// A boolean expression in statement or condition position: checks that
    /// any constraint it contains can be told to the store.
    fn condition(&mut self, e: &ast::Expr) -> CResult<Expr> {
        let e = self.bool_expr(e)?;
        if e.unknown {
            self.constraint(&e)?;
        }
        Ok(e)
    }

    fn bool_expr(&mut self, e: &ast::Expr) -> CResult<Expr> {
        let checked = self.expr(e)?;
        if self.types.scalar(checked.ty) != Some(Scalar::Bool) {
            return err(Rule::Type, e.loc, "expected a boolean expression");
        }
        Ok(checked)
    }

    fn constraint(&self, e: &Expr) -> CResult<()> {
        match &e.kind {
            ExprKind::Binary(BinOp::And, a, b) => {
                for side in [a, b] {
                    if side.unknown {
                        self.constraint(side)?;
                    }
                }
                Ok(())
            }
            ExprKind::Binary(BinOp::Or, ..) => err(
                Rule::ConstraintForm,
                e.loc,
                "disjunctions of constraints are not supported; use EITHER ... ORELSE",
            ),
            ExprKind::Not(_) => self.negatable(e),
            ExprKind::Binary(op, a, b) if op.is_relation() => self.relation(*op, a, b, e.loc),
            ExprKind::Load(_) => Ok(()),
            _ => err(Rule::ConstraintForm, e.loc, "unsupported constraint"),
        }
    }

    /// Constraints that can be negated: relations, boolean unknowns, and
    /// negations of those.
    fn negatable(&self, e: &Expr) -> CResult<()> {
        match &e.kind {
            ExprKind::Not(inner) => self.negatable(inner),
            ExprKind::Binary(op, a, b) if op.is_relation() => self.relation(*op, a, b, e.loc),
            ExprKind::Load(_) => Ok(()),
            _ => err(Rule::ConstraintForm, e.loc, "only a single relation can be negated"),
        }
    }

    fn relation(&self, op: BinOp, a: &Expr, b: &Expr, loc: Loc) -> CResult<()> {
        if !self.types.is_simple(a.ty) || !self.types.is_simple(b.ty) {
            return err(Rule::ConstraintForm, loc, "constraints between compound values are not supported");
        }
        let real = self.types.scalar(a.ty) == Some(Scalar::Real);
        if real && op != BinOp::Eq {
            return err(Rule::ConstraintForm, loc, "only linear equations are supported over real unknowns");
        }
        for side in [a, b] {
            self.term(side, real)?;
        }
        Ok(())
    }

    /// An operand of a constraint relation.
    fn term(&self, e: &Expr, real: bool) -> CResult<()> {
        if !e.unknown {
            return Ok(());
        }
        match &e.kind {
            ExprKind::Load(_) => Ok(()),
            ExprKind::ToReal(x) | ExprKind::Neg(x) => self.term(x, real),
            ExprKind::Abs(x) => {
                if real {
                    return err(Rule::ConstraintForm, e.loc, "abs of a real unknown is not linear");
                }
                self.term(x, real)
            }
            ExprKind::Binary(BinOp::Add | BinOp::Sub, x, y) => {
                self.term(x, real)?;
                self.term(y, real)
            }
            ExprKind::Binary(BinOp::Mul, x, y) => {
                if real && x.unknown && y.unknown {
                    return err(Rule::ConstraintForm, e.loc, "products of real unknowns are not linear");
                }
                self.term(x, real)?;
                self.term(y, real)
            }
            ExprKind::Binary(BinOp::Slash | BinOp::Div | BinOp::Mod, x, y) => {
                if real && y.unknown {
                    return err(Rule::ConstraintForm, e.loc, "division by a real unknown is not linear");
                }
                self.term(x, real)?;
                self.term(y, real)
            }
            _ => err(
                Rule::ConstraintForm,
                e.loc,
                "the operands of a constraint must be arithmetic; nested conditions are not supported",
            ),
        }
    }

    // ---- expressions ----

    fn load(&self, d: Designator) -> Expr {
        let unknown = self.types.contains_unknowns(d.ty) || designator_unknown(&d);
        let has_stmt = d.steps.iter().any(|s| matches!(s, Step::Index { index, .. } if index.has_stmt));
        Expr { ty: d.ty, loc: d.loc, unknown, has_stmt, kind: ExprKind::Load(d) }
    }

    fn designator(&mut self, e: &ast::Expr) -> CResult<Designator> {
        match &e.kind {
            ast::ExprKind::Name(name) => match self.lookup(name) {
                Some(Entity::Var(root, ty)) => Ok(Designator {
                    name: name.clone(),
                    root: *root,
                    steps: Vec::new(),
                    ty: *ty,
                    loc: e.loc,
                }),
                Some(_) => err(Rule::Name, e.loc, format!("'{name}' is not a variable")),
                None => err(Rule::Name, e.loc, format!("undeclared identifier '{name}'")),
            },
            ast::ExprKind::Index(base, indices) => {
                let mut d = self.designator(base)?;
                for index in indices {
                    let TypeKind::Array { lo, hi, index: index_ty, elem } = self.types.kind(d.ty).clone() else {
                        return err(Rule::Type, index.loc, format!("'{}' is not an array", d.name));
                    };
                    let checked = self.expr(index)?;
                    if self.types.scalar(checked.ty) != self.types.scalar(index_ty) {
                        return err(Rule::Type, index.loc, "subscript does not match the array index type");
                    }
                    let stride = self.types.size(elem);
                    d.steps.push(Step::Index { index: checked, lo, hi, stride });
                    d.ty = elem;
                }
                Ok(d)
            }
            ast::ExprKind::Field(base, field) => {
                let mut d = self.designator(base)?;
                let TypeKind::Record { fields } = self.types.kind(d.ty) else {
                    return err(Rule::Type, e.loc, format!("'{}' is not a record", d.name));
                };
                let Some(f) = fields.iter().find(|f| &f.name == field) else {
                    return err(Rule::Name, e.loc, format!("no field '{field}'"));
                };
                d.ty = f.ty;
                d.steps.push(Step::Field { name: field.clone(), offset: f.offset });
                Ok(d)
            }
            _ => err(Rule::Type, e.loc, "expected a variable"),
        }
    }

    fn expr(&mut self, e: &ast::Expr) -> CResult<Expr> {
        let loc = e.loc;
        match &e.kind {
            ast::ExprKind::Int(n) => Ok(Expr::constant(Const::Int(*n), INTEGER, loc)),
            ast::ExprKind::Real(x) => Ok(Expr::constant(Const::Real(*x), REAL, loc)),
            ast::ExprKind::Bool(b) => Ok(Expr::constant(Const::Bool(*b), BOOLEAN, loc)),
            ast::ExprKind::Str(s) => Ok(Expr {
                kind: ExprKind::Str(s.clone()),
                ty: STRING,
                loc,
                unknown: false,
                has_stmt: false,
            }),
            ast::ExprKind::Name(name) => match self.lookup(name) {
                Some(Entity::Const(c, ty)) => Ok(Expr::constant(*c, *ty, loc)),
                Some(Entity::Var(..)) => {
                    let d = self.designator(e)?;
                    Ok(self.load(d))
                }
                Some(Entity::Proc(_)) => err(Rule::Call, loc, format!("procedure '{name}' used as a value")),
                Some(Entity::Type(_)) => err(Rule::Name, loc, format!("type '{name}' used as a value")),
                None => err(Rule::Name, loc, format!("undeclared identifier '{name}'")),
            },
            ast::ExprKind::Index(..) | ast::ExprKind::Field(..) => {
                let d = self.designator(e)?;
                Ok(self.load(d))
            }
            ast::ExprKind::Unary(UnOp::Neg, inner) => {
                let x = self.expr(inner)?;
                if !matches!(self.types.scalar(x.ty), Some(Scalar::Int | Scalar::Real)) {
                    return err(Rule::Type, loc, "negation needs a number");
                }
                let ty = self.arith_type(x.ty);
                if let Some(c) = x.as_const() {
                    match c {
                        Const::Int(n) => return Ok(Expr::constant(Const::Int(-n), ty, loc)),
                        Const::Real(r) => return Ok(Expr::constant(Const::Real(-r), ty, loc)),
                        _ => {}
                    }
                }
                Ok(wrap1(ExprKind::Neg, x, ty, loc))
            }
            ast::ExprKind::Unary(UnOp::Not, inner) => {
                let x = self.expr(inner)?;
                if self.types.scalar(x.ty) != Some(Scalar::Bool) {
                    return err(Rule::Type, loc, "NOT needs a boolean");
                }
                if let Some(Const::Bool(b)) = x.as_const() {
                    return Ok(Expr::constant(Const::Bool(!b), BOOLEAN, loc));
                }
                Ok(wrap1(ExprKind::Not, x, BOOLEAN, loc))
            }
            ast::ExprKind::Binary(op, a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                self.binary(*op, a, b, loc)
            }
            ast::ExprKind::Call(name, args) => match name.as_str() {
                "abs" => {
                    if args.len() != 1 {
                        return err(Rule::Call, loc, "abs expects 1 argument");
                    }
                    let x = self.expr(&args[0])?;
                    if !matches!(self.types.scalar(x.ty), Some(Scalar::Int | Scalar::Real)) {
                        return err(Rule::Type, loc, "abs needs a number");
                    }
                    let ty = self.arith_type(x.ty);
                    match x.as_const() {
                        Some(Const::Int(n)) => Ok(Expr::constant(Const::Int(n.abs()), ty, loc)),
                        Some(Const::Real(r)) => Ok(Expr::constant(Const::Real(r.abs()), ty, loc)),
                        _ => Ok(wrap1(ExprKind::Abs, x, ty, loc)),
                    }
                }
                "KNOWN" => {
                    if args.len() != 1 {
                        return err(Rule::Call, loc, "KNOWN expects 1 argument");
                    }
                    let d = self.designator(&args[0])?;
                    if !self.types.is_simple(d.ty) {
                        return err(Rule::Type, loc, "KNOWN needs a variable of a simple type");
                    }
                    let has_stmt = d.steps.iter().any(|s| matches!(s, Step::Index { index, .. } if index.has_stmt));
                    let unknown = designator_unknown(&d);
                    Ok(Expr { kind: ExprKind::Known(d), ty: BOOLEAN, loc, unknown, has_stmt })
                }
                _ => match self.lookup(name) {
                    Some(Entity::Proc(_)) => err(Rule::Call, loc, format!("procedure '{name}' used as a value")),
                    _ if BUILTIN_PROCS.contains(&name.as_str()) => {
                        err(Rule::Call, loc, format!("'{name}' is a procedure and cannot be used as a value"))
                    }
                    _ => err(Rule::Name, loc, format!("undeclared function '{name}'")),
                },
            },
            ast::ExprKind::Stmt(s) => {
                let s = self.stmt(s)?;
                Ok(Expr { kind: ExprKind::Stmt(Box::new(s)), ty: BOOLEAN, loc, unknown: false, has_stmt: true })
            }
        }
    }

    fn arith_type(&self, ty: TypeId) -> TypeId {
        if self.types.scalar(ty) == Some(Scalar::Real) {
            REAL
        } else {
            INTEGER
        }
    }

    fn binary(&mut self, op: BinOp, a: Expr, b: Expr, loc: Loc) -> CResult<Expr> {
        let sa = self.types.scalar(a.ty);
        let sb = self.types.scalar(b.ty);
        let numeric = |s: Option<Scalar>| matches!(s, Some(Scalar::Int | Scalar::Real));
        let (a, b, ty) = match op {
            BinOp::And | BinOp::Or => {
                if sa != Some(Scalar::Bool) || sb != Some(Scalar::Bool) {
                    return err(Rule::Type, loc, format!("{} needs booleans", op.symbol()));
                }
                (a, b, BOOLEAN)
            }
            BinOp::Div | BinOp::Mod => {
                if sa != Some(Scalar::Int) || sb != Some(Scalar::Int) {
                    return err(Rule::Type, loc, format!("{} needs integers", op.symbol()));
                }
                (a, b, INTEGER)
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Slash => {
                if !numeric(sa) || !numeric(sb) {
                    return err(Rule::Type, loc, format!("'{}' needs numbers", op.symbol()));
                }
                let (a, b) = self.promote(a, b);
                let ty = self.arith_type(a.ty);
                (a, b, ty)
            }
            _ => {
                let simple = self.types.is_simple(a.ty) && self.types.is_simple(b.ty);
                if simple {
                    if numeric(sa) && numeric(sb) {
                        let (a, b) = self.promote(a, b);
                        (a, b, BOOLEAN)
                    } else if sa == sb {
                        (a, b, BOOLEAN)
                    } else {
                        return err(Rule::Type, loc, "operands of a comparison have different types");
                    }
                } else if sa == Some(Scalar::Str) || sb == Some(Scalar::Str) {
                    return err(Rule::Type, loc, "strings cannot be compared");
                } else if !matches!(op, BinOp::Eq | BinOp::Ne) {
                    return err(Rule::Type, loc, "compound values can only be compared with = and <>");
                } else if !self.types.equivalent(a.ty, b.ty, false) {
                    return err(Rule::Type, loc, "operands of a comparison have different types");
                } else if self.types.contains_lists(a.ty) {
                    return err(Rule::Type, loc, "lists cannot be compared");
                } else {
                    (a, b, BOOLEAN)
                }
            }
        };
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if let Some(c) = fold(op, x, y) {
                return Ok(Expr::constant(c, ty, loc));
            }
        }
        Ok(Expr {
            unknown: a.unknown || b.unknown,
            has_stmt: a.has_stmt || b.has_stmt,
            kind: ExprKind::Binary(op, Box::new(a), Box::new(b)),
            ty,
            loc,
        })
    }

    fn promote(&self, a: Expr, b: Expr) -> (Expr, Expr) {
        let ra = self.types.scalar(a.ty) == Some(Scalar::Real);
        let rb = self.types.scalar(b.ty) == Some(Scalar::Real);
        match (ra, rb) {
            (true, false) => (a, to_real(b)),
            (false, true) => (to_real(a), b),
            _ => (a, b),
        }
    }

    /// Converts `e` for storage into a location of type `target`.
    fn coerce(&self, e: Expr, target: TypeId) -> CResult<Expr> {
        let st = self.types.scalar(target);
        let se = self.types.scalar(e.ty);
        if st == Some(Scalar::Real) && se == Some(Scalar::Int) {
            return Ok(to_real(e));
        }
        let ok = if self.types.is_simple(target) {
            se == st
        } else {
            self.types.equivalent(e.ty, target, false)
        };
        if !ok {
            return err(
                Rule::Type,
                e.loc,
                format!("expected {}, found {}", self.types.display(target), self.types.display(e.ty)),
            );
        }
        if let (Some(Const::Int(n)), TypeKind::Subrange { lo, hi }) = (e.as_const(), self.types.kind(target)) {
            if n < *lo || n > *hi {
                return err(Rule::Type, e.loc, format!("{n} is outside [{lo}..{hi}]"));
            }
        }
        Ok(e)
    }
}

fn type_loc(t: &ast::TypeExpr) -> Loc {
    match t {
        ast::TypeExpr::Named(_, loc) | ast::TypeExpr::Enumeration(_, loc) | ast::TypeExpr::Constrained(_, loc) => *loc,
        ast::TypeExpr::Subrange(lo, _) => lo.loc,
        ast::TypeExpr::Array(i, _) => type_loc(&i[0]),
        ast::TypeExpr::Record(fields) => fields.first().map(|f| f.loc).unwrap_or_default(),
        ast::TypeExpr::List(inner) => type_loc(inner),
    }
}

fn designator_unknown(d: &Designator) -> bool {
    d.steps.iter().any(|s| matches!(s, Step::Index { index, .. } if index.unknown))
}

fn wrap1(f: fn(Box<Expr>) -> ExprKind, x: Expr, ty: TypeId, loc: Loc) -> Expr {
    Expr { unknown: x.unknown, has_stmt: x.has_stmt, kind: f(Box::new(x)), ty, loc }
}

fn to_real(e: Expr) -> Expr {
    if let Some(Const::Int(n)) = e.as_const() {
        return Expr::constant(Const::Real(n as f64), REAL, e.loc);
    }
    let loc = e.loc;
    wrap1(ExprKind::ToReal, e, REAL, loc)
}

/// Folds an operation on constants. Returns `None` when the result is not
/// representable (overflow, division by zero), leaving it to run time.
pub fn fold(op: BinOp, a: Const, b: Const) -> Option<Const> {
    use Const::*;
    Some(match (op, a, b) {
        (BinOp::Add, Int(x), Int(y)) => Int(x.checked_add(y)?),
        (BinOp::Sub, Int(x), Int(y)) => Int(x.checked_sub(y)?),
        (BinOp::Mul, Int(x), Int(y)) => Int(x.checked_mul(y)?),
        (BinOp::Slash | BinOp::Div, Int(x), Int(y)) => Int(x.checked_div(y)?),
        (BinOp::Mod, Int(x), Int(y)) => Int(x.checked_rem(y)?),
        (BinOp::Add, Real(x), Real(y)) => Real(x + y),
        (BinOp::Sub, Real(x), Real(y)) => Real(x - y),
        (BinOp::Mul, Real(x), Real(y)) => Real(x * y),
        (BinOp::Slash, Real(x), Real(y)) if y != 0.0 => Real(x / y),
        (BinOp::And, Bool(x), Bool(y)) => Bool(x && y),
        (BinOp::Or, Bool(x), Bool(y)) => Bool(x || y),
        (op, x, y) if op.is_relation() => {
            let ord = match (x, y) {
                (Int(x), Int(y)) => x.cmp(&y),
                (Bool(x), Bool(y)) => x.cmp(&y),
                (Enum(x), Enum(y)) => x.cmp(&y),
                (Real(x), Real(y)) => x.partial_cmp(&y)?,
                _ => return None,
            };
            Bool(relation_holds(op, ord))
        }
        _ => return None,
    })
}

pub fn relation_holds(op: BinOp, ord: std::cmp::Ordering) -> bool {
    use std::cmp::Ordering::*;
    match op {
        BinOp::Eq => ord == Equal,
        BinOp::Ne => ord != Equal,
        BinOp::Lt => ord == Less,
        BinOp::Le => ord != Greater,
        BinOp::Gt => ord == Greater,
        BinOp::Ge => ord != Less,
        _ => unreachable!("not a relation"),
    }
}

// ---- determinism ----

/// Marks every statement that can succeed more than once. A procedure is
/// deterministic unless its body contains such a statement; recursion is
/// resolved by iterating from the optimistic assumption.
fn mark_determinism(p: &mut Program) {
    let mut proc_det: Vec<bool> = vec![true; p.procs.len()];
    loop {
        let mut changed = false;
        for i in 0..p.procs.len() {
            let mut body = std::mem::take(&mut p.procs[i].body);
            let det = mark_seq(&mut body, &proc_det);
            p.procs[i].body = body;
            if det != proc_det[i] {
                proc_det[i] = det;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for (proc, det) in p.procs.iter_mut().zip(&proc_det) {
        proc.det = *det;
    }
    mark_seq(&mut p.body, &proc_det);
}

fn mark_seq(ss: &mut [Stmt], procs: &[bool]) -> bool {
    let mut all = true;
    for s in ss {
        all &= mark_stmt(s, procs);
    }
    all
}

fn mark_stmt(s: &mut Stmt, procs: &[bool]) -> bool {
    let det = match &mut s.kind {
        StmtKind::Assign { target, value } => {
            mark_designator(target, procs);
            mark_expr(value, procs);
            true
        }
        StmtKind::Test(e) => mark_test(e, procs),
        StmtKind::If { arms, otherwise } => {
            let mut det = mark_seq(otherwise, procs);
            for (cond, body) in arms {
                mark_test(cond, procs);
                det &= mark_seq(body, procs);
            }
            det
        }
        StmtKind::While { cond, body } => {
            mark_expr(cond, procs);
            mark_seq(body, procs)
        }
        StmtKind::For { var, from, to, body } => {
            mark_designator(var, procs);
            mark_expr(from, procs);
            mark_expr(to, procs);
            mark_seq(body, procs)
        }
        StmtKind::Some { var, from, to, body } => {
            mark_designator(var, procs);
            mark_expr(from, procs);
            mark_expr(to, procs);
            mark_seq(body, procs);
            false
        }
        StmtKind::Either(branches) => {
            for b in branches {
                mark_seq(b, procs);
            }
            false
        }
        StmtKind::Forall { generator, body } => {
            mark_seq(generator, procs);
            mark_seq(body, procs);
            true
        }
        StmtKind::Commit(body) => {
            mark_seq(body, procs);
            true
        }
        StmtKind::Not(inner) => {
            mark_stmt(inner, procs);
            true
        }
        StmtKind::Call { proc, args } => {
            for a in args {
                mark_expr(&mut a.expr, procs);
            }
            procs[*proc]
        }
        StmtKind::Write { args, .. } => {
            for a in args {
                mark_expr(a, procs);
            }
            true
        }
        StmtKind::Indomain(d) => {
            mark_designator(d, procs);
            false
        }
        StmtKind::AllDifferent(d) | StmtKind::Empty(d) => {
            mark_designator(d, procs);
            true
        }
        StmtKind::AtMost { k, items, value } => {
            mark_expr(k, procs);
            mark_designator(items, procs);
            mark_expr(value, procs);
            true
        }
        StmtKind::Sum { items, bound, .. } => {
            mark_designator(items, procs);
            mark_expr(bound, procs);
            true
        }
        StmtKind::Insert { list, item } => {
            mark_designator(list, procs);
            mark_designator(item, procs);
            true
        }
    };
    s.det = det;
    det
}

/// Determinism of a boolean expression executed as a statement: conjuncts
/// run in sequence and a disjunction over statements is a choice.
fn mark_test(e: &mut Expr, procs: &[bool]) -> bool {
    match &mut e.kind {
        ExprKind::Binary(BinOp::And, a, b) => {
            let da = mark_test(a, procs);
            let db = mark_test(b, procs);
            da && db
        }
        ExprKind::Binary(BinOp::Or, a, b) if a.has_stmt || b.has_stmt => {
            mark_test(a, procs);
            mark_test(b, procs);
            false
        }
        ExprKind::Stmt(s) => mark_stmt(s, procs),
        _ => {
            mark_expr(e, procs);
            true
        }
    }
}

fn mark_expr(e: &mut Expr, procs: &[bool]) {
    match &mut e.kind {
        ExprKind::Const(_) | ExprKind::Str(_) => {}
        ExprKind::Load(d) | ExprKind::Known(d) => mark_designator(d, procs),
        ExprKind::ToReal(x) | ExprKind::Neg(x) | ExprKind::Not(x) | ExprKind::Abs(x) => mark_expr(x, procs),
        ExprKind::Binary(_, a, b) => {
            mark_expr(a, procs);
            mark_expr(b, procs);
        }
        ExprKind::Stmt(s) => {
            mark_stmt(s, procs);
        }
    }
}

fn mark_designator(d: &mut Designator, procs: &[bool]) {
    for step in &mut d.steps {
        if let Step::Index { index, .. } = step {
            mark_expr(index, procs);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse;
    use crate::syntax::token::tokenize;

    const DECLS: &str = "CONST N = 8; \
        TYPE Board = ARRAY [1..N] OF CONSTRAINED [1..N]; \
             Colour = (blue, green, red, yellow); \
             Info = RECORD co: Colour; No: CONSTRAINED INTEGER; END; \
        VAR i, j: INTEGER; a: ARRAY [1..N] OF INTEGER; C: CONSTRAINED [1..N]; \
            X, Y: Board; Z: Info; b: BOOLEAN; r: REAL; R: CONSTRAINED REAL;";

    fn check_src(src: &str) -> CResult<Program> {
        check(&parse(&tokenize(src).unwrap()).unwrap())
    }

    fn body(stmts: &str) -> CResult<Program> {
        check_src(&format!("MODULE T; {DECLS} BEGIN {stmts} END T."))
    }

    fn rejected(stmts: &str) -> Rule {
        match body(stmts) {
            Ok(_) => panic!("accepted: {stmts}"),
            Err(e) => e.rule,
        }
    }

    #[test]
    fn assignment_to_unknowns_is_illegal() {
        assert_eq!(rejected("C := 1"), Rule::AssignToUnknown);
        assert_eq!(rejected("X[1] := 0"), Rule::AssignToUnknown);
        assert_eq!(rejected("Z := Z"), Rule::AssignToUnknown);
    }

    #[test]
    fn constraints_on_unknowns_are_marked() {
        let p = body("C = 1; X[1] = 0").unwrap();
        for s in &p.body {
            let StmtKind::Test(e) = &s.kind else { panic!() };
            assert!(e.unknown);
        }
        let p = body("i := 1; i = 1").unwrap();
        let StmtKind::Test(e) = &p.body[1].kind else { panic!() };
        assert!(!e.unknown);
    }

    #[test]
    fn unknowns_on_right_sides_are_legal() {
        body("i := X[1] + X[2]").unwrap();
        body("i := Y[X[2]]").unwrap();
        body("i := 1; j := 2; X[i] <= j; Y[X[i+2]] <> Y[N]").unwrap();
    }

    #[test]
    fn unknowns_in_other_positions_are_illegal() {
        assert_eq!(rejected("WHILE C > 1 DO i := 1 END"), Rule::UnknownPosition);
        assert_eq!(rejected("FOR i := 1 TO C DO TRUE END"), Rule::UnknownPosition);
        assert_eq!(rejected("a[C] := 1"), Rule::UnknownPosition);
    }

    #[test]
    fn unsupported_constraint_forms() {
        assert_eq!(rejected("(C = 1) OR (C = 2)"), Rule::ConstraintForm);
        assert_eq!(rejected("(C = 1) = b"), Rule::ConstraintForm);
        assert_eq!(rejected("R < 1.0"), Rule::ConstraintForm);
        assert_eq!(rejected("R * R = 2.0"), Rule::ConstraintForm);
        assert_eq!(rejected("NOT (C = 1 AND C = 2)"), Rule::ConstraintForm);
        body("R = 2.0 * R + 1; R = (r + 2) / 4").unwrap();
        body("NOT (C = 1); IF C > 2 THEN i := 1 END").unwrap();
    }

    #[test]
    fn local_unknowns_are_rejected() {
        let src = |local: &str| {
            format!("MODULE T; {DECLS} PROCEDURE P; {local} BEGIN END P; BEGIN END T.")
        };
        assert_eq!(check_src(&src("VAR c: CONSTRAINED INTEGER;")).unwrap_err().rule, Rule::LocalUnknown);
        assert_eq!(check_src(&src("TYPE T = CONSTRAINED [1..3];")).unwrap_err().rule, Rule::LocalUnknown);
        assert_eq!(check_src(&src("VAR y: Board;")).unwrap_err().rule, Rule::LocalUnknown);
        check_src(&src("VAR L: LIST OF CONSTRAINED [1..N];")).unwrap();
    }

    #[test]
    fn builtin_argument_checks() {
        body("INDOMAIN(X); INDOMAIN(C); ALL_DIFFERENT(X); AT_MOST(1, X, 3)").unwrap();
        assert_eq!(rejected("INDOMAIN(Z.No)"), Rule::Type);
        assert_eq!(rejected("INDOMAIN(i)"), Rule::Type);
        assert_eq!(rejected("ALL_DIFFERENT(a)"), Rule::Type);
        assert_eq!(rejected("KNOWN(X)"), Rule::Type);
        body("IF NOT KNOWN(Z.No) THEN Z.No = 1 END; b := KNOWN(i)").unwrap();
    }

    #[test]
    fn types_are_checked() {
        assert_eq!(rejected("i := TRUE"), Rule::Type);
        assert_eq!(rejected("Z.co = 1"), Rule::Type);
        assert_eq!(rejected("i := 1.5"), Rule::Type);
        body("r := 1; r := i / 2; Z.co = red; b := blue < red").unwrap();
        assert_eq!(rejected("q := 1"), Rule::Name);
    }

    #[test]
    fn determinism_marks() {
        let p = check_src(
            "MODULE T; VAR x: INTEGER; \
             PROCEDURE P; BEGIN EITHER x = 1 ORELSE x = 2 END END P; \
             PROCEDURE Q; BEGIN P END Q; \
             PROCEDURE R; BEGIN COMMIT P END END R; \
             BEGIN P; Q; R; x := 1; FOR x := 1 TO 2 DO P END END T.",
        )
        .unwrap();
        assert!(!p.procs[0].det);
        assert!(!p.procs[1].det);
        assert!(p.procs[2].det);
        let dets: Vec<bool> = p.body.iter().map(|s| s.det).collect();
        assert_eq!(dets, vec![false, false, true, true, false]);
    }

    #[test]
    fn constants_fold() {
        let p = check_src("MODULE T; CONST N = 3; M = N * 2 - 1; VAR a: ARRAY [1..M] OF INTEGER; BEGIN END T.")
            .unwrap();
        assert_eq!(p.global_size, 5);
    }
}
