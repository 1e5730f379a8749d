//! Recursive descent parser.

use thiserror::Error;

use super::ast::*;
use super::token::{Keyword, Loc, Op, Punct, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{loc}: expected {expected}, found {found}")]
pub struct ParseError {
    pub expected: String,
    pub found: String,
    pub loc: Loc,
}

pub type ParseResult<T> = Result<T, ParseError>;

pub struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

/// Parses a complete module from a token sequence produced by
/// [`tokenize`](super::token::tokenize).
pub fn parse(tokens: &[Token]) -> ParseResult<Module> {
    let mut p = Parser::new(tokens);
    let module = p.module()?;
    p.expect_eof()?;
    Ok(module)
}

/// Parses a single expression; used by tests and tooling.
pub fn parse_expr(tokens: &[Token]) -> ParseResult<Expr> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a statement sequence.
pub fn parse_statements(tokens: &[Token]) -> ParseResult<Vec<Stmt>> {
    let mut p = Parser::new(tokens);
    let s = p.stmt_seq()?;
    p.expect_eof()?;
    Ok(s)
}

impl<'t> Parser<'t> {
    pub fn new(tokens: &'t [Token]) -> Self {
        assert!(
            matches!(tokens.last(), Some(t) if t.kind == TokenKind::Eof),
            "token stream must end with Eof"
        );
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn loc(&self) -> Loc {
        self.tokens[self.pos].loc
    }

    fn advance(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: impl Into<String>) -> ParseResult<T> {
        Err(ParseError {
            expected: expected.into(),
            found: self.peek().to_string(),
            loc: self.loc(),
        })
    }

    fn at_kw(&self, k: Keyword) -> bool {
        *self.peek() == TokenKind::Keyword(k)
    }

    fn at_punct(&self, p: Punct) -> bool {
        *self.peek() == TokenKind::Punct(p)
    }

    fn at_op(&self, o: Op) -> bool {
        *self.peek() == TokenKind::Op(o)
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        let hit = self.at_kw(k);
        if hit {
            self.advance();
        }
        hit
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.advance();
        }
        hit
    }

    fn eat_op(&mut self, o: Op) -> bool {
        let hit = self.at_op(o);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect_kw(&mut self, k: Keyword) -> ParseResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(k.as_str())
        }
    }

    fn expect_punct(&mut self, p: Punct) -> ParseResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("`{}`", p.as_char()))
        }
    }

    fn expect_op(&mut self, o: Op) -> ParseResult<()> {
        if self.eat_op(o) {
            Ok(())
        } else {
            self.error(format!("`{}`", o.as_str()))
        }
    }

    fn expect_eof(&self) -> ParseResult<()> {
        if *self.peek() == TokenKind::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn ident(&mut self) -> ParseResult<String> {
        match self.peek() {
            TokenKind::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.error("identifier"),
        }
    }

    fn ident_list(&mut self) -> ParseResult<Vec<String>> {
        let mut names = vec![self.ident()?];
        while self.eat_punct(Punct::Comma) {
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn closing_name(&mut self, name: &str) -> ParseResult<()> {
        let loc = self.loc();
        let closing = self.ident()?;
        if closing != name {
            return Err(ParseError {
                expected: format!("`{name}`"),
                found: format!("identifier `{closing}`"),
                loc,
            });
        }
        Ok(())
    }

    // ---- declarations ----

    fn module(&mut self) -> ParseResult<Module> {
        let loc = self.loc();
        self.expect_kw(Keyword::Module)?;
        let name = self.ident()?;
        self.expect_punct(Punct::Semicolon)?;
        let decls = self.decls()?;
        let body = if self.eat_kw(Keyword::Begin) { self.stmt_seq()? } else { Vec::new() };
        self.expect_kw(Keyword::End)?;
        self.closing_name(&name)?;
        self.expect_punct(Punct::Dot)?;
        Ok(Module { name, decls, body, loc })
    }

    fn decls(&mut self) -> ParseResult<Vec<Decl>> {
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                TokenKind::Keyword(Keyword::Const) => {
                    self.advance();
                    let mut items = Vec::new();
                    while let TokenKind::Ident(_) = self.peek() {
                        let loc = self.loc();
                        let name = self.ident()?;
                        self.expect_op(Op::Eq)?;
                        let value = self.expr()?;
                        self.expect_punct(Punct::Semicolon)?;
                        items.push(ConstDecl { name, value, loc });
                    }
                    decls.push(Decl::Const(items));
                }
                TokenKind::Keyword(Keyword::Type) => {
                    self.advance();
                    let mut items = Vec::new();
                    while let TokenKind::Ident(_) = self.peek() {
                        let loc = self.loc();
                        let name = self.ident()?;
                        self.expect_op(Op::Eq)?;
                        let ty = self.type_expr()?;
                        self.expect_punct(Punct::Semicolon)?;
                        items.push(TypeDecl { name, ty, loc });
                    }
                    decls.push(Decl::Type(items));
                }
                TokenKind::Keyword(Keyword::Var) => {
                    self.advance();
                    let mut items = Vec::new();
                    while let TokenKind::Ident(_) = self.peek() {
                        items.push(self.var_decl()?);
                        self.expect_punct(Punct::Semicolon)?;
                    }
                    decls.push(Decl::Var(items));
                }
                TokenKind::Keyword(Keyword::Procedure) => {
                    decls.push(Decl::Procedure(self.procedure()?));
                }
                _ => return Ok(decls),
            }
        }
    }

    fn var_decl(&mut self) -> ParseResult<VarDecl> {
        let loc = self.loc();
        let names = self.ident_list()?;
        self.expect_punct(Punct::Colon)?;
        let ty = self.type_expr()?;
        Ok(VarDecl { names, ty, loc })
    }

    fn procedure(&mut self) -> ParseResult<ProcDecl> {
        let loc = self.loc();
        self.expect_kw(Keyword::Procedure)?;
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat_punct(Punct::LParen) {
            if !self.at_punct(Punct::RParen) {
                loop {
                    let loc = self.loc();
                    let mode = if self.eat_kw(Keyword::Var) {
                        ParamMode::Var
                    } else if self.eat_kw(Keyword::Mix) {
                        ParamMode::Mix
                    } else {
                        ParamMode::Value
                    };
                    let names = self.ident_list()?;
                    self.expect_punct(Punct::Colon)?;
                    let ty = self.type_expr()?;
                    params.push(ParamSection { mode, names, ty, loc });
                    if !self.eat_punct(Punct::Semicolon) {
                        break;
                    }
                }
            }
            self.expect_punct(Punct::RParen)?;
        }
        self.expect_punct(Punct::Semicolon)?;
        let decls = self.decls()?;
        self.expect_kw(Keyword::Begin)?;
        let body = self.stmt_seq()?;
        self.expect_kw(Keyword::End)?;
        self.closing_name(&name)?;
        self.expect_punct(Punct::Semicolon)?;
        Ok(ProcDecl { name, params, decls, body, loc })
    }

    fn type_expr(&mut self) -> ParseResult<TypeExpr> {
        let loc = self.loc();
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(TypeExpr::Named(name, loc))
            }
            TokenKind::Punct(Punct::LBracket) => {
                self.advance();
                let lo = self.expr()?;
                self.expect_op(Op::DotDot)?;
                let hi = self.expr()?;
                self.expect_punct(Punct::RBracket)?;
                Ok(TypeExpr::Subrange(Box::new(lo), Box::new(hi)))
            }
            TokenKind::Punct(Punct::LParen) => {
                self.advance();
                let names = self.ident_list()?;
                self.expect_punct(Punct::RParen)?;
                Ok(TypeExpr::Enumeration(names, loc))
            }
            TokenKind::Keyword(Keyword::Array) => {
                self.advance();
                let mut indices = vec![self.type_expr()?];
                while self.eat_punct(Punct::Comma) {
                    indices.push(self.type_expr()?);
                }
                self.expect_kw(Keyword::Of)?;
                let elem = self.type_expr()?;
                Ok(TypeExpr::Array(indices, Box::new(elem)))
            }
            TokenKind::Keyword(Keyword::Record) => {
                self.advance();
                let mut fields = Vec::new();
                loop {
                    if let TokenKind::Ident(_) = self.peek() {
                        fields.push(self.var_decl()?);
                    }
                    if !self.eat_punct(Punct::Semicolon) {
                        break;
                    }
                }
                self.expect_kw(Keyword::End)?;
                Ok(TypeExpr::Record(fields))
            }
            TokenKind::Keyword(Keyword::Constrained) => {
                self.advance();
                Ok(TypeExpr::Constrained(Box::new(self.type_expr()?), loc))
            }
            TokenKind::Keyword(Keyword::List) => {
                self.advance();
                self.expect_kw(Keyword::Of)?;
                Ok(TypeExpr::List(Box::new(self.type_expr()?)))
            }
            _ => self.error("type"),
        }
    }

    // ---- statements ----

    fn at_seq_end(&self) -> bool {
        matches!(
            self.peek(),
            TokenKind::Eof
                | TokenKind::Keyword(
                    Keyword::End | Keyword::Orelse | Keyword::Else | Keyword::Elsif | Keyword::Do
                )
        )
    }

    pub fn stmt_seq(&mut self) -> ParseResult<Vec<Stmt>> {
        let mut stmts = Vec::new();
        loop {
            if self.eat_punct(Punct::Semicolon) {
                continue;
            }
            if self.at_seq_end() {
                return Ok(stmts);
            }
            stmts.push(self.statement()?);
            if !self.eat_punct(Punct::Semicolon) {
                return Ok(stmts);
            }
        }
    }

    fn statement(&mut self) -> ParseResult<Stmt> {
        let loc = self.loc();
        let kind = match self.peek() {
            TokenKind::Keyword(Keyword::If) => self.if_stmt()?,
            TokenKind::Keyword(Keyword::While) => {
                self.advance();
                let cond = self.expr()?;
                self.expect_kw(Keyword::Do)?;
                let body = self.stmt_seq()?;
                self.expect_kw(Keyword::End)?;
                StmtKind::While(cond, body)
            }
            TokenKind::Keyword(
                Keyword::For | Keyword::Some | Keyword::Either | Keyword::Forall | Keyword::Commit,
            ) => return self.compound_statement(),
            _ => {
                let e = self.expr()?;
                if self.eat_op(Op::Assign) {
                    let rhs = self.expr()?;
                    StmtKind::Assign(e, rhs)
                } else {
                    return Ok(statement_from_expr(e, loc));
                }
            }
        };
        Ok(Stmt { kind, loc })
    }

    /// Statements that may also appear in expression position.
    fn compound_statement(&mut self) -> ParseResult<Stmt> {
        let loc = self.loc();
        let kw = match self.peek() {
            TokenKind::Keyword(k) => *k,
            _ => return self.error("statement"),
        };
        self.advance();
        let kind = match kw {
            Keyword::For | Keyword::Some => {
                let index = self.ident()?;
                self.expect_op(Op::Assign)?;
                let from = self.expr()?;
                self.expect_kw(Keyword::To)?;
                let to = self.expr()?;
                self.expect_kw(Keyword::Do)?;
                let body = self.stmt_seq()?;
                self.expect_kw(Keyword::End)?;
                let q = Quantifier { index, from, to, body };
                if kw == Keyword::For {
                    StmtKind::For(q)
                } else {
                    StmtKind::Some(q)
                }
            }
            Keyword::Either => {
                let mut branches = vec![self.stmt_seq()?];
                if !self.at_kw(Keyword::Orelse) {
                    return self.error("ORELSE");
                }
                while self.eat_kw(Keyword::Orelse) {
                    branches.push(self.stmt_seq()?);
                }
                self.expect_kw(Keyword::End)?;
                StmtKind::Either(branches)
            }
            Keyword::Forall => {
                let generator = self.stmt_seq()?;
                self.expect_kw(Keyword::Do)?;
                let body = self.stmt_seq()?;
                self.expect_kw(Keyword::End)?;
                StmtKind::Forall(generator, body)
            }
            Keyword::Commit => {
                let body = self.stmt_seq()?;
                self.expect_kw(Keyword::End)?;
                StmtKind::Commit(body)
            }
            _ => unreachable!(),
        };
        Ok(Stmt { kind, loc })
    }

    fn if_stmt(&mut self) -> ParseResult<StmtKind> {
        self.expect_kw(Keyword::If)?;
        let mut arms = Vec::new();
        let cond = self.expr()?;
        self.expect_kw(Keyword::Then)?;
        arms.push((cond, self.stmt_seq()?));
        let mut otherwise = None;
        loop {
            if self.eat_kw(Keyword::Elsif) {
                let cond = self.expr()?;
                self.expect_kw(Keyword::Then)?;
                arms.push((cond, self.stmt_seq()?));
            } else if self.eat_kw(Keyword::Else) {
                otherwise = Some(self.stmt_seq()?);
                self.expect_kw(Keyword::End)?;
                break;
            } else {
                self.expect_kw(Keyword::End)?;
                break;
            }
        }
        Ok(StmtKind::If(arms, otherwise))
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> ParseResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.at_kw(Keyword::Or) {
            let loc = self.loc();
            self.advance();
            let rhs = self.and_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)), loc);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> ParseResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.at_kw(Keyword::And) || self.at_op(Op::Amp) {
            let loc = self.loc();
            self.advance();
            let rhs = self.not_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)), loc);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> ParseResult<Expr> {
        if self.at_kw(Keyword::Not) {
            let loc = self.loc();
            self.advance();
            let inner = self.not_expr()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(inner)), loc));
        }
        self.relation()
    }

    fn relation(&mut self) -> ParseResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            TokenKind::Op(Op::Eq) => BinOp::Eq,
            TokenKind::Op(Op::Ne) => BinOp::Ne,
            TokenKind::Op(Op::Lt) => BinOp::Lt,
            TokenKind::Op(Op::Le) => BinOp::Le,
            TokenKind::Op(Op::Gt) => BinOp::Gt,
            TokenKind::Op(Op::Ge) => BinOp::Ge,
            _ => return Ok(lhs),
        };
        let loc = self.loc();
        self.advance();
        let rhs = self.additive()?;
        Ok(Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), loc))
    }

    fn additive(&mut self) -> ParseResult<Expr> {
        let mut lhs = if self.at_op(Op::Minus) || self.at_op(Op::Plus) {
            let loc = self.loc();
            let neg = self.at_op(Op::Minus);
            self.advance();
            let operand = self.multiplicative()?;
            if neg {
                Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(operand)), loc)
            } else {
                operand
            }
        } else {
            self.multiplicative()?
        };
        loop {
            let op = match self.peek() {
                TokenKind::Op(Op::Plus) => BinOp::Add,
                TokenKind::Op(Op::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let loc = self.loc();
            self.advance();
            let rhs = self.multiplicative()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), loc);
        }
    }

    fn multiplicative(&mut self) -> ParseResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                TokenKind::Op(Op::Star) => BinOp::Mul,
                TokenKind::Op(Op::Slash) => BinOp::Slash,
                TokenKind::Keyword(Keyword::Div) => BinOp::Div,
                TokenKind::Keyword(Keyword::Mod) => BinOp::Mod,
                _ => return Ok(lhs),
            };
            let loc = self.loc();
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), loc);
        }
    }

    fn factor(&mut self) -> ParseResult<Expr> {
        let loc = self.loc();
        let kind = match self.peek().clone() {
            TokenKind::Int(n) => {
                self.advance();
                ExprKind::Int(n)
            }
            TokenKind::Real(x) => {
                self.advance();
                ExprKind::Real(x)
            }
            TokenKind::Str(s) => {
                self.advance();
                ExprKind::Str(s)
            }
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                ExprKind::Bool(true)
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                ExprKind::Bool(false)
            }
            TokenKind::Keyword(Keyword::Not) => return self.not_expr(),
            TokenKind::Keyword(
                Keyword::For | Keyword::Some | Keyword::Either | Keyword::Forall | Keyword::Commit,
            ) => ExprKind::Stmt(Box::new(self.compound_statement()?)),
            TokenKind::Punct(Punct::LParen) => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                return Ok(e);
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.at_punct(Punct::LParen) {
                    self.advance();
                    let args = self.args()?;
                    ExprKind::Call(name, args)
                } else {
                    return self.designator_tail(Expr::new(ExprKind::Name(name), loc));
                }
            }
            _ => return self.error("expression"),
        };
        Ok(Expr::new(kind, loc))
    }

    fn args(&mut self) -> ParseResult<Vec<Expr>> {
        let mut args = Vec::new();
        if !self.at_punct(Punct::RParen) {
            args.push(self.expr()?);
            while self.eat_punct(Punct::Comma) {
                args.push(self.expr()?);
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(args)
    }

    fn designator_tail(&mut self, mut base: Expr) -> ParseResult<Expr> {
        loop {
            if self.at_punct(Punct::LBracket) {
                let loc = self.loc();
                self.advance();
                let mut idx = vec![self.expr()?];
                while self.eat_punct(Punct::Comma) {
                    idx.push(self.expr()?);
                }
                self.expect_punct(Punct::RBracket)?;
                base = Expr::new(ExprKind::Index(Box::new(base), idx), loc);
            } else if self.at_punct(Punct::Dot) && matches!(self.peek_at(1), TokenKind::Ident(_)) {
                let loc = self.loc();
                self.advance();
                let field = self.ident()?;
                base = Expr::new(ExprKind::Field(Box::new(base), field), loc);
            } else {
                return Ok(base);
            }
        }
    }
}

/// Turns an expression parsed in statement position into a statement:
/// built-in and procedure calls, compound statements, negations, and
/// boolean tests.
fn statement_from_expr(e: Expr, loc: Loc) -> Stmt {
    let kind = match e.kind {
        ExprKind::Call(name, args) if !is_builtin_function(&name) => StmtKind::Call(name, args),
        ExprKind::Stmt(s) => return *s,
        ExprKind::Unary(UnOp::Not, inner) => {
            let inner_loc = inner.loc;
            StmtKind::Not(Box::new(statement_from_expr(*inner, inner_loc)))
        }
        kind => StmtKind::Test(Expr::new(kind, e.loc)),
    };
    Stmt { kind, loc }
}

/// Names of built-ins that return values and so stay expressions.
pub fn is_builtin_function(name: &str) -> bool {
    matches!(name, "abs" | "KNOWN")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::token::tokenize;

    fn stmts(src: &str) -> Vec<Stmt> {
        parse_statements(&tokenize(src).unwrap()).unwrap()
    }

    #[test]
    fn ordered_array_one_liner() {
        let s = stmts("ordered := FOR i := 1 TO n-1 DO a[i] <= a[i+1] END");
        assert_eq!(s.len(), 1);
        let StmtKind::Assign(lhs, rhs) = &s[0].kind else { panic!("not an assignment") };
        assert_eq!(lhs.kind, ExprKind::Name("ordered".into()));
        let ExprKind::Stmt(inner) = &rhs.kind else { panic!("rhs is not a statement") };
        let StmtKind::For(q) = &inner.kind else { panic!("not FOR") };
        assert_eq!(q.index, "i");
        assert_eq!(q.body.len(), 1);
        assert!(matches!(&q.body[0].kind, StmtKind::Test(e) if matches!(e.kind, ExprKind::Binary(BinOp::Le, _, _))));
    }

    #[test]
    fn either_orelse() {
        let s = stmts("EITHER x = 1 ORELSE x = 2 END");
        let StmtKind::Either(branches) = &s[0].kind else { panic!() };
        assert_eq!(branches.len(), 2);
    }

    #[test]
    fn minimal_module() {
        let m = parse(&tokenize("MODULE M; BEGIN END M.").unwrap()).unwrap();
        assert_eq!(m.name, "M");
        assert!(m.body.is_empty());
        assert!(m.decls.is_empty());
    }

    #[test]
    fn and_binds_looser_than_relations() {
        let e = parse_expr(&tokenize("i < M AND a = b").unwrap()).unwrap();
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::And, _, _)));
        let e = parse_expr(&tokenize("NOT x = 1").unwrap()).unwrap();
        assert!(matches!(e.kind, ExprKind::Unary(UnOp::Not, _)));
    }

    #[test]
    fn not_statement_and_calls() {
        let s = stmts("NOT F[i,j]; WRITELN(); P(x, y); NOT KNOWN(x)");
        assert!(matches!(&s[0].kind, StmtKind::Not(inner) if matches!(inner.kind, StmtKind::Test(_))));
        assert!(matches!(&s[1].kind, StmtKind::Call(n, a) if n == "WRITELN" && a.is_empty()));
        assert!(matches!(&s[2].kind, StmtKind::Call(n, a) if n == "P" && a.len() == 2));
        assert!(matches!(&s[3].kind, StmtKind::Not(_)));
    }

    #[test]
    fn empty_statements_are_skipped() {
        let s = stmts("x := 1;; y := 2;");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn declarations() {
        let src = "MODULE Q; CONST N = 8; \
                   TYPE Board = ARRAY [1..N] OF CONSTRAINED [1..N]; \
                   Colour = (blue, green); \
                   Info = RECORD co: Colour; No: CONSTRAINED INTEGER; END; \
                   VAR X: Board; L: LIST OF CONSTRAINED [1..N]; \
                   PROCEDURE P(VAR a: Board; MIX b, c: INTEGER; d: INTEGER); VAR k: INTEGER; BEGIN k := 1 END P; \
                   BEGIN END Q.";
        let m = parse(&tokenize(src).unwrap()).unwrap();
        assert_eq!(m.decls.len(), 4);
        let Decl::Procedure(p) = &m.decls[3] else { panic!() };
        assert_eq!(p.params.len(), 3);
        assert_eq!(p.params[0].mode, ParamMode::Var);
        assert_eq!(p.params[1].mode, ParamMode::Mix);
        assert_eq!(p.params[1].names, vec!["b", "c"]);
    }

    #[test]
    fn syntax_errors_report_expectation() {
        let err = parse(&tokenize("MODULE M; BEGIN x := END M.").unwrap()).unwrap_err();
        assert_eq!(err.expected, "expression");
        assert_eq!((err.loc.line, err.loc.column), (1, 22));
        let err = parse(&tokenize("MODULE M; BEGIN END N.").unwrap()).unwrap_err();
        assert_eq!(err.expected, "`M`");
        let err = parse(&tokenize("MODULE M; BEGIN EITHER x = 1 END END M.").unwrap()).unwrap_err();
        assert_eq!(err.expected, "ORELSE");
    }
}
