//! Tokens and the lexer.

use std::fmt;

use thiserror::Error;

/// A 1-based source position.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Loc {
    pub line: u32,
    pub column: u32,
}

impl Loc {
    pub fn new(line: u32, column: u32) -> Self {
        Loc { line, column }
    }
}

/// Locations never take part in structural comparison of syntax trees, so
/// that a reparsed pretty-printed tree compares equal to the original.
impl PartialEq for Loc {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Module,
    Begin,
    End,
    Const,
    Type,
    Var,
    Mix,
    Procedure,
    Array,
    Of,
    Record,
    Constrained,
    List,
    If,
    Then,
    Elsif,
    Else,
    While,
    Do,
    For,
    To,
    Some,
    Either,
    Orelse,
    Forall,
    Commit,
    Not,
    And,
    Or,
    Div,
    Mod,
    True,
    False,
}

impl Keyword {
    pub fn lookup(s: &str) -> Option<Keyword> {
        use Keyword::*;
        Option::Some(match s {
            "MODULE" => Module,
            "BEGIN" => Begin,
            "END" => End,
            "CONST" => Const,
            "TYPE" => Type,
            "VAR" => Var,
            "MIX" => Mix,
            "PROCEDURE" => Procedure,
            "ARRAY" => Array,
            "OF" => Of,
            "RECORD" => Record,
            "CONSTRAINED" => Constrained,
            "LIST" => List,
            "IF" => If,
            "THEN" => Then,
            "ELSIF" => Elsif,
            "ELSE" => Else,
            "WHILE" => While,
            "DO" => Do,
            "FOR" => For,
            "TO" => To,
            "SOME" => Some,
            "EITHER" => Either,
            "ORELSE" => Orelse,
            "FORALL" => Forall,
            "COMMIT" => Commit,
            "NOT" => Not,
            "AND" => And,
            "OR" => Or,
            "DIV" => Div,
            "MOD" => Mod,
            "TRUE" => True,
            "FALSE" => False,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Module => "MODULE",
            Begin => "BEGIN",
            End => "END",
            Const => "CONST",
            Type => "TYPE",
            Var => "VAR",
            Mix => "MIX",
            Procedure => "PROCEDURE",
            Array => "ARRAY",
            Of => "OF",
            Record => "RECORD",
            Constrained => "CONSTRAINED",
            List => "LIST",
            If => "IF",
            Then => "THEN",
            Elsif => "ELSIF",
            Else => "ELSE",
            While => "WHILE",
            Do => "DO",
            For => "FOR",
            To => "TO",
            Some => "SOME",
            Either => "EITHER",
            Orelse => "ORELSE",
            Forall => "FORALL",
            Commit => "COMMIT",
            Not => "NOT",
            And => "AND",
            Or => "OR",
            Div => "DIV",
            Mod => "MOD",
            True => "TRUE",
            False => "FALSE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    DotDot,
    Amp,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::Assign => ":=",
            Op::Plus => "+",
            Op::Minus => "-",
            Op::Star => "*",
            Op::Slash => "/",
            Op::Eq => "=",
            Op::Ne => "<>",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
            Op::DotDot => "..",
            Op::Amp => "&",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Colon,
    Dot,
}

impl Punct {
    pub fn as_char(self) -> char {
        match self {
            Punct::LParen => '(',
            Punct::RParen => ')',
            Punct::LBracket => '[',
            Punct::RBracket => ']',
            Punct::Comma => ',',
            Punct::Semicolon => ';',
            Punct::Colon => ':',
            Punct::Dot => '.',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    Op(Op),
    Punct(Punct),
    Eof,
}

/// Coarse token classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenClass {
    Keyword,
    Identifier,
    IntegerLiteral,
    RealLiteral,
    StringLiteral,
    Operator,
    Punctuation,
    EndOfInput,
}

impl TokenKind {
    pub fn class(&self) -> TokenClass {
        match self {
            TokenKind::Keyword(_) => TokenClass::Keyword,
            TokenKind::Ident(_) => TokenClass::Identifier,
            TokenKind::Int(_) => TokenClass::IntegerLiteral,
            TokenKind::Real(_) => TokenClass::RealLiteral,
            TokenKind::Str(_) => TokenClass::StringLiteral,
            TokenKind::Op(_) => TokenClass::Operator,
            TokenKind::Punct(_) => TokenClass::Punctuation,
            TokenKind::Eof => TokenClass::EndOfInput,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "{}", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(n) => write!(f, "integer {n}"),
            TokenKind::Real(x) => write!(f, "real {x}"),
            TokenKind::Str(s) => write!(f, "string '{s}'"),
            TokenKind::Op(o) => write!(f, "`{}`", o.as_str()),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_char()),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{loc}: unterminated comment")]
    UnterminatedComment { loc: Loc },
    #[error("{loc}: unterminated string literal")]
    UnterminatedString { loc: Loc },
    #[error("{loc}: illegal character `{ch}`")]
    IllegalChar { ch: char, loc: Loc },
    #[error("{loc}: malformed number `{text}`")]
    BadNumber { text: String, loc: Loc },
}

impl LexError {
    pub fn loc(&self) -> Loc {
        match self {
            LexError::UnterminatedComment { loc }
            | LexError::UnterminatedString { loc }
            | LexError::IllegalChar { loc, .. }
            | LexError::BadNumber { loc, .. } => *loc,
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(o, _)| o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn loc(&self) -> Loc {
        Loc::new(self.line, self.column)
    }

    /// Skips whitespace and (nested) comments.
    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('(') if self.peek_at(1) == Some('*') => {
                    let start = self.loc();
                    self.bump();
                    self.bump();
                    let mut depth = 1;
                    while depth > 0 {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('('), Some('*')) => {
                                self.bump();
                                self.bump();
                                depth += 1;
                            }
                            (Some('*'), Some(')')) => {
                                self.bump();
                                self.bump();
                                depth -= 1;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => return Err(LexError::UnterminatedComment { loc: start }),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia()?;
        let loc = self.loc();
        let start = self.offset();
        let Some(c) = self.peek() else {
            return Ok(Token { kind: TokenKind::Eof, lexeme: String::new(), loc });
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                self.bump();
            }
            let word = &self.src[start..self.offset()];
            match Keyword::lookup(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            self.number(loc)?
        } else if c == '\'' || c == '"' {
            self.bump();
            let mut text = String::new();
            loop {
                match self.bump() {
                    Some(q) if q == c => break,
                    Some('\n') | None => return Err(LexError::UnterminatedString { loc }),
                    Some(ch) => text.push(ch),
                }
            }
            TokenKind::Str(text)
        } else {
            self.bump();
            let next = self.peek();
            let two = |lx: &mut Self, kind| {
                lx.bump();
                kind
            };
            match c {
                ':' if next == Some('=') => two(self, TokenKind::Op(Op::Assign)),
                ':' => TokenKind::Punct(Punct::Colon),
                '.' if next == Some('.') => two(self, TokenKind::Op(Op::DotDot)),
                '.' => TokenKind::Punct(Punct::Dot),
                '<' if next == Some('=') => two(self, TokenKind::Op(Op::Le)),
                '<' if next == Some('>') => two(self, TokenKind::Op(Op::Ne)),
                '<' => TokenKind::Op(Op::Lt),
                '>' if next == Some('=') => two(self, TokenKind::Op(Op::Ge)),
                '>' => TokenKind::Op(Op::Gt),
                '+' => TokenKind::Op(Op::Plus),
                '-' => TokenKind::Op(Op::Minus),
                '*' => TokenKind::Op(Op::Star),
                '/' => TokenKind::Op(Op::Slash),
                '=' => TokenKind::Op(Op::Eq),
                '#' => TokenKind::Op(Op::Ne),
                '&' => TokenKind::Op(Op::Amp),
                '(' => TokenKind::Punct(Punct::LParen),
                ')' => TokenKind::Punct(Punct::RParen),
                '[' => TokenKind::Punct(Punct::LBracket),
                ']' => TokenKind::Punct(Punct::RBracket),
                ',' => TokenKind::Punct(Punct::Comma),
                ';' => TokenKind::Punct(Punct::Semicolon),
                ch => return Err(LexError::IllegalChar { ch, loc }),
            }
        };
        Ok(Token { kind, lexeme: self.src[start..self.offset()].to_string(), loc })
    }

    fn number(&mut self, loc: Loc) -> Result<TokenKind, LexError> {
        let start = self.offset();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        // `1..N` is a range, not a real literal.
        let is_real = self.peek() == Some('.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit());
        if is_real {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            if matches!(self.peek(), Some('E' | 'e')) {
                let sign = matches!(self.peek_at(1), Some('+' | '-'));
                let digit_at = if sign { 2 } else { 1 };
                if matches!(self.peek_at(digit_at), Some(c) if c.is_ascii_digit()) {
                    for _ in 0..digit_at {
                        self.bump();
                    }
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        self.bump();
                    }
                }
            }
        }
        let text = &self.src[start..self.offset()];
        let bad = || LexError::BadNumber { text: text.to_string(), loc };
        if is_real {
            text.parse().map(TokenKind::Real).map_err(|_| bad())
        } else {
            text.parse().map(TokenKind::Int).map_err(|_| bad())
        }
    }
}

/// Splits `source` into tokens. The result always ends with an
/// [`TokenKind::Eof`] marker.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer {
        src: source,
        chars: source.char_indices().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        let tok = lexer.next_token()?;
        let done = tok.kind == TokenKind::Eof;
        tokens.push(tok);
        if done {
            return Ok(tokens);
        }
    }
}
