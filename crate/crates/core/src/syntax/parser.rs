//! Recursive-descent parser with precedence climbing for expressions.
//!
//! Syntax errors inside an element are reported and the parser resynchronizes
//! at the next element keyword, so one run reports every broken element.

use crate::diag::{Diagnostic, FileId, Span};

use super::ast::*;
use super::lexer::{tokenize_file, Keyword, Token, TokenKind};

/// Parses a complete specification registered as file 0.
pub fn parse(text: &str) -> Result<SpecAst, Vec<Diagnostic>> {
    parse_file(text, FileId(0))
}

pub fn parse_file(text: &str, file: FileId) -> Result<SpecAst, Vec<Diagnostic>> {
    let tokens = tokenize_file(text, file).map_err(|e| vec![Diagnostic::error(e.span, e.message)])?;
    let mut p = Parser::new(tokens, file, text.len());
    let spec = p.spec();
    match spec {
        Some(spec) if p.diags.is_empty() => Ok(spec),
        _ => Err(p.diags),
    }
}

/// Parses a single expression (used by tests and the CLI's input parsing).
pub fn parse_expr(text: &str) -> Result<Expr, Vec<Diagnostic>> {
    let tokens = tokenize_file(text, FileId(0)).map_err(|e| vec![Diagnostic::error(e.span, e.message)])?;
    let mut p = Parser::new(tokens, FileId(0), text.len());
    let e = p.expr().map_err(|d| vec![d])?;
    if let Some(t) = p.peek() {
        let found = t.kind.to_string();
        return Err(vec![p.unexpected(&["end of input"], found, t.span)]);
    }
    Ok(e)
}

type PResult<T> = Result<T, Diagnostic>;

const ELEMENT_START: &[Keyword] = &[
    Keyword::Env,
    Keyword::Sys,
    Keyword::Asm,
    Keyword::Gar,
    Keyword::Define,
    Keyword::Type,
    Keyword::Predicate,
    Keyword::Monitor,
    Keyword::Pattern,
];

const EXPR_START: &[&str] = &[
    "true", "false", "identifier", "integer", "(", "!", "-", "next", "Y", "H", "O",
];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: Span,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn new(tokens: Vec<Token>, file: FileId, len: usize) -> Self {
        Parser {
            tokens,
            pos: 0,
            eof: Span::new(file, len, len),
            diags: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_at(&self, ahead: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn current_span(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.eof)
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.current_span()
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == Some(kind)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek_kind() == Some(&TokenKind::Keyword(kw))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str], found: String, span: Span) -> Diagnostic {
        let list = expected.join(", ");
        let mut d = Diagnostic::error(span, format!("expected {list}, found {found}"));
        d.expected = expected.iter().map(|s| s.to_string()).collect();
        d
    }

    fn error_here(&self, expected: &[&str]) -> Diagnostic {
        match self.peek() {
            Some(t) => self.unexpected(expected, t.kind.to_string(), t.span),
            None => self.unexpected(expected, "end of input".into(), self.eof),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(&[kind.symbol()]))
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<Span> {
        self.expect(TokenKind::Keyword(kw))
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek_kind() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok(Ident::new(name, span))
            }
            _ => Err(self.error_here(&["identifier"])),
        }
    }

    fn spec(&mut self) -> Option<SpecAst> {
        let start = self.current_span();
        let mut imports = Vec::new();
        while self.at_kw(Keyword::Import) {
            match self.import() {
                Ok(i) => imports.push(i),
                Err(d) => {
                    self.diags.push(d);
                    self.recover();
                }
            }
        }
        let header = self.expect_kw(Keyword::Spec).and_then(|_| self.ident());
        let name = match header {
            Ok(name) => name,
            Err(d) => {
                self.diags.push(d);
                self.recover();
                Ident::new("<missing>", self.current_span())
            }
        };
        let mut elements = Vec::new();
        while self.peek().is_some() {
            match self.element() {
                Ok(e) => elements.push(e),
                Err(d) => {
                    self.diags.push(d);
                    self.recover();
                }
            }
        }
        if elements.is_empty() && self.diags.is_empty() {
            let mut d = Diagnostic::error(
                self.eof,
                "a specification must contain at least one element",
            );
            d.expected = ELEMENT_START.iter().map(|k| k.as_str().to_string()).collect();
            self.diags.push(d);
        }
        Some(SpecAst {
            imports,
            name,
            elements,
            span: start.to(self.prev_span()),
        })
    }

    /// Skips at least one token, then up to the next element keyword.
    fn recover(&mut self) {
        if self.peek().is_some() {
            self.pos += 1;
        }
        while let Some(kind) = self.peek_kind() {
            if matches!(kind, TokenKind::Keyword(k) if ELEMENT_START.contains(k)) {
                break;
            }
            self.pos += 1;
        }
    }

    fn import(&mut self) -> PResult<Import> {
        let start = self.expect_kw(Keyword::Import)?;
        let path = match self.peek_kind() {
            Some(TokenKind::Str(s)) => {
                let s = s.clone();
                self.bump();
                s
            }
            _ => return Err(self.error_here(&["string"])),
        };
        let end = self.expect(TokenKind::Semi)?;
        Ok(Import {
            path,
            span: start.to(end),
        })
    }

    fn element(&mut self) -> PResult<Element> {
        let start = self.current_span();
        let Some(TokenKind::Keyword(kw)) = self.peek_kind().cloned() else {
            let names: Vec<&str> = ELEMENT_START.iter().map(|k| k.as_str()).collect();
            return Err(self.error_here(&names));
        };
        match kw {
            Keyword::Env | Keyword::Sys => {
                self.bump();
                let ty = self.type_expr()?;
                let name = self.ident()?;
                let end = self.expect(TokenKind::Semi)?;
                Ok(Element::Var(VarDecl {
                    kind: if kw == Keyword::Env { VarKind::Env } else { VarKind::Sys },
                    ty,
                    name,
                    span: start.to(end),
                }))
            }
            Keyword::Asm | Keyword::Gar => {
                self.bump();
                let name = if matches!(self.peek_kind(), Some(TokenKind::Ident(_)))
                    && self.peek_at(1) == Some(&TokenKind::Colon)
                {
                    let n = self.ident()?;
                    self.bump();
                    Some(n)
                } else {
                    None
                };
                let body = self.temp_constraint()?;
                let end = self.expect(TokenKind::Semi)?;
                let c = Constraint {
                    name,
                    body,
                    span: start.to(end),
                    origin: Origin::User,
                };
                Ok(if kw == Keyword::Asm {
                    Element::Assumption(c)
                } else {
                    Element::Guarantee(c)
                })
            }
            Keyword::Define => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Assign)?;
                let expr = self.expr()?;
                let end = self.expect(TokenKind::Semi)?;
                Ok(Element::Define(Define {
                    name,
                    expr,
                    span: start.to(end),
                }))
            }
            Keyword::Type => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Eq)?;
                let ty = self.type_expr()?;
                let end = self.expect(TokenKind::Semi)?;
                Ok(Element::TypeDef(TypeDef {
                    name,
                    ty,
                    span: start.to(end),
                }))
            }
            Keyword::Predicate => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::LParen)?;
                let mut params = Vec::new();
                loop {
                    let ty = self.type_expr()?;
                    let pname = self.ident()?;
                    params.push((ty, pname));
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::RParen)?;
                self.expect(TokenKind::LBrace)?;
                let body = self.expr()?;
                let end = self.expect(TokenKind::RBrace)?;
                Ok(Element::Predicate(Predicate {
                    name,
                    params,
                    body,
                    span: start.to(end),
                }))
            }
            Keyword::Monitor => {
                self.bump();
                let ty = self.type_expr()?;
                let name = self.ident()?;
                self.expect(TokenKind::LBrace)?;
                let mut constraints = Vec::new();
                loop {
                    constraints.push(self.temp_constraint()?);
                    self.expect(TokenKind::Semi)?;
                    if self.at(&TokenKind::RBrace) {
                        break;
                    }
                }
                let end = self.expect(TokenKind::RBrace)?;
                Ok(Element::Monitor(Monitor {
                    ty,
                    name,
                    constraints,
                    span: start.to(end),
                }))
            }
            Keyword::Pattern => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::LParen)?;
                let mut params = vec![self.ident()?];
                while self.eat(&TokenKind::Comma) {
                    params.push(self.ident()?);
                }
                self.expect(TokenKind::RParen)?;
                self.expect(TokenKind::LBrace)?;
                let mut vars = Vec::new();
                while self.at_kw(Keyword::Var) {
                    self.bump();
                    let ty = self.type_expr()?;
                    let vname = self.ident()?;
                    self.expect(TokenKind::Semi)?;
                    vars.push((ty, vname));
                }
                let mut constraints = Vec::new();
                loop {
                    constraints.push(self.temp_constraint()?);
                    self.expect(TokenKind::Semi)?;
                    if self.at(&TokenKind::RBrace) {
                        break;
                    }
                }
                let end = self.expect(TokenKind::RBrace)?;
                Ok(Element::Pattern(Pattern {
                    name,
                    params,
                    vars,
                    constraints,
                    span: start.to(end),
                }))
            }
            _ => {
                let names: Vec<&str> = ELEMENT_START.iter().map(|k| k.as_str()).collect();
                Err(self.error_here(&names))
            }
        }
    }

    fn temp_constraint(&mut self) -> PResult<TempConstraint> {
        let start = self.current_span();
        let kind = match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Ini)) => TempKind::Ini,
            Some(TokenKind::Keyword(Keyword::Trans)) => TempKind::Trans,
            Some(TokenKind::Keyword(Keyword::Alw)) => TempKind::Alw,
            Some(TokenKind::Keyword(Keyword::AlwEv)) => TempKind::AlwEv,
            _ => return Err(self.error_here(&["ini", "trans", "alw", "alwEv"])),
        };
        self.bump();
        let expr = self.expr()?;
        Ok(TempConstraint {
            kind,
            span: start.to(expr.span),
            expr,
        })
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let start = self.current_span();
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Boolean)) => {
                self.bump();
                Ok(TypeExpr::new(TypeKind::Boolean, start))
            }
            Some(TokenKind::Keyword(Keyword::Int)) => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let lower = self.signed_int()?;
                self.expect(TokenKind::DotDot)?;
                let upper = self.signed_int()?;
                let end = self.expect(TokenKind::RParen)?;
                Ok(TypeExpr::new(TypeKind::IntRange(lower, upper), start.to(end)))
            }
            Some(TokenKind::LBrace) => {
                self.bump();
                let mut vals = vec![self.ident()?];
                while self.eat(&TokenKind::Comma) {
                    vals.push(self.ident()?);
                }
                let end = self.expect(TokenKind::RBrace)?;
                Ok(TypeExpr::new(TypeKind::Enum(vals), start.to(end)))
            }
            Some(TokenKind::Ident(_)) => {
                let name = self.ident()?;
                Ok(TypeExpr::new(TypeKind::Ref(name.clone()), name.span))
            }
            _ => Err(self.error_here(&["boolean", "Int", "{", "identifier"])),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = self.eat(&TokenKind::Minus);
        match self.peek_kind() {
            Some(TokenKind::Int(n)) => {
                let n = *n;
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.error_here(&["integer"])),
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<(BinOp, bool)> {
        let op = match self.peek_kind()? {
            TokenKind::Implies => BinOp::Implies,
            TokenKind::Iff => BinOp::Iff,
            TokenKind::Or => BinOp::Or,
            TokenKind::And => BinOp::And,
            TokenKind::Keyword(Keyword::Since) => BinOp::Since,
            TokenKind::Eq => BinOp::Eq,
            TokenKind::Neq => return Some((BinOp::Eq, true)),
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::Plus => BinOp::Add,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            TokenKind::Keyword(Keyword::Mod) => BinOp::Mod,
            _ => return None,
        };
        Some((op, false))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut left = self.unary()?;
        while let Some((op, negated)) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let right = self.binary(prec + 1)?;
            let span = left.span.to(right.span);
            left = Expr::new(ExprKind::Binary(op, Box::new(left), Box::new(right)), span);
            if negated {
                left = Expr::new(ExprKind::Unary(UnOp::Not, Box::new(left)), span);
            }
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.current_span();
        let op = match self.peek_kind() {
            Some(TokenKind::Not) => UnOp::Not,
            Some(TokenKind::Minus) => UnOp::Neg,
            Some(TokenKind::Keyword(Keyword::Next)) => UnOp::Next,
            Some(TokenKind::Keyword(Keyword::Prev)) => UnOp::Prev,
            Some(TokenKind::Keyword(Keyword::Historically)) => UnOp::Historically,
            Some(TokenKind::Keyword(Keyword::Once)) => UnOp::Once,
            _ => return self.primary(),
        };
        self.bump();
        let operand = self.unary()?;
        let span = start.to(operand.span);
        Ok(Expr::new(ExprKind::Unary(op, Box::new(operand)), span))
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.current_span();
        match self.peek_kind().cloned() {
            Some(TokenKind::Keyword(Keyword::True)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), start))
            }
            Some(TokenKind::Keyword(Keyword::False)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), start))
            }
            Some(TokenKind::Int(n)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(n), start))
            }
            Some(TokenKind::Ident(_)) => {
                let name = self.ident()?;
                if self.eat(&TokenKind::LParen) {
                    let mut args = vec![self.expr()?];
                    while self.eat(&TokenKind::Comma) {
                        args.push(self.expr()?);
                    }
                    let end = self.expect(TokenKind::RParen)?;
                    Ok(Expr::new(ExprKind::Instance(name, args), start.to(end)))
                } else {
                    Ok(Expr::new(ExprKind::Name(name.name), name.span))
                }
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let mut e = self.expr()?;
                let end = self.expect(TokenKind::RParen)?;
                e.span = start.to(end);
                Ok(e)
            }
            _ => Err(self.error_here(EXPR_START)),
        }
    }
}
