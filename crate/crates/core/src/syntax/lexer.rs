//! Tokenizer. Verbose keyword alternatives map to the same token as their
//! short forms; `//` and `/* */` comments are skipped.

use std::fmt;

use thiserror::Error;

use crate::diag::{FileId, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Spec,
    Import,
    Env,
    Sys,
    Boolean,
    Int,
    Asm,
    Gar,
    Ini,
    Trans,
    Alw,
    AlwEv,
    Define,
    Type,
    Predicate,
    Monitor,
    Pattern,
    Var,
    Next,
    True,
    False,
    Mod,
    Prev,
    Historically,
    Once,
    Since,
}

impl Keyword {
    pub fn from_word(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word {
            "spec" => Spec,
            "import" => Import,
            "env" | "input" => Env,
            "sys" | "output" => Sys,
            "boolean" => Boolean,
            "Int" => Int,
            "asm" | "assumption" => Asm,
            "gar" | "guarantee" => Gar,
            "ini" | "initially" => Ini,
            "trans" => Trans,
            "alw" | "always" => Alw,
            "alwEv" | "alwaysEventually" => AlwEv,
            "define" => Define,
            "type" => Type,
            "predicate" => Predicate,
            "monitor" => Monitor,
            "pattern" => Pattern,
            "var" => Var,
            "next" => Next,
            "true" => True,
            "false" => False,
            "mod" => Mod,
            "Y" | "PREV" => Prev,
            "H" | "HISTORICALLY" => Historically,
            "O" | "ONCE" => Once,
            "S" | "SINCE" => Since,
            _ => return None,
        })
    }

    /// Canonical (short) spelling.
    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Spec => "spec",
            Import => "import",
            Env => "env",
            Sys => "sys",
            Boolean => "boolean",
            Int => "Int",
            Asm => "asm",
            Gar => "gar",
            Ini => "ini",
            Trans => "trans",
            Alw => "alw",
            AlwEv => "alwEv",
            Define => "define",
            Type => "type",
            Predicate => "predicate",
            Monitor => "monitor",
            Pattern => "pattern",
            Var => "var",
            Next => "next",
            True => "true",
            False => "false",
            Mod => "mod",
            Prev => "Y",
            Historically => "H",
            Once => "O",
            Since => "S",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    Keyword(Keyword),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Assign,
    Eq,
    Neq,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Plus,
    Minus,
    Star,
    Slash,
    DotDot,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        match self {
            Ident(s) => write!(f, "identifier `{s}`"),
            Int(n) => write!(f, "integer `{n}`"),
            Str(s) => write!(f, "string \"{s}\""),
            Keyword(k) => write!(f, "`{}`", k.as_str()),
            other => write!(f, "`{}`", other.symbol()),
        }
    }
}

impl TokenKind {
    pub fn symbol(&self) -> &'static str {
        use TokenKind::*;
        match self {
            LParen => "(",
            RParen => ")",
            LBrace => "{",
            RBrace => "}",
            Comma => ",",
            Semi => ";",
            Colon => ":",
            Assign => ":=",
            Eq => "=",
            Neq => "!=",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            And => "&",
            Or => "|",
            Not => "!",
            Implies => "->",
            Iff => "<->",
            Plus => "+",
            Minus => "-",
            Star => "*",
            Slash => "/",
            DotDot => "..",
            Ident(_) => "identifier",
            Int(_) => "integer",
            Str(_) => "string",
            Keyword(k) => k.as_str(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct LexError {
    pub message: String,
    pub span: Span,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    tokenize_file(text, FileId(0))
}

pub fn tokenize_file(text: &str, file: FileId) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let err = |start: usize, end: usize, message: String| LexError {
        message,
        span: Span::new(file, start, end),
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if text[i..].starts_with("/*") {
            let Some(end) = text[i + 2..].find("*/") else {
                return Err(err(i, text.len(), "unterminated block comment".into()));
            };
            i += end + 4;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let kind = match Keyword::from_word(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            };
            tokens.push(Token {
                kind,
                span: Span::new(file, start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value: i64 = text[start..i]
                .parse()
                .map_err(|_| err(start, i, format!("integer literal `{}` is too large", &text[start..i])))?;
            tokens.push(Token {
                kind: TokenKind::Int(value),
                span: Span::new(file, start, i),
            });
            continue;
        }
        if c == b'"' {
            let Some(len) = text[i + 1..].find(['"', '\n']) else {
                return Err(err(i, text.len(), "unterminated string literal".into()));
            };
            if bytes[i + 1 + len] != b'"' {
                return Err(err(i, i + 1 + len, "unterminated string literal".into()));
            }
            let s = text[i + 1..i + 1 + len].to_string();
            i += len + 2;
            tokens.push(Token {
                kind: TokenKind::Str(s),
                span: Span::new(file, start, i),
            });
            continue;
        }
        const PUNCT: &[(&str, TokenKind)] = &[
            ("<->", TokenKind::Iff),
            ("<=>", TokenKind::Iff),
            ("->", TokenKind::Implies),
            (":=", TokenKind::Assign),
            ("!=", TokenKind::Neq),
            ("<=", TokenKind::Le),
            (">=", TokenKind::Ge),
            ("..", TokenKind::DotDot),
            ("(", TokenKind::LParen),
            (")", TokenKind::RParen),
            ("{", TokenKind::LBrace),
            ("}", TokenKind::RBrace),
            (",", TokenKind::Comma),
            (";", TokenKind::Semi),
            (":", TokenKind::Colon),
            ("=", TokenKind::Eq),
            ("<", TokenKind::Lt),
            (">", TokenKind::Gt),
            ("&", TokenKind::And),
            ("|", TokenKind::Or),
            ("!", TokenKind::Not),
            ("+", TokenKind::Plus),
            ("-", TokenKind::Minus),
            ("*", TokenKind::Star),
            ("/", TokenKind::Slash),
        ];
        match PUNCT.iter().find(|(s, _)| text[i..].starts_with(s)) {
            Some((s, kind)) => {
                i += s.len();
                tokens.push(Token {
                    kind: kind.clone(),
                    span: Span::new(file, start, i),
                });
            }
            None => {
                let ch = text[i..].chars().next().unwrap();
                return Err(err(
                    i,
                    i + ch.len_utf8(),
                    format!("unrecognized character `{ch}`"),
                ));
            }
        }
    }
    Ok(tokens)
}
