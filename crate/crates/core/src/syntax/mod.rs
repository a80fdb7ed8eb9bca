//! Concrete syntax: tokens, AST, parser and printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use parser::{parse, parse_expr, parse_file};
pub use printer::{print_expr, print_spec};
