//! Explicit-state reference semantics used for differential testing.
//!
//! Nothing here uses decision diagrams: expressions are interpreted directly
//! over typed values, games are solved over enumerated state sets, and
//! controllers are checked on their explicit product graph.

mod fair;
mod game;

use std::collections::BTreeMap;

use crate::lowering::Value;
use crate::syntax::{BinOp, Expr, ExprKind, UnOp};

pub use fair::{fair_cycle_without, strongly_connected_components};
pub use game::{solve_explicit, ExplicitGame, ExplicitSolution, OracleVar, MAX_STATES};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("`{0}` has no value in this state")]
    Unbound(String),
    #[error("type mismatch in `{0}`")]
    Type(String),
    #[error("`next` at the last position of a finite trace")]
    PastEnd,
    #[error("unsupported construct `{0}`")]
    Unsupported(String),
    #[error("the game has {0} states, more than the oracle's limit of {MAX_STATES}")]
    TooLarge(u128),
    #[error("division by zero")]
    DivisionByZero,
}

/// Values of variables along positions `0..len`.
pub trait Valuation {
    fn len(&self) -> usize;
    fn value(&self, position: usize, name: &str) -> Option<Value>;
    /// Position after `position`, following the lasso at the end.
    fn successor(&self, position: usize) -> Option<usize>;
}

/// A finite computation, optionally closed into a lasso.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<BTreeMap<String, Value>>,
    /// Position the last state loops back to.
    pub lasso: Option<usize>,
}

impl Trace {
    pub fn new(states: Vec<BTreeMap<String, Value>>) -> Self {
        Trace { states, lasso: None }
    }
}

impl Valuation for Trace {
    fn len(&self) -> usize {
        self.states.len()
    }

    fn value(&self, position: usize, name: &str) -> Option<Value> {
        self.states.get(position)?.get(name).cloned()
    }

    fn successor(&self, position: usize) -> Option<usize> {
        if position + 1 < self.states.len() {
            Some(position + 1)
        } else {
            self.lasso
        }
    }
}

fn as_bool(v: Value, e: &Expr) -> Result<bool, OracleError> {
    match v {
        Value::Bool(b) => Ok(b),
        _ => Err(OracleError::Type(crate::syntax::print_expr(e))),
    }
}

fn as_int(v: Value, e: &Expr) -> Result<i64, OracleError> {
    match v {
        Value::Int(n) => Ok(n),
        _ => Err(OracleError::Type(crate::syntax::print_expr(e))),
    }
}

/// Evaluates `e` at position `i`. Names without a value are taken to be enum
/// literals.
pub fn eval_at(e: &Expr, t: &dyn Valuation, i: usize) -> Result<Value, OracleError> {
    let b = |x: &Expr, at: usize| -> Result<bool, OracleError> { as_bool(eval_at(x, t, at)?, x) };
    let n = |x: &Expr| -> Result<i64, OracleError> { as_int(eval_at(x, t, i)?, x) };
    Ok(match &e.kind {
        ExprKind::Bool(v) => Value::Bool(*v),
        ExprKind::Int(v) => Value::Int(*v),
        ExprKind::Name(name) => t.value(i, name).unwrap_or_else(|| Value::Enum(name.clone())),
        ExprKind::Instance(name, _) => return Err(OracleError::Unsupported(name.name.clone())),
        ExprKind::Unary(op, x) => match op {
            UnOp::Not => Value::Bool(!b(x, i)?),
            UnOp::Neg => Value::Int(-n(x)?),
            UnOp::Next => {
                let j = t.successor(i).ok_or(OracleError::PastEnd)?;
                eval_at(x, t, j)?
            }
            UnOp::Prev => Value::Bool(i > 0 && b(x, i - 1)?),
            UnOp::Historically => {
                let mut all = true;
                for j in 0..=i {
                    all &= b(x, j)?;
                }
                Value::Bool(all)
            }
            UnOp::Once => {
                let mut any = false;
                for j in 0..=i {
                    any |= b(x, j)?;
                }
                Value::Bool(any)
            }
        },
        ExprKind::Binary(op, l, r) => match op {
            BinOp::And => Value::Bool(b(l, i)? & b(r, i)?),
            BinOp::Or => Value::Bool(b(l, i)? | b(r, i)?),
            BinOp::Implies => Value::Bool(!b(l, i)? | b(r, i)?),
            BinOp::Iff => Value::Bool(b(l, i)? == b(r, i)?),
            BinOp::Eq => Value::Bool(eval_at(l, t, i)? == eval_at(r, t, i)?),
            BinOp::Lt => Value::Bool(n(l)? < n(r)?),
            BinOp::Gt => Value::Bool(n(l)? > n(r)?),
            BinOp::Le => Value::Bool(n(l)? <= n(r)?),
            BinOp::Ge => Value::Bool(n(l)? >= n(r)?),
            BinOp::Add => Value::Int(n(l)? + n(r)?),
            BinOp::Sub => Value::Int(n(l)? - n(r)?),
            BinOp::Mul => Value::Int(n(l)? * n(r)?),
            BinOp::Div | BinOp::Mod => {
                let (a, c) = (n(l)?, n(r)?);
                if c == 0 {
                    return Err(OracleError::DivisionByZero);
                }
                Value::Int(if *op == BinOp::Div { a.div_euclid(c) } else { a.rem_euclid(c) })
            }
            BinOp::Since => {
                // Some k <= i has r, and l holds at every position after k.
                let mut holds = false;
                for k in 0..=i {
                    if b(r, k)? {
                        holds = true;
                    } else if holds && !b(l, k)? {
                        holds = false;
                    }
                }
                Value::Bool(holds)
            }
        },
    })
}

/// Truth value of a (past-time) formula at position `i` of `trace`.
pub fn eval_pastltl(formula: &Expr, trace: &Trace, i: usize) -> Result<bool, OracleError> {
    as_bool(eval_at(formula, trace, i)?, formula)
}
