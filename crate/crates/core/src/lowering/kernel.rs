//! The kernel specification: Boolean variables plus initial, safety and
//! justice constraints, and the encodings that map the original typed
//! variables onto kernel bits.

use std::collections::HashMap;
use std::fmt;

use crate::diag::Span;
use crate::semcheck::types::Ty;
use crate::syntax::{print_expr, BinOp, Expr, ExprKind, Origin, TempKind, UnOp, VarKind};

use super::kexpr::{KExpr, KNode};

/// A value of a typed (pre-lowering) variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Enum(String),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Enum(s) => f.write_str(s),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

/// How one declared variable is represented by kernel bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarEncoding {
    pub name: String,
    pub kind: VarKind,
    pub ty: Ty,
    /// Kernel variable indices, least significant bit first.
    pub bits: Vec<u32>,
}

impl VarEncoding {
    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// Variables introduced by lowering (pattern variables, past-time
    /// auxiliaries) carry reserved names.
    pub fn is_auxiliary(&self) -> bool {
        self.name.starts_with("__")
    }

    fn code_of(&self, value: &Value) -> Option<u64> {
        match (&self.ty, value) {
            (Ty::Bool, Value::Bool(b)) => Some(*b as u64),
            (Ty::Enum(vals), Value::Enum(s)) => vals.iter().position(|v| v == s).map(|i| i as u64),
            (Ty::Int { lo, hi }, Value::Int(n)) if lo <= n && n <= hi => Some((n - lo) as u64),
            _ => None,
        }
    }

    /// Bits for `value`, least significant first. `None` when the value is
    /// not in the variable's domain.
    pub fn encode(&self, value: &Value) -> Option<Vec<bool>> {
        let code = self.code_of(value)?;
        Some((0..self.width()).map(|k| (code >> k) & 1 == 1).collect())
    }

    /// Value of a bit pattern, or `None` for codes outside the domain.
    pub fn decode(&self, bits: &[bool]) -> Option<Value> {
        let code = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, b)| acc | ((*b as u64) << k));
        match &self.ty {
            Ty::Bool => Some(Value::Bool(code == 1)),
            Ty::Enum(vals) => vals.get(code as usize).map(|s| Value::Enum(s.clone())),
            Ty::Int { lo, hi } => {
                let v = lo.checked_add(code as i64)?;
                (v <= *hi).then_some(Value::Int(v))
            }
        }
    }

    /// All values of the domain in encoding order.
    pub fn values(&self) -> Vec<Value> {
        match &self.ty {
            Ty::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Ty::Enum(vals) => vals.iter().map(|v| Value::Enum(v.clone())).collect(),
            Ty::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
        }
    }

    /// Parses a textual value (`true`, an enum literal, an integer).
    pub fn parse_value(&self, text: &str) -> Option<Value> {
        let v = match &self.ty {
            Ty::Bool => Value::Bool(text.parse().ok()?),
            Ty::Enum(_) => Value::Enum(text.to_string()),
            Ty::Int { .. } => Value::Int(text.trim().parse().ok()?),
        };
        self.code_of(&v).map(|_| v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Assumption,
    Guarantee,
}

impl Role {
    pub fn keyword(self) -> &'static str {
        match self {
            Role::Assumption => "asm",
            Role::Guarantee => "gar",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVar {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Clone, Debug)]
pub struct KConstraint {
    pub role: Role,
    /// One of `Ini`, `Trans`, `AlwEv`.
    pub kind: TempKind,
    pub expr: KExpr,
    pub name: Option<String>,
    pub span: Span,
    pub origin: Origin,
}

impl KConstraint {
    /// The constraint's name, or a `line:col`-free description of its origin.
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("unnamed {} {}", self.role.keyword(), self.kind.keyword()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub name: String,
    /// Kernel (Boolean) variables; index `i` is BDD variable `i`.
    pub vars: Vec<KVar>,
    pub encodings: Vec<VarEncoding>,
    pub constraints: Vec<KConstraint>,
}

impl KernelSpec {
    pub fn env_indices(&self) -> Vec<u32> {
        self.indices(VarKind::Env)
    }

    pub fn sys_indices(&self) -> Vec<u32> {
        self.indices(VarKind::Sys)
    }

    fn indices(&self, kind: VarKind) -> Vec<u32> {
        (0..self.vars.len() as u32)
            .filter(|&i| self.vars[i as usize].kind == kind)
            .collect()
    }

    pub fn encoding(&self, name: &str) -> Option<&VarEncoding> {
        self.encodings.iter().find(|e| e.name == name)
    }

    pub fn constraints_of(&self, role: Role, kind: TempKind) -> impl Iterator<Item = &KConstraint> {
        self.constraints
            .iter()
            .filter(move |c| c.role == role && c.kind == kind)
    }

    /// Decodes a full kernel assignment into typed values, in declaration
    /// order. Invalid codes decode to `None`.
    pub fn decode_state(&self, bits: &[bool]) -> Vec<(String, Option<Value>)> {
        self.encodings
            .iter()
            .map(|e| {
                let b: Vec<bool> = e.bits.iter().map(|&i| bits[i as usize]).collect();
                (e.name.clone(), e.decode(&b))
            })
            .collect()
    }
}

/// Error for kernel specifications too large to print as a tree.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("kernel constraint `{0}` is too large to print ({1} nodes when written out)")]
pub struct KernelTooLarge(pub String, pub u64);

/// Largest expression (written out as a tree) that [`print_kernel`] emits.
pub const PRINT_LIMIT: u64 = 2_000_000;

pub fn kexpr_to_ast(e: &KExpr, vars: &[KVar]) -> Expr {
    fn rec(e: &KExpr, vars: &[KVar], memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(x) = memo.get(&e.id()) {
            return x.clone();
        }
        let x = match e.node() {
            KNode::Const(b) => Expr::boolean(*b),
            KNode::Var { idx, next } => {
                let n = Expr::name(vars[*idx as usize].name.clone());
                if *next {
                    Expr::unary(UnOp::Next, n)
                } else {
                    n
                }
            }
            KNode::Not(a) => Expr::unary(UnOp::Not, rec(a, vars, memo)),
            KNode::And(a, b) => Expr::binary(BinOp::And, rec(a, vars, memo), rec(b, vars, memo)),
            KNode::Or(a, b) => Expr::binary(BinOp::Or, rec(a, vars, memo), rec(b, vars, memo)),
            KNode::Iff(a, b) => Expr::binary(BinOp::Iff, rec(a, vars, memo), rec(b, vars, memo)),
        };
        memo.insert(e.id(), x.clone());
        x
    }
    rec(e, vars, &mut HashMap::new())
}

/// Prints the kernel as a Spectra file using only kernel constructs.
pub fn print_kernel(k: &KernelSpec) -> Result<String, KernelTooLarge> {
    let mut out = format!("spec {}\n\n", k.name);
    for v in &k.vars {
        let kw = match v.kind {
            VarKind::Env => "env",
            VarKind::Sys => "sys",
        };
        out.push_str(&format!("{kw} boolean {};\n", v.name));
    }
    out.push('\n');
    for c in &k.constraints {
        let size = c.expr.tree_size(PRINT_LIMIT + 1);
        if size > PRINT_LIMIT {
            return Err(KernelTooLarge(c.label(), size));
        }
        let body = print_expr(&kexpr_to_ast(&c.expr, &k.vars));
        let name = c.name.as_ref().map(|n| format!("{n}: ")).unwrap_or_default();
        out.push_str(&format!("{} {name}{} {body};\n", c.role.keyword(), c.kind.keyword()));
    }
    Ok(out)
}

impl ExprKind {
    /// True for the constructs allowed in kernel expressions.
    pub fn is_kernel(&self) -> bool {
        match self {
            ExprKind::Bool(_) | ExprKind::Name(_) => true,
            ExprKind::Unary(op, _) => matches!(op, UnOp::Not | UnOp::Next),
            ExprKind::Binary(op, _, _) => {
                matches!(op, BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Iff | BinOp::Eq)
            }
            ExprKind::Int(_) | ExprKind::Instance(..) => false,
        }
    }
}
