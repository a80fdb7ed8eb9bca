//! Bit-blasting: replaces enum and integer variables by Boolean bits and
//! compiles every constraint into a kernel expression.
//!
//! Integer subexpressions are computed as two's-complement bit vectors sized
//! to hold their value range. Division and modulo (by constants) are
//! compiled as a case split over the possible quotients.

use std::collections::HashMap;

use crate::semcheck::types::{range_add, range_div, range_mod, range_mul, range_neg, range_sub, Ty};
use crate::semcheck::CheckedSpec;
use crate::syntax::*;

use super::kernel::{KConstraint, KVar, KernelSpec, Role, VarEncoding};
use super::kexpr::KExpr;

/// Smallest two's-complement width holding every value in `lo..=hi`.
pub fn signed_width(lo: i64, hi: i64) -> usize {
    (1..64)
        .find(|&w| {
            let half = 1i64 << (w - 1);
            -half <= lo && hi < half
        })
        .unwrap_or(64)
}

/// An integer vector: two's-complement bits (LSB first) and the value range.
#[derive(Clone, Debug)]
struct IntVec {
    bits: Vec<KExpr>,
    lo: i64,
    hi: i64,
}

impl IntVec {
    fn constant(n: i64) -> Self {
        let w = signed_width(n, n);
        IntVec {
            bits: (0..w).map(|k| KExpr::constant((n >> k) & 1 == 1)).collect(),
            lo: n,
            hi: n,
        }
    }

    fn sext(&self, w: usize) -> Vec<KExpr> {
        let msb = self.bits.last().cloned().unwrap_or_else(KExpr::ff);
        (0..w)
            .map(|k| self.bits.get(k).cloned().unwrap_or_else(|| msb.clone()))
            .collect()
    }
}

#[derive(Clone, Debug)]
enum Val {
    Bool(KExpr),
    /// Enum code bits, LSB first.
    Enum(Vec<KExpr>),
    Int(IntVec),
}

fn full_add(a: &KExpr, b: &KExpr, c: &KExpr) -> (KExpr, KExpr) {
    let s = a.xor(b).xor(c);
    let carry = a.and(b).or(&c.and(&a.xor(b)));
    (s, carry)
}

fn add_bits(a: &[KExpr], b: &[KExpr], carry_in: bool) -> Vec<KExpr> {
    let mut carry = KExpr::constant(carry_in);
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let (s, c) = full_add(x, y, &carry);
        out.push(s);
        carry = c;
    }
    out
}

fn sub_bits(a: &[KExpr], b: &[KExpr]) -> Vec<KExpr> {
    let nb: Vec<KExpr> = b.iter().map(KExpr::not).collect();
    add_bits(a, &nb, true)
}

fn mul_bits(a: &[KExpr], b: &[KExpr]) -> Vec<KExpr> {
    let w = a.len();
    let mut acc = vec![KExpr::ff(); w];
    for (i, bi) in b.iter().enumerate() {
        if bi.as_const() == Some(false) {
            continue;
        }
        let pp: Vec<KExpr> = (0..w)
            .map(|k| if k < i { KExpr::ff() } else { a[k - i].and(bi) })
            .collect();
        acc = add_bits(&acc, &pp, false);
    }
    acc
}

#[derive(Clone, Copy)]
enum Ring {
    Add,
    Sub,
    Mul,
}

/// Computes `a op b` exactly, given a range known to contain the result.
fn ring(op: Ring, a: &IntVec, b: &IntVec, (lo, hi): (i64, i64)) -> IntVec {
    let wr = signed_width(lo, hi);
    let k = wr.max(a.bits.len()).max(b.bits.len());
    let (x, y) = (a.sext(k), b.sext(k));
    let mut bits = match op {
        Ring::Add => add_bits(&x, &y, false),
        Ring::Sub => sub_bits(&x, &y),
        Ring::Mul => mul_bits(&x, &y),
    };
    bits.truncate(wr);
    IntVec { bits, lo, hi }
}

fn sub(a: &IntVec, b: &IntVec) -> IntVec {
    let r = range_sub((a.lo, a.hi), (b.lo, b.hi)).expect("range checked");
    ring(Ring::Sub, a, b, r)
}

/// `a < b`, as the sign of `a - b`.
fn less(a: &IntVec, b: &IntVec) -> KExpr {
    if a.hi < b.lo {
        return KExpr::tt();
    }
    if a.lo >= b.hi {
        return KExpr::ff();
    }
    sub(a, b).bits.last().cloned().unwrap_or_else(KExpr::ff)
}

fn int_eq(a: &IntVec, b: &IntVec) -> KExpr {
    if a.hi < b.lo || b.hi < a.lo {
        return KExpr::ff();
    }
    let w = a.bits.len().max(b.bits.len());
    let (x, y) = (a.sext(w), b.sext(w));
    let eqs: Vec<KExpr> = x.iter().zip(&y).map(|(p, q)| p.iff(q)).collect();
    KExpr::and_all(&eqs)
}

fn bits_eq(a: &[KExpr], b: &[KExpr]) -> KExpr {
    let eqs: Vec<KExpr> = a.iter().zip(b).map(|(p, q)| p.iff(q)).collect();
    KExpr::and_all(&eqs)
}

/// Euclidean quotient `a / c` for a constant `c`.
fn div_const(a: &IntVec, c: i64) -> IntVec {
    let (qlo, qhi) = range_div((a.lo, a.hi), c).expect("range checked");
    let w = signed_width(qlo, qhi);
    let mut bits = vec![KExpr::ff(); w];
    for q in qlo..=qhi {
        let l = c * q;
        let u = l + c.abs() - 1;
        let cond = less(a, &IntVec::constant(l)).not().and(&less(&IntVec::constant(u), a).not());
        if cond.as_const() == Some(false) {
            continue;
        }
        for (k, bit) in bits.iter_mut().enumerate() {
            if (q >> k) & 1 == 1 {
                *bit = bit.or(&cond);
            }
        }
    }
    IntVec { bits, lo: qlo, hi: qhi }
}

fn mod_const(a: &IntVec, c: i64) -> IntVec {
    let q = div_const(a, c);
    let cq_range = range_mul((q.lo, q.hi), (c, c)).expect("range checked");
    let cq = ring(Ring::Mul, &q, &IntVec::constant(c), cq_range);
    ring(Ring::Sub, a, &cq, range_mod((a.lo, a.hi), c).expect("range checked"))
}

/// Value of a constant integer expression (divisors).
pub fn const_eval(e: &Expr) -> Option<i64> {
    match &e.kind {
        ExprKind::Int(n) => Some(*n),
        ExprKind::Unary(UnOp::Neg, x) => const_eval(x)?.checked_neg(),
        ExprKind::Binary(op, l, r) => {
            let (a, b) = (const_eval(l)?, const_eval(r)?);
            match op {
                BinOp::Add => a.checked_add(b),
                BinOp::Sub => a.checked_sub(b),
                BinOp::Mul => a.checked_mul(b),
                BinOp::Div if b != 0 => Some(a.div_euclid(b)),
                BinOp::Mod if b != 0 => Some(a.rem_euclid(b)),
                _ => None,
            }
        }
        _ => None,
    }
}

struct Blaster<'a> {
    spec: &'a CheckedSpec,
    by_name: HashMap<&'a str, usize>,
    encodings: &'a [VarEncoding],
    cur: Vec<KExpr>,
    nxt: Vec<KExpr>,
}

impl Blaster<'_> {
    fn bits_of(&self, enc: &VarEncoding, next: bool) -> Vec<KExpr> {
        let leaves = if next { &self.nxt } else { &self.cur };
        enc.bits.iter().map(|&i| leaves[i as usize].clone()).collect()
    }

    fn boolean(&self, e: &Expr, next: bool) -> KExpr {
        match self.tr(e, next) {
            Val::Bool(b) => b,
            other => unreachable!("expected a Boolean, found {other:?}"),
        }
    }

    fn int(&self, e: &Expr, next: bool) -> IntVec {
        match self.tr(e, next) {
            Val::Int(v) => v,
            other => unreachable!("expected an integer, found {other:?}"),
        }
    }

    fn tr(&self, e: &Expr, next: bool) -> Val {
        match &e.kind {
            ExprKind::Bool(b) => Val::Bool(KExpr::constant(*b)),
            ExprKind::Int(n) => Val::Int(IntVec::constant(*n)),
            ExprKind::Name(n) => self.name(n, next),
            ExprKind::Instance(..) => unreachable!("instances are expanded before encoding"),
            ExprKind::Unary(op, x) => match op {
                UnOp::Not => Val::Bool(self.boolean(x, next).not()),
                UnOp::Next => self.tr(x, true),
                UnOp::Neg => {
                    let v = self.int(x, next);
                    let r = range_neg((v.lo, v.hi)).expect("range checked");
                    Val::Int(ring(Ring::Sub, &IntVec::constant(0), &v, r))
                }
                UnOp::Prev | UnOp::Historically | UnOp::Once => {
                    unreachable!("past-time operators are expanded before encoding")
                }
            },
            ExprKind::Binary(op, l, r) => self.binary(*op, l, r, next),
        }
    }

    fn name(&self, n: &str, next: bool) -> Val {
        if let Some(&i) = self.by_name.get(n) {
            let enc = &self.encodings[i];
            let bits = self.bits_of(enc, next);
            return match &enc.ty {
                Ty::Bool => Val::Bool(bits[0].clone()),
                Ty::Enum(_) => Val::Enum(bits),
                Ty::Int { lo, .. } => {
                    let w = bits.len();
                    let top = (1i64 << w) - 1;
                    let mut unsigned = bits;
                    unsigned.push(KExpr::ff());
                    let raw = IntVec { bits: unsigned, lo: 0, hi: top };
                    if *lo == 0 {
                        Val::Int(raw)
                    } else {
                        let c = IntVec::constant(*lo);
                        Val::Int(ring(Ring::Add, &raw, &c, (*lo, lo + top)))
                    }
                }
            };
        }
        // An enum value: find its type among the declared enum types.
        let ty = self
            .spec
            .symbols
            .globals
            .get(n)
            .and_then(|s| s.ty.clone())
            .unwrap_or_else(|| unreachable!("unresolved name `{n}` after checking"));
        match ty {
            Ty::Enum(vals) => {
                let code = vals.iter().position(|v| v == n).expect("enum value in its type") as u64;
                let w = ty_width(&Ty::Enum(vals.clone()));
                Val::Enum((0..w).map(|k| KExpr::constant((code >> k) & 1 == 1)).collect())
            }
            other => unreachable!("name `{n}` of type {other} is not a variable"),
        }
    }

    fn binary(&self, op: BinOp, l: &Expr, r: &Expr, next: bool) -> Val {
        use BinOp::*;
        match op {
            And => Val::Bool(self.boolean(l, next).and(&self.boolean(r, next))),
            Or => Val::Bool(self.boolean(l, next).or(&self.boolean(r, next))),
            Implies => Val::Bool(self.boolean(l, next).implies(&self.boolean(r, next))),
            Iff => Val::Bool(self.boolean(l, next).iff(&self.boolean(r, next))),
            Since => unreachable!("past-time operators are expanded before encoding"),
            Eq => Val::Bool(match (self.tr(l, next), self.tr(r, next)) {
                    (Val::Bool(a), Val::Bool(b)) => a.iff(&b),
                    (Val::Enum(a), Val::Enum(b)) => bits_eq(&a, &b),
                    (Val::Int(a), Val::Int(b)) => int_eq(&a, &b),
                    (a, b) => unreachable!("incomparable operands {a:?} and {b:?}"),
                }),
            Lt | Le | Gt | Ge => {
                let (a, b) = (self.int(l, next), self.int(r, next));
                Val::Bool(match op {
                    Lt => less(&a, &b),
                    Gt => less(&b, &a),
                    Le => less(&b, &a).not(),
                    _ => less(&a, &b).not(),
                })
            }
            Add | Sub | Mul => {
                let (a, b) = (self.int(l, next), self.int(r, next));
                let (ra, rb) = ((a.lo, a.hi), (b.lo, b.hi));
                let (kind, range) = match op {
                    Add => (Ring::Add, range_add(ra, rb)),
                    Sub => (Ring::Sub, range_sub(ra, rb)),
                    _ => (Ring::Mul, range_mul(ra, rb)),
                };
                Val::Int(ring(kind, &a, &b, range.expect("range checked")))
            }
            Div | Mod => {
                let a = self.int(l, next);
                let c = const_eval(r).expect("constant divisor checked");
                Val::Int(if op == Div { div_const(&a, c) } else { mod_const(&a, c) })
            }
        }
    }
}

fn ty_width(ty: &Ty) -> usize {
    ty.bit_width() as usize
}

/// Encodes a specification that contains only variables and
/// `ini`/`trans`/`alwEv` assumptions and guarantees.
pub fn expand_enums_and_ints(spec: &CheckedSpec) -> KernelSpec {
    let mut vars = Vec::new();
    let mut encodings = Vec::new();
    let mut spans = Vec::new();
    for e in &spec.ast.elements {
        let Element::Var(v) = e else { continue };
        let name = &v.name.name;
        let ty = spec.symbols.var_type(name).cloned().expect("declared variable has a type");
        let bits: Vec<u32> = match &ty {
            Ty::Bool => {
                vars.push(KVar { name: name.clone(), kind: v.kind });
                vec![vars.len() as u32 - 1]
            }
            _ => (0..ty_width(&ty))
                .map(|k| {
                    vars.push(KVar { name: format!("{name}__{k}"), kind: v.kind });
                    vars.len() as u32 - 1
                })
                .collect(),
        };
        encodings.push(VarEncoding { name: name.clone(), kind: v.kind, ty, bits });
        spans.push(v.span);
    }
    let cur: Vec<KExpr> = (0..vars.len() as u32).map(|i| KExpr::var(i, false)).collect();
    let nxt: Vec<KExpr> = (0..vars.len() as u32).map(|i| KExpr::var(i, true)).collect();
    let b = Blaster {
        spec,
        by_name: encodings.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect(),
        encodings: &encodings,
        cur,
        nxt,
    };

    let mut constraints = Vec::new();
    for e in &spec.ast.elements {
        let (c, role) = match e {
            Element::Assumption(c) => (c, Role::Assumption),
            Element::Guarantee(c) => (c, Role::Guarantee),
            _ => continue,
        };
        debug_assert!(c.body.kind != TempKind::Alw, "alw is split before encoding");
        constraints.push(KConstraint {
            role,
            kind: c.body.kind,
            expr: b.boolean(&c.body.expr, false),
            name: c.name.as_ref().map(|n| n.name.clone()),
            span: c.span,
            origin: c.origin,
        });
    }

    // Domain constraints for encodings with unused codes.
    for (enc, span) in encodings.iter().zip(&spans) {
        let card = enc.ty.cardinality();
        if card >= 1u64 << enc.width() {
            continue;
        }
        let valid = |next: bool| {
            let bits = b.bits_of(enc, next);
            // code < card, comparing the unsigned code with a constant
            let code = {
                let mut v = bits;
                v.push(KExpr::ff());
                IntVec { bits: v, lo: 0, hi: (1i64 << enc.width()) - 1 }
            };
            less(&code, &IntVec::constant(card as i64))
        };
        let role = match enc.kind {
            VarKind::Env => Role::Assumption,
            VarKind::Sys => Role::Guarantee,
        };
        for (kind, expr, suffix) in [(TempKind::Ini, valid(false), "ini"), (TempKind::Trans, valid(true), "trans")] {
            constraints.push(KConstraint {
                role,
                kind,
                expr,
                name: Some(format!("__valid_{}_{suffix}", enc.name)),
                span: *span,
                origin: Origin::Validity,
            });
        }
    }

    KernelSpec {
        name: spec.name().to_string(),
        vars,
        encodings,
        constraints,
    }
}
