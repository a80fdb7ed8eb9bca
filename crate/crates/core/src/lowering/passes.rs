//! The AST-to-AST lowering passes. Each removes one language feature and
//! leaves a specification that still type-checks (with generated names
//! allowed).

use std::collections::{HashMap, HashSet};

use crate::diag::Span;
use crate::syntax::*;

/// Replaces every `Name(n)` with `map[n]` where present.
pub fn substitute(e: &Expr, map: &HashMap<String, Expr>) -> Expr {
    match &e.kind {
        ExprKind::Name(n) => map.get(n).cloned().unwrap_or_else(|| e.clone()),
        ExprKind::Instance(name, args) => Expr::new(
            ExprKind::Instance(name.clone(), args.iter().map(|a| substitute(a, map)).collect()),
            e.span,
        ),
        ExprKind::Unary(op, x) => Expr::new(ExprKind::Unary(*op, Box::new(substitute(x, map))), e.span),
        ExprKind::Binary(op, l, r) => Expr::new(
            ExprKind::Binary(*op, Box::new(substitute(l, map)), Box::new(substitute(r, map))),
            e.span,
        ),
        ExprKind::Bool(_) | ExprKind::Int(_) => e.clone(),
    }
}

fn map_constraint_exprs(ast: &mut SpecAst, f: &mut impl FnMut(&Expr, &HashSet<String>) -> Expr) {
    let none = HashSet::new();
    for e in &mut ast.elements {
        match e {
            Element::Assumption(c) | Element::Guarantee(c) => c.body.expr = f(&c.body.expr, &none),
            Element::Define(d) => d.expr = f(&d.expr, &none),
            Element::Monitor(m) => {
                for c in &mut m.constraints {
                    c.expr = f(&c.expr, &none);
                }
            }
            Element::Predicate(p) => {
                let locals = p.params.iter().map(|(_, n)| n.name.clone()).collect();
                p.body = f(&p.body, &locals);
            }
            Element::Pattern(p) => {
                let locals = p
                    .params
                    .iter()
                    .cloned()
                    .chain(p.vars.iter().map(|(_, n)| n.clone()))
                    .map(|i| i.name)
                    .collect();
                for c in &mut p.constraints {
                    c.expr = f(&c.expr, &locals);
                }
            }
            Element::Var(_) | Element::TypeDef(_) => {}
        }
    }
}

/// Inlines defines (transitively) and replaces type aliases by the aliased
/// type. Define and type declarations are removed.
pub fn expand_defines_and_typedefs(mut ast: SpecAst) -> SpecAst {
    let mut defines: HashMap<String, Expr> = HashMap::new();
    let mut typedefs: HashMap<String, TypeExpr> = HashMap::new();
    for e in &ast.elements {
        match e {
            Element::Define(d) => {
                defines.insert(d.name.name.clone(), d.expr.clone());
            }
            Element::TypeDef(t) => {
                typedefs.insert(t.name.name.clone(), t.ty.clone());
            }
            _ => {}
        }
    }

    fn resolve(t: &TypeExpr, typedefs: &HashMap<String, TypeExpr>) -> TypeExpr {
        match &t.kind {
            TypeKind::Ref(n) => match typedefs.get(&n.name) {
                Some(inner) => resolve(inner, typedefs),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn inline(
        e: &Expr,
        locals: &HashSet<String>,
        defines: &HashMap<String, Expr>,
        memo: &mut HashMap<String, Expr>,
    ) -> Expr {
        match &e.kind {
            ExprKind::Name(n) if !locals.contains(n) && defines.contains_key(n) => {
                if let Some(x) = memo.get(n) {
                    return x.clone();
                }
                let x = inline(&defines[n], &HashSet::new(), defines, memo);
                memo.insert(n.clone(), x.clone());
                x
            }
            ExprKind::Instance(name, args) => Expr::new(
                ExprKind::Instance(
                    name.clone(),
                    args.iter().map(|a| inline(a, locals, defines, memo)).collect(),
                ),
                e.span,
            ),
            ExprKind::Unary(op, x) => Expr::new(
                ExprKind::Unary(*op, Box::new(inline(x, locals, defines, memo))),
                e.span,
            ),
            ExprKind::Binary(op, l, r) => Expr::new(
                ExprKind::Binary(
                    *op,
                    Box::new(inline(l, locals, defines, memo)),
                    Box::new(inline(r, locals, defines, memo)),
                ),
                e.span,
            ),
            _ => e.clone(),
        }
    }

    let mut memo = HashMap::new();
    map_constraint_exprs(&mut ast, &mut |e, locals| inline(e, locals, &defines, &mut memo));
    ast.elements.retain(|e| !matches!(e, Element::Define(_) | Element::TypeDef(_)));
    for e in &mut ast.elements {
        match e {
            Element::Var(v) => v.ty = resolve(&v.ty, &typedefs),
            Element::Monitor(m) => m.ty = resolve(&m.ty, &typedefs),
            Element::Predicate(p) => {
                for (t, _) in &mut p.params {
                    *t = resolve(t, &typedefs);
                }
            }
            Element::Pattern(p) => {
                for (t, _) in &mut p.vars {
                    *t = resolve(t, &typedefs);
                }
            }
            _ => {}
        }
    }
    ast
}

/// Replaces predicate instances by their bodies with parameters substituted
/// by the arguments. Predicate declarations are removed.
pub fn expand_predicates(mut ast: SpecAst) -> SpecAst {
    let predicates: HashMap<String, Predicate> = ast
        .elements
        .iter()
        .filter_map(|e| match e {
            Element::Predicate(p) => Some((p.name.name.clone(), p.clone())),
            _ => None,
        })
        .collect();

    fn expand(e: &Expr, predicates: &HashMap<String, Predicate>) -> Expr {
        match &e.kind {
            ExprKind::Instance(name, args) => {
                let args: Vec<Expr> = args.iter().map(|a| expand(a, predicates)).collect();
                match predicates.get(&name.name) {
                    Some(p) => {
                        let map = p
                            .params
                            .iter()
                            .map(|(_, n)| n.name.clone())
                            .zip(args)
                            .collect();
                        // Arguments are already expanded; the body may still
                        // contain instances of other predicates.
                        expand(&substitute(&p.body, &map), predicates)
                    }
                    None => Expr::new(ExprKind::Instance(name.clone(), args), e.span),
                }
            }
            ExprKind::Unary(op, x) => Expr::new(ExprKind::Unary(*op, Box::new(expand(x, predicates))), e.span),
            ExprKind::Binary(op, l, r) => Expr::new(
                ExprKind::Binary(*op, Box::new(expand(l, predicates)), Box::new(expand(r, predicates))),
                e.span,
            ),
            _ => e.clone(),
        }
    }

    ast.elements.retain(|e| !matches!(e, Element::Predicate(_)));
    map_constraint_exprs(&mut ast, &mut |e, _| expand(e, &predicates));
    ast
}

/// Generator of fresh `__aux` names that collide with no name in use.
#[derive(Debug, Default)]
pub struct Fresh {
    used: HashSet<String>,
    counter: usize,
}

impl Fresh {
    pub fn for_spec(ast: &SpecAst) -> Self {
        let mut used = HashSet::new();
        for e in &ast.elements {
            if let Some(n) = e.name() {
                used.insert(n.name.clone());
            }
            if let Element::Pattern(p) = e {
                used.extend(p.vars.iter().map(|(_, n)| n.name.clone()));
            }
        }
        Fresh { used, counter: 0 }
    }

    pub fn make(&mut self, hint: &str) -> String {
        loop {
            let name = if hint.is_empty() {
                format!("__aux_{}", self.counter)
            } else {
                format!("__aux_{}_{hint}", self.counter)
            };
            self.counter += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn generated(origin: Origin, name: Option<Ident>, kind: TempKind, expr: Expr, span: Span) -> Constraint {
    Constraint {
        name,
        body: TempConstraint { kind, expr, span },
        span,
        origin,
    }
}

/// Instantiates every pattern instance: pattern variables become fresh system
/// variables, initial and safety constraints become guarantees, and the
/// justice constraint keeps the polarity of the instance.
pub fn expand_patterns(mut ast: SpecAst) -> SpecAst {
    let patterns: HashMap<String, Pattern> = ast
        .elements
        .iter()
        .filter_map(|e| match e {
            Element::Pattern(p) => Some((p.name.name.clone(), p.clone())),
            _ => None,
        })
        .collect();
    if patterns.is_empty() {
        return ast;
    }
    let mut fresh = Fresh::for_spec(&ast);
    let mut out = Vec::with_capacity(ast.elements.len());
    for e in std::mem::take(&mut ast.elements) {
        let (c, is_asm) = match &e {
            Element::Pattern(_) => continue,
            Element::Assumption(c) => (c, true),
            Element::Guarantee(c) => (c, false),
            _ => {
                out.push(e);
                continue;
            }
        };
        let ExprKind::Instance(name, args) = &c.body.expr.kind else {
            out.push(e);
            continue;
        };
        let Some(p) = patterns.get(&name.name) else {
            out.push(e);
            continue;
        };
        let span = c.span;
        let mut map: HashMap<String, Expr> = p
            .params
            .iter()
            .map(|i| i.name.clone())
            .zip(args.iter().cloned())
            .collect();
        for (ty, v) in &p.vars {
            let fresh_name = fresh.make(&format!("{}_{}", p.name.name, v.name));
            map.insert(v.name.clone(), Expr::new(ExprKind::Name(fresh_name.clone()), v.span));
            out.push(Element::Var(VarDecl {
                kind: VarKind::Sys,
                ty: ty.clone(),
                name: Ident::new(fresh_name, span),
                span,
            }));
        }
        for pc in &p.constraints {
            let expr = substitute(&pc.expr, &map);
            if pc.kind == TempKind::AlwEv {
                let g = generated(Origin::Pattern, c.name.clone(), TempKind::AlwEv, expr, span);
                out.push(if is_asm {
                    Element::Assumption(g)
                } else {
                    Element::Guarantee(g)
                });
            } else {
                out.push(Element::Guarantee(generated(Origin::Pattern, None, pc.kind, expr, span)));
            }
        }
    }
    ast.elements = out;
    ast
}

/// Monitors become system variables of the same name and type; their
/// constraints become guarantees.
pub fn expand_monitors(mut ast: SpecAst) -> SpecAst {
    let mut out = Vec::with_capacity(ast.elements.len());
    for e in std::mem::take(&mut ast.elements) {
        match e {
            Element::Monitor(m) => {
                out.push(Element::Var(VarDecl {
                    kind: VarKind::Sys,
                    ty: m.ty,
                    name: m.name,
                    span: m.span,
                }));
                for c in m.constraints {
                    let span = c.span;
                    out.push(Element::Guarantee(generated(Origin::Monitor, None, c.kind, c.expr, span)));
                }
            }
            other => out.push(other),
        }
    }
    ast.elements = out;
    ast
}

/// Splits every `alw e` into `ini e` and `trans next(e)`.
pub fn expand_state_invariants(mut ast: SpecAst) -> SpecAst {
    let mut out = Vec::with_capacity(ast.elements.len());
    for e in std::mem::take(&mut ast.elements) {
        let (c, is_asm) = match e {
            Element::Assumption(c) if c.body.kind == TempKind::Alw => (c, true),
            Element::Guarantee(c) if c.body.kind == TempKind::Alw => (c, false),
            other => {
                out.push(other);
                continue;
            }
        };
        let suffixed = |s: &str| {
            c.name
                .as_ref()
                .map(|n| Ident::new(format!("{}_{s}", n.name), n.span))
        };
        let ini = generated(c.origin, suffixed("ini"), TempKind::Ini, c.body.expr.clone(), c.span);
        let next = Expr::new(ExprKind::Unary(UnOp::Next, Box::new(c.body.expr.clone())), c.body.expr.span);
        let trans = generated(c.origin, suffixed("trans"), TempKind::Trans, next, c.span);
        if is_asm {
            out.push(Element::Assumption(ini));
            out.push(Element::Assumption(trans));
        } else {
            out.push(Element::Guarantee(ini));
            out.push(Element::Guarantee(trans));
        }
    }
    ast.elements = out;
    ast
}

fn is_past(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Unary(UnOp::Prev | UnOp::Historically | UnOp::Once, _) | ExprKind::Binary(BinOp::Since, _, _)
    )
}

/// Rewrites `O φ` to `true S φ` and `H φ` to `!(true S !φ)`.
pub fn desugar_once_historically(e: Expr) -> Expr {
    e.map_bottom_up(&mut |x| {
        let span = x.span;
        match x.kind {
            ExprKind::Unary(UnOp::Once, phi) => Expr::new(
                ExprKind::Binary(BinOp::Since, Box::new(Expr::new(ExprKind::Bool(true), span)), phi),
                span,
            ),
            ExprKind::Unary(UnOp::Historically, phi) => {
                let not_phi = Expr::new(ExprKind::Unary(UnOp::Not, phi), span);
                let since = Expr::new(
                    ExprKind::Binary(
                        BinOp::Since,
                        Box::new(Expr::new(ExprKind::Bool(true), span)),
                        Box::new(not_phi),
                    ),
                    span,
                );
                Expr::new(ExprKind::Unary(UnOp::Not, Box::new(since)), span)
            }
            kind => Expr::new(kind, span),
        }
    })
}

/// Replaces past-time subformulas by auxiliary system variables whose
/// initial and safety guarantees track the formula's value. Structurally
/// identical subformulas share one auxiliary variable.
pub fn expand_pastltl(mut ast: SpecAst) -> SpecAst {
    let has_past = ast.elements.iter().any(|e| match e {
        Element::Assumption(c) | Element::Guarantee(c) => c.body.expr.contains(&mut |x| is_past(x)),
        _ => false,
    });
    if !has_past {
        return ast;
    }
    let mut fresh = Fresh::for_spec(&ast);
    let mut auxes: HashMap<String, String> = HashMap::new();
    let mut extra = Vec::new();
    for e in &mut ast.elements {
        let c = match e {
            Element::Assumption(c) | Element::Guarantee(c) => c,
            _ => continue,
        };
        let expr = desugar_once_historically(std::mem::replace(&mut c.body.expr, Expr::boolean(true)));
        c.body.expr = expr.map_bottom_up(&mut |x| {
            if !is_past(&x) {
                return x;
            }
            let span = x.span;
            let key = print_expr(&x);
            let aux = match auxes.get(&key) {
                Some(a) => a.clone(),
                None => {
                    let a = fresh.make("");
                    auxes.insert(key, a.clone());
                    extra.push(Element::Var(VarDecl {
                        kind: VarKind::Sys,
                        ty: TypeExpr::new(TypeKind::Boolean, span),
                        name: Ident::new(a.clone(), span),
                        span,
                    }));
                    let aux_ref = Expr::new(ExprKind::Name(a.clone()), span);
                    let next_aux = Expr::new(ExprKind::Unary(UnOp::Next, Box::new(aux_ref.clone())), span);
                    let next_of = |e: &Expr| Expr::new(ExprKind::Unary(UnOp::Next, Box::new(e.clone())), span);
                    let (ini, trans) = match &x.kind {
                        ExprKind::Unary(UnOp::Prev, phi) => (
                            Expr::new(ExprKind::Unary(UnOp::Not, Box::new(aux_ref.clone())), span),
                            Expr::new(ExprKind::Binary(BinOp::Iff, Box::new(next_aux), phi.clone()), span),
                        ),
                        ExprKind::Binary(BinOp::Since, phi, psi) => {
                            let keep = Expr::new(
                                ExprKind::Binary(BinOp::And, Box::new(aux_ref.clone()), Box::new(next_of(phi))),
                                span,
                            );
                            let rhs = Expr::new(ExprKind::Binary(BinOp::Or, Box::new(next_of(psi)), Box::new(keep)), span);
                            (
                                Expr::new(ExprKind::Binary(BinOp::Iff, Box::new(aux_ref.clone()), psi.clone()), span),
                                Expr::new(ExprKind::Binary(BinOp::Iff, Box::new(next_aux), Box::new(rhs)), span),
                            )
                        }
                        _ => unreachable!("only Y and S remain after desugaring"),
                    };
                    extra.push(Element::Guarantee(generated(Origin::PastLtl, None, TempKind::Ini, ini, span)));
                    extra.push(Element::Guarantee(generated(Origin::PastLtl, None, TempKind::Trans, trans, span)));
                    a
                }
            };
            Expr::new(ExprKind::Name(aux), span)
        });
    }
    ast.elements.extend(extra);
    ast
}
