//! Name resolution, type checking and well-formedness rules.
//!
//! Checking runs in phases: declarations and types, define/predicate cycles,
//! expression typing, and finally the temporal rules (where `next` may occur,
//! which assumptions may mention system variables). The temporal rules are
//! evaluated on copies of each constraint with defines and predicate
//! instances inlined, so a rule cannot be dodged by hiding a `next` inside a
//! define.

pub mod imports;
pub mod types;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use crate::diag::{Diagnostic, SourceMap, Span};
use crate::syntax::*;

pub use imports::{resolve_imports, FsLoader, SourceLoader};
pub use types::Ty;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    EnvVar,
    SysVar,
    Define,
    TypeDef,
    EnumValue,
    Predicate,
    Pattern,
    Monitor,
    Assumption,
    Guarantee,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::EnvVar => "environment variable",
            SymbolKind::SysVar => "system variable",
            SymbolKind::Define => "define",
            SymbolKind::TypeDef => "type",
            SymbolKind::EnumValue => "enum value",
            SymbolKind::Predicate => "predicate",
            SymbolKind::Pattern => "pattern",
            SymbolKind::Monitor => "monitor",
            SymbolKind::Assumption => "assumption",
            SymbolKind::Guarantee => "guarantee",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub kind: SymbolKind,
    /// Value type for variables, monitors, defines and enum values.
    pub ty: Option<Ty>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalKind {
    Param,
    PatternVar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Local {
    pub kind: LocalKind,
    pub ty: Option<Ty>,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub globals: BTreeMap<String, Symbol>,
    /// Parameters and pattern variables, keyed by predicate or pattern name.
    pub locals: BTreeMap<String, BTreeMap<String, Local>>,
}

impl SymbolTable {
    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        self.globals.get(name).map(|s| s.kind)
    }

    /// Type of a variable or monitor.
    pub fn var_type(&self, name: &str) -> Option<&Ty> {
        let s = self.globals.get(name)?;
        match s.kind {
            SymbolKind::EnvVar | SymbolKind::SysVar | SymbolKind::Monitor => s.ty.as_ref(),
            _ => None,
        }
    }

    /// True for system variables and monitors.
    pub fn is_system(&self, name: &str) -> bool {
        matches!(self.kind(name), Some(SymbolKind::SysVar | SymbolKind::Monitor))
    }
}

/// Where an expression lives, which decides the visible local names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope<'s> {
    Global,
    Predicate(&'s str),
    Pattern(&'s str),
}

impl<'s> Scope<'s> {
    fn owner(self) -> Option<&'s str> {
        match self {
            Scope::Global => None,
            Scope::Predicate(n) | Scope::Pattern(n) => Some(n),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Accept identifiers containing `__`, which are otherwise reserved for
    /// names generated by lowering.
    pub allow_reserved: bool,
}

/// A specification that passed every check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedSpec {
    pub ast: SpecAst,
    pub symbols: SymbolTable,
}

impl CheckedSpec {
    /// Type of `expr` evaluated in `scope`.
    pub fn type_of(&self, expr: &Expr, scope: Scope<'_>) -> Result<Ty, Vec<Diagnostic>> {
        let mut c = Checker::new(&self.ast, CheckOptions { allow_reserved: true });
        c.symbols = self.symbols.clone();
        for (name, s) in &self.symbols.globals {
            if s.kind == SymbolKind::Define {
                c.define_memo.insert(name.clone(), s.ty.clone());
            }
        }
        match c.expr_ty(expr, scope) {
            Some(t) if c.diags.is_empty() => Ok(t),
            _ => Err(c.diags),
        }
    }

    pub fn name(&self) -> &str {
        &self.ast.name.name
    }
}

/// Checks a specification whose imports are already resolved.
pub fn check(ast: SpecAst) -> Result<CheckedSpec, Vec<Diagnostic>> {
    check_with(ast, CheckOptions::default())
}

pub fn check_with(ast: SpecAst, opts: CheckOptions) -> Result<CheckedSpec, Vec<Diagnostic>> {
    let symbols = {
        let mut c = Checker::new(&ast, opts);
        c.run();
        if !c.diags.is_empty() {
            return Err(dedup(c.diags));
        }
        c.symbols
    };
    Ok(CheckedSpec { ast, symbols })
}

/// Loads `path`, resolves its imports and checks it. The source map is
/// returned in both cases so diagnostics can be rendered.
pub fn check_file(
    path: &Path,
    loader: &dyn SourceLoader,
) -> (SourceMap, Result<CheckedSpec, Vec<Diagnostic>>) {
    let mut sources = SourceMap::new();
    let result = resolve_imports(path, loader, &mut sources).and_then(check);
    (sources, result)
}

fn dedup(diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let mut seen = HashSet::new();
    diags
        .into_iter()
        .filter(|d| seen.insert((d.span, d.message.clone())))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role<'a> {
    Assumption,
    Guarantee,
    Monitor,
    Pattern(&'a str),
}

struct Checker<'a> {
    ast: &'a SpecAst,
    opts: CheckOptions,
    diags: Vec<Diagnostic>,
    symbols: SymbolTable,
    defines: HashMap<&'a str, &'a Define>,
    predicates: HashMap<&'a str, &'a Predicate>,
    patterns: HashMap<&'a str, &'a Pattern>,
    typedefs: HashMap<&'a str, &'a TypeDef>,
    typedef_memo: HashMap<String, Option<Ty>>,
    typedef_visiting: HashSet<String>,
    define_memo: HashMap<String, Option<Ty>>,
    cyclic: HashSet<String>,
}

impl<'a> Checker<'a> {
    fn new(ast: &'a SpecAst, opts: CheckOptions) -> Self {
        let mut c = Checker {
            ast,
            opts,
            diags: Vec::new(),
            symbols: SymbolTable::default(),
            defines: HashMap::new(),
            predicates: HashMap::new(),
            patterns: HashMap::new(),
            typedefs: HashMap::new(),
            typedef_memo: HashMap::new(),
            typedef_visiting: HashSet::new(),
            define_memo: HashMap::new(),
            cyclic: HashSet::new(),
        };
        for e in &ast.elements {
            match e {
                Element::Define(d) => {
                    c.defines.entry(d.name.name.as_str()).or_insert(d);
                }
                Element::Predicate(p) => {
                    c.predicates.entry(p.name.name.as_str()).or_insert(p);
                }
                Element::Pattern(p) => {
                    c.patterns.entry(p.name.name.as_str()).or_insert(p);
                }
                Element::TypeDef(t) => {
                    c.typedefs.entry(t.name.name.as_str()).or_insert(t);
                }
                _ => {}
            }
        }
        c
    }

    fn error(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, msg));
    }

    fn run(&mut self) {
        self.declare();
        self.find_cycles();
        self.type_elements();
        if self.diags.is_empty() {
            self.temporal_rules();
        }
    }

    fn reserved(&mut self, id: &Ident) {
        if !self.opts.allow_reserved && id.name.contains("__") {
            self.error(
                id.span,
                format!("`{}`: identifiers containing `__` are reserved for generated names", id.name),
            );
        }
    }

    // ---- phase 1: declarations and types ----

    fn declare(&mut self) {
        let ast = self.ast;
        for e in &ast.elements {
            let Some(id) = e.name() else { continue };
            let kind = match e {
                Element::Var(v) if v.kind == VarKind::Env => SymbolKind::EnvVar,
                Element::Var(_) => SymbolKind::SysVar,
                Element::Assumption(_) => SymbolKind::Assumption,
                Element::Guarantee(_) => SymbolKind::Guarantee,
                Element::Define(_) => SymbolKind::Define,
                Element::TypeDef(_) => SymbolKind::TypeDef,
                Element::Predicate(_) => SymbolKind::Predicate,
                Element::Monitor(_) => SymbolKind::Monitor,
                Element::Pattern(_) => SymbolKind::Pattern,
            };
            self.reserved(id);
            if let Some(prev) = self.symbols.globals.get(&id.name) {
                let msg = format!("`{}` is already declared as a {}", id.name, prev.kind);
                self.error(id.span, msg);
                continue;
            }
            self.symbols.globals.insert(
                id.name.clone(),
                Symbol {
                    kind,
                    ty: None,
                    span: id.span,
                },
            );
        }
        for e in &ast.elements {
            match e {
                Element::TypeDef(t) => {
                    self.typedef_ty(&t.name.name);
                }
                Element::Var(v) => {
                    let ty = self.resolve_type(&v.ty);
                    self.set_global_ty(&v.name, ty);
                }
                Element::Monitor(m) => {
                    let ty = self.resolve_type(&m.ty);
                    self.set_global_ty(&m.name, ty);
                }
                Element::Predicate(p) => {
                    let mut locals = BTreeMap::new();
                    for (ty, name) in &p.params {
                        let ty = self.resolve_type(ty);
                        self.add_local(&mut locals, name, LocalKind::Param, ty);
                    }
                    self.set_locals(&p.name.name, locals);
                }
                Element::Pattern(p) => {
                    let mut locals = BTreeMap::new();
                    for name in &p.params {
                        self.add_local(&mut locals, name, LocalKind::Param, Some(Ty::Bool));
                    }
                    for (ty, name) in &p.vars {
                        let ty = self.resolve_type(ty);
                        self.add_local(&mut locals, name, LocalKind::PatternVar, ty);
                    }
                    self.set_locals(&p.name.name, locals);
                }
                _ => {}
            }
        }
    }

    fn set_global_ty(&mut self, id: &Ident, ty: Option<Ty>) {
        if let Some(s) = self.symbols.globals.get_mut(&id.name) {
            if s.span == id.span {
                s.ty = ty;
            }
        }
    }

    fn set_locals(&mut self, owner: &str, locals: BTreeMap<String, Local>) {
        self.symbols.locals.entry(owner.to_string()).or_insert(locals);
    }

    fn add_local(&mut self, locals: &mut BTreeMap<String, Local>, id: &Ident, kind: LocalKind, ty: Option<Ty>) {
        self.reserved(id);
        if locals.contains_key(&id.name) {
            self.error(id.span, format!("`{}` is declared twice in the same scope", id.name));
            return;
        }
        locals.insert(
            id.name.clone(),
            Local {
                kind,
                ty,
                span: id.span,
            },
        );
    }

    fn typedef_ty(&mut self, name: &str) -> Option<Ty> {
        if let Some(t) = self.typedef_memo.get(name) {
            return t.clone();
        }
        let td = *self.typedefs.get(name)?;
        if !self.typedef_visiting.insert(name.to_string()) {
            self.error(td.name.span, format!("type `{name}` is defined in terms of itself"));
            self.typedef_memo.insert(name.to_string(), None);
            return None;
        }
        let ty = self.resolve_type(&td.ty);
        self.typedef_visiting.remove(name);
        self.typedef_memo.entry(name.to_string()).or_insert(ty).clone()
    }

    fn resolve_type(&mut self, t: &TypeExpr) -> Option<Ty> {
        match &t.kind {
            TypeKind::Boolean => Some(Ty::Bool),
            TypeKind::IntRange(lo, hi) => {
                if hi <= lo {
                    self.error(
                        t.span,
                        format!("integer range {lo}..{hi} is invalid: the upper bound must exceed the lower bound"),
                    );
                    None
                } else if *lo < -types::INT_LIMIT || *hi > types::INT_LIMIT {
                    self.error(t.span, format!("integer range {lo}..{hi} is too large"));
                    None
                } else {
                    Some(Ty::int(*lo, *hi))
                }
            }
            TypeKind::Enum(vals) => self.register_enum(vals),
            TypeKind::Ref(name) => match self.symbols.kind(&name.name) {
                Some(SymbolKind::TypeDef) => self.typedef_ty(&name.name),
                Some(k) => {
                    self.error(name.span, format!("`{}` is a {k}, not a type", name.name));
                    None
                }
                None => {
                    self.error(name.span, format!("unknown type `{}`", name.name));
                    None
                }
            },
        }
    }

    fn register_enum(&mut self, vals: &[Ident]) -> Option<Ty> {
        let mut seen = HashSet::new();
        for v in vals {
            if !seen.insert(v.name.as_str()) {
                self.error(v.span, format!("duplicate enum value `{}`", v.name));
                return None;
            }
        }
        let ty = Ty::enumeration(vals.iter().map(|v| v.name.clone()));
        for v in vals {
            self.reserved(v);
            match self.symbols.globals.get(&v.name) {
                None => {
                    self.symbols.globals.insert(
                        v.name.clone(),
                        Symbol {
                            kind: SymbolKind::EnumValue,
                            ty: Some(ty.clone()),
                            span: v.span,
                        },
                    );
                }
                Some(s) if s.kind == SymbolKind::EnumValue => {
                    if s.ty.as_ref() != Some(&ty) {
                        let other = s.ty.clone().map(|t| t.to_string()).unwrap_or_default();
                        self.error(
                            v.span,
                            format!("enum value `{}` already belongs to the enumeration {other}", v.name),
                        );
                    }
                }
                Some(s) => {
                    let kind = s.kind;
                    self.error(v.span, format!("enum value `{}` clashes with a {kind} of the same name", v.name));
                }
            }
        }
        Some(ty)
    }

    // ---- phase 2: cycles among defines and predicates ----

    fn dependencies(&self, name: &str) -> Vec<String> {
        let (body, owner) = if let Some(d) = self.defines.get(name) {
            (&d.expr, None)
        } else if let Some(p) = self.predicates.get(name) {
            (&p.body, Some(name))
        } else {
            return Vec::new();
        };
        let locals = owner.and_then(|o| self.symbols.locals.get(o));
        let mut out = Vec::new();
        body.walk(&mut |e| match &e.kind {
            ExprKind::Name(n) => {
                let shadowed = locals.is_some_and(|l| l.contains_key(n));
                if !shadowed && self.defines.contains_key(n.as_str()) {
                    out.push(n.clone());
                }
            }
            ExprKind::Instance(n, _) if self.predicates.contains_key(n.name.as_str()) => {
                out.push(n.name.clone());
            }
            _ => {}
        });
        out
    }

    fn find_cycles(&mut self) {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            Gray,
            Black,
        }
        let mut nodes: Vec<&str> = self.defines.keys().chain(self.predicates.keys()).copied().collect();
        nodes.sort_unstable();
        let mut color: HashMap<String, Color> = HashMap::new();
        for root in nodes {
            if color.contains_key(root) {
                continue;
            }
            // Iterative DFS keeping the current path for cycle reporting.
            let mut path: Vec<(String, Vec<String>)> = vec![(root.to_string(), self.dependencies(root))];
            color.insert(root.to_string(), Color::Gray);
            while let Some((node, deps)) = path.last_mut() {
                match deps.pop() {
                    Some(next) => match color.get(&next) {
                        None => {
                            color.insert(next.clone(), Color::Gray);
                            let d = self.dependencies(&next);
                            path.push((next, d));
                        }
                        Some(Color::Gray) => {
                            let start = path.iter().position(|(n, _)| *n == next).unwrap_or(0);
                            let members: Vec<String> = path[start..].iter().map(|(n, _)| n.clone()).collect();
                            let span = self.name_span(&next);
                            let what = if self.predicates.contains_key(next.as_str()) {
                                "predicate"
                            } else {
                                "define"
                            };
                            self.error(
                                span,
                                format!("{what} `{next}` is recursive (cycle: {} -> {next})", members.join(" -> ")),
                            );
                            self.cyclic.extend(members);
                        }
                        Some(Color::Black) => {}
                    },
                    None => {
                        color.insert(node.clone(), Color::Black);
                        path.pop();
                    }
                }
            }
        }
    }

    fn name_span(&self, name: &str) -> Span {
        self.symbols.globals.get(name).map(|s| s.span).unwrap_or_default()
    }

    // ---- phase 3: typing ----

    fn type_elements(&mut self) {
        let ast = self.ast;
        for e in &ast.elements {
            match e {
                Element::Define(d) => {
                    let ty = self.define_ty(&d.name.name);
                    self.set_global_ty(&d.name, ty);
                }
                Element::Predicate(p) => {
                    if self.cyclic.contains(&p.name.name) {
                        continue;
                    }
                    self.expect_bool(&p.body, Scope::Predicate(&p.name.name), "a predicate body");
                }
                Element::Pattern(p) => {
                    let justice = p.constraints.iter().filter(|c| c.kind == TempKind::AlwEv).count();
                    if justice != 1 {
                        self.error(
                            p.name.span,
                            format!("pattern `{}` must contain exactly one justice (alwEv) constraint, found {justice}", p.name.name),
                        );
                    }
                    for c in &p.constraints {
                        self.expect_bool(&c.expr, Scope::Pattern(&p.name.name), "a pattern constraint");
                    }
                }
                Element::Monitor(m) => {
                    for c in &m.constraints {
                        if c.kind == TempKind::AlwEv {
                            self.error(c.span, "monitors cannot contain justice (alwEv) constraints");
                        }
                        self.expect_bool(&c.expr, Scope::Global, "a monitor constraint");
                    }
                }
                Element::Assumption(c) | Element::Guarantee(c) => {
                    if let Some((name, args)) = self.pattern_instance(&c.body.expr) {
                        self.type_pattern_instance(name, args);
                    } else {
                        self.expect_bool(&c.body.expr, Scope::Global, "a constraint");
                    }
                }
                Element::Var(_) | Element::TypeDef(_) => {}
            }
        }
    }

    fn pattern_instance<'e>(&self, e: &'e Expr) -> Option<(&'e Ident, &'e [Expr])> {
        match &e.kind {
            ExprKind::Instance(name, args) if self.patterns.contains_key(name.name.as_str()) => {
                Some((name, args.as_slice()))
            }
            _ => None,
        }
    }

    fn type_pattern_instance(&mut self, name: &Ident, args: &[Expr]) {
        let p = self.patterns[name.name.as_str()];
        if p.params.len() != args.len() {
            self.error(
                name.span,
                format!(
                    "pattern `{}` expects {} argument(s), found {}",
                    name.name,
                    p.params.len(),
                    args.len()
                ),
            );
        }
        for a in args {
            self.expect_bool(a, Scope::Global, "a pattern argument");
        }
    }

    fn expect_bool(&mut self, e: &Expr, scope: Scope<'_>, what: &str) {
        if let Some(t) = self.expr_ty(e, scope) {
            if !t.is_bool() {
                self.error(e.span, format!("{what} must be boolean, found {t}"));
            }
        }
    }

    fn define_ty(&mut self, name: &str) -> Option<Ty> {
        if let Some(t) = self.define_memo.get(name) {
            return t.clone();
        }
        if self.cyclic.contains(name) {
            return None;
        }
        let d = *self.defines.get(name)?;
        // Provisional entry guards against re-entry.
        self.define_memo.insert(name.to_string(), None);
        let ty = self.expr_ty(&d.expr, Scope::Global);
        self.define_memo.insert(name.to_string(), ty.clone());
        ty
    }

    fn local(&self, scope: Scope<'_>, name: &str) -> Option<&Local> {
        self.symbols.locals.get(scope.owner()?)?.get(name)
    }

    fn expr_ty(&mut self, e: &Expr, scope: Scope<'_>) -> Option<Ty> {
        match &e.kind {
            ExprKind::Bool(_) => Some(Ty::Bool),
            ExprKind::Int(n) => Some(Ty::int(*n, *n)),
            ExprKind::Name(n) => self.name_ty(n, e.span, scope),
            ExprKind::Instance(name, args) => self.instance_ty(name, args, scope),
            ExprKind::Unary(op, x) => {
                let t = self.expr_ty(x, scope)?;
                match op {
                    UnOp::Next => Some(t),
                    UnOp::Not | UnOp::Prev | UnOp::Historically | UnOp::Once => {
                        if t.is_bool() {
                            Some(Ty::Bool)
                        } else {
                            let sym = match op {
                                UnOp::Not => "!",
                                UnOp::Prev => "Y",
                                UnOp::Historically => "H",
                                _ => "O",
                            };
                            self.error(x.span, format!("operand of `{sym}` must be boolean, found {t}"));
                            None
                        }
                    }
                    UnOp::Neg => match t.as_int() {
                        Some(r) => self.int_result(e.span, types::range_neg(r)),
                        None => {
                            self.error(x.span, format!("operand of unary `-` must be an integer, found {t}"));
                            None
                        }
                    },
                }
            }
            ExprKind::Binary(op, l, r) => {
                let lt = self.expr_ty(l, scope);
                let rt = self.expr_ty(r, scope);
                let (lt, rt) = (lt?, rt?);
                self.binary_ty(e, *op, (l, lt), (r, rt), scope)
            }
        }
    }

    fn int_result(&mut self, span: Span, r: Option<(i64, i64)>) -> Option<Ty> {
        match r {
            Some((lo, hi)) => Some(Ty::int(lo, hi)),
            None => {
                self.error(span, "integer expression range is too large");
                None
            }
        }
    }

    fn binary_ty(
        &mut self,
        e: &Expr,
        op: BinOp,
        (l, lt): (&Expr, Ty),
        (r, rt): (&Expr, Ty),
        scope: Scope<'_>,
    ) -> Option<Ty> {
        let sym = op.symbol();
        if op.is_logical() || op == BinOp::Since {
            for (x, t) in [(l, &lt), (r, &rt)] {
                if !t.is_bool() {
                    self.error(x.span, format!("operands of `{sym}` must be boolean, found {t}"));
                    return None;
                }
            }
            return Some(Ty::Bool);
        }
        if op == BinOp::Eq {
            if lt.comparable(&rt) {
                return Some(Ty::Bool);
            }
            self.error(e.span, format!("cannot compare {lt} with {rt}"));
            return None;
        }
        if op.is_comparison() && (matches!(lt, Ty::Enum(_)) || matches!(rt, Ty::Enum(_))) {
            self.error(e.span, format!("enum values can only be compared with `=`, not `{sym}`"));
            return None;
        }
        let (Some(a), Some(b)) = (lt.as_int(), rt.as_int()) else {
            let bad = if lt.as_int().is_none() { (l, &lt) } else { (r, &rt) };
            self.error(bad.0.span, format!("operands of `{sym}` must be integers, found {}", bad.1));
            return None;
        };
        match op {
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => Some(Ty::Bool),
            BinOp::Add => self.int_result(e.span, types::range_add(a, b)),
            BinOp::Sub => self.int_result(e.span, types::range_sub(a, b)),
            BinOp::Mul => self.int_result(e.span, types::range_mul(a, b)),
            BinOp::Div | BinOp::Mod => match self.const_value(r, scope) {
                Some(0) => {
                    self.error(r.span, "division by zero");
                    None
                }
                Some(c) => {
                    let range = if op == BinOp::Div {
                        types::range_div(a, c)
                    } else {
                        types::range_mod(a, c)
                    };
                    self.int_result(e.span, range)
                }
                None => {
                    self.error(r.span, format!("the right operand of `{sym}` must be a constant integer expression"));
                    None
                }
            },
            _ => unreachable!("logical operators handled above"),
        }
    }

    /// Value of a constant integer expression, looking through defines.
    fn const_value(&self, e: &Expr, scope: Scope<'_>) -> Option<i64> {
        match &e.kind {
            ExprKind::Int(n) => Some(*n),
            ExprKind::Name(n) => {
                if self.local(scope, n).is_some() || self.cyclic.contains(n) {
                    return None;
                }
                self.const_value(&self.defines.get(n.as_str())?.expr, Scope::Global)
            }
            ExprKind::Unary(UnOp::Neg, x) => self.const_value(x, scope)?.checked_neg(),
            ExprKind::Binary(op, l, r) => {
                let a = self.const_value(l, scope)?;
                let b = self.const_value(r, scope)?;
                match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    BinOp::Div if b != 0 => a.checked_div_euclid(b),
                    BinOp::Mod if b != 0 => a.checked_rem_euclid(b),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn name_ty(&mut self, n: &str, span: Span, scope: Scope<'_>) -> Option<Ty> {
        if let Some(l) = self.local(scope, n) {
            return l.ty.clone();
        }
        let Some(sym) = self.symbols.globals.get(n) else {
            self.error(span, format!("unknown name `{n}`"));
            return None;
        };
        let (kind, ty) = (sym.kind, sym.ty.clone());
        let in_pattern = matches!(scope, Scope::Pattern(_));
        match kind {
            SymbolKind::EnumValue => ty,
            SymbolKind::EnvVar | SymbolKind::SysVar | SymbolKind::Monitor | SymbolKind::Define if in_pattern => {
                self.error(
                    span,
                    format!("pattern bodies may only reference their parameters, variables and enum values, found {kind} `{n}`"),
                );
                None
            }
            SymbolKind::EnvVar | SymbolKind::SysVar | SymbolKind::Monitor => ty,
            SymbolKind::Define => self.define_ty(n),
            SymbolKind::Predicate | SymbolKind::Pattern => {
                self.error(span, format!("{kind} `{n}` must be instantiated with arguments"));
                None
            }
            SymbolKind::TypeDef => {
                self.error(span, format!("`{n}` is a type, not a value"));
                None
            }
            SymbolKind::Assumption | SymbolKind::Guarantee => {
                self.error(span, format!("{kind} names cannot be referenced in expressions (`{n}`)"));
                None
            }
        }
    }

    fn instance_ty(&mut self, name: &Ident, args: &[Expr], scope: Scope<'_>) -> Option<Ty> {
        let arg_tys: Vec<Option<Ty>> = args.iter().map(|a| self.expr_ty(a, scope)).collect();
        match self.symbols.kind(&name.name) {
            Some(SymbolKind::Predicate) => {
                let pname = name.name.as_str();
                let p = *self.predicates.get(pname)?;
                if p.params.len() != args.len() {
                    self.error(
                        name.span,
                        format!("predicate `{pname}` expects {} argument(s), found {}", p.params.len(), args.len()),
                    );
                    return None;
                }
                let mut ok = true;
                for ((_, param), (arg, at)) in p.params.iter().zip(args.iter().zip(arg_tys)) {
                    let pt = self
                        .symbols
                        .locals
                        .get(pname)
                        .and_then(|l| l.get(&param.name))
                        .and_then(|l| l.ty.clone());
                    match (pt, at) {
                        (Some(pt), Some(at)) if !pt.comparable(&at) => {
                            self.error(
                                arg.span,
                                format!("argument for parameter `{}` of `{pname}` must be {pt}, found {at}", param.name),
                            );
                            ok = false;
                        }
                        (Some(_), Some(_)) => {}
                        _ => ok = false,
                    }
                }
                ok.then_some(Ty::Bool)
            }
            Some(SymbolKind::Pattern) => {
                self.error(
                    name.span,
                    format!(
                        "pattern instance `{}` may only appear as the entire expression of an assumption or guarantee",
                        name.name
                    ),
                );
                None
            }
            Some(k) => {
                self.error(name.span, format!("`{}` is a {k}, not a predicate or pattern", name.name));
                None
            }
            None => {
                self.error(name.span, format!("unknown predicate or pattern `{}`", name.name));
                None
            }
        }
    }

    // ---- phase 4: temporal rules on inlined constraints ----

    fn temporal_rules(&mut self) {
        let ast = self.ast;
        for e in &ast.elements {
            match e {
                Element::Assumption(c) | Element::Guarantee(c) => {
                    let role = if matches!(e, Element::Assumption(_)) {
                        Role::Assumption
                    } else {
                        Role::Guarantee
                    };
                    if let Some((_, args)) = self.pattern_instance(&c.body.expr) {
                        for a in args {
                            let a = self.inline(a, &HashMap::new());
                            if let Some(span) = find_next(&a) {
                                self.error(span, "`next` is not allowed in pattern arguments");
                            }
                        }
                        continue;
                    }
                    let x = self.inline(&c.body.expr, &HashMap::new());
                    self.rules(&x, c.body.kind, role, false, false);
                }
                Element::Monitor(m) => {
                    for c in &m.constraints {
                        let x = self.inline(&c.expr, &HashMap::new());
                        self.rules(&x, c.kind, Role::Monitor, false, false);
                    }
                }
                Element::Pattern(p) => {
                    let env: HashMap<String, Option<Expr>> = self
                        .symbols
                        .locals
                        .get(&p.name.name)
                        .map(|l| l.keys().map(|k| (k.clone(), None)).collect())
                        .unwrap_or_default();
                    for c in &p.constraints {
                        let x = self.inline(&c.expr, &env);
                        self.rules(&x, c.kind, Role::Pattern(&p.name.name), false, false);
                    }
                }
                _ => {}
            }
        }
    }

    /// Copies `e` with defines and predicate instances expanded. Names bound
    /// in `env` are replaced by their expression, or kept when bound to
    /// `None`.
    fn inline(&self, e: &Expr, env: &HashMap<String, Option<Expr>>) -> Expr {
        match &e.kind {
            ExprKind::Name(n) => match env.get(n) {
                Some(Some(x)) => x.clone(),
                Some(None) => e.clone(),
                None => match self.defines.get(n.as_str()) {
                    Some(d) if self.symbols.kind(n) == Some(SymbolKind::Define) => self.inline(&d.expr, &HashMap::new()),
                    _ => e.clone(),
                },
            },
            ExprKind::Instance(name, args) => {
                let args: Vec<Expr> = args.iter().map(|a| self.inline(a, env)).collect();
                match self.predicates.get(name.name.as_str()) {
                    Some(p) => {
                        let sub = p
                            .params
                            .iter()
                            .map(|(_, n)| n.name.clone())
                            .zip(args.into_iter().map(Some))
                            .collect();
                        self.inline(&p.body, &sub)
                    }
                    None => Expr::new(ExprKind::Instance(name.clone(), args), e.span),
                }
            }
            ExprKind::Unary(op, x) => Expr::new(ExprKind::Unary(*op, Box::new(self.inline(x, env))), e.span),
            ExprKind::Binary(op, l, r) => Expr::new(
                ExprKind::Binary(*op, Box::new(self.inline(l, env)), Box::new(self.inline(r, env))),
                e.span,
            ),
            ExprKind::Bool(_) | ExprKind::Int(_) => e.clone(),
        }
    }

    fn rules(&mut self, e: &Expr, kind: TempKind, role: Role<'_>, under_next: bool, in_past: bool) {
        match &e.kind {
            ExprKind::Unary(UnOp::Next, x) => {
                let msg = match kind {
                    TempKind::Ini => Some("`next` is not allowed in initial (ini) constraints"),
                    TempKind::AlwEv => Some("`next` is not allowed in justice (alwEv) constraints"),
                    TempKind::Alw => Some("`next` is not allowed in state invariants (alw)"),
                    TempKind::Trans if under_next => Some("`next` cannot be nested inside another `next`"),
                    TempKind::Trans if in_past => Some("`next` cannot appear inside a past-time operator"),
                    TempKind::Trans => None,
                };
                if let Some(msg) = msg {
                    self.error(e.span, msg);
                }
                self.rules(x, kind, role, true, in_past);
            }
            ExprKind::Unary(UnOp::Prev | UnOp::Historically | UnOp::Once, _) | ExprKind::Binary(BinOp::Since, _, _) => {
                if role == Role::Assumption {
                    match kind {
                        TempKind::Ini | TempKind::Alw => self.error(
                            e.span,
                            "past-time operators are evaluated by system-controlled auxiliary variables and cannot appear in initial or invariant assumptions",
                        ),
                        TempKind::Trans if under_next => self.error(
                            e.span,
                            "a past-time operator under `next` in a safety assumption refers to a system-controlled auxiliary variable",
                        ),
                        _ => {}
                    }
                }
                if matches!(role, Role::Pattern(_)) && under_next {
                    self.error(e.span, "only pattern variables may appear under `next` in a pattern constraint");
                }
                match &e.kind {
                    ExprKind::Unary(_, x) => self.rules(x, kind, role, under_next, true),
                    ExprKind::Binary(_, l, r) => {
                        self.rules(l, kind, role, under_next, true);
                        self.rules(r, kind, role, under_next, true);
                    }
                    _ => {}
                }
            }
            ExprKind::Unary(_, x) => self.rules(x, kind, role, under_next, in_past),
            ExprKind::Binary(_, l, r) => {
                self.rules(l, kind, role, under_next, in_past);
                self.rules(r, kind, role, under_next, in_past);
            }
            ExprKind::Instance(_, args) => {
                for a in args {
                    self.rules(a, kind, role, under_next, in_past);
                }
            }
            ExprKind::Name(n) => self.name_rule(n, e.span, kind, role, under_next),
            ExprKind::Bool(_) | ExprKind::Int(_) => {}
        }
    }

    fn name_rule(&mut self, n: &str, span: Span, kind: TempKind, role: Role<'_>, under_next: bool) {
        match role {
            Role::Assumption if self.symbols.is_system(n) => match kind {
                TempKind::Ini => self.error(span, format!("initial assumption references system variable `{n}`")),
                TempKind::Alw => {
                    self.error(span, format!("state invariant assumption references system variable `{n}`"))
                }
                TempKind::Trans if under_next => self.error(
                    span,
                    format!("safety assumption references system variable `{n}` under `next`"),
                ),
                _ => {}
            },
            Role::Pattern(owner) => {
                let local = self.symbols.locals.get(owner).and_then(|l| l.get(n)).map(|l| l.kind);
                let enum_value = self.symbols.kind(n) == Some(SymbolKind::EnumValue);
                if local.is_none() && !enum_value {
                    self.error(
                        span,
                        format!("pattern bodies may only reference their parameters, variables and enum values, found `{n}`"),
                    );
                } else if under_next && local == Some(LocalKind::Param) {
                    self.error(
                        span,
                        format!("only pattern variables may appear under `next` in a pattern constraint, found parameter `{n}`"),
                    );
                }
            }
            _ => {}
        }
    }
}

fn find_next(e: &Expr) -> Option<Span> {
    let mut found = None;
    e.walk(&mut |x| {
        if found.is_none() && matches!(x.kind, ExprKind::Unary(UnOp::Next, _)) {
            found = Some(x.span);
        }
    });
    found
}
