//! Abstract syntax tree of a Spectra file.

use crate::diag::Span;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }

    /// An identifier without source location, for generated code.
    pub fn synthetic(name: impl Into<String>) -> Self {
        Self::new(name, Span::DUMMY)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecAst {
    pub imports: Vec<Import>,
    pub name: Ident,
    pub elements: Vec<Element>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    pub path: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Var(VarDecl),
    Assumption(Constraint),
    Guarantee(Constraint),
    Define(Define),
    TypeDef(TypeDef),
    Predicate(Predicate),
    Monitor(Monitor),
    Pattern(Pattern),
}

impl Element {
    pub fn span(&self) -> Span {
        match self {
            Element::Var(v) => v.span,
            Element::Assumption(c) | Element::Guarantee(c) => c.span,
            Element::Define(d) => d.span,
            Element::TypeDef(t) => t.span,
            Element::Predicate(p) => p.span,
            Element::Monitor(m) => m.span,
            Element::Pattern(p) => p.span,
        }
    }

    /// The declared name, if the element has one.
    pub fn name(&self) -> Option<&Ident> {
        match self {
            Element::Var(v) => Some(&v.name),
            Element::Assumption(c) | Element::Guarantee(c) => c.name.as_ref(),
            Element::Define(d) => Some(&d.name),
            Element::TypeDef(t) => Some(&t.name),
            Element::Predicate(p) => Some(&p.name),
            Element::Monitor(m) => Some(&m.name),
            Element::Pattern(p) => Some(&p.name),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Env,
    Sys,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub kind: VarKind,
    pub ty: TypeExpr,
    pub name: Ident,
    pub span: Span,
}

/// Where an assumption or guarantee came from. Everything the parser produces
/// is `User`; lowering passes tag what they generate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Origin {
    #[default]
    User,
    Pattern,
    Monitor,
    PastLtl,
    Validity,
}

/// An assumption or guarantee: optional name plus temporal constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: Option<Ident>,
    pub body: TempConstraint,
    pub span: Span,
    pub origin: Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TempKind {
    Ini,
    Trans,
    Alw,
    AlwEv,
}

impl TempKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TempKind::Ini => "ini",
            TempKind::Trans => "trans",
            TempKind::Alw => "alw",
            TempKind::AlwEv => "alwEv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TempConstraint {
    pub kind: TempKind,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Define {
    pub name: Ident,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDef {
    pub name: Ident,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: Ident,
    pub params: Vec<(TypeExpr, Ident)>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monitor {
    pub ty: TypeExpr,
    pub name: Ident,
    pub constraints: Vec<TempConstraint>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub vars: Vec<(TypeExpr, Ident)>,
    pub constraints: Vec<TempConstraint>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeExpr {
    pub kind: TypeKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeKind {
    Boolean,
    Enum(Vec<Ident>),
    IntRange(i64, i64),
    Ref(Ident),
}

impl TypeExpr {
    pub fn new(kind: TypeKind, span: Span) -> Self {
        TypeExpr { kind, span }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Next,
    Neg,
    Prev,
    Historically,
    Once,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Since,
}

impl BinOp {
    /// Binding strength; larger binds tighter. All binary operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Iff => 2,
            BinOp::Or => 3,
            BinOp::And => 4,
            BinOp::Since => 5,
            BinOp::Eq | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 6,
            BinOp::Add | BinOp::Sub => 7,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 8,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Implies => "->",
            BinOp::Iff => "<->",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Since => "S",
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Iff)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod
        )
    }
}

/// Precedence of unary operators (tighter than every binary operator).
pub const UNARY_PRECEDENCE: u8 = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Bool(bool),
    Int(i64),
    Name(String),
    Instance(Ident, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn boolean(value: bool) -> Self {
        Expr::new(ExprKind::Bool(value), Span::DUMMY)
    }

    pub fn name(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Name(name.into()), Span::DUMMY)
    }

    pub fn int(value: i64) -> Self {
        Expr::new(ExprKind::Int(value), Span::DUMMY)
    }

    pub fn unary(op: UnOp, operand: Expr) -> Self {
        let span = operand.span;
        Expr::new(ExprKind::Unary(op, Box::new(operand)), span)
    }

    pub fn binary(op: BinOp, left: Expr, right: Expr) -> Self {
        let span = left.span.to(right.span);
        Expr::new(ExprKind::Binary(op, Box::new(left), Box::new(right)), span)
    }

    pub fn not(e: Expr) -> Self {
        Self::unary(UnOp::Not, e)
    }

    pub fn next(e: Expr) -> Self {
        Self::unary(UnOp::Next, e)
    }

    pub fn iff(a: Expr, b: Expr) -> Self {
        Self::binary(BinOp::Iff, a, b)
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Self::binary(BinOp::And, a, b)
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Self::binary(BinOp::Or, a, b)
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Instance(_, args) => args.iter().for_each(|a| a.walk(f)),
            ExprKind::Unary(_, e) => e.walk(f),
            ExprKind::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            _ => {}
        }
    }

    /// Bottom-up rewrite: children first, then `f` on the rebuilt node.
    pub fn map_bottom_up(self, f: &mut impl FnMut(Expr) -> Expr) -> Expr {
        let Expr { kind, span } = self;
        let kind = match kind {
            ExprKind::Instance(name, args) => ExprKind::Instance(
                name,
                args.into_iter().map(|a| a.map_bottom_up(f)).collect(),
            ),
            ExprKind::Unary(op, e) => ExprKind::Unary(op, Box::new(e.map_bottom_up(f))),
            ExprKind::Binary(op, l, r) => ExprKind::Binary(
                op,
                Box::new(l.map_bottom_up(f)),
                Box::new(r.map_bottom_up(f)),
            ),
            k => k,
        };
        f(Expr { kind, span })
    }

    pub fn contains(&self, pred: &mut impl FnMut(&Expr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if !found && pred(e) {
                found = true;
            }
        });
        found
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

/// Resets every span in the tree so that structurally equal trees compare
/// equal regardless of where they were parsed from.
pub trait EraseSpans {
    fn erase_spans(&mut self);
}

impl EraseSpans for Ident {
    fn erase_spans(&mut self) {
        self.span = Span::DUMMY;
    }
}

impl EraseSpans for Expr {
    fn erase_spans(&mut self) {
        self.span = Span::DUMMY;
        match &mut self.kind {
            ExprKind::Instance(name, args) => {
                name.erase_spans();
                args.iter_mut().for_each(EraseSpans::erase_spans);
            }
            ExprKind::Unary(_, e) => e.erase_spans(),
            ExprKind::Binary(_, l, r) => {
                l.erase_spans();
                r.erase_spans();
            }
            _ => {}
        }
    }
}

impl EraseSpans for TypeExpr {
    fn erase_spans(&mut self) {
        self.span = Span::DUMMY;
        match &mut self.kind {
            TypeKind::Enum(vals) => vals.iter_mut().for_each(EraseSpans::erase_spans),
            TypeKind::Ref(name) => name.erase_spans(),
            _ => {}
        }
    }
}

impl EraseSpans for TempConstraint {
    fn erase_spans(&mut self) {
        self.span = Span::DUMMY;
        self.expr.erase_spans();
    }
}

impl EraseSpans for Element {
    fn erase_spans(&mut self) {
        match self {
            Element::Var(v) => {
                v.span = Span::DUMMY;
                v.ty.erase_spans();
                v.name.erase_spans();
            }
            Element::Assumption(c) | Element::Guarantee(c) => {
                c.span = Span::DUMMY;
                if let Some(n) = &mut c.name {
                    n.erase_spans();
                }
                c.body.erase_spans();
            }
            Element::Define(d) => {
                d.span = Span::DUMMY;
                d.name.erase_spans();
                d.expr.erase_spans();
            }
            Element::TypeDef(t) => {
                t.span = Span::DUMMY;
                t.name.erase_spans();
                t.ty.erase_spans();
            }
            Element::Predicate(p) => {
                p.span = Span::DUMMY;
                p.name.erase_spans();
                for (ty, name) in &mut p.params {
                    ty.erase_spans();
                    name.erase_spans();
                }
                p.body.erase_spans();
            }
            Element::Monitor(m) => {
                m.span = Span::DUMMY;
                m.ty.erase_spans();
                m.name.erase_spans();
                m.constraints.iter_mut().for_each(EraseSpans::erase_spans);
            }
            Element::Pattern(p) => {
                p.span = Span::DUMMY;
                p.name.erase_spans();
                p.params.iter_mut().for_each(EraseSpans::erase_spans);
                for (ty, name) in &mut p.vars {
                    ty.erase_spans();
                    name.erase_spans();
                }
                p.constraints.iter_mut().for_each(EraseSpans::erase_spans);
            }
        }
    }
}

impl EraseSpans for SpecAst {
    fn erase_spans(&mut self) {
        self.span = Span::DUMMY;
        self.name.erase_spans();
        for i in &mut self.imports {
            i.span = Span::DUMMY;
        }
        self.elements.iter_mut().for_each(EraseSpans::erase_spans);
    }
}

/// Clone with spans erased.
pub fn without_spans<T: EraseSpans + Clone>(value: &T) -> T {
    let mut v = value.clone();
    v.erase_spans();
    v
}
