//! Pretty-printer producing canonical source text: short keywords and only the
//! parentheses the grammar needs. Output parses back to the same tree.

use std::fmt::Write;

use super::ast::*;

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, _, _) => op.precedence(),
        ExprKind::Unary(..) => UNARY_PRECEDENCE,
        ExprKind::Int(n) if *n < 0 => UNARY_PRECEDENCE,
        _ => UNARY_PRECEDENCE + 1,
    }
}

fn write_child(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Instance(name, args) => {
            out.push_str(&name.name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a);
            }
            out.push(')');
        }
        ExprKind::Unary(op, inner) => match op {
            UnOp::Not | UnOp::Neg => {
                out.push(if *op == UnOp::Not { '!' } else { '-' });
                write_child(out, inner, precedence(inner) < UNARY_PRECEDENCE);
            }
            UnOp::Next | UnOp::Prev | UnOp::Historically | UnOp::Once => {
                out.push_str(match op {
                    UnOp::Next => "next",
                    UnOp::Prev => "Y",
                    UnOp::Historically => "H",
                    _ => "O",
                });
                write_child(out, inner, true);
            }
        },
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            write_child(out, l, precedence(l) < p);
            let _ = write!(out, " {} ", op.symbol());
            write_child(out, r, precedence(r) <= p);
        }
    }
}

pub fn print_type(t: &TypeExpr) -> String {
    match &t.kind {
        TypeKind::Boolean => "boolean".to_string(),
        TypeKind::IntRange(lo, hi) => format!("Int({lo}..{hi})"),
        TypeKind::Enum(vals) => {
            let names: Vec<&str> = vals.iter().map(|v| v.name.as_str()).collect();
            format!("{{{}}}", names.join(", "))
        }
        TypeKind::Ref(name) => name.name.clone(),
    }
}

pub fn print_temp(c: &TempConstraint) -> String {
    format!("{} {}", c.kind.keyword(), print_expr(&c.expr))
}

pub fn print_constraint(keyword: &str, c: &Constraint) -> String {
    match &c.name {
        Some(n) => format!("{keyword} {}: {};", n.name, print_temp(&c.body)),
        None => format!("{keyword} {};", print_temp(&c.body)),
    }
}

pub fn print_element(e: &Element) -> String {
    match e {
        Element::Var(v) => {
            let kw = match v.kind {
                VarKind::Env => "env",
                VarKind::Sys => "sys",
            };
            format!("{kw} {} {};", print_type(&v.ty), v.name.name)
        }
        Element::Assumption(c) => print_constraint("asm", c),
        Element::Guarantee(c) => print_constraint("gar", c),
        Element::Define(d) => format!("define {} := {};", d.name.name, print_expr(&d.expr)),
        Element::TypeDef(t) => format!("type {} = {};", t.name.name, print_type(&t.ty)),
        Element::Predicate(p) => {
            let params: Vec<String> = p
                .params
                .iter()
                .map(|(ty, n)| format!("{} {}", print_type(ty), n.name))
                .collect();
            format!(
                "predicate {}({}) {{ {} }}",
                p.name.name,
                params.join(", "),
                print_expr(&p.body)
            )
        }
        Element::Monitor(m) => {
            let mut s = format!("monitor {} {} {{\n", print_type(&m.ty), m.name.name);
            for c in &m.constraints {
                let _ = writeln!(s, "  {};", print_temp(c));
            }
            s.push('}');
            s
        }
        Element::Pattern(p) => {
            let params: Vec<&str> = p.params.iter().map(|i| i.name.as_str()).collect();
            let mut s = format!("pattern {}({}) {{\n", p.name.name, params.join(", "));
            for (ty, n) in &p.vars {
                let _ = writeln!(s, "  var {} {};", print_type(ty), n.name);
            }
            for c in &p.constraints {
                let _ = writeln!(s, "  {};", print_temp(c));
            }
            s.push('}');
            s
        }
    }
}

pub fn print_spec(spec: &SpecAst) -> String {
    let mut s = String::new();
    for i in &spec.imports {
        let _ = writeln!(s, "import \"{}\";", i.path);
    }
    let _ = writeln!(s, "spec {}", spec.name.name);
    for e in &spec.elements {
        s.push('\n');
        s.push_str(&print_element(e));
        s.push('\n');
    }
    s
}
