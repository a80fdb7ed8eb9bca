//! Helpers shared by the integration tests: corpus access, independent
//! verdicts and checks, and random generators.

#![allow(dead_code)]

pub mod checks;
pub mod soundness;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::Rng;

use spectra_core::diag::SourceMap;
use spectra_core::gr1::solve;
use spectra_core::lowering::{desugar, lower, recheck, to_gr1, KernelSpec, Value, VarEncoding};
use spectra_core::oracle::{eval_at, solve_explicit, ExplicitGame, Trace};
use spectra_core::semcheck::{check, check_file, CheckedSpec, FsLoader};
use spectra_core::syntax::{parse, Element, Expr, TempKind};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// The `.spectra` files of one corpus directory, sorted by name.
pub fn corpus(sub: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(sub))
        .unwrap_or_else(|e| panic!("corpus directory {sub}: {e}"))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "spectra"))
        .collect();
    files.sort();
    files
}

/// Every specification meant to check cleanly.
pub fn all_specs() -> Vec<PathBuf> {
    let mut files = corpus("grammar");
    files.extend(corpus("lowering"));
    files.extend(corpus("forklift"));
    files.extend(corpus("cores"));
    files.extend(corpus("analyses"));
    files.push(corpus_dir().join("imports/main.spectra"));
    files
}

pub fn file_name(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

/// Parses and checks a corpus file with its imports.
pub fn load(path: &Path) -> (SourceMap, CheckedSpec) {
    let (sources, result) = check_file(path, &FsLoader);
    match result {
        Ok(spec) => (sources, spec),
        Err(diags) => {
            let text: Vec<String> = diags.iter().map(|d| d.render(&sources)).collect();
            panic!("{} does not check:\n{}", path.display(), text.join("\n"))
        }
    }
}

pub fn load_spec(path: &Path) -> CheckedSpec {
    load(path).1
}

pub fn check_text(src: &str) -> CheckedSpec {
    let ast = parse(src).unwrap_or_else(|d| panic!("parse error in {src}: {d:?}"));
    check(ast).unwrap_or_else(|d| panic!("check error in {src}: {d:?}"))
}

pub fn kernel(spec: &CheckedSpec) -> KernelSpec {
    lower(spec).unwrap_or_else(|d| panic!("lowering failed: {d:?}"))
}

/// Realizability decided by the symbolic solver.
pub fn gr1_verdict(spec: &CheckedSpec) -> bool {
    let mut p = to_gr1(&kernel(spec));
    solve(&mut p).expect("solver").realizable
}

/// The specification after every AST pass, re-checked.
pub fn desugared(spec: &CheckedSpec) -> CheckedSpec {
    recheck(desugar(spec.ast.clone())).unwrap_or_else(|d| panic!("desugared spec does not check: {d:?}"))
}

/// Realizability decided by the explicit-state oracle on the desugared
/// specification.
pub fn oracle_verdict(spec: &CheckedSpec) -> bool {
    let game = ExplicitGame::from_spec(&desugared(spec)).expect("oracle game");
    solve_explicit(&game).realizable
}

/// Keeps only the user guarantees whose position among the guarantees is in
/// `keep`.
pub fn with_guarantees(spec: &CheckedSpec, keep: &[usize]) -> CheckedSpec {
    let mut ast = spec.ast.clone();
    let mut g = 0;
    ast.elements.retain(|e| {
        if !matches!(e, Element::Guarantee(_)) {
            return true;
        }
        g += 1;
        keep.contains(&(g - 1))
    });
    CheckedSpec { ast, symbols: spec.symbols.clone() }
}

pub fn guarantee_count(spec: &CheckedSpec) -> usize {
    spec.ast.elements.iter().filter(|e| matches!(e, Element::Guarantee(_))).count()
}

/// Typed values of every encoded variable for one assignment of manager
/// variables.
pub fn typed_state(encodings: &[VarEncoding], bits: &[bool]) -> BTreeMap<String, Value> {
    encodings
        .iter()
        .map(|e| {
            let b: Vec<bool> = e.bits.iter().map(|&i| bits[i as usize]).collect();
            let v = e.decode(&b).unwrap_or_else(|| panic!("invalid code {b:?} for `{}`", e.name));
            (e.name.clone(), v)
        })
        .collect()
}

/// The constraints of a desugared specification, split by role and kind.
#[derive(Clone, Debug, Default)]
pub struct Obligations {
    pub asm_ini: Vec<Expr>,
    pub asm_trans: Vec<Expr>,
    pub asm_justice: Vec<Expr>,
    pub gar_ini: Vec<Expr>,
    pub gar_trans: Vec<Expr>,
    pub gar_justice: Vec<Expr>,
}

impl Obligations {
    pub fn of(spec: &CheckedSpec) -> Self {
        let d = desugared(spec);
        let mut o = Obligations::default();
        for e in &d.ast.elements {
            let (c, asm) = match e {
                Element::Assumption(c) => (c, true),
                Element::Guarantee(c) => (c, false),
                _ => continue,
            };
            let slot = match (asm, c.body.kind) {
                (true, TempKind::Ini) => &mut o.asm_ini,
                (true, TempKind::Trans) => &mut o.asm_trans,
                (true, TempKind::AlwEv) => &mut o.asm_justice,
                (false, TempKind::Ini) => &mut o.gar_ini,
                (false, TempKind::Trans) => &mut o.gar_trans,
                (false, TempKind::AlwEv) => &mut o.gar_justice,
                (_, TempKind::Alw) => panic!("`alw` left after desugaring"),
            };
            slot.push(c.body.expr.clone());
        }
        o
    }
}

fn holds_on(e: &Expr, cur: &BTreeMap<String, Value>, nxt: &BTreeMap<String, Value>) -> bool {
    let t = Trace::new(vec![cur.clone(), nxt.clone()]);
    match eval_at(e, &t, 0) {
        Ok(Value::Bool(b)) => b,
        other => panic!("cannot evaluate {}: {other:?}", spectra_core::syntax::print_expr(e)),
    }
}

/// Every expression holds on the state pair.
pub fn all_hold(es: &[Expr], cur: &BTreeMap<String, Value>, nxt: &BTreeMap<String, Value>) -> bool {
    es.iter().all(|e| holds_on(e, cur, nxt))
}

/// The expressions that fail on the state pair, printed.
pub fn failing(es: &[Expr], cur: &BTreeMap<String, Value>, nxt: &BTreeMap<String, Value>) -> Vec<String> {
    es.iter()
        .filter(|e| !holds_on(e, cur, nxt))
        .map(spectra_core::syntax::print_expr)
        .collect()
}

/// A random Boolean formula over `vars` using propositional and past-time
/// operators, as source text.
pub fn random_past_formula(rng: &mut StdRng, vars: &[&str], depth: u32) -> String {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..10) {
            0 => "true".into(),
            1 => "false".into(),
            _ => vars[rng.gen_range(0..vars.len())].to_string(),
        };
    }
    let sub = |rng: &mut StdRng| random_past_formula(rng, vars, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("!({})", sub(rng)),
        1 => format!("({}) & ({})", sub(rng), sub(rng)),
        2 => format!("({}) | ({})", sub(rng), sub(rng)),
        3 => format!("({}) -> ({})", sub(rng), sub(rng)),
        4 => format!("({}) <-> ({})", sub(rng), sub(rng)),
        5 | 6 => format!("Y({})", sub(rng)),
        7 => format!("H({})", sub(rng)),
        8 => format!("O({})", sub(rng)),
        _ => format!("({}) S ({})", sub(rng), sub(rng)),
    }
}

/// A random Boolean formula over variable indices `0..vars`.
#[derive(Clone, Debug)]
pub enum Formula {
    Const(bool),
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn random(rng: &mut StdRng, vars: u32, depth: u32) -> Formula {
        if depth == 0 || rng.gen_ratio(1, 5) {
            return if rng.gen_ratio(1, 10) {
                Formula::Const(rng.gen())
            } else {
                Formula::Var(rng.gen_range(0..vars))
            };
        }
        let op = rng.gen_range(0..6);
        let mut sub = || Box::new(Formula::random(rng, vars, depth - 1));
        match op {
            0 => Formula::Not(sub()),
            1 => Formula::And(sub(), sub()),
            2 => Formula::Or(sub(), sub()),
            3 => Formula::Xor(sub(), sub()),
            4 => Formula::Imp(sub(), sub()),
            _ => Formula::Iff(sub(), sub()),
        }
    }

    pub fn eval(&self, a: &[bool]) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(i) => a[*i as usize],
            Formula::Not(f) => !f.eval(a),
            Formula::And(f, g) => f.eval(a) && g.eval(a),
            Formula::Or(f, g) => f.eval(a) || g.eval(a),
            Formula::Xor(f, g) => f.eval(a) != g.eval(a),
            Formula::Imp(f, g) => !f.eval(a) || g.eval(a),
            Formula::Iff(f, g) => f.eval(a) == g.eval(a),
        }
    }

    /// Truth table over `vars` variables, row `r` assigning bit `i` of `r`
    /// to variable `i`.
    pub fn truth_table(&self, vars: u32) -> Vec<bool> {
        (0..1u32 << vars)
            .map(|r| {
                let a: Vec<bool> = (0..vars).map(|i| r >> i & 1 == 1).collect();
                self.eval(&a)
            })
            .collect()
    }

    /// An equivalent formula obtained by random rewriting.
    pub fn rewrite(&self, rng: &mut StdRng) -> Formula {
        use Formula::*;
        let b = |f: Formula| Box::new(f);
        match self {
            Const(v) => {
                if rng.gen() {
                    Not(b(Const(!v)))
                } else {
                    Const(*v)
                }
            }
            Var(i) => {
                if rng.gen_ratio(1, 3) {
                    Not(b(Not(b(Var(*i)))))
                } else {
                    Var(*i)
                }
            }
            Not(f) => match f.as_ref() {
                And(x, y) if rng.gen() => Or(b(Not(b(x.rewrite(rng)))), b(Not(b(y.rewrite(rng))))),
                Or(x, y) if rng.gen() => And(b(Not(b(x.rewrite(rng)))), b(Not(b(y.rewrite(rng))))),
                _ => Not(b(f.rewrite(rng))),
            },
            And(f, g) => {
                let (f, g) = (f.rewrite(rng), g.rewrite(rng));
                if rng.gen() {
                    And(b(g), b(f))
                } else {
                    Not(b(Or(b(Not(b(f))), b(Not(b(g))))))
                }
            }
            Or(f, g) => {
                let (f, g) = (f.rewrite(rng), g.rewrite(rng));
                if rng.gen() {
                    Or(b(g), b(f))
                } else {
                    Imp(b(Not(b(f))), b(g))
                }
            }
            Xor(f, g) => {
                let (f, g) = (f.rewrite(rng), g.rewrite(rng));
                if rng.gen() {
                    Not(b(Iff(b(f), b(g))))
                } else {
                    Xor(b(g), b(f))
                }
            }
            Imp(f, g) => {
                let (f, g) = (f.rewrite(rng), g.rewrite(rng));
                if rng.gen() {
                    Or(b(Not(b(f))), b(g))
                } else {
                    Imp(b(Not(b(g))), b(Not(b(f))))
                }
            }
            Iff(f, g) => {
                let (f, g) = (f.rewrite(rng), g.rewrite(rng));
                if rng.gen() {
                    Or(b(And(b(f.clone()), b(g.clone()))), b(And(b(Not(b(f))), b(Not(b(g))))))
                } else {
                    Iff(b(g), b(f))
                }
            }
        }
    }
}

/// Builds the decision diagram of `f`, variable `i` at level `2i`.
pub fn formula_bdd(m: &mut spectra_core::bdd::BddManager, vars: &[spectra_core::bdd::VarId], f: &Formula) -> spectra_core::bdd::BddRef {
    match f {
        Formula::Const(b) => m.constant(*b),
        Formula::Var(i) => m.var(vars[*i as usize]),
        Formula::Not(x) => {
            let x = formula_bdd(m, vars, x);
            m.not(x)
        }
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Xor(x, y) | Formula::Imp(x, y) | Formula::Iff(x, y) => {
            let a = formula_bdd(m, vars, x);
            let b = formula_bdd(m, vars, y);
            match f {
                Formula::And(..) => m.and(a, b),
                Formula::Or(..) => m.or(a, b),
                Formula::Xor(..) => m.xor(a, b),
                Formula::Imp(..) => m.imp(a, b),
                _ => m.iff(a, b),
            }
        }
    }
}
