//! Explicit GR(1) games over enumerated typed states.

use std::collections::HashMap;

use crate::lowering::Value;
use crate::semcheck::{CheckedSpec, Ty};
use crate::syntax::{Element, Expr, TempKind, VarKind};

use super::{as_bool, eval_at, OracleError, Valuation};

/// Largest number of states the oracle enumerates.
pub const MAX_STATES: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVar {
    pub name: String,
    pub kind: VarKind,
    pub values: Vec<Value>,
}

/// A game with every state enumerated. States are full assignments to the
/// declared variables.
#[derive(Clone, Debug)]
pub struct ExplicitGame {
    pub vars: Vec<OracleVar>,
    pub states: Vec<Vec<Value>>,
    pub theta_e: Vec<bool>,
    pub theta_s: Vec<bool>,
    /// For each state, one entry per legal next input: the successor states
    /// with that input that the system guarantees allow.
    pub moves: Vec<Vec<Vec<usize>>>,
    pub je: Vec<Vec<bool>>,
    pub js: Vec<Vec<bool>>,
    /// Index of each state's input part.
    pub input_of: Vec<usize>,
}

struct Pair<'a> {
    index: &'a HashMap<String, usize>,
    cur: &'a [Value],
    nxt: &'a [Value],
}

impl Valuation for Pair<'_> {
    fn len(&self) -> usize {
        2
    }

    fn value(&self, position: usize, name: &str) -> Option<Value> {
        let i = *self.index.get(name)?;
        Some(if position == 0 { &self.cur[i] } else { &self.nxt[i] }.clone())
    }

    fn successor(&self, position: usize) -> Option<usize> {
        (position == 0).then_some(1)
    }
}

fn domain(ty: &Ty) -> Vec<Value> {
    match ty {
        Ty::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Ty::Enum(vals) => vals.iter().map(|v| Value::Enum(v.clone())).collect(),
        Ty::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
    }
}

#[derive(Default)]
struct Side<'a> {
    ini: Vec<&'a Expr>,
    trans: Vec<&'a Expr>,
    alw: Vec<&'a Expr>,
    alw_ev: Vec<&'a Expr>,
}

impl ExplicitGame {
    /// Builds the game of a specification whose remaining constraints are
    /// `ini`, `trans`, `alw` and `alwEv` assumptions and guarantees over
    /// declared variables (no patterns, monitors or past-time operators).
    pub fn from_spec(spec: &CheckedSpec) -> Result<Self, OracleError> {
        let mut vars = Vec::new();
        let (mut asm, mut gar) = (Side::default(), Side::default());
        for e in &spec.ast.elements {
            match e {
                Element::Var(v) => {
                    let ty = spec
                        .symbols
                        .var_type(&v.name.name)
                        .ok_or_else(|| OracleError::Unbound(v.name.name.clone()))?;
                    vars.push(OracleVar { name: v.name.name.clone(), kind: v.kind, values: domain(ty) });
                }
                Element::Assumption(c) | Element::Guarantee(c) => {
                    let side = if matches!(e, Element::Assumption(_)) { &mut asm } else { &mut gar };
                    match c.body.kind {
                        TempKind::Ini => side.ini.push(&c.body.expr),
                        TempKind::Trans => side.trans.push(&c.body.expr),
                        TempKind::Alw => side.alw.push(&c.body.expr),
                        TempKind::AlwEv => side.alw_ev.push(&c.body.expr),
                    }
                }
                Element::Monitor(m) => return Err(OracleError::Unsupported(format!("monitor {}", m.name.name))),
                Element::Pattern(_) | Element::Predicate(_) | Element::Define(_) | Element::TypeDef(_) => {}
            }
        }
        let total = vars.iter().fold(1u128, |acc, v| acc * v.values.len() as u128);
        if total > MAX_STATES as u128 {
            return Err(OracleError::TooLarge(total));
        }
        let mut states: Vec<Vec<Value>> = vec![Vec::new()];
        for v in &vars {
            states = states
                .into_iter()
                .flat_map(|s| {
                    v.values.iter().map(move |x| {
                        let mut t = s.clone();
                        t.push(x.clone());
                        t
                    })
                })
                .collect();
        }
        let index: HashMap<String, usize> = vars.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
        let env_pos: Vec<usize> = (0..vars.len()).filter(|&i| vars[i].kind == VarKind::Env).collect();
        let mut input_keys: HashMap<Vec<Value>, usize> = HashMap::new();
        let input_of: Vec<usize> = states
            .iter()
            .map(|s| {
                let key: Vec<Value> = env_pos.iter().map(|&i| s[i].clone()).collect();
                let n = input_keys.len();
                *input_keys.entry(key).or_insert(n)
            })
            .collect();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); input_keys.len()];
        for (s, &g) in input_of.iter().enumerate() {
            groups[g].push(s);
        }

        let holds = |e: &Expr, cur: &[Value], nxt: &[Value], at: usize| -> Result<bool, OracleError> {
            let p = Pair { index: &index, cur, nxt };
            as_bool(eval_at(e, &p, at)?, e)
        };
        let all = |es: &[&Expr], cur: &[Value], nxt: &[Value], at: usize| -> Result<bool, OracleError> {
            for e in es {
                if !holds(e, cur, nxt, at)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let initial = |side: &Side, s: &[Value]| -> Result<bool, OracleError> {
            Ok(all(&side.ini, s, s, 0)? && all(&side.alw, s, s, 0)?)
        };
        let step = |side: &Side, s: &[Value], t: &[Value]| -> Result<bool, OracleError> {
            Ok(all(&side.trans, s, t, 0)? && all(&side.alw, s, t, 1)?)
        };

        let mut theta_e = Vec::with_capacity(states.len());
        let mut theta_s = Vec::with_capacity(states.len());
        let mut je = vec![Vec::with_capacity(states.len()); asm.alw_ev.len().max(1)];
        let mut js = vec![Vec::with_capacity(states.len()); gar.alw_ev.len().max(1)];
        for s in &states {
            theta_e.push(initial(&asm, s)?);
            theta_s.push(initial(&gar, s)?);
            for (k, slot) in je.iter_mut().enumerate() {
                slot.push(match asm.alw_ev.get(k) {
                    Some(e) => holds(e, s, s, 0)?,
                    None => true,
                });
            }
            for (k, slot) in js.iter_mut().enumerate() {
                slot.push(match gar.alw_ev.get(k) {
                    Some(e) => holds(e, s, s, 0)?,
                    None => true,
                });
            }
        }
        let mut moves = Vec::with_capacity(states.len());
        for s in &states {
            let mut per_input = Vec::new();
            for group in &groups {
                if !step(&asm, s, &states[group[0]])? {
                    continue;
                }
                let mut succ = Vec::new();
                for &t in group {
                    if step(&gar, s, &states[t])? {
                        succ.push(t);
                    }
                }
                per_input.push(succ);
            }
            moves.push(per_input);
        }
        Ok(ExplicitGame { vars, states, theta_e, theta_s, moves, je, js, input_of })
    }

    /// States from which the system can force the next state into `v`.
    pub fn cpre(&self, v: &[bool]) -> Vec<bool> {
        self.moves
            .iter()
            .map(|inputs| inputs.iter().all(|succ| succ.iter().any(|&t| v[t])))
            .collect()
    }

    /// Index of the state with the given values, in declaration order.
    pub fn state_index(&self, values: &[Value]) -> Option<usize> {
        self.states.iter().position(|s| s == values)
    }
}

/// Winning region and verdict of an explicit game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSolution {
    pub realizable: bool,
    pub winning: Vec<bool>,
}

fn or(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}

fn and(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

/// Solves the game by the same nested fixpoint as the symbolic solver, over
/// explicit state sets, then applies the strict-realizability initial check.
pub fn solve_explicit(g: &ExplicitGame) -> ExplicitSolution {
    let n = g.states.len();
    let mut z = vec![true; n];
    loop {
        let z_old = z.clone();
        for js in &g.js {
            let start = and(js, &g.cpre(&z));
            let mut y = vec![false; n];
            loop {
                let base = or(&start, &g.cpre(&y));
                let mut y_new = vec![false; n];
                for je in &g.je {
                    let not_je: Vec<bool> = je.iter().map(|b| !b).collect();
                    let mut x = z.clone();
                    loop {
                        let x_new = or(&base, &and(&not_je, &g.cpre(&x)));
                        if x_new == x {
                            break;
                        }
                        x = x_new;
                    }
                    y_new = or(&y_new, &x);
                }
                if y_new == y {
                    break;
                }
                y = y_new;
            }
            z = y;
        }
        if z == z_old {
            break;
        }
    }
    let groups = g.input_of.iter().copied().max().map_or(0, |m| m + 1);
    let realizable = (0..groups).all(|input| {
        let members: Vec<usize> = (0..n).filter(|&s| g.input_of[s] == input).collect();
        !g.theta_e[members[0]] || members.iter().any(|&s| g.theta_s[s] && z[s])
    });
    ExplicitSolution { realizable, winning: z }
}
