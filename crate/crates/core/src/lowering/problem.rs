//! The GR(1) game of a kernel specification, as BDDs.

use std::collections::HashMap;

use crate::bdd::{BddManager, BddRef, VarId};
use crate::syntax::{TempKind, VarKind};

use super::kernel::{KernelSpec, Role};
use super::kexpr::{KExpr, KNode};

/// Initial conditions, transition relations and justice goals of both
/// players. Kernel variable `i` is manager variable `VarId(i)`.
#[derive(Debug)]
pub struct Gr1Problem {
    pub manager: BddManager,
    pub env: Vec<VarId>,
    pub sys: Vec<VarId>,
    pub theta_e: BddRef,
    pub theta_s: BddRef,
    pub rho_e: BddRef,
    pub rho_s: BddRef,
    /// Environment justice goals; never empty.
    pub je: Vec<BddRef>,
    /// System justice goals; never empty.
    pub js: Vec<BddRef>,
    /// The BDD of each kernel constraint, in kernel order.
    pub constraint_bdds: Vec<BddRef>,
}

impl Gr1Problem {
    /// Every BDD the problem holds, for garbage collection.
    pub fn roots(&self) -> Vec<BddRef> {
        let mut r = vec![self.theta_e, self.theta_s, self.rho_e, self.rho_s];
        r.extend(&self.je);
        r.extend(&self.js);
        r.extend(&self.constraint_bdds);
        r
    }
}

/// Builds the BDD of a kernel expression.
pub fn kexpr_to_bdd(m: &mut BddManager, e: &KExpr, memo: &mut HashMap<usize, BddRef>) -> BddRef {
    if let Some(&r) = memo.get(&e.id()) {
        return r;
    }
    let r = match e.node() {
        KNode::Const(b) => m.constant(*b),
        KNode::Var { idx, next } => {
            if *next {
                m.primed(VarId(*idx))
            } else {
                m.var(VarId(*idx))
            }
        }
        KNode::Not(a) => {
            let a = kexpr_to_bdd(m, a, memo);
            m.not(a)
        }
        KNode::And(a, b) | KNode::Or(a, b) | KNode::Iff(a, b) => {
            let x = kexpr_to_bdd(m, a, memo);
            let y = kexpr_to_bdd(m, b, memo);
            match e.node() {
                KNode::And(..) => m.and(x, y),
                KNode::Or(..) => m.or(x, y),
                _ => m.iff(x, y),
            }
        }
    };
    memo.insert(e.id(), r);
    r
}

/// Translates a kernel specification into its GR(1) game.
pub fn to_gr1(kernel: &KernelSpec) -> Gr1Problem {
    let mut m = BddManager::new();
    for _ in &kernel.vars {
        m.new_var();
    }
    let mut memo = HashMap::new();
    let constraint_bdds: Vec<BddRef> = kernel
        .constraints
        .iter()
        .map(|c| kexpr_to_bdd(&mut m, &c.expr, &mut memo))
        .collect();
    let pick = |role: Role, kind: TempKind| -> Vec<BddRef> {
        kernel
            .constraints
            .iter()
            .zip(&constraint_bdds)
            .filter(|(c, _)| c.role == role && c.kind == kind)
            .map(|(_, b)| *b)
            .collect()
    };
    let theta_e = m.and_all(pick(Role::Assumption, TempKind::Ini));
    let theta_s = m.and_all(pick(Role::Guarantee, TempKind::Ini));
    let rho_e = m.and_all(pick(Role::Assumption, TempKind::Trans));
    let rho_s = m.and_all(pick(Role::Guarantee, TempKind::Trans));
    let or_true = |v: Vec<BddRef>| if v.is_empty() { vec![BddRef::TRUE] } else { v };
    let je = or_true(pick(Role::Assumption, TempKind::AlwEv));
    let js = or_true(pick(Role::Guarantee, TempKind::AlwEv));
    let vars_of = |kind: VarKind| -> Vec<VarId> {
        (0..kernel.vars.len() as u32)
            .filter(|&i| kernel.vars[i as usize].kind == kind)
            .map(VarId)
            .collect()
    };
    Gr1Problem {
        env: vars_of(VarKind::Env),
        sys: vars_of(VarKind::Sys),
        manager: m,
        theta_e,
        theta_s,
        rho_e,
        rho_s,
        je,
        js,
        constraint_bdds,
    }
}
