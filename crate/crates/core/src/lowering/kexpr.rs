//! Kernel expressions: a shared DAG over Boolean variables and their next-state
//! copies. Constructors fold constants, so circuits built from constant bits
//! stay small.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum KNode {
    Const(bool),
    /// Kernel variable `idx`, read in the next state when `next` is set.
    Var { idx: u32, next: bool },
    Not(KExpr),
    And(KExpr, KExpr),
    Or(KExpr, KExpr),
    Iff(KExpr, KExpr),
}

/// Handle to a shared kernel expression node.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KExpr(Rc<KNode>);

impl fmt::Debug for KExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            KNode::Const(b) => write!(f, "{b}"),
            KNode::Var { idx, next: false } => write!(f, "v{idx}"),
            KNode::Var { idx, next: true } => write!(f, "v{idx}'"),
            KNode::Not(a) => write!(f, "!{a:?}"),
            KNode::And(a, b) => write!(f, "({a:?} & {b:?})"),
            KNode::Or(a, b) => write!(f, "({a:?} | {b:?})"),
            KNode::Iff(a, b) => write!(f, "({a:?} <-> {b:?})"),
        }
    }
}

impl KExpr {
    fn new(node: KNode) -> Self {
        KExpr(Rc::new(node))
    }

    pub fn node(&self) -> &KNode {
        &self.0
    }

    /// Identity of the shared node, used as a memo key.
    pub fn id(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }

    pub fn constant(b: bool) -> Self {
        Self::new(KNode::Const(b))
    }

    pub fn tt() -> Self {
        Self::constant(true)
    }

    pub fn ff() -> Self {
        Self::constant(false)
    }

    pub fn var(idx: u32, next: bool) -> Self {
        Self::new(KNode::Var { idx, next })
    }

    pub fn as_const(&self) -> Option<bool> {
        match self.node() {
            KNode::Const(b) => Some(*b),
            _ => None,
        }
    }

    /// Cheap identity test: shared node, or equal leaves.
    fn same(&self, other: &KExpr) -> bool {
        if Rc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (KNode::Var { .. }, KNode::Var { .. }) | (KNode::Const(_), KNode::Const(_)) => self.0 == other.0,
            _ => false,
        }
    }

    pub fn not(&self) -> Self {
        match self.node() {
            KNode::Const(b) => Self::constant(!b),
            KNode::Not(a) => a.clone(),
            _ => Self::new(KNode::Not(self.clone())),
        }
    }

    pub fn and(&self, other: &KExpr) -> Self {
        match (self.as_const(), other.as_const()) {
            (Some(false), _) | (_, Some(false)) => Self::ff(),
            (Some(true), _) => other.clone(),
            (_, Some(true)) => self.clone(),
            _ if self.same(other) => self.clone(),
            _ => Self::new(KNode::And(self.clone(), other.clone())),
        }
    }

    pub fn or(&self, other: &KExpr) -> Self {
        match (self.as_const(), other.as_const()) {
            (Some(true), _) | (_, Some(true)) => Self::tt(),
            (Some(false), _) => other.clone(),
            (_, Some(false)) => self.clone(),
            _ if self.same(other) => self.clone(),
            _ => Self::new(KNode::Or(self.clone(), other.clone())),
        }
    }

    pub fn iff(&self, other: &KExpr) -> Self {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Self::constant(a == b),
            (Some(true), _) => other.clone(),
            (_, Some(true)) => self.clone(),
            (Some(false), _) => other.not(),
            (_, Some(false)) => self.not(),
            _ if self.same(other) => Self::tt(),
            _ => Self::new(KNode::Iff(self.clone(), other.clone())),
        }
    }

    pub fn xor(&self, other: &KExpr) -> Self {
        self.iff(other).not()
    }

    pub fn implies(&self, other: &KExpr) -> Self {
        self.not().or(other)
    }

    /// `if c then t else e`.
    pub fn ite(c: &KExpr, t: &KExpr, e: &KExpr) -> Self {
        match c.as_const() {
            Some(true) => t.clone(),
            Some(false) => e.clone(),
            None if t.same(e) => t.clone(),
            None => c.and(t).or(&c.not().and(e)),
        }
    }

    pub fn and_all<'a>(items: impl IntoIterator<Item = &'a KExpr>) -> Self {
        items.into_iter().fold(Self::tt(), |acc, x| acc.and(x))
    }

    pub fn or_all<'a>(items: impl IntoIterator<Item = &'a KExpr>) -> Self {
        items.into_iter().fold(Self::ff(), |acc, x| acc.or(x))
    }

    /// Rewrites every variable to its next-state copy. Expressions that
    /// already read the next state are returned unchanged in those leaves.
    pub fn primed(&self) -> Self {
        let mut memo = HashMap::new();
        self.prime_rec(&mut memo)
    }

    fn prime_rec(&self, memo: &mut HashMap<usize, KExpr>) -> KExpr {
        if let Some(r) = memo.get(&self.id()) {
            return r.clone();
        }
        let r = match self.node() {
            KNode::Const(_) => self.clone(),
            KNode::Var { idx, .. } => KExpr::var(*idx, true),
            KNode::Not(a) => a.prime_rec(memo).not(),
            KNode::And(a, b) => a.prime_rec(memo).and(&b.prime_rec(memo)),
            KNode::Or(a, b) => a.prime_rec(memo).or(&b.prime_rec(memo)),
            KNode::Iff(a, b) => a.prime_rec(memo).iff(&b.prime_rec(memo)),
        };
        memo.insert(self.id(), r.clone());
        r
    }

    /// Evaluates under current-state values `cur` and next-state values `nxt`.
    pub fn eval(&self, cur: &[bool], nxt: &[bool]) -> bool {
        let mut memo = HashMap::new();
        self.eval_rec(cur, nxt, &mut memo)
    }

    fn eval_rec(&self, cur: &[bool], nxt: &[bool], memo: &mut HashMap<usize, bool>) -> bool {
        if let KNode::Var { idx, next } = self.node() {
            return if *next { nxt[*idx as usize] } else { cur[*idx as usize] };
        }
        if let Some(v) = memo.get(&self.id()) {
            return *v;
        }
        let v = match self.node() {
            KNode::Const(b) => *b,
            KNode::Var { .. } => unreachable!(),
            KNode::Not(a) => !a.eval_rec(cur, nxt, memo),
            KNode::And(a, b) => a.eval_rec(cur, nxt, memo) && b.eval_rec(cur, nxt, memo),
            KNode::Or(a, b) => a.eval_rec(cur, nxt, memo) || b.eval_rec(cur, nxt, memo),
            KNode::Iff(a, b) => a.eval_rec(cur, nxt, memo) == b.eval_rec(cur, nxt, memo),
        };
        memo.insert(self.id(), v);
        v
    }

    /// Calls `f(idx, next)` for every variable leaf, once per shared node.
    pub fn for_each_var(&self, f: &mut impl FnMut(u32, bool)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.node() {
                KNode::Const(_) => {}
                KNode::Var { idx, next } => f(*idx, *next),
                KNode::Not(a) => stack.push(a.clone()),
                KNode::And(a, b) | KNode::Or(a, b) | KNode::Iff(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
    }

    pub fn mentions_next(&self) -> bool {
        let mut found = false;
        self.for_each_var(&mut |_, next| found |= next);
        found
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.node() {
                KNode::Not(a) => stack.push(a.clone()),
                KNode::And(a, b) | KNode::Or(a, b) | KNode::Iff(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                _ => {}
            }
        }
        seen.len()
    }

    /// Size of the expression written out as a tree, saturating at `cap`.
    pub fn tree_size(&self, cap: u64) -> u64 {
        fn rec(e: &KExpr, cap: u64, memo: &mut HashMap<usize, u64>) -> u64 {
            if let Some(v) = memo.get(&e.id()) {
                return *v;
            }
            let v = match e.node() {
                KNode::Const(_) | KNode::Var { .. } => 1,
                KNode::Not(a) => 1 + rec(a, cap, memo),
                KNode::And(a, b) | KNode::Or(a, b) | KNode::Iff(a, b) => {
                    1 + rec(a, cap, memo) + rec(b, cap, memo)
                }
            }
            .min(cap);
            memo.insert(e.id(), v);
            v
        }
        rec(self, cap, &mut HashMap::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding() {
        let x = KExpr::var(0, false);
        assert_eq!(x.and(&KExpr::tt()), x);
        assert_eq!(x.and(&KExpr::ff()).as_const(), Some(false));
        assert_eq!(x.not().not(), x);
        assert_eq!(x.iff(&x).as_const(), Some(true));
        assert_eq!(x.or(&x), x);
    }

    #[test]
    fn evaluation_and_priming() {
        let x = KExpr::var(0, false);
        let y = KExpr::var(1, false);
        let f = x.and(&y.not()).primed();
        assert!(f.mentions_next());
        assert!(f.eval(&[false, false], &[true, false]));
        assert!(!f.eval(&[true, false], &[true, true]));
    }
}
