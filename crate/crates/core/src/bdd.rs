//! Reduced ordered binary decision diagrams.
//!
//! Every logical variable owns two adjacent levels: `2 * v` for the current
//! (unprimed) copy and `2 * v + 1` for the next-state (primed) copy. With this
//! interleaving, priming a function over unprimed variables only shifts every
//! node one level down, which keeps `rename_prime` and `rename_unprime` linear.
//!
//! Handles are plain indices into the manager's node table. Garbage collection
//! is explicit: callers pass the set of live roots to [`BddManager::gc`] at a
//! point where no other handle is in use.

use std::collections::HashMap;
use std::fmt;

/// Position of a variable in the order. Even levels are unprimed, odd primed.
pub type Level = u32;

const TERMINAL_LEVEL: Level = u32::MAX;
const FREED_LEVEL: Level = u32::MAX - 1;

/// Default node count that triggers collection (overridable via
/// `SPECTRA_BDD_NODES`).
pub const DEFAULT_NODE_LIMIT: usize = 1_000_000;

/// A logical variable with an unprimed and a primed twin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn level(self) -> Level {
        self.0 * 2
    }

    pub fn primed_level(self) -> Level {
        self.0 * 2 + 1
    }
}

/// Handle to a node; only meaningful together with the manager that made it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BddRef(u32);

impl BddRef {
    pub const FALSE: BddRef = BddRef(0);
    pub const TRUE: BddRef = BddRef(1);

    pub fn is_false(self) -> bool {
        self == Self::FALSE
    }

    pub fn is_true(self) -> bool {
        self == Self::TRUE
    }

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for BddRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "BddRef(0)"),
            1 => write!(f, "BddRef(1)"),
            n => write!(f, "BddRef(#{n})"),
        }
    }
}

/// Binary Boolean operators supported by [`BddManager::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Imp,
    Iff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Node {
    level: Level,
    low: u32,
    high: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum CacheOp {
    Apply(BinOp),
    Not,
    Ite,
    Exists,
    AndExists,
    Prime,
    Unprime,
}

/// Node store, unique table and operation cache.
pub struct BddManager {
    nodes: Vec<Node>,
    unique: HashMap<(Level, u32, u32), u32>,
    free: Vec<u32>,
    cache: HashMap<(CacheOp, u32, u32, u32), u32>,
    num_vars: u32,
    node_limit: usize,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for BddManager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BddManager")
            .field("vars", &self.num_vars)
            .field("live_nodes", &self.node_count())
            .finish()
    }
}

impl BddManager {
    pub fn new() -> Self {
        let terminal = |v| Node {
            level: TERMINAL_LEVEL,
            low: v,
            high: v,
        };
        let node_limit = std::env::var("SPECTRA_BDD_NODES")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_NODE_LIMIT);
        BddManager {
            nodes: vec![terminal(0), terminal(1)],
            unique: HashMap::new(),
            free: Vec::new(),
            cache: HashMap::new(),
            num_vars: 0,
            node_limit,
        }
    }

    /// Allocates a fresh variable (and its primed twin) at the bottom of the order.
    pub fn new_var(&mut self) -> VarId {
        let v = VarId(self.num_vars);
        self.num_vars += 1;
        v
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn node_limit(&self) -> usize {
        self.node_limit
    }

    pub fn set_node_limit(&mut self, limit: usize) {
        self.node_limit = limit;
    }

    /// Number of live internal (non-terminal) nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 2 - self.free.len()
    }

    pub fn constant(&self, value: bool) -> BddRef {
        if value {
            BddRef::TRUE
        } else {
            BddRef::FALSE
        }
    }

    pub fn var(&mut self, v: VarId) -> BddRef {
        self.level_var(v.level())
    }

    pub fn primed(&mut self, v: VarId) -> BddRef {
        self.level_var(v.primed_level())
    }

    /// The positive literal of an arbitrary level.
    pub fn level_var(&mut self, level: Level) -> BddRef {
        assert!(level < self.num_vars * 2, "level {level} out of range");
        self.make(level, 0, 1)
    }

    /// Literal at `level` with the given polarity.
    pub fn literal(&mut self, level: Level, value: bool) -> BddRef {
        assert!(level < self.num_vars * 2, "level {level} out of range");
        if value {
            self.make(level, 0, 1)
        } else {
            self.make(level, 1, 0)
        }
    }

    /// Top level of a node; `None` for terminals.
    pub fn level(&self, f: BddRef) -> Option<Level> {
        let n = self.node(f.0);
        (n.level != TERMINAL_LEVEL).then_some(n.level)
    }

    /// `(level, low, high)` of an internal node.
    pub fn children(&self, f: BddRef) -> Option<(Level, BddRef, BddRef)> {
        let n = self.node(f.0);
        (n.level != TERMINAL_LEVEL).then_some((n.level, BddRef(n.low), BddRef(n.high)))
    }

    /// Builds a node from explicit parts, validating the order. Used when
    /// reconstructing diagrams from a serialized node table.
    pub fn mk(&mut self, level: Level, low: BddRef, high: BddRef) -> Option<BddRef> {
        if level >= self.num_vars * 2 {
            return None;
        }
        for child in [low, high] {
            if !self.is_live(child) {
                return None;
            }
            if self.node(child.0).level <= level {
                return None;
            }
        }
        Some(self.make(level, low.0, high.0))
    }

    fn is_live(&self, f: BddRef) -> bool {
        (f.0 as usize) < self.nodes.len() && self.nodes[f.0 as usize].level != FREED_LEVEL
    }

    #[inline]
    fn node(&self, id: u32) -> Node {
        self.nodes[id as usize]
    }

    fn make(&mut self, level: Level, low: u32, high: u32) -> BddRef {
        BddRef(self.make_raw(level, low, high))
    }

    fn make_raw(&mut self, level: Level, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        if let Some(&id) = self.unique.get(&(level, low, high)) {
            return id;
        }
        let node = Node { level, low, high };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        self.unique.insert((level, low, high), id);
        id
    }

    pub fn not(&mut self, f: BddRef) -> BddRef {
        BddRef(self.not_rec(f.0))
    }

    fn not_rec(&mut self, f: u32) -> u32 {
        match f {
            0 => return 1,
            1 => return 0,
            _ => {}
        }
        let key = (CacheOp::Not, f, 0, 0);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let n = self.node(f);
        let lo = self.not_rec(n.low);
        let hi = self.not_rec(n.high);
        let r = self.make_raw(n.level, lo, hi);
        self.cache.insert(key, r);
        r
    }

    pub fn apply(&mut self, op: BinOp, a: BddRef, b: BddRef) -> BddRef {
        BddRef(self.apply_rec(op, a.0, b.0))
    }

    pub fn and(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BinOp::And, a, b)
    }

    pub fn or(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BinOp::Or, a, b)
    }

    pub fn xor(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BinOp::Xor, a, b)
    }

    pub fn imp(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BinOp::Imp, a, b)
    }

    pub fn iff(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BinOp::Iff, a, b)
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = BddRef>) -> BddRef {
        items
            .into_iter()
            .fold(BddRef::TRUE, |acc, f| self.and(acc, f))
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = BddRef>) -> BddRef {
        items
            .into_iter()
            .fold(BddRef::FALSE, |acc, f| self.or(acc, f))
    }

    fn apply_terminal(&mut self, op: BinOp, a: u32, b: u32) -> Option<u32> {
        use BinOp::*;
        let r = match op {
            And => match (a, b) {
                (0, _) | (_, 0) => 0,
                (1, x) | (x, 1) => x,
                _ if a == b => a,
                _ => return None,
            },
            Or => match (a, b) {
                (1, _) | (_, 1) => 1,
                (0, x) | (x, 0) => x,
                _ if a == b => a,
                _ => return None,
            },
            Xor => match (a, b) {
                _ if a == b => 0,
                (0, x) | (x, 0) => x,
                (1, x) | (x, 1) => self.not_rec(x),
                _ => return None,
            },
            Imp => match (a, b) {
                (0, _) | (_, 1) => 1,
                (1, x) => x,
                _ if a == b => 1,
                (x, 0) => self.not_rec(x),
                _ => return None,
            },
            Iff => match (a, b) {
                _ if a == b => 1,
                (1, x) | (x, 1) => x,
                (0, x) | (x, 0) => self.not_rec(x),
                _ => return None,
            },
        };
        Some(r)
    }

    fn apply_rec(&mut self, op: BinOp, a: u32, b: u32) -> u32 {
        if let Some(r) = self.apply_terminal(op, a, b) {
            return r;
        }
        let (a, b) = match op {
            BinOp::Imp => (a, b),
            _ if a > b => (b, a),
            _ => (a, b),
        };
        let key = (CacheOp::Apply(op), a, b, 0);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let na = self.node(a);
        let nb = self.node(b);
        let top = na.level.min(nb.level);
        let (a0, a1) = if na.level == top { (na.low, na.high) } else { (a, a) };
        let (b0, b1) = if nb.level == top { (nb.low, nb.high) } else { (b, b) };
        let lo = self.apply_rec(op, a0, b0);
        let hi = self.apply_rec(op, a1, b1);
        let r = self.make_raw(top, lo, hi);
        self.cache.insert(key, r);
        r
    }

    /// If-then-else: `(f & g) | (!f & h)`.
    pub fn ite(&mut self, f: BddRef, g: BddRef, h: BddRef) -> BddRef {
        BddRef(self.ite_rec(f.0, g.0, h.0))
    }

    fn ite_rec(&mut self, f: u32, g: u32, h: u32) -> u32 {
        match (f, g, h) {
            (1, g, _) => return g,
            (0, _, h) => return h,
            (f, 1, 0) => return f,
            (f, 0, 1) => return self.not_rec(f),
            (_, g, h) if g == h => return g,
            _ => {}
        }
        let key = (CacheOp::Ite, f, g, h);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let (nf, ng, nh) = (self.node(f), self.node(g), self.node(h));
        let top = nf.level.min(ng.level).min(nh.level);
        let split = |n: Node, id: u32| {
            if n.level == top {
                (n.low, n.high)
            } else {
                (id, id)
            }
        };
        let (f0, f1) = split(nf, f);
        let (g0, g1) = split(ng, g);
        let (h0, h1) = split(nh, h);
        let lo = self.ite_rec(f0, g0, h0);
        let hi = self.ite_rec(f1, g1, h1);
        let r = self.make_raw(top, lo, hi);
        self.cache.insert(key, r);
        r
    }

    /// Positive cube (conjunction) of the given levels, used as a variable set
    /// for quantification.
    pub fn cube(&mut self, levels: &[Level]) -> BddRef {
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut r = 1;
        for &l in sorted.iter().rev() {
            assert!(l < self.num_vars * 2, "level {l} out of range");
            r = self.make_raw(l, 0, r);
        }
        BddRef(r)
    }

    pub fn exists(&mut self, cube: BddRef, f: BddRef) -> BddRef {
        BddRef(self.exists_rec(f.0, cube.0))
    }

    pub fn forall(&mut self, cube: BddRef, f: BddRef) -> BddRef {
        let nf = self.not(f);
        let e = self.exists(cube, nf);
        self.not(e)
    }

    fn exists_rec(&mut self, f: u32, mut cube: u32) -> u32 {
        if f < 2 {
            return f;
        }
        let nf = self.node(f);
        while cube > 1 && self.node(cube).level < nf.level {
            cube = self.node(cube).high;
        }
        if cube == 1 {
            return f;
        }
        let key = (CacheOp::Exists, f, cube, 0);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let nc = self.node(cube);
        let r = if nc.level == nf.level {
            let lo = self.exists_rec(nf.low, nc.high);
            if lo == 1 {
                1
            } else {
                let hi = self.exists_rec(nf.high, nc.high);
                self.apply_rec(BinOp::Or, lo, hi)
            }
        } else {
            let lo = self.exists_rec(nf.low, cube);
            let hi = self.exists_rec(nf.high, cube);
            self.make_raw(nf.level, lo, hi)
        };
        self.cache.insert(key, r);
        r
    }

    /// Relational product `exists cube. (f & g)` without building the conjunction.
    pub fn and_exists(&mut self, cube: BddRef, f: BddRef, g: BddRef) -> BddRef {
        BddRef(self.and_exists_rec(f.0, g.0, cube.0))
    }

    fn and_exists_rec(&mut self, f: u32, g: u32, mut cube: u32) -> u32 {
        if f == 0 || g == 0 {
            return 0;
        }
        if f == 1 && g == 1 {
            return 1;
        }
        if f == 1 || f == g {
            return self.exists_rec(g, cube);
        }
        if g == 1 {
            return self.exists_rec(f, cube);
        }
        let (f, g) = if f > g { (g, f) } else { (f, g) };
        let (nf, ng) = (self.node(f), self.node(g));
        let top = nf.level.min(ng.level);
        while cube > 1 && self.node(cube).level < top {
            cube = self.node(cube).high;
        }
        if cube == 1 {
            return self.apply_rec(BinOp::And, f, g);
        }
        let key = (CacheOp::AndExists, f, g, cube);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let (f0, f1) = if nf.level == top { (nf.low, nf.high) } else { (f, f) };
        let (g0, g1) = if ng.level == top { (ng.low, ng.high) } else { (g, g) };
        let nc = self.node(cube);
        let r = if nc.level == top {
            let lo = self.and_exists_rec(f0, g0, nc.high);
            if lo == 1 {
                1
            } else {
                let hi = self.and_exists_rec(f1, g1, nc.high);
                self.apply_rec(BinOp::Or, lo, hi)
            }
        } else {
            let lo = self.and_exists_rec(f0, g0, cube);
            let hi = self.and_exists_rec(f1, g1, cube);
            self.make_raw(top, lo, hi)
        };
        self.cache.insert(key, r);
        r
    }

    /// Substitutes every unprimed variable by its primed twin.
    ///
    /// Panics if `f` mentions a primed variable.
    pub fn rename_prime(&mut self, f: BddRef) -> BddRef {
        BddRef(self.shift_rec(f.0, true))
    }

    /// Substitutes every primed variable by its unprimed twin.
    ///
    /// Panics if `f` mentions an unprimed variable.
    pub fn rename_unprime(&mut self, f: BddRef) -> BddRef {
        BddRef(self.shift_rec(f.0, false))
    }

    fn shift_rec(&mut self, f: u32, prime: bool) -> u32 {
        if f < 2 {
            return f;
        }
        let op = if prime { CacheOp::Prime } else { CacheOp::Unprime };
        let key = (op, f, 0, 0);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let n = self.node(f);
        let is_primed = n.level % 2 == 1;
        assert!(
            is_primed != prime,
            "rename_{}: level {} is already {}",
            if prime { "prime" } else { "unprime" },
            n.level,
            if is_primed { "primed" } else { "unprimed" }
        );
        let level = if prime { n.level + 1 } else { n.level - 1 };
        let lo = self.shift_rec(n.low, prime);
        let hi = self.shift_rec(n.high, prime);
        let r = self.make_raw(level, lo, hi);
        self.cache.insert(key, r);
        r
    }

    /// Cofactor with respect to a partial assignment `(level, value)`.
    pub fn restrict(&mut self, f: BddRef, assignment: &[(Level, bool)]) -> BddRef {
        let map: HashMap<Level, bool> = assignment.iter().copied().collect();
        let mut memo = HashMap::new();
        BddRef(self.restrict_rec(f.0, &map, &mut memo))
    }

    fn restrict_rec(
        &mut self,
        f: u32,
        map: &HashMap<Level, bool>,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        if f < 2 {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let n = self.node(f);
        let r = match map.get(&n.level) {
            Some(true) => self.restrict_rec(n.high, map, memo),
            Some(false) => self.restrict_rec(n.low, map, memo),
            None => {
                let lo = self.restrict_rec(n.low, map, memo);
                let hi = self.restrict_rec(n.high, map, memo);
                self.make_raw(n.level, lo, hi)
            }
        };
        memo.insert(f, r);
        r
    }

    /// Minterm fixing each listed level to the given value.
    pub fn minterm(&mut self, assignment: &[(Level, bool)]) -> BddRef {
        let mut sorted = assignment.to_vec();
        sorted.sort_unstable_by_key(|(l, _)| *l);
        let mut r = 1;
        for &(l, v) in sorted.iter().rev() {
            r = if v {
                self.make_raw(l, 0, r)
            } else {
                self.make_raw(l, r, 0)
            };
        }
        BddRef(r)
    }

    /// Evaluates `f` under a total assignment of its support.
    pub fn eval(&self, f: BddRef, value_of: impl Fn(Level) -> bool) -> bool {
        let mut cur = f.0;
        while cur > 1 {
            let n = self.node(cur);
            cur = if value_of(n.level) { n.high } else { n.low };
        }
        cur == 1
    }

    /// Sorted set of levels `f` depends on.
    pub fn support(&self, f: BddRef) -> Vec<Level> {
        let mut seen = std::collections::HashSet::new();
        let mut levels = std::collections::BTreeSet::new();
        let mut stack = vec![f.0];
        while let Some(id) = stack.pop() {
            if id < 2 || !seen.insert(id) {
                continue;
            }
            let n = self.node(id);
            levels.insert(n.level);
            stack.push(n.low);
            stack.push(n.high);
        }
        levels.into_iter().collect()
    }

    /// One satisfying assignment over `levels` (in the given order), or `None`
    /// when `f` is unsatisfiable. Whenever both branches of a node are
    /// satisfiable the 0-branch is taken; levels not on the path are set to 0.
    pub fn sat_one(&self, f: BddRef, levels: &[Level]) -> Option<Vec<bool>> {
        if f.is_false() {
            return None;
        }
        let mut chosen: HashMap<Level, bool> = HashMap::new();
        let mut cur = f.0;
        while cur > 1 {
            let n = self.node(cur);
            if n.low != 0 {
                chosen.insert(n.level, false);
                cur = n.low;
            } else {
                chosen.insert(n.level, true);
                cur = n.high;
            }
        }
        for l in chosen.keys() {
            assert!(
                levels.contains(l),
                "sat_one: level {l} in support but not in the requested variables"
            );
        }
        Some(
            levels
                .iter()
                .map(|l| chosen.get(l).copied().unwrap_or(false))
                .collect(),
        )
    }

    /// Satisfying assignments over `levels` (values in the given order), at
    /// most `limit` of them. The flag is set when more exist. Assignments come
    /// in lexicographic order of the sorted levels, 0 before 1.
    pub fn all_sat(&self, f: BddRef, levels: &[Level], limit: usize) -> (Vec<Vec<bool>>, bool) {
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for l in self.support(f) {
            assert!(sorted.contains(&l), "all_sat: level {l} in support but not requested");
        }
        let mut out = Vec::new();
        let mut truncated = false;
        let mut current = vec![false; sorted.len()];
        self.all_sat_rec(f.0, 0, &sorted, &mut current, limit, &mut out, &mut truncated);
        let pos: HashMap<Level, usize> = sorted.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let reordered = out
            .into_iter()
            .map(|a| levels.iter().map(|l| a[pos[l]]).collect())
            .collect();
        (reordered, truncated)
    }

    #[allow(clippy::too_many_arguments)]
    fn all_sat_rec(
        &self,
        id: u32,
        k: usize,
        sorted: &[Level],
        current: &mut Vec<bool>,
        limit: usize,
        out: &mut Vec<Vec<bool>>,
        truncated: &mut bool,
    ) {
        if id == 0 || *truncated {
            return;
        }
        if k == sorted.len() {
            if out.len() == limit {
                *truncated = true;
            } else {
                out.push(current.clone());
            }
            return;
        }
        let n = self.node(id);
        let (low, high) = if id > 1 && n.level == sorted[k] { (n.low, n.high) } else { (id, id) };
        for (value, child) in [(false, low), (true, high)] {
            current[k] = value;
            self.all_sat_rec(child, k + 1, sorted, current, limit, out, truncated);
        }
        current[k] = false;
    }

    /// Number of satisfying assignments over exactly the given levels, which
    /// must cover the support of `f`.
    pub fn sat_count(&self, f: BddRef, levels: &[Level]) -> u128 {
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert!(sorted.len() < 128, "sat_count supports at most 127 variables");
        let pos: HashMap<Level, usize> = sorted.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let n = sorted.len();
        let position = |id: u32, node: Node| -> usize {
            if id < 2 {
                n
            } else {
                *pos.get(&node.level).unwrap_or_else(|| {
                    panic!("sat_count: level {} not among the counted variables", node.level)
                })
            }
        };
        let mut memo: HashMap<u32, u128> = HashMap::new();
        fn rec(
            m: &BddManager,
            id: u32,
            memo: &mut HashMap<u32, u128>,
            position: &dyn Fn(u32, Node) -> usize,
        ) -> u128 {
            if id == 0 {
                return 0;
            }
            if id == 1 {
                return 1;
            }
            if let Some(&c) = memo.get(&id) {
                return c;
            }
            let node = m.node(id);
            let p = position(id, node);
            let mut total = 0u128;
            for child in [node.low, node.high] {
                let cp = position(child, m.node(child));
                let sub = rec(m, child, memo, position);
                total += sub << (cp - p - 1);
            }
            memo.insert(id, total);
            total
        }
        let root = self.node(f.0);
        let p = position(f.0, root);
        rec(self, f.0, &mut memo, &position) << p
    }

    /// Mark-and-sweep: every node unreachable from `roots` is freed and the
    /// operation cache is cleared. Returns the number of freed nodes. Handles
    /// not reachable from `roots` must not be used afterwards.
    pub fn gc(&mut self, roots: &[BddRef]) -> usize {
        let mut marked = vec![false; self.nodes.len()];
        marked[0] = true;
        marked[1] = true;
        let mut stack: Vec<u32> = roots.iter().map(|r| r.0).collect();
        while let Some(id) = stack.pop() {
            if marked[id as usize] {
                continue;
            }
            marked[id as usize] = true;
            let n = self.node(id);
            stack.push(n.low);
            stack.push(n.high);
        }
        let mut freed = 0;
        for id in 2..self.nodes.len() as u32 {
            let n = self.node(id);
            if !marked[id as usize] && n.level != FREED_LEVEL {
                self.unique.remove(&(n.level, n.low, n.high));
                self.nodes[id as usize].level = FREED_LEVEL;
                self.free.push(id);
                freed += 1;
            }
        }
        self.cache.clear();
        freed
    }

    /// Collects when the live node count exceeds the configured limit.
    pub fn maybe_gc(&mut self, roots: &[BddRef]) -> usize {
        if self.node_count() > self.node_limit {
            self.gc(roots)
        } else {
            0
        }
    }

    /// Walks the unique table and checks reducedness and uniqueness.
    pub fn audit(&self) -> Result<(), String> {
        let mut seen = HashMap::new();
        for id in 2..self.nodes.len() as u32 {
            let n = self.node(id);
            if n.level == FREED_LEVEL {
                continue;
            }
            if n.low == n.high {
                return Err(format!("node {id} has identical children"));
            }
            for child in [n.low, n.high] {
                if self.node(child).level == FREED_LEVEL {
                    return Err(format!("node {id} points to freed node {child}"));
                }
                if self.node(child).level <= n.level {
                    return Err(format!("node {id} violates the variable order"));
                }
            }
            if let Some(other) = seen.insert((n.level, n.low, n.high), id) {
                return Err(format!("nodes {other} and {id} are duplicates"));
            }
            if self.unique.get(&(n.level, n.low, n.high)) != Some(&id) {
                return Err(format!("node {id} missing from the unique table"));
            }
        }
        Ok(())
    }

    /// Number of nodes reachable from `f` (terminals included).
    pub fn size(&self, f: BddRef) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f.0];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) || id < 2 {
                continue;
            }
            let n = self.node(id);
            stack.push(n.low);
            stack.push(n.high);
        }
        seen.len()
    }
}
