//! Symbolic GR(1) game solving and strategy construction.
//!
//! The system winning region is the three-nested fixpoint
//! `νZ. ⋀_j μY. ⋁_i νX. (Js_j ∧ pre(Z)) ∨ pre(Y) ∨ (¬Je_i ∧ pre(X))`, where
//! `pre` is the controllable predecessor. The intermediate `Y` chains and `X`
//! fixpoints of the last outer iteration are kept in a [`SynthesisMemo`] and
//! turned into a [`SymbolicController`] with a justice-goal counter in extra
//! memory bits.

mod concrete;

use crate::bdd::{BddManager, BddRef, Level, VarId};
use crate::lowering::Gr1Problem;
use crate::semcheck::types::ceil_log2;

pub use concrete::{enumerate_concrete, ConcreteController, DEFAULT_MAX_STATES};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Gr1Error {
    #[error("BDD node limit of {limit} exceeded with {live} live nodes ({progress}); raise SPECTRA_BDD_NODES to continue")]
    NodeLimit { limit: usize, live: usize, progress: String },
    #[error("the specification is unrealizable, so no controller exists")]
    Unrealizable,
    #[error("the controller has more than {0} reachable states; use the symbolic controller instead")]
    TooManyStates(usize),
    #[error("the controller has no move from state {state} for a legal input")]
    Incomplete { state: usize },
}

/// One step of a `Y` chain: the set reached after `r + 1` iterations and the
/// `X` fixpoint for each environment justice goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank {
    pub y: BddRef,
    pub xs: Vec<BddRef>,
}

/// Winning region plus the per-goal sets needed for strategy construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisMemo {
    pub z: BddRef,
    /// `chains[j]` is the increasing `Y` chain for system goal `j`.
    pub chains: Vec<Vec<Rank>>,
}

impl SynthesisMemo {
    fn roots(&self) -> Vec<BddRef> {
        let mut r = vec![self.z];
        for chain in &self.chains {
            for rank in chain {
                r.push(rank.y);
                r.extend(&rank.xs);
            }
        }
        r
    }
}

/// Result of solving a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub realizable: bool,
    pub memo: SynthesisMemo,
}

fn levels(vars: &[VarId], primed: bool) -> Vec<Level> {
    vars.iter()
        .map(|v| if primed { v.primed_level() } else { v.level() })
        .collect()
}

/// Quantification cubes over the primed input and output copies.
#[derive(Clone, Copy, Debug)]
struct Cubes {
    x_next: BddRef,
    y_next: BddRef,
}

impl Cubes {
    fn new(p: &mut Gr1Problem) -> Self {
        let xl = levels(&p.env, true);
        let yl = levels(&p.sys, true);
        Cubes {
            x_next: p.manager.cube(&xl),
            y_next: p.manager.cube(&yl),
        }
    }
}

fn cpre_with(p: &mut Gr1Problem, cubes: Cubes, v: BddRef) -> BddRef {
    let m = &mut p.manager;
    let vp = m.rename_prime(v);
    let t = m.and_exists(cubes.y_next, p.rho_s, vp);
    let r = m.imp(p.rho_e, t);
    m.forall(cubes.x_next, r)
}

/// States from which the system can force the next state into `v`: for
/// every input allowed by `rho_e` there is an output allowed by `rho_s`
/// that lands in `v`.
pub fn controllable_pre(p: &mut Gr1Problem, v: BddRef) -> BddRef {
    let cubes = Cubes::new(p);
    cpre_with(p, cubes, v)
}

/// Whether every initial input allowed by `theta_e` has an initial output
/// allowed by `theta_s` inside `z`.
pub fn initially_winning(p: &mut Gr1Problem, z: BddRef) -> bool {
    let yl = levels(&p.sys, false);
    let xl = levels(&p.env, false);
    let m = &mut p.manager;
    let ycube = m.cube(&yl);
    let xcube = m.cube(&xl);
    let e = m.and_exists(ycube, p.theta_s, z);
    let r = m.imp(p.theta_e, e);
    m.forall(xcube, r).is_true()
}

struct Solver<'a> {
    p: &'a mut Gr1Problem,
    cubes: Cubes,
    outer: usize,
}

impl Solver<'_> {
    fn cpre(&mut self, v: BddRef) -> BddRef {
        cpre_with(self.p, self.cubes, v)
    }

    /// Collects garbage if needed and fails when the live set stays above
    /// the limit.
    fn checkpoint(&mut self, live: &[BddRef], j: usize) -> Result<(), Gr1Error> {
        let m = &self.p.manager;
        if m.node_count() <= m.node_limit() {
            return Ok(());
        }
        let mut roots = self.p.roots();
        roots.extend([self.cubes.x_next, self.cubes.y_next]);
        roots.extend(live);
        self.p.manager.gc(&roots);
        let m = &self.p.manager;
        if m.node_count() > m.node_limit() {
            return Err(Gr1Error::NodeLimit {
                limit: m.node_limit(),
                live: m.node_count(),
                progress: format!(
                    "outer iteration {}, system goal {} of {}",
                    self.outer + 1,
                    j + 1,
                    self.p.js.len()
                ),
            });
        }
        Ok(())
    }

    fn run(&mut self) -> Result<SynthesisMemo, Gr1Error> {
        let mut memo = SynthesisMemo {
            z: BddRef::TRUE,
            chains: vec![Vec::new(); self.p.js.len()],
        };
        loop {
            let z_old = memo.z;
            for j in 0..self.p.js.len() {
                let pre_z = self.cpre(memo.z);
                let start = self.p.manager.and(self.p.js[j], pre_z);
                let mut y = BddRef::FALSE;
                let mut chain: Vec<Rank> = Vec::new();
                loop {
                    let pre_y = self.cpre(y);
                    let base = self.p.manager.or(start, pre_y);
                    let mut xs = Vec::with_capacity(self.p.je.len());
                    let mut y_new = BddRef::FALSE;
                    for i in 0..self.p.je.len() {
                        let not_je = self.p.manager.not(self.p.je[i]);
                        let mut x = memo.z;
                        loop {
                            let pre_x = self.cpre(x);
                            let stay = self.p.manager.and(not_je, pre_x);
                            let x_new = self.p.manager.or(base, stay);
                            if x_new == x {
                                break;
                            }
                            x = x_new;
                            let mut live = memo.roots();
                            live.extend([z_old, start, y, base, x, y_new]);
                            live.extend(&xs);
                            live.extend(chain.iter().flat_map(|r| std::iter::once(r.y).chain(r.xs.iter().copied())));
                            self.checkpoint(&live, j)?;
                        }
                        xs.push(x);
                        y_new = self.p.manager.or(y_new, x);
                    }
                    chain.push(Rank { y: y_new, xs });
                    if y_new == y {
                        break;
                    }
                    y = y_new;
                }
                memo.z = y;
                memo.chains[j] = chain;
            }
            if memo.z == z_old {
                return Ok(memo);
            }
            self.outer += 1;
        }
    }
}

/// Computes the system winning region and the realizability verdict.
pub fn solve(p: &mut Gr1Problem) -> Result<Solution, Gr1Error> {
    let cubes = Cubes::new(p);
    let memo = Solver { p, cubes, outer: 0 }.run()?;
    let realizable = initially_winning(p, memo.z);
    Ok(Solution { realizable, memo })
}

/// Strategy as a pair of relations over inputs, outputs and memory bits.
#[derive(Debug)]
pub struct SymbolicController {
    pub manager: BddManager,
    pub env: Vec<VarId>,
    pub sys: Vec<VarId>,
    /// Binary counter of the system justice goal currently pursued.
    pub memory: Vec<VarId>,
    pub theta_e: BddRef,
    pub rho_e: BddRef,
    /// Initial states with legal inputs, over inputs, outputs and memory.
    pub init: BddRef,
    /// Transitions, over current and next inputs, outputs and memory.
    pub trans: BddRef,
}

impl SymbolicController {
    /// Unprimed levels of outputs and memory bits.
    pub fn output_levels(&self, primed: bool) -> Vec<Level> {
        let mut l = levels(&self.sys, primed);
        l.extend(levels(&self.memory, primed));
        l
    }

    pub fn input_levels(&self, primed: bool) -> Vec<Level> {
        levels(&self.env, primed)
    }

    /// All controller variables (inputs, outputs, memory) in index order.
    pub fn all_vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.env.iter().chain(&self.sys).chain(&self.memory).copied().collect();
        v.sort();
        v
    }

    pub fn roots(&self) -> Vec<BddRef> {
        vec![self.theta_e, self.rho_e, self.init, self.trans]
    }
}

fn memory_is(m: &mut BddManager, memory: &[VarId], code: usize, primed: bool) -> BddRef {
    let lits: Vec<BddRef> = memory
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let level = if primed { v.primed_level() } else { v.level() };
            m.literal(level, (code >> k) & 1 == 1)
        })
        .collect();
    m.and_all(lits)
}

/// Builds the controller of a realizable game.
///
/// Per system goal `j` and state, exactly one rule applies, in priority
/// order: at a `Js_j` state advance the counter and stay in `Z`; otherwise
/// move one rank down the `Y_j` chain; otherwise stay inside the `X`
/// fixpoint of the lowest-indexed violated environment goal.
pub fn synthesize_symbolic(mut p: Gr1Problem, sol: &Solution) -> Result<SymbolicController, Gr1Error> {
    if !sol.realizable {
        return Err(Gr1Error::Unrealizable);
    }
    let goals = p.js.len();
    let bits = ceil_log2(goals as u64) as usize;
    let memory: Vec<VarId> = (0..bits).map(|_| p.manager.new_var()).collect();
    let z = sol.memo.z;
    let cubes = Cubes::new(&mut p);
    let mut trans = BddRef::FALSE;
    for j in 0..goals {
        let m = &mut p.manager;
        let here = memory_is(m, &memory, j, false);
        let stay = memory_is(m, &memory, j, true);
        let advance = memory_is(m, &memory, (j + 1) % goals, true);

        let d1 = m.and(z, p.js[j]);
        let zp = m.rename_prime(z);
        let t1 = m.and_all([d1, p.rho_s, zp, advance]);
        let mut rules = t1;
        let mut covered = d1;

        let chain = &sol.memo.chains[j];
        let mut below = BddRef::FALSE;
        for rank in chain {
            let m = &mut p.manager;
            let not_below = m.not(below);
            let exact = m.and(rank.y, not_below);
            let not_covered = m.not(covered);
            let fresh = m.and(exact, not_covered);
            // Descend to the previous rank.
            let pre_below = cpre_with(&mut p, cubes, below);
            let m = &mut p.manager;
            let d2 = m.and(fresh, pre_below);
            if !d2.is_false() {
                let bp = m.rename_prime(below);
                let t2 = m.and_all([d2, p.rho_s, bp, stay]);
                rules = m.or(rules, t2);
                covered = m.or(covered, d2);
            }
            // Stay in an X fixpoint while an environment goal is violated.
            for (i, &x) in rank.xs.iter().enumerate() {
                let m = &mut p.manager;
                let not_covered = m.not(covered);
                let not_je = m.not(p.je[i]);
                let d3 = m.and_all([exact, x, not_je, not_covered]);
                if d3.is_false() {
                    continue;
                }
                let xp = m.rename_prime(x);
                let t3 = m.and_all([d3, p.rho_s, xp, stay]);
                rules = m.or(rules, t3);
                covered = m.or(covered, d3);
            }
            below = rank.y;
        }
        let m = &mut p.manager;
        let scoped = m.and(here, rules);
        trans = m.or(trans, scoped);
    }
    let m = &mut p.manager;
    let start = memory_is(m, &memory, 0, false);
    let init = m.and_all([p.theta_e, p.theta_s, z, start]);
    let mut ctrl = SymbolicController {
        manager: p.manager,
        env: p.env,
        sys: p.sys,
        memory,
        theta_e: p.theta_e,
        rho_e: p.rho_e,
        init,
        trans,
    };
    let roots = ctrl.roots();
    ctrl.manager.gc(&roots);
    Ok(ctrl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::{lower, to_gr1};
    use crate::semcheck::check;
    use crate::syntax::parse;

    fn game(src: &str) -> Gr1Problem {
        to_gr1(&lower(&check(parse(src).unwrap()).unwrap()).unwrap())
    }

    fn realizable(src: &str) -> bool {
        solve(&mut game(src)).unwrap().realizable
    }

    #[test]
    fn known_verdicts() {
        assert!(realizable("spec A env boolean x; sys boolean y; gar alw y <-> x;"));
        assert!(!realizable("spec A env boolean x; sys boolean y; gar trans y <-> next(x);"));
        assert!(realizable(
            "spec A env boolean x; sys boolean y; asm alwEv x; gar alwEv x & y;"
        ));
        assert!(!realizable("spec A env boolean x; sys boolean y; gar alwEv x & y;"));
        assert!(realizable("spec A env boolean x; sys boolean y;"));
    }

    #[test]
    fn cpre_of_true_and_false() {
        let mut p = game("spec A env boolean x; sys boolean y; asm trans next(x) -> x;");
        assert_eq!(controllable_pre(&mut p, BddRef::TRUE), BddRef::TRUE);
        // Every state has a legal input (x' = false), so pre(false) is empty.
        assert_eq!(controllable_pre(&mut p, BddRef::FALSE), BddRef::FALSE);
    }

    #[test]
    fn controller_mirrors_input() {
        let mut p = game("spec A env boolean x; sys boolean y; gar alw y <-> x;");
        let sol = solve(&mut p).unwrap();
        let c = synthesize_symbolic(p, &sol).unwrap();
        assert!(c.memory.is_empty());
        let mut m = c.manager;
        let (x1, y1) = (m.primed(c.env[0]), m.primed(c.sys[0]));
        let mirror = m.iff(x1, y1);
        assert!(m.imp(c.trans, mirror).is_true());
    }

    #[test]
    fn node_limit_is_reported() {
        let mut p = game(
            "spec A env Int(0..15) a; env Int(0..15) b; sys Int(0..31) s; \
             gar alw s = a + b; gar alwEv s = 7;",
        );
        p.manager.set_node_limit(10);
        let err = solve(&mut p).unwrap_err();
        assert!(matches!(err, Gr1Error::NodeLimit { .. }), "{err}");
    }

    #[test]
    fn unrealizable_has_no_controller() {
        let mut p = game("spec A sys boolean y; gar ini y; gar ini !y;");
        let sol = solve(&mut p).unwrap();
        assert!(matches!(synthesize_symbolic(p, &sol), Err(Gr1Error::Unrealizable)));
    }
}
