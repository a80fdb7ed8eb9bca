//! Walk sessions: stepping a controller with chosen inputs, forward and back.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::bdd::{BddRef, Level, VarId};
use crate::lowering::{Value, VarEncoding};
use crate::syntax::{TempKind, VarKind};

use super::Controller;

/// Typed values of input variables, by name.
pub type Inputs = BTreeMap<String, Value>;

/// Default bound on the number of input choices listed by
/// [`WalkSession::env_options`].
pub const DEFAULT_OPTION_CAP: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolatedAssumption {
    pub label: String,
    pub location: String,
}

/// Inputs rejected because they violate the environment assumptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionViolation {
    pub violated: Vec<ViolatedAssumption>,
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.violated.iter().map(|v| v.label.as_str()).collect();
        write!(f, "inputs violate {}", names.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error("missing value for input `{0}`")]
    MissingInput(String),
    #[error("`{0}` is not an input variable")]
    UnknownInput(String),
    #[error("`{value}` is not a value of `{var}`")]
    BadValue { var: String, value: String },
    #[error("the walk has not started")]
    NotStarted,
    #[error("the walk has already started")]
    AlreadyStarted,
    #[error("already at the first state")]
    AtStart,
    #[error("no later state to return to")]
    AtEnd,
    #[error("{0}")]
    Violation(AssumptionViolation),
    #[error("the controller has no move for these inputs")]
    Stuck,
}

/// A controller being executed step by step. Every history entry assigns
/// all controller variables; entry 0 satisfies the initial relation and
/// consecutive entries the transition relation.
#[derive(Debug)]
pub struct WalkSession {
    controller: Controller,
    history: Vec<Vec<bool>>,
    cursor: usize,
    /// Live nodes after the last collection.
    live_after_gc: usize,
}

/// Typed values of the user-visible variables in one state.
pub type State = Vec<(String, VarKind, Value)>;

impl WalkSession {
    pub fn new(controller: Controller) -> Self {
        let live_after_gc = controller.symbolic.manager.node_count();
        WalkSession { controller, history: Vec::new(), cursor: 0, live_after_gc }
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn started(&self) -> bool {
        !self.history.is_empty()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// The state at the cursor.
    pub fn current(&self) -> Option<State> {
        self.state(self.cursor)
    }

    /// The state at history position `index`.
    pub fn state(&self, index: usize) -> Option<State> {
        let bits = self.history.get(index)?;
        Some(
            self.controller
                .visible()
                .filter_map(|e| Some((e.name.clone(), e.kind, decode(e, bits)?)))
                .collect(),
        )
    }

    /// Raw bits of the state at history position `index`, indexed by
    /// manager variable.
    pub fn raw_state(&self, index: usize) -> Option<&[bool]> {
        self.history.get(index).map(Vec::as_slice)
    }

    fn input_literals(&self, inputs: &Inputs, primed: bool) -> Result<Vec<(Level, bool)>, WalkError> {
        for name in inputs.keys() {
            if self.controller.inputs().all(|e| &e.name != name) {
                return Err(WalkError::UnknownInput(name.clone()));
            }
        }
        let mut lits = Vec::new();
        for e in self.controller.inputs() {
            let v = inputs.get(&e.name).ok_or_else(|| WalkError::MissingInput(e.name.clone()))?;
            let bits = e.encode(v).ok_or_else(|| WalkError::BadValue {
                var: e.name.clone(),
                value: v.to_string(),
            })?;
            for (&b, value) in e.bits.iter().zip(bits) {
                let level = if primed { VarId(b).primed_level() } else { VarId(b).level() };
                lits.push((level, value));
            }
        }
        Ok(lits)
    }

    fn violation(&mut self, kind: TempKind, lits: &[(Level, bool)]) -> WalkError {
        let m = &mut self.controller.symbolic.manager;
        let mut violated: Vec<ViolatedAssumption> = Vec::new();
        let candidates: Vec<_> = self.controller.assumptions.iter().filter(|a| a.kind == kind).collect();
        for a in &candidates {
            if m.restrict(a.bdd, lits).is_false() {
                violated.push(ViolatedAssumption { label: a.label.clone(), location: a.location.clone() });
            }
        }
        if violated.is_empty() {
            violated = candidates
                .iter()
                .map(|a| ViolatedAssumption { label: a.label.clone(), location: a.location.clone() })
                .collect();
        }
        WalkError::Violation(AssumptionViolation { violated })
    }

    fn levels(&self, primed: bool) -> Vec<Level> {
        (0..self.controller.num_vars() as u32)
            .map(|i| if primed { VarId(i).primed_level() } else { VarId(i).level() })
            .collect()
    }

    /// Picks the first state for the given inputs.
    pub fn initial(&mut self, inputs: &Inputs) -> Result<Outputs, WalkError> {
        if self.started() {
            return Err(WalkError::AlreadyStarted);
        }
        let lits = self.input_literals(inputs, false)?;
        let s = &mut self.controller.symbolic;
        if s.manager.restrict(s.theta_e, &lits).is_false() {
            return Err(self.violation(TempKind::Ini, &lits));
        }
        let levels = self.levels(false);
        let s = &mut self.controller.symbolic;
        let f = s.manager.restrict(s.init, &lits);
        let mut bits = s.manager.sat_one(f, &levels).ok_or(WalkError::Stuck)?;
        apply(&mut bits, &lits, false);
        self.history.push(bits);
        self.cursor = 0;
        Ok(self.outputs())
    }

    /// Advances from the state at the cursor, discarding any states after
    /// it.
    pub fn step(&mut self, inputs: &Inputs) -> Result<Outputs, WalkError> {
        let Some(current) = self.history.get(self.cursor) else {
            return Err(WalkError::NotStarted);
        };
        let mut lits: Vec<(Level, bool)> =
            current.iter().enumerate().map(|(i, &b)| (VarId(i as u32).level(), b)).collect();
        let input_lits = self.input_literals(inputs, true)?;
        lits.extend(&input_lits);
        let s = &mut self.controller.symbolic;
        if s.manager.restrict(s.rho_e, &lits).is_false() {
            return Err(self.violation(TempKind::Trans, &lits));
        }
        let levels = self.levels(true);
        let s = &mut self.controller.symbolic;
        let f = s.manager.restrict(s.trans, &lits);
        let mut bits = s.manager.sat_one(f, &levels).ok_or(WalkError::Stuck)?;
        apply(&mut bits, &input_lits, true);
        self.history.truncate(self.cursor + 1);
        self.history.push(bits);
        self.cursor += 1;
        self.collect_garbage();
        Ok(self.outputs())
    }

    /// Moves the cursor one state back. The later states are kept until the
    /// next step.
    pub fn back(&mut self) -> Result<State, WalkError> {
        if !self.started() {
            return Err(WalkError::NotStarted);
        }
        if self.cursor == 0 {
            return Err(WalkError::AtStart);
        }
        self.cursor -= 1;
        Ok(self.current().expect("cursor in range"))
    }

    /// Moves the cursor one state forward along the kept history.
    pub fn forward(&mut self) -> Result<State, WalkError> {
        if self.cursor + 1 >= self.history.len() {
            return Err(WalkError::AtEnd);
        }
        self.cursor += 1;
        Ok(self.current().expect("cursor in range"))
    }

    /// Input assignments the assumptions allow next: initial inputs before
    /// the first step, otherwise successors of the state at the cursor. At
    /// most `cap` are listed; the flag reports whether more exist.
    pub fn env_options(&mut self, cap: usize) -> (Vec<Inputs>, bool) {
        let primed = self.started();
        let inputs: Vec<VarEncoding> = self.controller.inputs().cloned().collect();
        let input_levels: Vec<Level> = inputs
            .iter()
            .flat_map(|e| e.bits.iter().map(|&b| if primed { VarId(b).primed_level() } else { VarId(b).level() }))
            .collect();
        let keep: HashSet<Level> = input_levels.iter().copied().collect();
        let current: Vec<(Level, bool)> = match self.history.get(self.cursor) {
            Some(bits) if primed => bits.iter().enumerate().map(|(i, &b)| (VarId(i as u32).level(), b)).collect(),
            _ => Vec::new(),
        };
        let others: Vec<Level> = (0..self.controller.num_vars() as u32 * 2).filter(|l| !keep.contains(l)).collect();
        let s = &mut self.controller.symbolic;
        let base = if primed { s.rho_e } else { s.theta_e };
        let restricted = s.manager.restrict(base, &current);
        let cube = s.manager.cube(&others);
        let f: BddRef = s.manager.exists(cube, restricted);
        let (rows, truncated) = s.manager.all_sat(f, &input_levels, cap);
        let options = rows
            .into_iter()
            .filter_map(|row| {
                let mut at = 0;
                let mut assignment = Inputs::new();
                for e in &inputs {
                    let bits = &row[at..at + e.bits.len()];
                    at += e.bits.len();
                    assignment.insert(e.name.clone(), e.decode(bits)?);
                }
                Some(assignment)
            })
            .collect();
        (options, truncated)
    }

    /// Frees intermediate nodes once they outnumber the controller's own.
    fn collect_garbage(&mut self) {
        let m = &self.controller.symbolic.manager;
        if m.node_count() > 2 * self.live_after_gc + 4096 {
            let roots = self.controller.roots();
            let m = &mut self.controller.symbolic.manager;
            m.gc(&roots);
            self.live_after_gc = m.node_count();
        }
    }

    /// Output values of the state at the cursor.
    fn outputs(&self) -> Outputs {
        let bits = &self.history[self.cursor];
        self.controller
            .visible()
            .filter(|e| e.kind == VarKind::Sys)
            .filter_map(|e| Some((e.name.clone(), decode(e, bits)?)))
            .collect()
    }

    /// The states up to the cursor as CSV: one column per visible variable,
    /// one row per state.
    pub fn trace_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self.controller.visible().map(|e| e.name.as_str()).collect();
        w.write_record(&header).expect("write to memory");
        for i in 0..self.history.len().min(self.cursor + 1) {
            let row: Vec<String> = self
                .controller
                .visible()
                .map(|e| decode(e, &self.history[i]).map(|v| v.to_string()).unwrap_or_default())
                .collect();
            w.write_record(&row).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV of UTF-8 fields")
    }
}

/// Typed values of output variables, by name.
pub type Outputs = BTreeMap<String, Value>;

fn decode(e: &VarEncoding, state: &[bool]) -> Option<Value> {
    let bits: Vec<bool> = e.bits.iter().map(|&b| state[b as usize]).collect();
    e.decode(&bits)
}

/// Writes literals into a state vector indexed by variable.
fn apply(bits: &mut [bool], lits: &[(Level, bool)], primed: bool) {
    for &(level, value) in lits {
        let var = if primed { (level - 1) / 2 } else { level / 2 };
        bits[var as usize] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::lower;
    use crate::semcheck::check;
    use crate::syntax::parse;

    fn session(src: &str) -> WalkSession {
        let kernel = lower(&check(parse(src).unwrap()).unwrap()).unwrap();
        WalkSession::new(Controller::synthesize(&kernel, None).unwrap())
    }

    fn x(v: bool) -> Inputs {
        Inputs::from([("x".to_string(), Value::Bool(v))])
    }

    #[test]
    fn mirror_walk() {
        let mut s = session("spec A env boolean x; sys boolean y; gar alw y <-> x;");
        assert_eq!(s.step(&x(true)), Err(WalkError::NotStarted));
        assert_eq!(s.initial(&x(true)).unwrap()["y"], Value::Bool(true));
        assert_eq!(s.step(&x(false)).unwrap()["y"], Value::Bool(false));
        let before = s.state(0).unwrap();
        assert_eq!(s.back().unwrap(), before);
        assert_eq!(s.back(), Err(WalkError::AtStart));
        assert_eq!(s.history_len(), 2);
        s.step(&x(true)).unwrap();
        assert_eq!(s.history_len(), 2);
        assert_eq!(s.trace_csv(), "x,y\ntrue,true\ntrue,true\n");
    }

    #[test]
    fn input_errors() {
        let mut s = session("spec A env boolean x; sys boolean y; gar alw y <-> x;");
        assert_eq!(s.initial(&Inputs::new()), Err(WalkError::MissingInput("x".into())));
        let mut extra = x(true);
        extra.insert("y".into(), Value::Bool(true));
        assert_eq!(s.initial(&extra), Err(WalkError::UnknownInput("y".into())));
        let bad = Inputs::from([("x".to_string(), Value::Int(3))]);
        assert!(matches!(s.initial(&bad), Err(WalkError::BadValue { .. })));
    }

    #[test]
    fn safety_assumption_violation() {
        let mut s = session("spec A env boolean x; sys boolean y; asm stay: trans next(x) -> x; gar alw y <-> x;");
        s.initial(&x(false)).unwrap();
        let (opts, truncated) = s.env_options(DEFAULT_OPTION_CAP);
        assert_eq!(opts, vec![x(false)]);
        assert!(!truncated);
        match s.step(&x(true)) {
            Err(WalkError::Violation(v)) => assert_eq!(v.violated[0].label, "stay"),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.history_len(), 1);
    }

    #[test]
    fn options_before_start_and_truncation() {
        let mut s = session("spec A env {L, M, R} d; sys boolean y; asm ini d != R;");
        let (opts, truncated) = s.env_options(DEFAULT_OPTION_CAP);
        assert_eq!(opts.len(), 2);
        assert!(!truncated);
        let (opts, truncated) = s.env_options(1);
        assert_eq!(opts.len(), 1);
        assert!(truncated);
        let r = Inputs::from([("d".to_string(), Value::Enum("R".into()))]);
        assert!(matches!(s.initial(&r), Err(WalkError::Violation(_))));
    }
}
