//! Explicit-state controllers obtained by enumerating a symbolic one.

use std::collections::{HashMap, VecDeque};

use crate::bdd::Level;

use super::{Gr1Error, SymbolicController};

/// Default cap on the number of enumerated controller states.
pub const DEFAULT_MAX_STATES: usize = 50_000;

/// A Mealy-style automaton: states are full assignments of the controller's
/// variables (indexed by variable id), and for every legal input there is
/// exactly one successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteController {
    pub states: Vec<Vec<bool>>,
    /// Initial input assignment (in `env` order) and the state chosen for it.
    pub initial: Vec<(Vec<bool>, usize)>,
    /// For each state, every legal next input (in `env` order) and the
    /// successor chosen for it.
    pub transitions: Vec<Vec<(Vec<bool>, usize)>>,
}

impl ConcreteController {
    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }
}

/// Enumerates the states reachable from the initial states, choosing outputs
/// with the deterministic `sat_one` tie-break.
pub fn enumerate_concrete(
    ctrl: &mut SymbolicController,
    max_states: usize,
) -> Result<ConcreteController, Gr1Error> {
    let n = ctrl.manager.num_vars() as usize;
    let x_now = ctrl.input_levels(false);
    let x_next = ctrl.input_levels(true);
    let out_now = ctrl.output_levels(false);
    let out_next = ctrl.output_levels(true);
    let all_now: Vec<Level> = ctrl.all_vars().iter().map(|v| v.level()).collect();

    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut states: Vec<Vec<bool>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |state: Vec<bool>, queue: &mut VecDeque<usize>, states: &mut Vec<Vec<bool>>| {
        if let Some(&i) = index.get(&state) {
            return Ok(i);
        }
        if states.len() == max_states {
            return Err(Gr1Error::TooManyStates(max_states));
        }
        let i = states.len();
        index.insert(state.clone(), i);
        states.push(state);
        queue.push_back(i);
        Ok(i)
    };

    let (inputs, truncated) = ctrl.manager.all_sat(ctrl.theta_e, &x_now, max_states);
    if truncated {
        return Err(Gr1Error::TooManyStates(max_states));
    }
    let mut initial = Vec::with_capacity(inputs.len());
    for x in inputs {
        let assignment: Vec<(Level, bool)> = x_now.iter().copied().zip(x.iter().copied()).collect();
        let r = ctrl.manager.restrict(ctrl.init, &assignment);
        let Some(out) = ctrl.manager.sat_one(r, &out_now) else {
            continue;
        };
        let mut state = vec![false; n];
        for (l, b) in assignment.iter().copied().chain(out_now.iter().copied().zip(out)) {
            state[(l / 2) as usize] = b;
        }
        let i = intern(state, &mut queue, &mut states)?;
        initial.push((x, i));
    }

    let mut transitions: Vec<Vec<(Vec<bool>, usize)>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let current: Vec<(Level, bool)> = all_now.iter().map(|&l| (l, states[s][(l / 2) as usize])).collect();
        let legal = ctrl.manager.restrict(ctrl.rho_e, &current);
        let (next_inputs, truncated) = ctrl.manager.all_sat(legal, &x_next, usize::MAX);
        debug_assert!(!truncated);
        let from_here = ctrl.manager.restrict(ctrl.trans, &current);
        let mut edges = Vec::with_capacity(next_inputs.len());
        for x in next_inputs {
            let assignment: Vec<(Level, bool)> = x_next.iter().copied().zip(x.iter().copied()).collect();
            let r = ctrl.manager.restrict(from_here, &assignment);
            let out = ctrl
                .manager
                .sat_one(r, &out_next)
                .ok_or(Gr1Error::Incomplete { state: s })?;
            let mut next = vec![false; n];
            for (l, b) in assignment.iter().copied().chain(out_next.iter().copied().zip(out)) {
                next[(l / 2) as usize] = b;
            }
            let t = intern(next, &mut queue, &mut states)?;
            edges.push((x, t));
        }
        if transitions.len() <= s {
            transitions.resize(s + 1, Vec::new());
        }
        transitions[s] = edges;
    }
    transitions.resize(states.len(), Vec::new());
    Ok(ConcreteController { states, initial, transitions })
}
