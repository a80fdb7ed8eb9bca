//! Executable controllers: synthesis into a self-contained [`Controller`],
//! the `.spcc` file format and interactive walk sessions.

mod file;
mod session;

use std::collections::HashMap;

use crate::bdd::{BddRef, VarId};
use crate::diag::{SourceMap, Span};
use crate::gr1::{solve, synthesize_symbolic, Gr1Error, SymbolicController};
use crate::lowering::{kexpr_to_bdd, to_gr1, KernelSpec, Role, VarEncoding};
use crate::syntax::{TempKind, VarKind};

pub use file::{load, save, LoadError, FORMAT_VERSION, MAGIC};
pub use session::{
    AssumptionViolation, Inputs, Outputs, State, ViolatedAssumption, WalkError, WalkSession, DEFAULT_OPTION_CAP,
};

/// An initial or safety assumption kept with the controller so that
/// violations can be reported by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionInfo {
    pub label: String,
    /// `file:line:col` of the assumption, or empty when unknown.
    pub location: String,
    /// `Ini` or `Trans`.
    pub kind: TempKind,
    pub bdd: BddRef,
}

/// A synthesized controller together with everything needed to run it on
/// typed values.
#[derive(Debug)]
pub struct Controller {
    pub name: String,
    /// Typed variables and their kernel bits, in declaration order.
    pub encodings: Vec<VarEncoding>,
    pub assumptions: Vec<AssumptionInfo>,
    pub symbolic: SymbolicController,
}

impl Controller {
    /// Solves the game of `kernel` and builds its controller. Fails with
    /// [`Gr1Error::Unrealizable`] when there is none.
    pub fn synthesize(kernel: &KernelSpec, sources: Option<&SourceMap>) -> Result<Controller, Gr1Error> {
        let mut problem = to_gr1(kernel);
        let solution = solve(&mut problem)?;
        let mut symbolic = synthesize_symbolic(problem, &solution)?;
        let mut memo = HashMap::new();
        let mut assumptions = Vec::new();
        for c in &kernel.constraints {
            if c.role != Role::Assumption || c.kind == TempKind::AlwEv {
                continue;
            }
            let bdd = kexpr_to_bdd(&mut symbolic.manager, &c.expr, &mut memo);
            assumptions.push(AssumptionInfo {
                label: c.label(),
                location: location(sources, c.span),
                kind: c.kind,
                bdd,
            });
        }
        Ok(Controller {
            name: kernel.name.clone(),
            encodings: kernel.encodings.clone(),
            assumptions,
            symbolic,
        })
    }

    pub fn encoding(&self, name: &str) -> Option<&VarEncoding> {
        self.encodings.iter().find(|e| e.name == name)
    }

    /// Encodings of the user-visible variables (no lowering auxiliaries).
    pub fn visible(&self) -> impl Iterator<Item = &VarEncoding> {
        self.encodings.iter().filter(|e| !e.is_auxiliary())
    }

    pub fn inputs(&self) -> impl Iterator<Item = &VarEncoding> {
        self.visible().filter(|e| e.kind == VarKind::Env)
    }

    /// Every BDD the controller holds.
    pub fn roots(&self) -> Vec<BddRef> {
        let mut r = self.symbolic.roots();
        r.extend(self.assumptions.iter().map(|a| a.bdd));
        r
    }

    /// Number of manager variables: kernel bits followed by memory bits.
    pub fn num_vars(&self) -> usize {
        self.symbolic.manager.num_vars() as usize
    }

    /// Number of initial states (over inputs, outputs and memory).
    pub fn initial_state_count(&self) -> u128 {
        let levels: Vec<_> = (0..self.num_vars() as u32).map(|i| VarId(i).level()).collect();
        self.symbolic.manager.sat_count(self.symbolic.init, &levels)
    }
}

fn location(sources: Option<&SourceMap>, span: Span) -> String {
    match sources {
        Some(s) if span != Span::DUMMY => s.location(span),
        _ => String::new(),
    }
}
