//! Monitor determinism and completeness.
//!
//! A monitor is checked on its lowered constraints: `ι` is the conjunction
//! of its initial constraints and `ρ` of its safety constraints, each
//! together with the monitor's own domain constraint. Other variables range
//! over their valid encodings. Past-time subformulas count as part of the
//! current state.

use crate::bdd::{BddManager, BddRef, Level, VarId};
use crate::lowering::{lower, to_gr1, KernelSpec};
use crate::semcheck::CheckedSpec;
use crate::syntax::{Element, Origin, TempKind};

use super::AnalysisError;

/// An assignment demonstrating a violation. Next-state values carry a `'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub reason: String,
    pub values: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorVerdict {
    /// At most one monitor value fits each situation.
    pub deterministic: bool,
    /// At least one monitor value fits each situation.
    pub complete: bool,
    /// The monitor's constraints rule out values of other variables in the
    /// same step.
    pub restricts_others: bool,
    pub witness: Option<Witness>,
}

fn levels_of(bits: &[u32], primed: bool) -> Vec<Level> {
    bits.iter()
        .map(|&b| if primed { VarId(b).primed_level() } else { VarId(b).level() })
        .collect()
}

/// Situations with two or more monitor values: some bit can be both 0 and 1.
fn ambiguous(m: &mut BddManager, f: BddRef, v: &[Level]) -> BddRef {
    let cube = m.cube(v);
    let mut out = BddRef::FALSE;
    for &l in v {
        let pos = m.literal(l, true);
        let neg = m.literal(l, false);
        let a = m.and_exists(cube, f, pos);
        let b = m.and_exists(cube, f, neg);
        let both = m.and(a, b);
        out = m.or(out, both);
    }
    out
}

fn witness(m: &BddManager, k: &KernelSpec, f: BddRef, reason: &str) -> Witness {
    let all: Vec<Level> = (0..k.vars.len() as u32)
        .flat_map(|i| [VarId(i).level(), VarId(i).primed_level()])
        .collect();
    let support = m.support(f);
    let bits = m.sat_one(f, &all).unwrap_or_default();
    let mut values = Vec::new();
    for enc in &k.encodings {
        for primed in [false, true] {
            let ls = levels_of(&enc.bits, primed);
            if !ls.iter().any(|l| support.contains(l)) {
                continue;
            }
            let b: Vec<bool> = ls.iter().map(|l| bits[*l as usize]).collect();
            let shown = enc.decode(&b).map(|v| v.to_string()).unwrap_or_else(|| "?".into());
            let name = if primed { format!("{}'", enc.name) } else { enc.name.clone() };
            values.push((name, shown));
        }
    }
    Witness { reason: reason.to_string(), values }
}

/// Checks that the monitor `name` assigns exactly one value in every
/// situation and constrains nothing else.
pub fn check_monitor(spec: &CheckedSpec, name: &str) -> Result<MonitorVerdict, AnalysisError> {
    let monitor_span = spec
        .ast
        .elements
        .iter()
        .find_map(|e| match e {
            Element::Monitor(m) if m.name.name == name => Some(m.span),
            _ => None,
        })
        .ok_or_else(|| AnalysisError::UnknownMonitor(name.to_string()))?;
    let kernel = lower(spec).map_err(AnalysisError::Lowering)?;
    let mut p = to_gr1(&kernel);
    let enc = kernel.encoding(name).expect("monitor is encoded as a variable").clone();
    let m = &mut p.manager;

    let own_valid = |kind: TempKind| format!("__valid_{name}_{}", kind.keyword());
    let (mut iota, mut rho) = (BddRef::TRUE, BddRef::TRUE);
    let (mut others_now, mut others_next) = (BddRef::TRUE, BddRef::TRUE);
    for (c, &b) in kernel.constraints.iter().zip(&p.constraint_bdds) {
        let is_own_validity = c.name.as_deref() == Some(own_valid(c.kind).as_str());
        let is_own = c.origin == Origin::Monitor && monitor_span.contains(c.span);
        match (c.kind, is_own || is_own_validity, c.origin == Origin::Validity) {
            (TempKind::Ini, true, _) => iota = m.and(iota, b),
            (TempKind::Trans, true, _) => rho = m.and(rho, b),
            (TempKind::Ini, false, true) => others_now = m.and(others_now, b),
            (TempKind::Trans, false, true) => others_next = m.and(others_next, b),
            _ => {}
        }
    }
    let v_now = levels_of(&enc.bits, false);
    let v_next = levels_of(&enc.bits, true);

    // Initial situations: valid current values of the other variables.
    let cube_now = m.cube(&v_now);
    let exists_init = m.exists(cube_now, iota);
    let missing_init = {
        let n = m.not(exists_init);
        m.and(others_now, n)
    };
    let ambiguous_init = {
        let a = ambiguous(m, iota, &v_now);
        m.and(others_now, a)
    };
    // Steps: any valid current state and valid next values of the others.
    let situation = m.and(others_now, others_next);
    let cube_next = m.cube(&v_next);
    let exists_step = m.exists(cube_next, rho);
    let missing_step = {
        let n = m.not(exists_step);
        m.and(situation, n)
    };
    let ambiguous_step = {
        let a = ambiguous(m, rho, &v_next);
        m.and(situation, a)
    };

    let other_now_levels: Vec<Level> = (0..kernel.vars.len() as u32)
        .map(|i| VarId(i).level())
        .filter(|l| !v_now.contains(l))
        .collect();
    let other_next_levels: Vec<Level> = (0..kernel.vars.len() as u32)
        .map(|i| VarId(i).primed_level())
        .filter(|l| !v_next.contains(l))
        .collect();
    let restricts_init = m.support(exists_init).iter().any(|l| other_now_levels.contains(l));
    let restricts_step = m.support(exists_step).iter().any(|l| other_next_levels.contains(l));

    let deterministic = ambiguous_init.is_false() && ambiguous_step.is_false();
    let complete = missing_init.is_false() && missing_step.is_false();
    let restricts_others = restricts_init || restricts_step;
    let failing = [
        (missing_init, "no initial value satisfies the monitor"),
        (missing_step, "no next value satisfies the monitor"),
        (ambiguous_init, "more than one initial value satisfies the monitor"),
        (ambiguous_step, "more than one next value satisfies the monitor"),
    ];
    let witness = failing
        .iter()
        .find(|(f, _)| !f.is_false())
        .map(|(f, reason)| witness(m, &kernel, *f, reason));
    Ok(MonitorVerdict { deterministic, complete, restricts_others, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semcheck::check;
    use crate::syntax::parse;

    fn verdict(src: &str) -> MonitorVerdict {
        check_monitor(&check(parse(src).unwrap()).unwrap(), "m").unwrap()
    }

    #[test]
    fn well_formed_monitor() {
        let v = verdict("spec A env boolean x; monitor boolean m { ini !m; trans next(m) <-> x; }");
        assert!(v.deterministic && v.complete && !v.restricts_others, "{v:?}");
        assert!(v.witness.is_none());
    }

    #[test]
    fn unconstrained_initial_value_is_nondeterministic() {
        let v = verdict("spec A env boolean x; monitor boolean m { trans next(m) <-> x; }");
        assert!(!v.deterministic && v.complete);
        assert!(v.witness.unwrap().reason.contains("more than one initial"));
    }

    #[test]
    fn restricting_another_variable() {
        let v = verdict("spec A env boolean x; monitor boolean m { ini !m; trans next(x) & next(m); }");
        assert!(v.restricts_others && !v.complete, "{v:?}");
        let w = v.witness.unwrap();
        assert!(w.values.contains(&("x'".to_string(), "false".to_string())), "{w:?}");
    }

    #[test]
    fn unknown_monitor() {
        let spec = check(parse("spec A env boolean x;").unwrap()).unwrap();
        assert!(matches!(check_monitor(&spec, "m"), Err(AnalysisError::UnknownMonitor(_))));
    }
}
