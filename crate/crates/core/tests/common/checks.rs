//! Per-item checks shared by the test suites and the acceptance report.
//! Each returns a description of the first discrepancy it finds.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use spectra_core::analyses::CoreReport;
use spectra_core::lowering::{KernelSpec, Role, Value, VarEncoding};
use spectra_core::oracle::{eval_pastltl, Trace};
use spectra_core::semcheck::{check, types::Ty, CheckedSpec, SymbolKind};
use spectra_core::syntax::{parse, parse_expr, print_spec, without_spans, Element, TempKind, VarKind};

fn symbols(spec: &CheckedSpec) -> BTreeMap<String, (SymbolKind, Option<Ty>)> {
    spec.symbols.globals.iter().map(|(n, s)| (n.clone(), (s.kind, s.ty.clone()))).collect()
}

/// Parses, prints and re-parses a file, then checks both parses.
pub fn round_trip(path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let ast = parse(&text).map_err(|d| format!("{d:?}"))?;
    let printed = print_spec(&ast);
    let again = parse(&printed).map_err(|d| format!("reprint does not parse: {d:?}\n{printed}"))?;
    if without_spans(&ast) != without_spans(&again) {
        return Err("reparse differs".into());
    }
    if print_spec(&again) != printed {
        return Err("printing is not a fixpoint".into());
    }
    if !ast.imports.is_empty() {
        return Ok(());
    }
    let first = check(ast).map_err(|d| format!("{d:?}"))?;
    let second = check(again).map_err(|d| format!("reprint does not check: {d:?}"))?;
    if without_spans(&first.ast) != without_spans(&second.ast) || symbols(&first) != symbols(&second) {
        return Err("re-check differs".into());
    }
    Ok(())
}

fn declared(ty: &Ty) -> Vec<Value> {
    match ty {
        Ty::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Ty::Enum(vals) => vals.iter().map(|v| Value::Enum(v.clone())).collect(),
        Ty::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
    }
}

/// Number of codes the validity constraints of `enc` accept, counted by
/// evaluating them on every code.
pub fn accepted_codes(k: &KernelSpec, enc: &VarEncoding) -> Result<usize, String> {
    let find = |kind: &str| {
        let name = format!("__valid_{}_{kind}", enc.name);
        k.constraints.iter().find(move |c| c.name.as_deref() == Some(name.as_str()))
    };
    let (ini, trans) = (find("ini"), find("trans"));
    let mut count = 0;
    for code in 0u64..1 << enc.width() {
        let mut bits = vec![false; k.vars.len()];
        for (j, &b) in enc.bits.iter().enumerate() {
            bits[b as usize] = code >> j & 1 == 1;
        }
        let now = ini.is_none_or(|c| c.expr.eval(&bits, &bits));
        let next = trans.is_none_or(|c| c.expr.eval(&bits, &bits));
        if now != next {
            return Err(format!("`{}`: initial and safety validity differ on code {code}", enc.name));
        }
        count += usize::from(now);
    }
    Ok(count)
}

/// Encoding and decoding are inverse, exactly the declared values decode,
/// and the validity constraints accept exactly their codes.
pub fn encoding_exact(k: &KernelSpec, enc: &VarEncoding) -> Result<(), String> {
    let values = declared(&enc.ty);
    if enc.values() != values {
        return Err(format!("`{}`: value list differs from the declaration", enc.name));
    }
    let mut codes = HashSet::new();
    for v in &values {
        let bits = enc.encode(v).ok_or_else(|| format!("`{}`: {v} has no code", enc.name))?;
        if bits.len() != enc.width() || enc.decode(&bits).as_ref() != Some(v) || !codes.insert(bits) {
            return Err(format!("`{}`: {v} does not round trip", enc.name));
        }
    }
    let decodable = (0u64..1 << enc.width())
        .filter(|code| {
            let bits: Vec<bool> = (0..enc.width()).map(|j| code >> j & 1 == 1).collect();
            enc.decode(&bits).is_some()
        })
        .count();
    let accepted = accepted_codes(k, enc)?;
    if decodable != values.len() || accepted != values.len() {
        return Err(format!(
            "`{}`: {} values, {decodable} decodable codes, {accepted} accepted codes",
            enc.name,
            values.len()
        ));
    }
    if 1usize << enc.width() < values.len() || 1usize << enc.width() >= 2 * values.len().max(2) {
        return Err(format!("`{}`: width {} for {} values", enc.name, enc.width(), values.len()));
    }
    Ok(())
}

/// Variables of the past-time formulas in [`past_agree`].
pub const PAST_VARS: [&str; 3] = ["a", "b", "c"];

/// Values of every kernel variable along `inputs`, found by enumerating the
/// system bits that satisfy the initial and safety guarantees. Fails unless
/// exactly one valuation exists at every step.
fn aux_run(k: &KernelSpec, inputs: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, String> {
    let env: Vec<usize> = PAST_VARS
        .iter()
        .map(|v| k.vars.iter().position(|kv| kv.name == *v).ok_or("missing input bit"))
        .collect::<Result<_, _>>()?;
    let sys: Vec<usize> = (0..k.vars.len()).filter(|&i| k.vars[i].kind == VarKind::Sys).collect();
    if sys.len() > 14 {
        return Err(format!("{} system bits", sys.len()));
    }
    let ini: Vec<_> = k.constraints_of(Role::Guarantee, TempKind::Ini).collect();
    let trans: Vec<_> = k.constraints_of(Role::Guarantee, TempKind::Trans).collect();
    let mut run: Vec<Vec<bool>> = Vec::new();
    for (step, input) in inputs.iter().enumerate() {
        let mut found = Vec::new();
        for code in 0u32..1 << sys.len() {
            let mut state = vec![false; k.vars.len()];
            for (j, &e) in env.iter().enumerate() {
                state[e] = input[j];
            }
            for (j, &s) in sys.iter().enumerate() {
                state[s] = code >> j & 1 == 1;
            }
            let ok = match run.last() {
                None => ini.iter().all(|c| c.expr.eval(&state, &state)),
                Some(prev) => trans.iter().all(|c| c.expr.eval(prev, &state)),
            };
            if ok {
                found.push(state);
            }
        }
        if found.len() != 1 {
            return Err(format!("{} valuations at step {step}", found.len()));
        }
        run.push(found.pop().unwrap());
    }
    Ok(run)
}

/// Checks the lowered form of a past-time formula over [`PAST_VARS`] against
/// its trace semantics on one input trace.
pub fn past_agree(formula: &str, inputs: &[Vec<bool>]) -> Result<(), String> {
    let src = format!("spec P env boolean a; env boolean b; env boolean c; sys boolean r; gar alw r <-> ({formula});");
    let spec = super::check_text(&src);
    let k = super::kernel(&spec);
    let r = k.vars.iter().position(|v| v.name == "r").ok_or("missing r")?;
    let run = aux_run(&k, inputs).map_err(|e| format!("`{formula}`: {e}"))?;
    let trace = Trace::new(
        inputs
            .iter()
            .map(|row| PAST_VARS.iter().zip(row).map(|(n, &v)| (n.to_string(), Value::Bool(v))).collect::<BTreeMap<_, _>>())
            .collect(),
    );
    let f = parse_expr(formula).map_err(|d| format!("{d:?}"))?;
    for (i, state) in run.iter().enumerate() {
        let expected = eval_pastltl(&f, &trace, i).map_err(|e| e.to_string())?;
        if state[r] != expected {
            return Err(format!("`{formula}` at position {i}: lowered {} but trace semantics {expected}", state[r]));
        }
    }
    Ok(())
}

/// Positions among the guarantees of the reported core.
pub fn core_indices(spec: &CheckedSpec, report: &CoreReport) -> BTreeSet<usize> {
    let guarantees: Vec<usize> = spec
        .ast
        .elements
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e, Element::Guarantee(_)))
        .map(|(i, _)| i)
        .collect();
    report
        .core
        .iter()
        .map(|g| guarantees.iter().position(|&i| i == g.element).expect("core entry is a guarantee"))
        .collect()
}

/// Checks with oracle verdicts for every subset of the guarantees that the
/// specification is unrealizable, the core is unrealizable and dropping any
/// one of its guarantees makes it realizable. Returns the core.
pub fn minimal_core(spec: &CheckedSpec, report: &CoreReport) -> Result<BTreeSet<usize>, String> {
    let n = super::guarantee_count(spec);
    if n > 8 {
        return Err(format!("{n} guarantees"));
    }
    let verdicts: Vec<bool> = (0u32..1 << n)
        .map(|mask| {
            let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            super::oracle_verdict(&super::with_guarantees(spec, &keep))
        })
        .collect();
    let mask = |set: &BTreeSet<usize>| set.iter().map(|i| 1usize << i).sum::<usize>();
    if verdicts[verdicts.len() - 1] {
        return Err("the oracle finds the specification realizable".into());
    }
    let core = core_indices(spec, report);
    if verdicts[mask(&core)] {
        return Err(format!("core {core:?} is realizable"));
    }
    for g in &core {
        let mut smaller = core.clone();
        smaller.remove(g);
        if !verdicts[mask(&smaller)] {
            return Err(format!("core {core:?} without {g} is still unrealizable"));
        }
    }
    if !report.minimal {
        return Err("report does not claim minimality".into());
    }
    Ok(core)
}
