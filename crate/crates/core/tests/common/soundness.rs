//! Closed-loop checks of synthesized controllers against independently
//! evaluated constraints.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;

use spectra_core::gr1::{enumerate_concrete, Gr1Error};
use spectra_core::lowering::{Value, VarEncoding};
use spectra_core::oracle::fair_cycle_without;
use spectra_core::runtime::{load as load_controller, save, Controller, WalkSession, DEFAULT_OPTION_CAP};
use spectra_core::semcheck::CheckedSpec;
use spectra_core::syntax::VarKind;

use super::{all_hold, failing, kernel, load, Obligations};

type Typed = BTreeMap<String, Value>;

/// A realizable corpus specification with its controller.
pub struct Synthesized {
    pub path: PathBuf,
    pub spec: CheckedSpec,
    pub obligations: Obligations,
    pub controller: Controller,
}

/// Synthesizes every realizable specification of the corpus.
pub fn realizable_corpus() -> Vec<Synthesized> {
    let mut out = Vec::new();
    for path in super::all_specs() {
        let (sources, spec) = load(&path);
        match Controller::synthesize(&kernel(&spec), Some(&sources)) {
            Ok(controller) => {
                let obligations = Obligations::of(&spec);
                out.push(Synthesized { path, spec, obligations, controller })
            }
            Err(Gr1Error::Unrealizable) => {}
            Err(e) => panic!("{}: {e}", path.display()),
        }
    }
    out
}

fn typed(encodings: &[VarEncoding], bits: &[bool]) -> Result<Typed, String> {
    encodings
        .iter()
        .map(|e| {
            let b: Vec<bool> = e.bits.iter().map(|&i| bits[i as usize]).collect();
            let v = e.decode(&b).ok_or_else(|| format!("invalid code {b:?} for `{}`", e.name))?;
            Ok((e.name.clone(), v))
        })
        .collect()
}

/// Steps taken before starting a fresh run.
const RUN_LENGTH: usize = 250;

/// Drives the controller with `steps` random legal inputs, in runs of at
/// most [`RUN_LENGTH`] steps, checking every state against the guarantees
/// and every offered input against the assumptions. Returns the number of
/// steps taken, which is smaller than `steps` only when no initial input is
/// legal.
pub fn drive(c: &Controller, ob: &Obligations, steps: usize, rng: &mut StdRng) -> Result<usize, String> {
    let bytes = save(c);
    let encodings = c.encodings.clone();
    let mut done = 0;
    while done < steps {
        let mut walk = WalkSession::new(load_controller(&bytes).map_err(|e| e.to_string())?);
        let (options, _) = walk.env_options(DEFAULT_OPTION_CAP);
        if options.is_empty() {
            return Ok(done);
        }
        let inputs = options[rng.gen_range(0..options.len())].clone();
        walk.initial(&inputs).map_err(|e| format!("initial {inputs:?}: {e}"))?;
        let s0 = typed(&encodings, walk.raw_state(0).unwrap())?;
        for (name, v) in &inputs {
            if &s0[name] != v {
                return Err(format!("initial state ignores input {name} = {v}"));
            }
        }
        if !all_hold(&ob.asm_ini, &s0, &s0) {
            return Err(format!("offered illegal initial inputs {inputs:?}"));
        }
        let bad = failing(&ob.gar_ini, &s0, &s0);
        if !bad.is_empty() {
            return Err(format!("initial state {s0:?} violates {bad:?}"));
        }
        done += 1;
        let mut prev = s0;
        for _ in 0..RUN_LENGTH {
            if done == steps {
                break;
            }
            let (options, _) = walk.env_options(DEFAULT_OPTION_CAP);
            if options.is_empty() {
                return Err(format!("no legal input from {prev:?}"));
            }
            let inputs = options[rng.gen_range(0..options.len())].clone();
            walk.step(&inputs).map_err(|e| format!("step from {prev:?} with {inputs:?}: {e}"))?;
            let cur = typed(&encodings, walk.raw_state(walk.cursor()).unwrap())?;
            if !all_hold(&ob.asm_trans, &prev, &cur) {
                return Err(format!("offered illegal inputs {inputs:?} after {prev:?}"));
            }
            let bad = failing(&ob.gar_trans, &prev, &cur);
            if !bad.is_empty() {
                return Err(format!("step {prev:?} -> {cur:?} violates {bad:?}"));
            }
            done += 1;
            prev = cur;
        }
    }
    Ok(done)
}

/// All assignments to the environment variables.
fn input_space(encodings: &[VarEncoding]) -> Vec<Typed> {
    let mut rows = vec![Typed::new()];
    for e in encodings.iter().filter(|e| e.kind == VarKind::Env) {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                e.values().into_iter().map(move |v| {
                    let mut r = r.clone();
                    r.insert(e.name.clone(), v);
                    r
                })
            })
            .collect();
    }
    rows
}

/// Summary of an explicit product check.
pub struct ProductReport {
    pub states: usize,
    pub transitions: usize,
}

/// Enumerates the controller and checks its explicit product with the
/// environment: transitions satisfy the guarantees, every legal input is
/// answered, and no reachable fair cycle avoids a system justice goal.
pub fn product_check(c: &mut Controller, ob: &Obligations, max_states: usize) -> Result<ProductReport, String> {
    let encodings = c.encodings.clone();
    let cc = enumerate_concrete(&mut c.symbolic, max_states).map_err(|e| e.to_string())?;
    let states: Vec<Typed> = cc.states.iter().map(|b| typed(&encodings, b)).collect::<Result<_, _>>()?;
    let space = input_space(&encodings);
    let any = states.first().cloned().unwrap_or_default();
    let legal_initial = space
        .iter()
        .filter(|x| {
            let mut s = any.clone();
            s.extend((*x).clone());
            all_hold(&ob.asm_ini, &s, &s)
        })
        .count();
    if cc.initial.len() != legal_initial {
        return Err(format!("{} initial choices for {legal_initial} legal initial inputs", cc.initial.len()));
    }
    for (_, i) in &cc.initial {
        let bad = failing(&ob.gar_ini, &states[*i], &states[*i]);
        if !bad.is_empty() {
            return Err(format!("initial state {:?} violates {bad:?}", states[*i]));
        }
    }
    let mut succ = Vec::with_capacity(states.len());
    for (s, edges) in cc.transitions.iter().enumerate() {
        let legal = space
            .iter()
            .filter(|x| {
                let mut t = states[s].clone();
                t.extend((*x).clone());
                all_hold(&ob.asm_trans, &states[s], &t)
            })
            .count();
        if edges.len() != legal {
            return Err(format!("state {:?} answers {} of {legal} legal inputs", states[s], edges.len()));
        }
        for (_, t) in edges {
            let bad = failing(&ob.gar_trans, &states[s], &states[*t]);
            if !bad.is_empty() {
                return Err(format!("transition {:?} -> {:?} violates {bad:?}", states[s], states[*t]));
            }
        }
        succ.push(edges.iter().map(|(_, t)| *t).collect::<Vec<usize>>());
    }
    let holds_at = |e: &spectra_core::syntax::Expr, s: &Typed| all_hold(std::slice::from_ref(e), s, s);
    let je: Vec<Vec<bool>> = ob.asm_justice.iter().map(|e| states.iter().map(|s| holds_at(e, s)).collect()).collect();
    for goal in &ob.gar_justice {
        let js: Vec<bool> = states.iter().map(|s| holds_at(goal, s)).collect();
        if let Some(comp) = fair_cycle_without(&succ, &je, &js) {
            let sample: Vec<&Typed> = comp.iter().take(3).map(|&i| &states[i]).collect();
            return Err(format!(
                "fair cycle of {} states avoids `{}`, e.g. {sample:?}",
                comp.len(),
                spectra_core::syntax::print_expr(goal)
            ));
        }
    }
    Ok(ProductReport { states: states.len(), transitions: cc.transition_count() })
}
