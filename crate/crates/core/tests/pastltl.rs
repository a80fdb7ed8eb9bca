//! The auxiliary variables introduced for past-time operators follow the
//! trace semantics of the formulas they replace.

mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::checks::{past_agree as agree, PAST_VARS as VARS};

fn random_case(rng: &mut StdRng) -> (String, Vec<Vec<bool>>) {
    let formula = common::random_past_formula(rng, &VARS, 4);
    let len = rng.gen_range(1..=8);
    let inputs = (0..len).map(|_| (0..3).map(|_| rng.gen()).collect()).collect();
    (formula, inputs)
}

#[test]
fn random_formulas_agree_with_trace_semantics() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let (formula, inputs) = random_case(&mut rng);
        if let Err(e) = agree(&formula, &inputs) {
            panic!("{e} on inputs {inputs:?}");
        }
    }
}

#[test]
fn hand_checked_formulas() {
    let t = |rows: &[[bool; 3]]| rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    let trace = t(&[[true, false, false], [false, true, false], [true, false, true], [false, false, false]]);
    for f in ["Y(a)", "H(a | b)", "O(c)", "a S b", "Y(a S b)", "H(O(a))", "PREV(PREV(b))", "!(a SINCE c)", "ONCE(HISTORICALLY(a))"] {
        agree(f, &trace).unwrap();
    }
}
