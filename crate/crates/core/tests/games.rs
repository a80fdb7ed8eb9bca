//! Symbolic GR(1) verdicts against the explicit-state oracle on random and
//! hand-analyzed games.

mod common;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// A random Boolean formula over `vars`, optionally with `next` on some
/// variables.
fn formula(rng: &mut StdRng, vars: &[&str], with_next: bool, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        let v = vars.choose(rng).unwrap();
        let atom = if with_next && rng.gen_bool(0.5) { format!("next({v})") } else { v.to_string() };
        return if rng.gen_bool(0.3) { format!("!{atom}") } else { atom };
    }
    let l = formula(rng, vars, with_next, depth - 1);
    let r = formula(rng, vars, with_next, depth - 1);
    let op = ["&", "|", "->", "<->"].choose(rng).unwrap();
    format!("({l} {op} {r})")
}

/// A random specification over a few Boolean inputs and outputs and at most
/// one three-valued output.
fn random_game(rng: &mut StdRng) -> String {
    let env: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("e{i}")).collect();
    let mut sys: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("s{i}")).collect();
    let mut src = String::from("spec G\n");
    for e in &env {
        src += &format!("env boolean {e};\n");
    }
    for s in &sys {
        src += &format!("sys boolean {s};\n");
    }
    if rng.gen_bool(0.3) {
        src += "sys {LO, MID, HI} m;\n";
        sys.push("(m = MID)".into());
    }
    let env_vars: Vec<&str> = env.iter().map(String::as_str).collect();
    let all: Vec<&str> = env.iter().chain(&sys).map(String::as_str).collect();
    for _ in 0..rng.gen_range(0..=2) {
        src += &match rng.gen_range(0..3) {
            0 => format!("asm ini {};\n", formula(rng, &env_vars, false, 1)),
            1 => {
                let cur = formula(rng, &all, false, 1);
                let nxt = formula(rng, &env_vars, true, 1);
                format!("asm trans {cur} -> {nxt};\n")
            }
            _ => format!("asm alwEv {};\n", formula(rng, &all, false, 1)),
        };
    }
    for _ in 0..rng.gen_range(1..=4) {
        src += &match rng.gen_range(0..4) {
            0 => format!("gar ini {};\n", formula(rng, &all, false, 2)),
            1 => format!("gar trans {};\n", formula(rng, &all, true, 2)),
            2 => format!("gar alw {};\n", formula(rng, &all, false, 2)),
            _ => format!("gar alwEv {};\n", formula(rng, &all, false, 1)),
        };
    }
    src
}

#[test]
fn random_games_agree_with_the_oracle() {
    let mut rng = StdRng::seed_from_u64(41);
    let mut verdicts = [0usize; 2];
    for _ in 0..500 {
        let src = random_game(&mut rng);
        let spec = common::check_text(&src);
        let symbolic = common::gr1_verdict(&spec);
        assert_eq!(symbolic, common::oracle_verdict(&spec), "{src}");
        verdicts[symbolic as usize] += 1;
    }
    assert!(verdicts[0] > 50 && verdicts[1] > 50, "{verdicts:?}");
}

fn verdicts(src: &str) -> (bool, bool) {
    let spec = common::check_text(src);
    (common::gr1_verdict(&spec), common::oracle_verdict(&spec))
}

#[test]
fn hand_analyzed_games() {
    let head = "spec K env boolean x; sys boolean y;";
    assert_eq!(verdicts(&format!("{head} gar alw y <-> x;")), (true, true));
    assert_eq!(verdicts(&format!("{head} gar trans y <-> next(x);")), (false, false));
    assert_eq!(verdicts(&format!("{head} gar alwEv x & y;")), (false, false));
    assert_eq!(verdicts(&format!("{head} asm alwEv x; gar alwEv x & y;")), (true, true));
}

#[test]
fn reduced_forklift_agrees_with_the_oracle() {
    let spec = common::load_spec(&common::corpus_dir().join("forklift/forklift_two_value_motors.spectra"));
    assert_eq!(common::gr1_verdict(&spec), common::oracle_verdict(&spec));
}
