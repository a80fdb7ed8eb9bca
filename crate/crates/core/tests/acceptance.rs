//! Acceptance report: prints one PASS or FAIL line per criterion and exits
//! with a nonzero status if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::checks::{accepted_codes, encoding_exact, minimal_core, past_agree, round_trip, PAST_VARS};
use common::soundness::{drive, product_check, realizable_corpus, Synthesized};
use common::{formula_bdd, Formula};
use spectra_core::analyses::unrealizable_core;
use spectra_core::bdd::{BddManager, Level};
use spectra_core::runtime::{load, save};
use spectra_core::syntax::VarKind;

#[derive(Default)]
struct Report {
    failed: usize,
}

impl Report {
    /// Runs one criterion, failing it on error, panic or exceeded budget.
    fn run(&mut self, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {:.1} s, budget {:.0} s", elapsed.as_secs_f64(), b.as_secs_f64())),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} ({:.2} s)", elapsed.as_secs_f64()),
            Err(reason) => {
                self.failed += 1;
                println!("FAIL  {name}: {reason} ({:.2} s)", elapsed.as_secs_f64());
            }
        }
    }
}

const ALTERNATIVES: [(&str, &str); 11] = [
    ("alw", "always"),
    ("alwEv", "alwaysEventually"),
    ("asm", "assumption"),
    ("env", "input"),
    ("gar", "guarantee"),
    ("H", "HISTORICALLY"),
    ("ini", "initially"),
    ("O", "ONCE"),
    ("S", "SINCE"),
    ("sys", "output"),
    ("Y", "PREV"),
];

fn grammar() -> Result<String, String> {
    let mut files = common::corpus("grammar");
    if files.len() < 30 {
        return Err(format!("only {} grammar specs", files.len()));
    }
    let mut words = std::collections::BTreeSet::new();
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        words.extend(text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).map(String::from));
    }
    for (short, verbose) in ALTERNATIVES {
        if !words.contains(short) || !words.contains(verbose) {
            return Err(format!("keyword pair {short}/{verbose} not covered"));
        }
    }
    files.push(common::corpus_dir().join("imports/main.spectra"));
    for path in &files {
        round_trip(path).map_err(|e| format!("{}: {e}", common::file_name(path)))?;
    }
    Ok(format!("{} specs round trip and re-check", files.len()))
}

fn lowering_semantics() -> Result<String, String> {
    let files = common::corpus("lowering");
    if files.len() < 20 {
        return Err(format!("only {} lowering specs", files.len()));
    }
    let mut text = String::new();
    let mut verdicts = [0usize; 2];
    for path in &files {
        text += &std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let spec = common::load_spec(path);
        let bits = common::kernel(&spec).vars.len();
        if bits > 12 {
            return Err(format!("{}: {bits} kernel bits", common::file_name(path)));
        }
        let symbolic = common::gr1_verdict(&spec);
        if symbolic != common::oracle_verdict(&spec) {
            return Err(format!("{}: symbolic verdict {symbolic} disagrees with the oracle", common::file_name(path)));
        }
        verdicts[symbolic as usize] += 1;
    }
    for feature in ["define", "type", "Int(", "alw ", "predicate", "monitor", "pattern", "Y(", "O(", "H(", " S ", "import", "{"] {
        if !text.contains(feature) {
            return Err(format!("no spec uses `{feature}`"));
        }
    }
    Ok(format!("{} specs agree ({} realizable, {} unrealizable)", files.len(), verdicts[1], verdicts[0]))
}

fn pastltl() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let formula = common::random_past_formula(&mut rng, &PAST_VARS, 4);
        let len = rng.gen_range(1..=8);
        let inputs: Vec<Vec<bool>> = (0..len).map(|_| (0..3).map(|_| rng.gen()).collect()).collect();
        past_agree(&formula, &inputs).map_err(|e| format!("{e} on {inputs:?}"))?;
    }
    Ok("1000 random formula and trace pairs agree".into())
}

fn encoding() -> Result<String, String> {
    let mut checked = 0;
    for path in common::all_specs() {
        let k = common::kernel(&common::load_spec(&path));
        for enc in &k.encodings {
            encoding_exact(&k, enc).map_err(|e| format!("{}: {e}", common::file_name(&path)))?;
            checked += 1;
        }
    }
    let k = common::kernel(&common::load_spec(&common::corpus_dir().join("forklift/forklift.spectra")));
    let motor = k.encoding("mLeft").ok_or("no mLeft")?;
    let accepted = accepted_codes(&k, motor)?;
    if (accepted, 1 << motor.width()) != (3, 4) {
        return Err(format!("MotorCmd accepts {accepted} of {} codes", 1 << motor.width()));
    }
    Ok(format!("{checked} encodings exact, MotorCmd accepts 3 of 4 codes"))
}

fn bdd_canonicity() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(11);
    let mut m = BddManager::new();
    let vars: Vec<_> = (0..6).map(|_| m.new_var()).collect();
    let table = |m: &BddManager, f| -> Vec<bool> {
        (0..64u32).map(|r| m.eval(f, |l: Level| l % 2 == 0 && r >> (l / 2) & 1 == 1)).collect()
    };
    let mut equal = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        let f = Formula::random(&mut rng, n, 5);
        let g = if rng.gen() { f.rewrite(&mut rng) } else { Formula::random(&mut rng, n, 5) };
        let (bf, bg) = (formula_bdd(&mut m, &vars, &f), formula_bdd(&mut m, &vars, &g));
        let (tf, tg) = (f.truth_table(6), g.truth_table(6));
        if table(&m, bf) != tf || table(&m, bg) != tg {
            return Err(format!("diagram of {f:?} or {g:?} has the wrong truth table"));
        }
        if (bf == bg) != (tf == tg) {
            return Err(format!("handle equality differs from truth-table equality on {f:?} and {g:?}"));
        }
        equal += usize::from(tf == tg);
    }
    m.audit().map_err(|e| e.to_string())?;
    Ok(format!("1000 pairs, {equal} equivalent"))
}

fn soundness(corpus: &mut [Synthesized]) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(21);
    let (mut steps, mut states) = (0, 0);
    for s in corpus.iter_mut() {
        let name = common::file_name(&s.path);
        let taken = drive(&s.controller, &s.obligations, 10_000, &mut rng).map_err(|e| format!("{name}: {e}"))?;
        if taken != 10_000 && s.controller.initial_state_count() > 0 {
            return Err(format!("{name}: stopped after {taken} steps"));
        }
        steps += taken;
        states += product_check(&mut s.controller, &s.obligations, 10_000).map_err(|e| format!("{name}: {e}"))?.states;
    }
    Ok(format!("{} controllers, {steps} steps, {states} product states", corpus.len()))
}

fn known_verdicts() -> Result<String, String> {
    let head = "spec K env boolean x; sys boolean y;";
    let games = [
        (format!("{head} gar alw y <-> x;"), true),
        (format!("{head} gar trans y <-> next(x);"), false),
        (format!("{head} gar alwEv x & y;"), false),
        (format!("{head} asm alwEv x; gar alwEv x & y;"), true),
    ];
    for (src, expected) in &games {
        let spec = common::check_text(src);
        let (symbolic, explicit) = (common::gr1_verdict(&spec), common::oracle_verdict(&spec));
        if (symbolic, explicit) != (*expected, *expected) {
            return Err(format!("`{src}`: symbolic {symbolic}, oracle {explicit}, expected {expected}"));
        }
    }
    Ok(format!("{} games", games.len()))
}

fn ddmin() -> Result<String, String> {
    let files = common::corpus("cores");
    if files.len() < 5 {
        return Err(format!("only {} unrealizable specs", files.len()));
    }
    let mut sizes = Vec::new();
    for path in &files {
        let spec = common::load_spec(path);
        let report = unrealizable_core(&spec).map_err(|e| e.to_string())?;
        let core = minimal_core(&spec, &report).map_err(|e| format!("{}: {e}", common::file_name(path)))?;
        sizes.push(format!("{}/{}", core.len(), common::guarantee_count(&spec)));
    }
    Ok(format!("{} cores minimal (sizes {})", files.len(), sizes.join(", ")))
}

fn forklift() -> Result<String, String> {
    let spec = common::load_spec(&common::corpus_dir().join("forklift/forklift.spectra"));
    let k = common::kernel(&spec);
    let bits = |kind: VarKind| k.vars.iter().filter(|v| v.kind == kind).count();
    if (bits(VarKind::Env), bits(VarKind::Sys)) != (5, 9) {
        return Err(format!("{} input bits and {} output bits", bits(VarKind::Env), bits(VarKind::Sys)));
    }
    let full = common::gr1_verdict(&spec);
    let reduced = common::load_spec(&common::corpus_dir().join("forklift/forklift_two_value_motors.spectra"));
    let (symbolic, explicit) = (common::gr1_verdict(&reduced), common::oracle_verdict(&reduced));
    if symbolic != explicit {
        return Err(format!("two-value variant: symbolic {symbolic}, oracle {explicit}"));
    }
    let word = |b: bool| if b { "realizable" } else { "unrealizable" };
    Ok(format!("5 + 9 bits; full spec {}; two-value variant {} by both solvers", word(full), word(symbolic)))
}

fn file_round_trip(corpus: &[Synthesized]) -> Result<String, String> {
    for s in corpus {
        let bytes = save(&s.controller);
        let loaded = load(&bytes).map_err(|e| format!("{}: {e}", common::file_name(&s.path)))?;
        if save(&loaded) != bytes {
            return Err(format!("{}: re-save differs", common::file_name(&s.path)));
        }
    }
    Ok(format!("{} controllers re-save identically", corpus.len()))
}

fn main() {
    let mut report = Report::default();
    report.run("grammar coverage", Some(Duration::from_secs(5)), grammar);
    report.run("lowering semantics", Some(Duration::from_secs(60)), lowering_semantics);
    report.run("past-time translation", None, pastltl);
    report.run("enum and integer encoding", None, encoding);
    report.run("BDD canonicity", None, bdd_canonicity);
    let mut corpus = Vec::new();
    report.run("controller soundness", Some(Duration::from_secs(120)), || {
        corpus = realizable_corpus();
        soundness(&mut corpus)
    });
    report.run("known-verdict games", None, known_verdicts);
    report.run("unrealizable cores", None, ddmin);
    report.run("forklift reconstruction", None, forklift);
    report.run("controller file round trip", None, || file_round_trip(&corpus));
    if report.failed > 0 {
        println!("{} criteria failed", report.failed);
        std::process::exit(1);
    }
}
