//! Synthesized controllers in closed loop, on their explicit product, and
//! through the controller file format.

mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::soundness::{drive, product_check, realizable_corpus};
use spectra_core::bdd::VarId;
use spectra_core::runtime::{load, save, Controller, LoadError};

#[test]
fn closed_loop_runs_respect_the_guarantees() {
    let mut rng = StdRng::seed_from_u64(21);
    for s in realizable_corpus() {
        drive(&s.controller, &s.obligations, 1000, &mut rng).unwrap_or_else(|e| panic!("{}: {e}", s.path.display()));
    }
}

#[test]
fn explicit_products_are_sound() {
    for mut s in realizable_corpus() {
        let report = product_check(&mut s.controller, &s.obligations, 10_000)
            .unwrap_or_else(|e| panic!("{}: {e}", s.path.display()));
        assert!(report.states <= 10_000);
    }
}

#[test]
fn mirror_controller_copies_its_input() {
    let spec = common::check_text("spec A env boolean x; sys boolean y; gar alw y <-> x;");
    let mut c = Controller::synthesize(&common::kernel(&spec), None).unwrap();
    let ob = common::Obligations::of(&spec);
    let mut rng = StdRng::seed_from_u64(22);
    assert_eq!(drive(&c, &ob, 1000, &mut rng).unwrap(), 1000);
    let report = product_check(&mut c, &ob, 100).unwrap();
    assert!(report.states <= 4);
}

#[test]
fn justice_needs_its_assumption() {
    let spec = common::check_text("spec A env boolean x; sys boolean y; asm alwEv x; gar alwEv x & y;");
    let mut c = Controller::synthesize(&common::kernel(&spec), None).unwrap();
    let report = product_check(&mut c, &common::Obligations::of(&spec), 64).unwrap();
    assert!(report.states <= 64);
}

#[test]
fn controller_files_round_trip() {
    let corpus = realizable_corpus();
    assert!(corpus.len() > 40);
    for s in corpus {
        let bytes = save(&s.controller);
        let loaded = load(&bytes).unwrap_or_else(|e| panic!("{}: {e}", s.path.display()));
        assert_eq!(save(&loaded), bytes, "{}", s.path.display());
        let levels = |c: &Controller| -> Vec<u32> {
            (0..c.num_vars() as u32).flat_map(|i| [VarId(i).level(), VarId(i).primed_level()]).collect()
        };
        let count = |c: &Controller| c.symbolic.manager.sat_count(c.symbolic.trans, &levels(c));
        assert_eq!(count(&s.controller), count(&loaded), "{}", s.path.display());
        assert_eq!(s.controller.initial_state_count(), loaded.initial_state_count());
        assert_eq!(s.controller.encodings, loaded.encodings);
    }
}

#[test]
fn unsatisfiable_initial_assumption_gives_an_empty_controller() {
    let spec = common::check_text("spec A env boolean x; sys boolean y; asm ini x & !x; gar alw y;");
    let c = Controller::synthesize(&common::kernel(&spec), None).unwrap();
    let loaded = load(&save(&c)).unwrap();
    assert_eq!(loaded.initial_state_count(), 0);
    let mut rng = StdRng::seed_from_u64(23);
    assert_eq!(drive(&loaded, &common::Obligations::of(&spec), 10, &mut rng).unwrap(), 0);
}

#[test]
fn corrupt_child_is_reported_by_node() {
    let spec = common::check_text("spec A env boolean x; sys boolean y; gar alw y <-> x;");
    let c = Controller::synthesize(&common::kernel(&spec), None).unwrap();
    let mut bytes = save(&c);
    let (offset, id) = find_node_table(&bytes);
    bytes[offset + 12..offset + 16].copy_from_slice(&u32::MAX.to_le_bytes());
    match load(&bytes) {
        Err(LoadError::DanglingNode { node, child }) => {
            assert_eq!(node, id);
            assert_eq!(child, u32::MAX);
        }
        other => panic!("{other:?}"),
    }
}

/// Offset and id of the first internal node record: the record following
/// the two terminal records `(0, MAX, 0, 0)` and `(1, MAX, 1, 1)`.
fn find_node_table(bytes: &[u8]) -> (usize, u32) {
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    for at in 0..bytes.len() - 32 {
        if word(at) == 0 && word(at + 4) == u32::MAX && word(at + 8) == 0 && word(at + 12) == 0
            && word(at + 16) == 1 && word(at + 20) == u32::MAX && word(at + 24) == 1 && word(at + 28) == 1
        {
            return (at + 32, word(at + 32));
        }
    }
    panic!("no node table");
}
