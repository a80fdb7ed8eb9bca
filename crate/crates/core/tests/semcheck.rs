//! Checker behaviour: idempotence, located diagnostics, import handling,
//! and that every accepted specification lowers.

mod common;

use std::path::{Path, PathBuf};

use proptest::prelude::*;

use spectra_core::diag::{Diagnostic, SourceMap};
use spectra_core::lowering::lower;
use spectra_core::semcheck::{check, check_file, FsLoader};
use spectra_core::syntax::{parse, print_spec, without_spans};

#[test]
fn checking_is_idempotent() {
    for path in common::all_specs() {
        let spec = common::load_spec(&path);
        let again = check(spec.ast.clone()).unwrap_or_else(|d| panic!("{}: {d:?}", path.display()));
        assert_eq!(again, spec, "{}", path.display());
    }
}

/// Source text under the first diagnostic.
fn highlighted(src: &str) -> (String, String) {
    let d = check(parse(src).unwrap()).expect_err("rejected");
    let first = &d[0];
    (src[first.span.start as usize..first.span.end as usize].to_string(), first.message.clone())
}

#[test]
fn diagnostics_point_at_the_offending_text() {
    let cases = [
        ("spec A env boolean x; env boolean x;", "x", "already declared"),
        ("spec A sys boolean y; gar alw z;", "z", "unknown name"),
        ("spec A env boolean x; sys Int(0..3) n; gar alw n & x;", "n", "must be boolean"),
        ("spec A env boolean x; sys boolean y; asm ini y;", "y", "system variable"),
        ("spec A env boolean x; sys boolean y; asm trans next(y) -> x;", "(y)", "under `next`"),
        ("spec A env {L, R} d; sys Int(0..3) n; gar alw d = n;", "d = n", "cannot compare"),
        ("spec A sys Int(0..3) n; gar alw n / 0 = 1;", "0", "division by zero"),
        ("spec A sys Int(3..1) n;", "Int(3..1)", "integer range"),
        ("spec A sys Colour c;", "Colour", "unknown type"),
        ("spec A sys boolean y; predicate p(boolean a) { a } gar alw p(y, y);", "p", "expects 1 argument"),
        ("spec A sys boolean y; define d := d & y; gar alw d;", "d", "recursive"),
        ("spec A sys boolean __y; gar alw __y;", "__y", "reserved"),
        ("spec A sys boolean y; monitor boolean m { alwEv m; } gar alw y;", "alwEv m", "justice"),
        ("spec A env boolean x; asm alw Y(x);", "Y(x)", "past"),
    ];
    for (src, text, fragment) in cases {
        let (got, message) = highlighted(src);
        assert_eq!(got, text, "{src}: {message}");
        assert!(message.contains(fragment), "{src}: {message}");
    }
}

/// Loads a set of in-memory files, keyed by path.
fn memory_loader(files: &'static [(&'static str, &'static str)]) -> impl Fn(&Path) -> Result<String, String> {
    move |p: &Path| {
        files
            .iter()
            .find(|(name, _)| Path::new(name) == p)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| format!("no file {}", p.display()))
    }
}

fn rendered(sources: &SourceMap, diags: &[Diagnostic]) -> Vec<String> {
    diags.iter().map(|d| d.render(sources)).collect()
}

#[test]
fn errors_in_imported_files_name_that_file() {
    let loader = memory_loader(&[
        ("main.spectra", "import \"lib.spectra\";\nspec M\nsys boolean y;\ngar alw both(y, y);\n"),
        ("lib.spectra", "spec L\npredicate both(boolean a, boolean b) {\n  a & c\n}\n"),
    ]);
    let (sources, result) = check_file(Path::new("main.spectra"), &loader);
    let lines = rendered(&sources, &result.expect_err("rejected"));
    assert!(lines.iter().any(|l| l.starts_with("lib.spectra:3:7:") && l.contains("found `c`")), "{lines:?}");
}

#[test]
fn import_cycles_are_reported() {
    let path = common::corpus_dir().join("imports/cycle_a.spectra");
    let (sources, result) = check_file(&path, &FsLoader);
    let lines = rendered(&sources, &result.expect_err("rejected"));
    assert!(lines.iter().any(|l| l.contains("import cycle")), "{lines:?}");
}

#[test]
fn imports_copy_only_what_is_used() {
    let (_, spec) = common::load(&common::corpus_dir().join("imports/main.spectra"));
    let printed = print_spec(&spec.ast);
    assert!(!printed.contains("import"));
    let check_again = check(parse(&printed).unwrap()).unwrap();
    assert_eq!(without_spans(&check_again.ast), without_spans(&spec.ast));
}

#[test]
fn missing_file_is_a_diagnostic() {
    let (_, result) = check_file(&PathBuf::from("/nonexistent/spec.spectra"), &FsLoader);
    let d = result.expect_err("rejected");
    assert!(d[0].message.contains("cannot read"), "{d:?}");
}

/// Corpus specifications without imports, as text.
fn corpus_texts() -> Vec<String> {
    common::all_specs()
        .iter()
        .map(|p| std::fs::read_to_string(p).unwrap())
        .filter(|t| !t.contains("import"))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Removing an element either yields a specification that lowers or
    /// diagnostics located inside the text.
    #[test]
    fn mutated_specifications_check_or_report(file in any::<prop::sample::Index>(), element in any::<prop::sample::Index>()) {
        let texts = corpus_texts();
        let text = file.get(&texts);
        let mut ast = parse(text).unwrap();
        let removed = element.index(ast.elements.len());
        ast.elements.remove(removed);
        let src = print_spec(&ast);
        let ast = parse(&src).unwrap();
        match check(ast) {
            Ok(spec) => {
                prop_assert!(lower(&spec).is_ok(), "{}", src);
            }
            Err(diags) => {
                prop_assert!(!diags.is_empty());
                for d in diags {
                    prop_assert!(d.span.start <= d.span.end && d.span.end as usize <= src.len(), "{:?}", d);
                    prop_assert!(d.span.end > d.span.start, "{:?} in {}", d, src);
                }
            }
        }
    }
}
