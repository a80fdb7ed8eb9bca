//! Import resolution: loads imported files, then copies the patterns and
//! predicates the entry file (transitively) uses into it.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Component, Path, PathBuf};

use crate::diag::{Diagnostic, FileId, SourceMap, Span};
use crate::syntax::{parse_file, Element, Expr, ExprKind, SpecAst, TypeKind};

/// Supplies source text for a path.
pub trait SourceLoader {
    fn load(&self, path: &Path) -> Result<String, String>;
}

impl<F: Fn(&Path) -> Result<String, String>> SourceLoader for F {
    fn load(&self, path: &Path) -> Result<String, String> {
        self(path)
    }
}

/// Reads files from the local file system.
#[derive(Clone, Copy, Debug, Default)]
pub struct FsLoader;

impl SourceLoader for FsLoader {
    fn load(&self, path: &Path) -> Result<String, String> {
        std::fs::read_to_string(path).map_err(|e| e.to_string())
    }
}

/// Lexically normalizes `a/./b/../c` to `a/c`.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

/// Loads and parses `entry`, registering every file in `sources`.
pub fn load_entry(
    entry: &Path,
    loader: &dyn SourceLoader,
    sources: &mut SourceMap,
) -> Result<SpecAst, Vec<Diagnostic>> {
    let text = loader
        .load(entry)
        .map_err(|e| vec![Diagnostic::error(Span::DUMMY, format!("cannot read `{}`: {e}", entry.display()))])?;
    let file = sources.add(entry, text);
    parse_file(sources.text(file).unwrap_or_default(), file)
}

/// Resolves the imports of `entry`. The returned AST has no import clauses
/// and contains copies of every imported pattern and predicate it uses.
pub fn resolve_imports(
    entry: &Path,
    loader: &dyn SourceLoader,
    sources: &mut SourceMap,
) -> Result<SpecAst, Vec<Diagnostic>> {
    let ast = load_entry(entry, loader, sources)?;
    resolve_loaded(ast, entry, loader, sources)
}

/// Like [`resolve_imports`] for an entry file that is already parsed.
pub fn resolve_loaded(
    mut ast: SpecAst,
    entry: &Path,
    loader: &dyn SourceLoader,
    sources: &mut SourceMap,
) -> Result<SpecAst, Vec<Diagnostic>> {
    if ast.imports.is_empty() {
        return Ok(ast);
    }
    let mut r = Resolver {
        loader,
        sources,
        loaded: HashSet::new(),
        stack: vec![normalize(entry)],
        library: Vec::new(),
        diags: Vec::new(),
    };
    let dir = entry.parent().map(Path::to_path_buf).unwrap_or_default();
    for import in std::mem::take(&mut ast.imports) {
        r.visit(&dir, &import.path, import.span);
    }
    let Resolver { library, mut diags, .. } = r;

    // Names declared in the entry file and in the library must not clash.
    let local: HashSet<&str> = ast
        .elements
        .iter()
        .filter_map(|e| e.name().map(|n| n.name.as_str()))
        .collect();
    let mut by_name: HashMap<String, (FileId, Element)> = HashMap::new();
    let mut order = Vec::new();
    for (file, element) in library {
        let name = element.name().map(|n| n.name.clone()).unwrap_or_default();
        if local.contains(name.as_str()) {
            diags.push(Diagnostic::error(
                element.span(),
                format!("imported `{name}` clashes with a declaration of the importing specification"),
            ));
            continue;
        }
        if let Some((other, _)) = by_name.get(&name) {
            if *other != file {
                diags.push(Diagnostic::error(
                    element.span(),
                    format!("`{name}` is declared in more than one imported file"),
                ));
            }
            continue;
        }
        order.push(name.clone());
        by_name.insert(name, (file, element));
    }

    // Copy only what is (transitively) referenced.
    let mut wanted = BTreeSet::new();
    let mut work: Vec<String> = Vec::new();
    for e in &ast.elements {
        instance_names(e, &mut |n| work.push(n.to_string()));
    }
    while let Some(n) = work.pop() {
        if local.contains(n.as_str()) || !by_name.contains_key(&n) || !wanted.insert(n.clone()) {
            continue;
        }
        instance_names(&by_name[&n].1, &mut |m| work.push(m.to_string()));
    }
    for name in order {
        if wanted.contains(&name) {
            ast.elements.push(by_name.remove(&name).unwrap().1);
        }
    }
    if diags.is_empty() {
        Ok(ast)
    } else {
        Err(diags)
    }
}

struct Resolver<'a> {
    loader: &'a dyn SourceLoader,
    sources: &'a mut SourceMap,
    loaded: HashSet<PathBuf>,
    stack: Vec<PathBuf>,
    library: Vec<(FileId, Element)>,
    diags: Vec<Diagnostic>,
}

impl Resolver<'_> {
    fn visit(&mut self, dir: &Path, rel: &str, span: Span) {
        let path = normalize(&dir.join(rel));
        if self.stack.contains(&path) {
            let mut cycle: Vec<String> = self.stack.iter().map(|p| p.display().to_string()).collect();
            cycle.push(path.display().to_string());
            self.diags.push(Diagnostic::error(
                span,
                format!("import cycle: {}", cycle.join(" -> ")),
            ));
            return;
        }
        if !self.loaded.insert(path.clone()) {
            return;
        }
        let text = match self.loader.load(&path) {
            Ok(t) => t,
            Err(e) => {
                self.diags.push(Diagnostic::error(
                    span,
                    format!("cannot read imported file `{}`: {e}", path.display()),
                ));
                return;
            }
        };
        let file = self.sources.add(&path, text);
        let ast = match parse_file(self.sources.text(file).unwrap_or_default(), file) {
            Ok(ast) => ast,
            Err(mut d) => {
                self.diags.append(&mut d);
                return;
            }
        };
        self.stack.push(path.clone());
        let sub_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for import in &ast.imports {
            self.visit(&sub_dir, &import.path, import.span);
        }
        self.stack.pop();
        for element in ast.elements {
            match &element {
                Element::Predicate(p) => {
                    let mut allowed: HashSet<&str> = p.params.iter().map(|(_, n)| n.name.as_str()).collect();
                    for (ty, _) in &p.params {
                        if let TypeKind::Enum(vals) = &ty.kind {
                            allowed.extend(vals.iter().map(|v| v.name.as_str()));
                        }
                    }
                    let mut foreign = None;
                    p.body.walk(&mut |e| {
                        if let ExprKind::Name(n) = &e.kind {
                            if !allowed.contains(n.as_str()) && foreign.is_none() {
                                foreign = Some((n.clone(), e.span));
                            }
                        }
                    });
                    if let Some((n, at)) = foreign {
                        self.diags.push(Diagnostic::error(
                            at,
                            format!(
                                "imported predicate `{}` may only reference its parameters and other predicates, found `{n}`",
                                p.name.name
                            ),
                        ));
                        continue;
                    }
                    self.library.push((file, element));
                }
                Element::Pattern(_) => self.library.push((file, element)),
                _ => {}
            }
        }
    }
}

fn expr_instances(e: &Expr, f: &mut impl FnMut(&str)) {
    e.walk(&mut |x| {
        if let ExprKind::Instance(name, _) = &x.kind {
            f(&name.name);
        }
    });
}

/// Calls `f` with the name of every instance (predicate or pattern) in `e`.
pub(crate) fn instance_names(e: &Element, f: &mut impl FnMut(&str)) {
    match e {
        Element::Assumption(c) | Element::Guarantee(c) => expr_instances(&c.body.expr, f),
        Element::Define(d) => expr_instances(&d.expr, f),
        Element::Predicate(p) => expr_instances(&p.body, f),
        Element::Monitor(m) => m.constraints.iter().for_each(|c| expr_instances(&c.expr, f)),
        Element::Pattern(p) => p.constraints.iter().for_each(|c| expr_instances(&c.expr, f)),
        Element::Var(_) | Element::TypeDef(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loader(files: &'static [(&'static str, &'static str)]) -> impl Fn(&Path) -> Result<String, String> {
        move |p: &Path| {
            files
                .iter()
                .find(|(n, _)| Path::new(n) == p)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| "not found".to_string())
        }
    }

    #[test]
    fn copies_only_used_patterns() {
        let l = loader(&[
            ("dir/a.spectra", "import \"lib/b.spectra\"; spec A env boolean x; gar alwEv resp(x, x);"),
            (
                "dir/lib/b.spectra",
                "spec B pattern resp(p, q) { var boolean w; ini !w; alwEv !w; } \
                 pattern unused(p) { alwEv p; } predicate helper(boolean a) { a }",
            ),
        ]);
        let mut sm = SourceMap::new();
        let ast = resolve_imports(Path::new("dir/a.spectra"), &l, &mut sm).unwrap();
        assert!(ast.imports.is_empty());
        let names: Vec<_> = ast.elements.iter().filter_map(|e| e.name()).map(|n| n.name.clone()).collect();
        assert!(names.contains(&"resp".to_string()));
        assert!(!names.contains(&"unused".to_string()));
        assert!(!names.contains(&"helper".to_string()));
    }

    #[test]
    fn no_imports_is_identity() {
        let l = loader(&[("a.spectra", "spec A env boolean x;")]);
        let mut sm = SourceMap::new();
        let ast = resolve_imports(Path::new("a.spectra"), &l, &mut sm).unwrap();
        let direct = crate::syntax::parse("spec A env boolean x;").unwrap();
        assert_eq!(ast, direct);
    }

    #[test]
    fn cycle_is_reported() {
        let l = loader(&[
            ("a.spectra", "import \"b.spectra\"; spec A env boolean x;"),
            ("b.spectra", "import \"a.spectra\"; spec B pattern p(x) { alwEv x; }"),
        ]);
        let mut sm = SourceMap::new();
        let errs = resolve_imports(Path::new("a.spectra"), &l, &mut sm).unwrap_err();
        assert!(errs[0].message.contains("import cycle"), "{errs:?}");
    }

    #[test]
    fn foreign_reference_in_imported_predicate() {
        let l = loader(&[
            ("a.spectra", "import \"b.spectra\"; spec A env boolean x; gar alw q(x);"),
            ("b.spectra", "spec B env boolean z; predicate q(boolean a) { a & z }"),
        ]);
        let mut sm = SourceMap::new();
        let errs = resolve_imports(Path::new("a.spectra"), &l, &mut sm).unwrap_err();
        assert!(errs[0].message.contains("may only reference"));
        assert_eq!(sm.path(errs[0].span.file).unwrap(), Path::new("b.spectra"));
    }
}
