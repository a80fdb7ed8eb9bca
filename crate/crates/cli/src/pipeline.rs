//! Loading specifications and controllers from disk or from memory.

use std::path::{Path, PathBuf};

use spectra_core::diag::{Diagnostic, SourceMap};
use spectra_core::gr1::Gr1Error;
use spectra_core::lowering::{lower, KernelSpec};
use spectra_core::runtime::{load, Controller, LoadError};
use spectra_core::semcheck::{check_file, CheckedSpec, FsLoader};

/// Failure to turn a file into a controller.
#[derive(Debug)]
pub enum PipelineError {
    Io(String),
    Diagnostics(Vec<String>),
    Unrealizable,
    Solver(Gr1Error),
    Load(LoadError),
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineError::Io(e) => f.write_str(e),
            PipelineError::Diagnostics(d) => f.write_str(&d.join("\n")),
            PipelineError::Unrealizable => f.write_str("specification is unrealizable"),
            PipelineError::Solver(e) => write!(f, "{e}"),
            PipelineError::Load(e) => write!(f, "{e}"),
        }
    }
}

pub fn render(sources: &SourceMap, diags: &[Diagnostic]) -> Vec<String> {
    diags.iter().map(|d| d.render(sources)).collect()
}

/// Parses and checks a specification file with its imports.
pub fn check_path(path: &Path) -> (SourceMap, Result<CheckedSpec, Vec<Diagnostic>>) {
    check_file(path, &FsLoader)
}

/// Checks specification text given in memory. Imports are resolved against
/// the file system.
pub fn check_source(name: &str, text: &str) -> (SourceMap, Result<CheckedSpec, Vec<Diagnostic>>) {
    let virtual_path = PathBuf::from(name);
    let text = text.to_string();
    let loader = move |p: &Path| {
        if p == virtual_path {
            Ok(text.clone())
        } else {
            std::fs::read_to_string(p).map_err(|e| e.to_string())
        }
    };
    check_file(Path::new(name), &loader)
}

/// Checks and lowers, rendering diagnostics against the source map.
pub fn kernel_of(
    sources: &SourceMap,
    checked: Result<CheckedSpec, Vec<Diagnostic>>,
) -> Result<(CheckedSpec, KernelSpec), PipelineError> {
    let spec = checked.map_err(|d| PipelineError::Diagnostics(render(sources, &d)))?;
    let kernel = lower(&spec).map_err(|d| PipelineError::Diagnostics(render(sources, &d)))?;
    Ok((spec, kernel))
}

fn synthesize(sources: &SourceMap, checked: Result<CheckedSpec, Vec<Diagnostic>>) -> Result<Controller, PipelineError> {
    let (_, kernel) = kernel_of(sources, checked)?;
    Controller::synthesize(&kernel, Some(sources)).map_err(|e| match e {
        Gr1Error::Unrealizable => PipelineError::Unrealizable,
        e => PipelineError::Solver(e),
    })
}

/// A controller from a `.spcc` file, or synthesized from a specification.
pub fn controller_from_path(path: &Path) -> Result<Controller, PipelineError> {
    if path.extension().is_some_and(|e| e == "spcc") {
        let bytes = std::fs::read(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
        return load(&bytes).map_err(PipelineError::Load);
    }
    if !path.exists() {
        return Err(PipelineError::Io(format!("{}: no such file", path.display())));
    }
    let (sources, checked) = check_path(path);
    synthesize(&sources, checked)
}

/// A controller synthesized from specification text.
pub fn controller_from_source(text: &str) -> Result<Controller, PipelineError> {
    let (sources, checked) = check_source("<upload>", text);
    synthesize(&sources, checked)
}
