//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use spectra_core::analyses::{check_monitor, find_trivial, unrealizable_core, AnalysisError, Triviality};
use spectra_core::gr1::{enumerate_concrete, solve, synthesize_symbolic, Gr1Error};
use spectra_core::lowering::{print_kernel, to_gr1, Role};
use spectra_core::runtime::{save, Controller, WalkSession};
use spectra_core::syntax::Element;

use crate::pipeline::{check_path, controller_from_path, kernel_of, render, PipelineError};
use crate::service;

/// Success.
pub const EXIT_OK: i32 = 0;
/// Diagnostics, an unrealizable specification or findings.
pub const EXIT_FAILURE: i32 = 1;
/// Bad command line or unreadable input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spectra", version, about = "Check, synthesize, analyse and walk Spectra specifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and type-check a specification.
    Check { file: PathBuf },
    /// Decide realizability and write the controller.
    Synth {
        file: PathBuf,
        /// Controller output path (default: the input with extension `.spcc`).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also enumerate the explicit-state controller and report its size.
        #[arg(long)]
        concrete: bool,
        /// State bound for `--concrete`.
        #[arg(long, default_value_t = spectra_core::gr1::DEFAULT_MAX_STATES)]
        max_states: usize,
        /// Print the lowered kernel specification.
        #[arg(long)]
        emit_kernel: bool,
    },
    /// Compute a minimal unrealizable subset of the guarantees.
    Core { file: PathBuf },
    /// Report trivially true or false constraints and ill-formed monitors.
    Lint { file: PathBuf },
    /// Open a walk session on a specification or controller and serve it.
    Walk {
        file: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Run the walker service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Seconds after which an unused session is dropped.
        #[arg(long, default_value_t = service::DEFAULT_IDLE.as_secs())]
        idle_timeout: u64,
    },
}

/// Runs a command, writing normal output to `out` and errors to `err`.
/// Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Check { file } => check(&file, out, err),
        Command::Synth { file, output, concrete, max_states, emit_kernel } => {
            synth(&file, output, concrete, max_states, emit_kernel, out, err)
        }
        Command::Core { file } => core(&file, out, err),
        Command::Lint { file } => lint(&file, out, err),
        Command::Walk { file, port, host } => walk(&file, &host, port, out, err),
        Command::Serve { port, host, idle_timeout } => {
            serve(&host, port, Duration::from_secs(idle_timeout), None, out, err)
        }
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_FAILURE
    })
}

fn require_file(path: &Path, err: &mut dyn Write) -> std::io::Result<bool> {
    if path.is_file() {
        return Ok(true);
    }
    writeln!(err, "error: {}: no such file", path.display())?;
    Ok(false)
}

fn report(e: PipelineError, err: &mut dyn Write) -> std::io::Result<i32> {
    writeln!(err, "{e}")?;
    Ok(match e {
        PipelineError::Io(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    })
}

fn check(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if !require_file(file, err)? {
        return Ok(EXIT_USAGE);
    }
    let (sources, checked) = check_path(file);
    match checked {
        Ok(spec) => {
            writeln!(out, "{}: specification `{}` is well-formed", file.display(), spec.name())?;
            Ok(EXIT_OK)
        }
        Err(diags) => {
            for line in render(&sources, &diags) {
                writeln!(err, "{line}")?;
            }
            Ok(EXIT_FAILURE)
        }
    }
}

fn synth(
    file: &Path,
    output: Option<PathBuf>,
    concrete: bool,
    max_states: usize,
    emit_kernel: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    if !require_file(file, err)? {
        return Ok(EXIT_USAGE);
    }
    let (sources, checked) = check_path(file);
    let kernel = match kernel_of(&sources, checked) {
        Ok((_, k)) => k,
        Err(e) => return report(e, err),
    };
    if emit_kernel {
        match print_kernel(&kernel) {
            Ok(text) => write!(out, "{text}")?,
            Err(e) => writeln!(err, "warning: {e}")?,
        }
    }
    let mut problem = to_gr1(&kernel);
    let solution = match solve(&mut problem) {
        Ok(s) => s,
        Err(e) => return report(PipelineError::Solver(e), err),
    };
    if !solution.realizable {
        writeln!(out, "Unrealizable")?;
        writeln!(out, "hint: run `spectra core {}` to find a minimal unrealizable set of guarantees", file.display())?;
        return Ok(EXIT_FAILURE);
    }
    writeln!(out, "Realizable")?;
    if concrete {
        let mut symbolic = match synthesize_symbolic(problem, &solution) {
            Ok(s) => s,
            Err(e) => return report(PipelineError::Solver(e), err),
        };
        match enumerate_concrete(&mut symbolic, max_states) {
            Ok(c) => writeln!(
                out,
                "concrete controller: {} states, {} initial choices, {} transitions",
                c.states.len(),
                c.initial.len(),
                c.transition_count()
            )?,
            Err(Gr1Error::TooManyStates(n)) => {
                writeln!(err, "warning: concrete controller exceeds {n} states; use --max-states to raise the bound")?
            }
            Err(e) => return report(PipelineError::Solver(e), err),
        }
    }
    let controller = match Controller::synthesize(&kernel, Some(&sources)) {
        Ok(c) => c,
        Err(e) => return report(PipelineError::Solver(e), err),
    };
    let path = output.unwrap_or_else(|| file.with_extension("spcc"));
    std::fs::write(&path, save(&controller))?;
    writeln!(out, "controller written to {}", path.display())?;
    Ok(EXIT_OK)
}

fn analysis_failure(e: AnalysisError, sources: &spectra_core::diag::SourceMap, err: &mut dyn Write) -> std::io::Result<i32> {
    match e {
        AnalysisError::Lowering(diags) => {
            for line in render(sources, &diags) {
                writeln!(err, "{line}")?;
            }
        }
        e => writeln!(err, "error: {e}")?,
    }
    Ok(EXIT_FAILURE)
}

fn core(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if !require_file(file, err)? {
        return Ok(EXIT_USAGE);
    }
    let (sources, checked) = check_path(file);
    let spec = match checked {
        Ok(s) => s,
        Err(d) => return report(PipelineError::Diagnostics(render(&sources, &d)), err),
    };
    let report = match unrealizable_core(&spec) {
        Ok(r) => r,
        Err(e) => return analysis_failure(e, &sources, err),
    };
    for g in &report.core {
        let name = g.name.as_deref().unwrap_or("<unnamed>");
        writeln!(out, "{}: note: core guarantee `{name}`", sources.location(g.span))?;
    }
    writeln!(
        out,
        "unrealizable core of {} guarantee(s) found with {} realizability checks",
        report.core.len(),
        report.checks
    )?;
    Ok(EXIT_OK)
}

fn lint(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if !require_file(file, err)? {
        return Ok(EXIT_USAGE);
    }
    let (sources, checked) = check_path(file);
    let spec = match checked {
        Ok(s) => s,
        Err(d) => return report(PipelineError::Diagnostics(render(&sources, &d)), err),
    };
    let mut findings = 0;
    let trivial = match find_trivial(&spec) {
        Ok(t) => t,
        Err(e) => return analysis_failure(e, &sources, err),
    };
    for f in trivial {
        let what = match f.role {
            Role::Assumption => "assumption",
            Role::Guarantee => "guarantee",
        };
        let name = f.name.map(|n| format!(" `{n}`")).unwrap_or_default();
        let verdict = match f.verdict {
            Triviality::TriviallyTrue => "is trivially true",
            Triviality::TriviallyFalse => "is trivially false",
        };
        writeln!(out, "{}: warning: {what}{name} {verdict}", sources.location(f.span))?;
        findings += 1;
    }
    for element in &spec.ast.elements {
        let Element::Monitor(m) = element else { continue };
        let v = match check_monitor(&spec, &m.name.name) {
            Ok(v) => v,
            Err(e) => return analysis_failure(e, &sources, err),
        };
        let at = sources.location(m.span);
        let name = &m.name.name;
        let mut problems = Vec::new();
        if !v.deterministic {
            problems.push("is not deterministic");
        }
        if !v.complete {
            problems.push("is not complete");
        }
        if v.restricts_others {
            problems.push("restricts other variables");
        }
        for p in &problems {
            writeln!(out, "{at}: warning: monitor `{name}` {p}")?;
        }
        if let Some(w) = v.witness.filter(|_| !problems.is_empty()) {
            let values: Vec<String> = w.values.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            if values.is_empty() {
                writeln!(out, "{at}: note: {} in every situation", w.reason)?;
            } else {
                writeln!(out, "{at}: note: {} when {}", w.reason, values.join(", "))?;
            }
        }
        findings += problems.len();
    }
    if findings == 0 {
        writeln!(out, "{}: no findings", file.display())?;
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_FAILURE)
    }
}

fn walk(file: &Path, host: &str, port: u16, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if !require_file(file, err)? {
        return Ok(EXIT_USAGE);
    }
    let controller = match controller_from_path(file) {
        Ok(c) => c,
        Err(e) => return report(e, err),
    };
    let session = (WalkSession::new(controller), file.display().to_string());
    serve(host, port, service::DEFAULT_IDLE, Some(session), out, err)
}

fn serve(
    host: &str,
    port: u16,
    idle: Duration,
    session: Option<(WalkSession, String)>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind((host, port)).await {
            Ok(l) => l,
            Err(e) => {
                writeln!(err, "error: cannot listen on {host}:{port}: {e}")?;
                return Ok(EXIT_USAGE);
            }
        };
        let addr = listener.local_addr()?;
        let (_, state) = service::app(idle);
        writeln!(out, "walker service listening on http://{addr}")?;
        if let Some((walk, origin)) = session {
            let id = state.registry.insert(walk, origin);
            writeln!(out, "session: http://{addr}/sessions/{id}/state")?;
        }
        out.flush()?;
        service::serve(listener, state).await?;
        Ok(EXIT_OK)
    })
}
