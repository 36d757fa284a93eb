//! Pipelines behind the `verify`, `solve` and `mountain-pass` subcommands.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context};

use pxlap_core::report::{diagnostics_json, solution_csv, trace_csv, Diagnostics, Meta, SolveSummary};
use pxlap_core::solvers::mountain_pass_gates;
use pxlap_core::verify::{run_all, VerifyOptions};
use pxlap_core::{
    find_descent_point, minimize_coercive, mountain_pass, odd_pair, palais_smale_diagnostic, project_dirichlet,
    solve_load, sphere_level, Error, GridFunction, Mesh, SolveResult,
};

use crate::config::{Direction, Format, RunConfig, SolverKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Verify,
    Solve,
    MountainPass,
}

/// Exit code plus a one-line human summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit: u8,
    pub message: String,
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("output.dir {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).with_context(|| format!("writing {name}"))?;
    Ok(())
}

struct Artifacts<'a> {
    config: &'a RunConfig,
    diagnostics: Diagnostics,
    solution: Option<String>,
    trace: Option<String>,
}

impl Artifacts<'_> {
    /// Emits the requested files. A stale `solution.csv` is removed when the
    /// run produced none, so the directory never pairs it with a failed run.
    fn write(self) -> anyhow::Result<()> {
        let out = &self.config.output;
        if out.wants(Format::Json) {
            write_atomic(&out.dir, "diagnostics.json", &diagnostics_json(&self.diagnostics, &Meta::now())?)?;
        }
        if out.wants(Format::Csv) {
            if let Some(trace) = &self.trace {
                write_atomic(&out.dir, "trace.csv", trace)?;
            }
            match &self.solution {
                Some(solution) => write_atomic(&out.dir, "solution.csv", solution)?,
                None => match fs::remove_file(out.dir.join("solution.csv")) {
                    Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
                    _ => {}
                },
            }
        }
        Ok(())
    }
}

pub fn run(config: &RunConfig, pipeline: Pipeline) -> anyhow::Result<Outcome> {
    let kind = config.solver_kind();
    match (pipeline, kind) {
        (Pipeline::Solve, SolverKind::Load | SolverKind::Coercive) => {}
        (Pipeline::MountainPass, SolverKind::MountainPass | SolverKind::Coercive) if config.solver.kind.is_none() => {}
        (Pipeline::MountainPass, SolverKind::MountainPass) | (Pipeline::Verify, _) => {}
        (_, kind) => bail!("solver.kind: {kind:?} does not match the {pipeline:?} subcommand"),
    }
    let mesh = config.build_mesh()?;
    fs::create_dir_all(&config.output.dir).with_context(|| format!("output.dir {}", config.output.dir.display()))?;
    let seed = config.solver_options(kind).seed;
    let mut artifacts =
        Artifacts { config, diagnostics: Diagnostics::new(pipeline_name(pipeline), seed, &mesh), solution: None, trace: None };
    let outcome = match pipeline {
        Pipeline::Verify => verify(config, &mesh, &mut artifacts)?,
        Pipeline::Solve => solve(config, kind, &mesh, &mut artifacts)?,
        Pipeline::MountainPass => mountain(config, &mesh, &mut artifacts)?,
    };
    artifacts.diagnostics.passed = outcome.exit == EXIT_OK;
    if outcome.exit != EXIT_OK {
        artifacts.diagnostics.error.get_or_insert_with(|| outcome.message.clone());
    }
    artifacts.write()?;
    Ok(outcome)
}

fn pipeline_name(p: Pipeline) -> &'static str {
    match p {
        Pipeline::Verify => "verify",
        Pipeline::Solve => "solve",
        Pipeline::MountainPass => "mountain-pass",
    }
}

fn verify(config: &RunConfig, mesh: &std::sync::Arc<Mesh>, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        samples: config.solver.samples.unwrap_or(defaults.samples),
        seed: config.solver.seed.unwrap_or(defaults.seed),
        ..defaults
    };
    let report = run_all(mesh, &opts)?;
    let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
    let outcome = if report.passed {
        Outcome { exit: EXIT_OK, message: format!("verify: all {} suites passed", report.suites.len()) }
    } else {
        Outcome { exit: EXIT_FAILURE, message: format!("verify: failing suites: {}", failed.join(", ")) }
    };
    art.diagnostics.verify = Some(report);
    Ok(outcome)
}

/// Maps a library error to an outcome when it is a condition rejection or a
/// convergence failure; any other error propagates.
fn classify(err: Error, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    match err {
        Error::ConditionRejected(report) => {
            let message = format!("rejected: {}", report.summary);
            art.diagnostics.condition_reports.push(*report);
            Ok(Outcome { exit: EXIT_REJECTED, message })
        }
        e @ (Error::Collapsed { .. } | Error::DescentCapExceeded { .. }) => {
            Ok(Outcome { exit: EXIT_NOT_CONVERGED, message: e.to_string() })
        }
        e => Err(e.into()),
    }
}

fn record(result: &SolveResult, config: &RunConfig, mesh: &Mesh, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let opts = config.solver_options(config.solver_kind());
    art.diagnostics.solve = Some(SolveSummary::of(result));
    art.diagnostics.condition_reports.extend(result.condition_reports.iter().cloned());
    art.diagnostics.palais_smale = Some(palais_smale_diagnostic(&result.trace, opts.blowup_ratio)?);
    art.trace = Some(trace_csv(&result.trace));
    let summary = format!(
        "status {:?}, phi {:.6e}, residual {:.3e}, {} iterations",
        result.status, result.phi_value, result.residual_norm, result.iterations
    );
    if result.converged() {
        art.solution = Some(solution_csv(mesh, &result.u)?);
        Ok(Outcome { exit: EXIT_OK, message: summary })
    } else {
        Ok(Outcome { exit: EXIT_NOT_CONVERGED, message: format!("not converged: {summary}") })
    }
}

fn solve(config: &RunConfig, kind: SolverKind, mesh: &std::sync::Arc<Mesh>, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let spec = config.energy_spec(mesh)?;
    let nl = config.nonlinearity(mesh)?;
    let opts = config.solver_options(kind);
    let result = if kind == SolverKind::Load { solve_load(&nl, &spec, &opts) } else { minimize_coercive(&nl, &spec, &opts) };
    match result {
        Ok(r) => record(&r, config, mesh, art),
        Err(e) => classify(e, art),
    }
}

fn direction(mesh: &Mesh, d: Direction) -> anyhow::Result<GridFunction> {
    let w = match d {
        Direction::SinBump => GridFunction::from_fn(mesh, |x| x.iter().map(|xi| (std::f64::consts::PI * xi).sin()).product()),
        Direction::Parabola => GridFunction::from_fn(mesh, |x| x.iter().map(|xi| xi * (1.0 - xi)).product()),
    };
    Ok(project_dirichlet(&w, mesh)?)
}

fn mountain(config: &RunConfig, mesh: &std::sync::Arc<Mesh>, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let spec = config.energy_spec(mesh)?;
    let nl = config.nonlinearity(mesh)?;
    let opts = config.solver_options(SolverKind::MountainPass);
    // Gate before the ray search so a rejected f never reaches it.
    if let Err(e) = mountain_pass_gates(&nl, &spec, &opts) {
        return classify(e, art);
    }
    let w = direction(mesh, config.solver.direction.unwrap_or_default())?;
    let e = match find_descent_point(&nl, &spec, &w, &opts) {
        Ok(point) => point,
        Err(err) => return classify(err, art),
    };
    let result = match mountain_pass(&nl, &spec, &e.e, &opts) {
        Ok(r) => r,
        Err(err) => return classify(err, art),
    };
    let outcome = record(&result, config, mesh, art)?;
    art.diagnostics.sphere_level = Some(sphere_level(&nl, &spec, opts.sphere_radius, &opts)?);
    if nl.params().odd && result.converged() {
        art.diagnostics.odd_pair = Some(SolveSummary::of(&odd_pair(&result, &nl, &spec)?));
    }
    Ok(outcome)
}
