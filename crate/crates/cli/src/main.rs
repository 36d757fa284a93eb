use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use pxlap_cli::run::{EXIT_FAILURE, EXIT_OK};
use pxlap_cli::{parse_config, run, Pipeline, RunConfig};
use pxlap_core::report::DiagnosticsFile;

/// Variational solvers for variable-exponent Laplace systems.
///
/// Exit codes: 0 converged or passed, 1 verification failure or error,
/// 2 condition-check rejection, 3 non-convergence.
#[derive(Parser)]
#[command(name = "pxlap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the property-verification suites.
    Verify(RunArgs),
    /// Solve with the load or coercive solver.
    Solve(RunArgs),
    /// Search for a mountain-pass critical point.
    MountainPass(RunArgs),
    /// Summarize the diagnostics of a previous run.
    Report {
        /// Output directory of the run.
        #[arg(long, env = "PXLAP_OUT", default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, env = "PXLAP_CONFIG")]
    config: PathBuf,
    /// Overrides `solver.seed`.
    #[arg(long, env = "PXLAP_SEED")]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long, env = "PXLAP_OUT")]
    out: Option<PathBuf>,
    /// Overrides `solver.tol`.
    #[arg(long, env = "PXLAP_TOL")]
    tol: Option<f64>,
}

fn load(args: &RunArgs) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut config = parse_config(&text)?;
    config.solver.seed = args.seed.or(config.solver.seed);
    config.solver.tol = args.tol.or(config.solver.tol);
    if let Some(out) = &args.out {
        config.output.dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn report(out: &Path) -> anyhow::Result<u8> {
    let path = out.join("diagnostics.json");
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let file: DiagnosticsFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let d = &file.diagnostics;
    println!("{} run (seed {}): {}", d.kind, d.seed, if d.passed { "passed" } else { "failed" });
    println!("mesh: dim {}, {} nodes, {} elements", d.mesh.dim, d.mesh.nodes, d.mesh.elements);
    if let Some(s) = &d.solve {
        println!(
            "solve: {:?}, phi {:.6e}, residual {:.3e}, {} iterations, max|u| {:.6e}",
            s.status, s.phi_value, s.residual_norm, s.iterations, s.max_abs_u
        );
    }
    for c in &d.condition_reports {
        println!("condition {}: {}", if c.passed { "pass" } else { "FAIL" }, c.summary);
    }
    if let Some(ps) = &d.palais_smale {
        println!("palais-smale: {} (norm ratio {:.3})", if ps.passed { "pass" } else { "FAIL" }, ps.ratio);
    }
    if let Some(level) = d.sphere_level {
        println!("sphere level: {level:.6e}");
    }
    if let Some(v) = &d.verify {
        for s in &v.suites {
            println!("suite {}: {} cases, {} violations", s.name, s.cases, s.violations);
        }
    }
    if let Some(e) = &d.error {
        println!("error: {e}");
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    // Usage errors must not collide with the condition-rejection exit code.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK });
        }
    };
    let result = match &cli.command {
        Command::Report { out } => report(out),
        Command::Verify(args) | Command::Solve(args) | Command::MountainPass(args) => {
            let pipeline = match cli.command {
                Command::Verify(_) => Pipeline::Verify,
                Command::Solve(_) => Pipeline::Solve,
                _ => Pipeline::MountainPass,
            };
            load(args).and_then(|config| run(&config, pipeline)).map(|outcome| {
                if outcome.exit == EXIT_OK {
                    println!("{}", outcome.message);
                } else {
                    eprintln!("{}", outcome.message);
                }
                outcome.exit
            })
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
