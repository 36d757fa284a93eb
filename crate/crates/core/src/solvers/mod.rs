//! Discrete weak solutions: unique solve for `t`-independent loads, global
//! minimization of coercive functionals, and a mountain-pass search for
//! nontrivial critical points, plus Palais–Smale and odd-pair diagnostics.
//!
//! All solvers are first order. Descent directions are the gradient of `φ`
//! taken in the discrete `H¹₀` inner product (the stiffness matrix of the
//! Dirichlet Laplacian) unless [`PreconditionerKind::Identity`] is selected.

mod descent;
mod diagnostics;
mod mountain_pass;
mod precond;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::energy::EnergySpec;
use crate::exponent::ExponentField;
use crate::lebesgue::NormOptions;
use crate::mesh::{project_dirichlet, GridFunction, Mesh};
use crate::nonlinearity::{check_subcritical_coercive, ConditionReport, Nonlinearity, SamplePlan};

pub use diagnostics::{odd_pair, palais_smale_diagnostic, sphere_level, PalaisSmaleReport};
pub use mountain_pass::{find_descent_point, mountain_pass, mountain_pass_detailed, mountain_pass_gates, DescentPoint, MountainPassState};
pub use precond::PreconditionerKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Stop once the Euclidean norm of `φ′(u)` is at most `tol`.
    pub tol: f64,
    pub max_iters: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    pub backtrack: f64,
    /// Clipping range for the Barzilai–Borwein initial step.
    pub step_min: f64,
    pub step_max: f64,
    /// Random starts in addition to `u₀ = 0` for coercive minimization.
    pub multistart: usize,
    pub seed: u64,
    /// Run even when a condition check fails.
    pub force: bool,
    pub preconditioner: PreconditionerKind,
    pub path_points: usize,
    pub retension_every: usize,
    /// Smallest acceptable `‖u‖∞` of a mountain-pass critical point.
    pub nontrivial_floor: f64,
    /// Ray search stops once `φ(t·w)` drops below this level.
    pub descent_target: f64,
    pub descent_cap: f64,
    pub small_o_threshold: f64,
    pub blowup_ratio: f64,
    pub sphere_samples: usize,
    pub sphere_radius: f64,
    pub norm: NormOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 20_000,
            armijo_c: 1e-4,
            backtrack: 0.5,
            step_min: 1e-8,
            step_max: 1e2,
            multistart: 4,
            seed: 0,
            force: false,
            preconditioner: PreconditionerKind::Laplacian,
            path_points: 21,
            retension_every: 10,
            nontrivial_floor: 1e-2,
            descent_target: -1.0,
            descent_cap: 2f64.powi(60),
            small_o_threshold: 1e-3,
            blowup_ratio: 10.0,
            sphere_samples: 64,
            sphere_radius: 0.05,
            norm: NormOptions::default(),
        }
    }
}

impl SolverOptions {
    /// Defaults for the mountain-pass search (looser residual tolerance).
    pub fn mountain_pass() -> Self {
        Self { tol: 1e-6, max_iters: 5_000, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Diverged,
    /// Line search could not decrease `φ` any further (rounding floor).
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub phi: f64,
    pub residual_norm: f64,
    /// Accepted step length (zero on the first entry).
    pub step: f64,
    /// `‖u_k‖ = Σᵢ |∇u_k|_{pᵢ(x)}`.
    pub u_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: GridFunction,
    pub phi_value: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub status: SolveStatus,
    pub condition_reports: Vec<ConditionReport>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

fn with_nl(spec: &EnergySpec, nl: &Nonlinearity) -> EnergySpec {
    spec.clone().with_nonlinearity(nl.clone())
}

/// Random nodal values in `[−1, 1]`, projected onto the Dirichlet subspace.
pub fn random_start(mesh: &Mesh, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = GridFunction::from_values(mesh, (0..mesh.num_nodes()).map(|_| rng.random_range(-1.0..1.0)).collect())
        .expect("length matches mesh");
    project_dirichlet(&raw, mesh).expect("same mesh")
}

/// Unique solve for `f = f(x)`: descent on the strictly convex
/// `φ(u) = J(u) − ∫ f u` from `u₀ = 0`.
pub fn solve_load(fload: &Nonlinearity, spec: &EnergySpec, opts: &SolverOptions) -> Result<SolveResult> {
    solve_load_from(fload, spec, &GridFunction::zeros(spec.mesh()), opts)
}

pub fn solve_load_from(
    fload: &Nonlinearity,
    spec: &EnergySpec,
    u0: &GridFunction,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    if !fload.is_load() {
        return Err(Error::InvalidArgument(format!(
            "solve_load needs a t-independent load, got {}",
            fload.describe()
        )));
    }
    let spec = with_nl(spec, fload);
    descent::minimize(&spec, u0.clone(), opts)
}

/// Relative gap below which two minima count as the same value.
const TIE: f64 = 1e-10;

/// Global minimization of a coercive `φ` (condition (6) gated), from `u₀ = 0`
/// and `opts.multistart` seeded random starts; returns the lowest converged
/// result. `t`-independent loads are delegated to [`solve_load`].
pub fn minimize_coercive(nl: &Nonlinearity, spec: &EnergySpec, opts: &SolverOptions) -> Result<SolveResult> {
    if nl.is_load() {
        return solve_load(nl, spec, opts);
    }
    let (_, pm) = spec.exponent_envelope();
    let report = coercive_gate(nl, &pm, spec.mesh(), opts)?;
    let full = with_nl(spec, nl);
    let mesh = spec.mesh();
    let starts = std::iter::once(GridFunction::zeros(mesh))
        .chain((0..opts.multistart).map(|k| random_start(mesh, opts.seed.wrapping_add(k as u64))));
    let mut best: Option<SolveResult> = None;
    let mut fallback: Option<SolveResult> = None;
    for u0 in starts {
        let result = descent::minimize(&full, u0, opts)?;
        let slot = if result.converged() { &mut best } else { &mut fallback };
        // Earlier starts win ties, so equal minima keep the trace from u₀ = 0.
        if slot.as_ref().is_none_or(|b| result.phi_value < b.phi_value - TIE * b.phi_value.abs().max(1.0)) {
            *slot = Some(result);
        }
    }
    let mut result = best.or(fallback).expect("at least one start");
    result.condition_reports.push(report);
    Ok(result)
}

fn coercive_gate(nl: &Nonlinearity, pm: &ExponentField, mesh: &Mesh, opts: &SolverOptions) -> Result<ConditionReport> {
    let report = check_subcritical_coercive(nl, pm, &SamplePlan::default_for(mesh))?;
    if opts.force {
        Ok(report)
    } else {
        report.into_gate()
    }
}
