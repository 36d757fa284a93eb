use crate::energy::{phi, phi_grad, x_norm, DualVector, EnergySpec};
use crate::error::{Error, Result};
use crate::mesh::GridFunction;

use super::precond::{dot, Preconditioner};
use super::{SolveResult, SolveStatus, SolverOptions, TraceEntry};

/// Smallest step tried before the line search gives up.
const STEP_FLOOR: f64 = 1e-20;
/// Iterates beyond this nodal size are treated as divergent.
const BLOWUP: f64 = 1e150;

/// Evaluates `φ`, mapping overflow inside the nonlinearity to `None` so the
/// line search can back off instead of failing.
pub(crate) fn try_phi(u: &GridFunction, spec: &EnergySpec) -> Result<Option<f64>> {
    match phi(u, spec) {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) | Err(Error::NonlinearityOverflow { .. }) | Err(Error::NonFiniteAssembly { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `u − α d` on interior nodes.
pub(crate) fn step_along(u: &GridFunction, d: &[f64], alpha: f64, spec: &EnergySpec) -> GridFunction {
    let mut out = u.clone();
    let values = out.values_mut();
    for (&node, di) in spec.mesh().interior_nodes().iter().zip(d) {
        values[node] -= alpha * di;
    }
    out
}

pub(crate) struct Armijo {
    pub u: GridFunction,
    pub phi: f64,
    pub alpha: f64,
    pub grad: DualVector,
}

/// Relative size below which two values of `φ` are indistinguishable.
const FLAT: f64 = 1e-13;

/// Backtracking from `alpha` until `φ(u − αd) ≤ φ(u) − c α ⟨r, d⟩`. Once the
/// predicted decrease is below rounding in `φ`, a step is accepted instead
/// when `φ` rises by no more than rounding and the residual shrinks.
pub(crate) fn armijo(
    u: &GridFunction,
    phi_u: f64,
    r: &DualVector,
    d: &[f64],
    mut alpha: f64,
    spec: &EnergySpec,
    opts: &SolverOptions,
) -> Result<Option<Armijo>> {
    let slope = dot(r.components(), d);
    if !(slope > 0.0) {
        return Ok(None);
    }
    while alpha >= STEP_FLOOR {
        let cand = step_along(u, d, alpha, spec);
        if let Some(v) = try_phi(&cand, spec)? {
            if v <= phi_u - opts.armijo_c * alpha * slope && v < phi_u {
                let grad = phi_grad(&cand, spec)?;
                return Ok(Some(Armijo { u: cand, phi: v, alpha, grad }));
            }
            let flat = FLAT * phi_u.abs().max(1.0);
            if alpha * slope <= flat && v <= phi_u + flat {
                let grad = phi_grad(&cand, spec)?;
                if grad.norm() < r.norm() {
                    return Ok(Some(Armijo { u: cand, phi: v, alpha, grad }));
                }
            }
        }
        alpha *= opts.backtrack;
    }
    Ok(None)
}

/// Preconditioned gradient descent with Barzilai–Borwein initial steps and
/// Armijo backtracking. The trace has one entry per iterate.
pub(crate) fn minimize(spec: &EnergySpec, u0: GridFunction, opts: &SolverOptions) -> Result<SolveResult> {
    u0.require_dirichlet(spec.mesh())?;
    let precond = Preconditioner::new(opts.preconditioner, spec.mesh())?;
    let mut u = u0;
    let mut trace = Vec::new();
    let Some(mut value) = try_phi(&u, spec)? else {
        return finish(u, f64::NAN, f64::NAN, trace, SolveStatus::Diverged);
    };
    let mut r = phi_grad(&u, spec)?;
    let mut alpha = 1.0;
    let mut last_step = 0.0;
    let mut iteration = 0;
    let status = loop {
        let res = r.norm();
        trace.push(TraceEntry { iteration, phi: value, residual_norm: res, step: last_step, u_norm: x_norm(&u, spec, &opts.norm)? });
        if res <= opts.tol {
            break SolveStatus::Converged;
        }
        if !res.is_finite() || u.max_norm() > BLOWUP {
            break SolveStatus::Diverged;
        }
        if iteration >= opts.max_iters {
            break SolveStatus::MaxIters;
        }
        let d = precond.apply(r.components());
        let Some(step) = armijo(&u, value, &r, &d, alpha, spec, opts)? else {
            break SolveStatus::Stalled;
        };
        let r_new = step.grad;
        // Barzilai–Borwein in the preconditioner metric: s = −α d, y = Δr.
        let s: Vec<f64> = d.iter().map(|di| -step.alpha * di).collect();
        let y = r_new.sub(&r);
        let sy = dot(&s, y.components());
        alpha = if sy > 0.0 { (precond.metric(&s) / sy).clamp(opts.step_min, opts.step_max) } else { opts.step_max };
        last_step = step.alpha;
        u = step.u;
        value = step.phi;
        r = r_new;
        iteration += 1;
    };
    let res = r.norm();
    finish(u, value, res, trace, status)
}

fn finish(u: GridFunction, phi_value: f64, residual_norm: f64, trace: Vec<TraceEntry>, status: SolveStatus) -> Result<SolveResult> {
    let iterations = trace.len().saturating_sub(1);
    Ok(SolveResult { u, phi_value, residual_norm, iterations, trace, status, condition_reports: Vec::new() })
}
