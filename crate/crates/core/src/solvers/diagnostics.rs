use serde::{Deserialize, Serialize};

use crate::energy::{phi, phi_grad, x_norm, EnergySpec};
use crate::error::{Error, Result};
use crate::nonlinearity::{check_odd, Nonlinearity, SamplePlan};

use super::{random_start, with_nl, SolveResult, SolverOptions, TraceEntry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PalaisSmaleReport {
    pub max_norm: f64,
    pub final_norm: f64,
    /// `max_k ‖u_k‖ / ‖u_final‖`.
    pub ratio: f64,
    pub first_residual: f64,
    pub final_residual: f64,
    pub bounded: bool,
    pub residual_decreased: bool,
    pub passed: bool,
}

/// Checks that a solver trace behaves like a Palais–Smale sequence with a
/// convergent subsequence: norms stay within `blowup_ratio` of the final
/// norm and the residual ends below where it started.
pub fn palais_smale_diagnostic(trace: &[TraceEntry], blowup_ratio: f64) -> Result<PalaisSmaleReport> {
    let (Some(first), Some(last)) = (trace.first(), trace.last()) else {
        return Err(Error::InvalidArgument("empty trace".into()));
    };
    let max_norm = trace.iter().map(|t| t.u_norm).fold(0.0, f64::max);
    let final_norm = last.u_norm;
    let ratio = if final_norm > 0.0 { max_norm / final_norm } else { f64::INFINITY };
    let bounded = ratio <= blowup_ratio;
    let residual_decreased = trace.len() == 1 || last.residual_norm < first.residual_norm;
    Ok(PalaisSmaleReport {
        max_norm,
        final_norm,
        ratio,
        first_residual: first.residual_norm,
        final_residual: last.residual_norm,
        bounded,
        residual_decreased,
        passed: bounded && residual_decreased,
    })
}

/// Smallest `φ` over `opts.sphere_samples` seeded random directions scaled
/// to `‖u‖ = radius`; an estimate of the level `δ` on that sphere.
pub fn sphere_level(nl: &Nonlinearity, spec: &EnergySpec, radius: f64, opts: &SolverOptions) -> Result<f64> {
    if !(radius > 0.0) || opts.sphere_samples == 0 {
        return Err(Error::InvalidArgument("sphere_level needs radius > 0 and at least one sample".into()));
    }
    let full = with_nl(spec, nl);
    let mut level = f64::INFINITY;
    for k in 0..opts.sphere_samples {
        let w = random_start(spec.mesh(), opts.seed.wrapping_add(k as u64));
        let norm = x_norm(&w, &full, &opts.norm)?;
        if norm == 0.0 {
            continue;
        }
        level = level.min(phi(&w.scaled(radius / norm), &full)?);
    }
    Ok(level)
}

/// The mirrored critical point `−u` for odd `f`, with its own `φ` and
/// residual recomputed.
pub fn odd_pair(result: &SolveResult, nl: &Nonlinearity, spec: &EnergySpec) -> Result<SolveResult> {
    check_odd(nl, &SamplePlan::default_for(spec.mesh()))?.into_gate()?;
    let full = with_nl(spec, nl);
    let u = result.u.scaled(-1.0);
    let phi_value = phi(&u, &full)?;
    let residual_norm = phi_grad(&u, &full)?.norm();
    Ok(SolveResult { u, phi_value, residual_norm, ..result.clone() })
}
