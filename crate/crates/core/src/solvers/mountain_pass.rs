use crate::energy::{duality_pairing, phi_grad, x_norm, DualVector, EnergySpec};
use crate::error::{Error, Result};
use crate::mesh::GridFunction;
use crate::nonlinearity::{
    check_ar_condition, check_growth_f0, check_small_o_origin, check_superlinear_alpha, ConditionReport, Nonlinearity,
    SamplePlan,
};

use super::descent::{armijo, try_phi};
use super::precond::{dot, Preconditioner};
use super::{with_nl, SolveResult, SolveStatus, SolverOptions, TraceEntry};

/// Decreasing sequence used for the small-o check at the origin.
const SMALL_O_SEQUENCE: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
const RAY_BRACKET_STEPS: usize = 60;
const RAY_BISECTIONS: usize = 80;

#[derive(Debug, Clone)]
pub struct DescentPoint {
    pub t: f64,
    pub e: GridFunction,
    pub phi_value: f64,
    /// `(t, φ(t w))` for every trial.
    pub trials: Vec<(f64, f64)>,
}

/// Doubles `t` from 1 until `φ(t w) < opts.descent_target`.
pub fn find_descent_point(
    nl: &Nonlinearity,
    spec: &EnergySpec,
    w: &GridFunction,
    opts: &SolverOptions,
) -> Result<DescentPoint> {
    let full = with_nl(spec, nl);
    w.require_dirichlet(spec.mesh())?;
    if w.max_norm() == 0.0 {
        return Err(Error::ZeroFunction("descent direction"));
    }
    let mut trials = Vec::new();
    let mut t = 1.0;
    while t <= opts.descent_cap {
        let e = w.scaled(t);
        let value = try_phi(&e, &full)?.unwrap_or(f64::NAN);
        trials.push((t, value));
        if value < opts.descent_target {
            return Ok(DescentPoint { t, e, phi_value: value, trials });
        }
        t *= 2.0;
    }
    Err(Error::DescentCapExceeded { cap: opts.descent_cap })
}

/// Discretized path from `0` to `e` with the index of its current maximizer.
#[derive(Debug, Clone)]
pub struct MountainPassState {
    pub path: Vec<GridFunction>,
    pub values: Vec<f64>,
    pub max_index: usize,
}

impl MountainPassState {
    pub fn level(&self) -> f64 {
        self.values[self.max_index]
    }
}

/// Mountain-pass search for a nontrivial critical point between `0` and `e`.
/// Runs the (f₂), (f₀), superlinearity and (f₁) gates first unless
/// `opts.force` is set.
pub fn mountain_pass(nl: &Nonlinearity, spec: &EnergySpec, e: &GridFunction, opts: &SolverOptions) -> Result<SolveResult> {
    mountain_pass_detailed(nl, spec, e, opts).map(|(result, _)| result)
}

pub fn mountain_pass_detailed(
    nl: &Nonlinearity,
    spec: &EnergySpec,
    e: &GridFunction,
    opts: &SolverOptions,
) -> Result<(SolveResult, MountainPassState)> {
    if opts.path_points < 3 {
        return Err(Error::InvalidArgument("path_points must be at least 3".into()));
    }
    let reports = mountain_pass_gates(nl, spec, opts)?;
    let full = with_nl(spec, nl);
    e.require_dirichlet(spec.mesh())?;
    let phi_e = try_phi(e, &full)?.unwrap_or(f64::NAN);
    if !(phi_e < 0.0) {
        return Err(Error::EndpointNotBelowZero(phi_e));
    }
    let precond = Preconditioner::new(opts.preconditioner, spec.mesh())?;
    let m = opts.path_points;
    let path: Vec<GridFunction> = (0..m).map(|k| e.scaled(k as f64 / (m - 1) as f64)).collect();
    let values = path.iter().map(|u| evaluate(u, &full)).collect::<Result<Vec<_>>>()?;
    let mut state = MountainPassState { path, values, max_index: 0 };
    let mut trace = Vec::new();
    let mut alpha = 1.0;
    let mut previous: Option<(GridFunction, DualVector)> = None;
    let mut last_step = 0.0;
    let mut iteration = 0;
    let (status, residual) = loop {
        state.max_index = interior_argmax(&state.values);
        let k = state.max_index;
        let top = ray_maximize(&state.path[k], &full)?;
        state.values[k] = evaluate(&top, &full)?;
        state.path[k] = top;
        let u = &state.path[k];
        let size = u.max_norm();
        if size < opts.nontrivial_floor {
            return Err(Error::Collapsed { norm: size, floor: opts.nontrivial_floor });
        }
        let r = phi_grad(u, &full)?;
        let res = r.norm();
        trace.push(TraceEntry {
            iteration,
            phi: state.values[k],
            residual_norm: res,
            step: last_step,
            u_norm: x_norm(u, &full, &opts.norm)?,
        });
        if res <= opts.tol {
            break (SolveStatus::Converged, res);
        }
        if !res.is_finite() {
            break (SolveStatus::Diverged, res);
        }
        if iteration >= opts.max_iters {
            break (SolveStatus::MaxIters, res);
        }
        // Barzilai–Borwein between consecutive refined maximizers.
        if let Some((prev_u, prev_r)) = &previous {
            let s: Vec<f64> = u.sub(prev_u).interior_values(spec.mesh());
            let sy = dot(&s, r.sub(prev_r).components());
            alpha = if sy > 0.0 { (precond.metric(&s) / sy).clamp(opts.step_min, opts.step_max) } else { 1.0 };
        }
        previous = Some((u.clone(), r.clone()));
        let d = precond.apply(r.components());
        let Some(step) = armijo(u, state.values[k], &r, &d, alpha, &full, opts)? else {
            break (SolveStatus::Stalled, res);
        };
        last_step = step.alpha;
        state.path[k] = step.u;
        state.values[k] = step.phi;
        iteration += 1;
        if opts.retension_every > 0 && iteration % opts.retension_every == 0 {
            retension(&mut state, k, &full)?;
        }
    };
    let k = state.max_index;
    let result = SolveResult {
        u: state.path[k].clone(),
        phi_value: state.values[k],
        residual_norm: residual,
        iterations: iteration,
        trace,
        status,
        condition_reports: reports,
    };
    Ok((result, state))
}

/// Runs the mountain-pass condition checks in gate order. Rejections are errors
/// unless `opts.force` is set.
pub fn mountain_pass_gates(nl: &Nonlinearity, spec: &EnergySpec, opts: &SolverOptions) -> Result<Vec<ConditionReport>> {
    let (p_big, _) = spec.exponent_envelope();
    let pm_plus = p_big.p_plus();
    let plan = SamplePlan::default_for(spec.mesh());
    let star = p_big.sobolev_conjugate(spec.mesh().dim())?;
    let mut reports = Vec::new();
    // Small-o first: it needs no declared constants and is the condition a
    // linear f violates.
    let checks: [&dyn Fn() -> Result<ConditionReport>; 4] = [
        &|| check_small_o_origin(nl, pm_plus, &SMALL_O_SEQUENCE, &plan, opts.small_o_threshold),
        &|| check_growth_f0(nl, &star, &plan),
        &|| check_superlinear_alpha(nl, pm_plus),
        &|| check_ar_condition(nl, pm_plus, &plan),
    ];
    for check in checks {
        let report = check()?;
        reports.push(if opts.force { report } else { report.into_gate()? });
    }
    Ok(reports)
}

fn evaluate(u: &GridFunction, spec: &EnergySpec) -> Result<f64> {
    try_phi(u, spec)?.ok_or(Error::NonFiniteAssembly { element: usize::MAX })
}

fn interior_argmax(values: &[f64]) -> usize {
    let mut best = 1;
    for k in 2..values.len() - 1 {
        if values[k] > values[best] {
            best = k;
        }
    }
    best
}

/// Moves `u` to the maximizer of `φ` on its ray by bisection on
/// `t ↦ ⟨φ′(t u), u⟩`; leaves `u` unchanged if no sign change is found.
fn ray_maximize(u: &GridFunction, spec: &EnergySpec) -> Result<GridFunction> {
    let slope = |t: f64| -> Result<f64> { duality_pairing(&phi_grad(&u.scaled(t), spec)?, u, spec.mesh()) };
    let h1 = slope(1.0)?;
    if h1 == 0.0 || !h1.is_finite() {
        return Ok(u.clone());
    }
    let factor = if h1 > 0.0 { 2.0 } else { 0.5 };
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut found = false;
    for _ in 0..RAY_BRACKET_STEPS {
        let t = if h1 > 0.0 { hi * factor } else { lo * factor };
        let h = match slope(t) {
            Ok(h) if h.is_finite() => h,
            _ => break,
        };
        if h1 > 0.0 {
            lo = hi;
            hi = t;
        } else {
            hi = lo;
            lo = t;
        }
        if (h > 0.0) != (h1 > 0.0) || h == 0.0 {
            found = true;
            break;
        }
    }
    if !found {
        return Ok(u.clone());
    }
    for _ in 0..RAY_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if slope(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(u.scaled(0.5 * (lo + hi)))
}

/// Redistributes the points on either side of the pinned maximizer evenly
/// by arc length, measured in the nodal max-norm.
fn retension(state: &mut MountainPassState, pinned: usize, spec: &EnergySpec) -> Result<()> {
    let m = state.path.len();
    let mut fresh = state.path.clone();
    for (a, b) in [(0, pinned), (pinned, m - 1)] {
        if b - a < 2 {
            continue;
        }
        let segment = &state.path[a..=b];
        let mut arc = vec![0.0];
        for w in segment.windows(2) {
            arc.push(arc.last().unwrap() + w[1].max_distance(&w[0]));
        }
        let total = *arc.last().unwrap();
        if total == 0.0 {
            continue;
        }
        for j in 1..(b - a) {
            let target = total * j as f64 / (b - a) as f64;
            let i = arc.partition_point(|&s| s <= target).clamp(1, segment.len() - 1);
            let len = arc[i] - arc[i - 1];
            let lambda = if len > 0.0 { (target - arc[i - 1]) / len } else { 0.0 };
            fresh[a + j] = segment[i - 1].scaled(1.0 - lambda).add_scaled(lambda, &segment[i]);
        }
    }
    state.values = fresh.iter().map(|u| evaluate(u, spec)).collect::<Result<Vec<_>>>()?;
    state.path = fresh;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::ExponentField;
    use crate::mesh::Mesh;
    use crate::nonlinearity::{GrowthExponent, GrowthParams};
    use std::sync::Arc;

    fn cubic() -> Nonlinearity {
        Nonlinearity::power(1.0, 4.0)
            .unwrap()
            .with_params(GrowthParams {
                c1: Some(1.0),
                c2: Some(1.0),
                alpha: Some(GrowthExponent::Constant(4.0)),
                theta: Some(4.0),
                m: Some(1.0),
                odd: true,
                ..Default::default()
            })
            .unwrap()
    }

    fn spec(n: usize, ps: &[f64]) -> EnergySpec {
        let mesh = Arc::new(Mesh::interval(n).unwrap());
        let exps = ps.iter().map(|&p| ExponentField::constant(&mesh, p).unwrap()).collect();
        EnergySpec::new(mesh, exps).unwrap()
    }

    #[test]
    fn finds_positive_level_critical_point() {
        let s = spec(32, &[2.0, 2.0]);
        let opts = SolverOptions::mountain_pass();
        let w = GridFunction::from_fn(s.mesh(), |x| (std::f64::consts::PI * x[0]).sin());
        let w = crate::mesh::project_dirichlet(&w, s.mesh()).unwrap();
        let e = find_descent_point(&cubic(), &s, &w, &opts).unwrap();
        assert!(e.phi_value < -1.0);
        let (r, state) = mountain_pass_detailed(&cubic(), &s, &e.e, &opts).unwrap();
        assert!(r.converged(), "{:?} {} {}", r.status, r.residual_norm, r.iterations);
        assert!(r.phi_value > 0.0 && r.u.max_norm() > 0.1);
        assert_eq!(state.level(), r.phi_value);
        let mirrored: Vec<f64> = r.u.values().iter().rev().copied().collect();
        assert!(r.u.values().iter().zip(&mirrored).all(|(a, b)| (a - b).abs() < 1e-4));
    }

    #[test]
    fn two_exponent_critical_point() {
        let s = spec(32, &[2.0, 3.0]);
        let mut nl_params = cubic().params().clone();
        nl_params.theta = Some(3.5);
        let nl = cubic().with_params(nl_params).unwrap();
        let opts = SolverOptions::mountain_pass();
        let w = GridFunction::from_fn(s.mesh(), |x| x[0] * (1.0 - x[0]));
        let e = find_descent_point(&nl, &s, &w, &opts).unwrap();
        let r = mountain_pass(&nl, &s, &e.e, &opts).unwrap();
        assert!(r.converged() && r.phi_value > 0.0 && r.u.max_norm() > 0.1, "{:?} {}", r.status, r.iterations);
    }

    #[test]
    fn linear_f_is_rejected_by_small_o() {
        let s = spec(16, &[2.0, 2.0]);
        let w = GridFunction::from_fn(s.mesh(), |x| x[0] * (1.0 - x[0]));
        match mountain_pass(&Nonlinearity::power(1.0, 2.0).unwrap(), &s, &w, &SolverOptions::mountain_pass()) {
            Err(Error::ConditionRejected(report)) => assert_eq!(report.condition.to_string(), "(f2)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn endpoint_must_be_below_zero() {
        let s = spec(16, &[2.0, 2.0]);
        let w = GridFunction::from_fn(s.mesh(), |x| 0.1 * x[0] * (1.0 - x[0]));
        assert!(matches!(mountain_pass(&cubic(), &s, &w, &SolverOptions::mountain_pass()), Err(Error::EndpointNotBelowZero(_))));
    }

    #[test]
    fn descent_point_needs_nonzero_direction() {
        let s = spec(8, &[2.0]);
        let zero = GridFunction::zeros(s.mesh());
        assert!(find_descent_point(&cubic(), &s, &zero, &SolverOptions::default()).is_err());
    }

    #[test]
    fn interior_argmax_skips_endpoints() {
        assert_eq!(interior_argmax(&[5.0, 1.0, 2.0, 9.0]), 2);
    }
}
