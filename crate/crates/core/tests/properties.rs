//! Randomized invariants across modules.

use std::sync::Arc;

use proptest::prelude::*;

use pxlap_core::energy::gradient_modular_sum;
use pxlap_core::nonlinearity::check_odd;
use pxlap_core::solvers::{
    find_descent_point, mountain_pass, solve_load, solve_load_from, sphere_level,
};
use pxlap_core::{
    duality_pairing, element_gradient, luxemburg_norm, phi, phi_grad, project_dirichlet, residual_l, x_norm,
    ElementField, EnergySpec, ExponentField, ExponentPreset, GridFunction, GrowthExponent, GrowthParams, LoadProfile,
    Mesh, NormOptions, Nonlinearity, SamplePlan, SolverOptions,
};

fn spec_on(mesh: &Arc<Mesh>, ps: &[f64]) -> EnergySpec {
    let exps = ps.iter().map(|&p| ExponentField::constant(mesh, p).unwrap()).collect();
    EnergySpec::new(mesh.clone(), exps).unwrap()
}

fn nodal(mesh: &Mesh, values: &[f64]) -> GridFunction {
    let raw = GridFunction::from_values(mesh, values[..mesh.num_nodes()].to_vec()).unwrap();
    project_dirichlet(&raw, mesh).unwrap()
}

fn cubic(theta: f64) -> Nonlinearity {
    Nonlinearity::power(1.0, 4.0)
        .unwrap()
        .with_params(GrowthParams {
            c1: Some(1.0),
            c2: Some(1.0),
            alpha: Some(GrowthExponent::Constant(4.0)),
            theta: Some(theta),
            m: Some(1.0),
            odd: true,
            ..Default::default()
        })
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn luxemburg_triangle_inequality(
        a in prop::collection::vec(-3.0..3.0f64, 24),
        b in prop::collection::vec(-3.0..3.0f64, 24),
        variable in any::<bool>(),
    ) {
        let mesh = Mesh::interval(24).unwrap();
        let p = if variable {
            ExponentField::from_preset(&mesh, &ExponentPreset::Affine { base: 1.5, slope: [2.0, 0.0] }).unwrap()
        } else {
            ExponentField::constant(&mesh, 2.5).unwrap()
        };
        let opts = NormOptions::default();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let n = |v: Vec<f64>| luxemburg_norm(&mesh, &ElementField::from_values(&mesh, v).unwrap(), &p, &opts).unwrap().value;
        prop_assert!(n(sum) <= n(a) + n(b) + 1e-8);
    }

    #[test]
    fn integrate_is_nonnegative_and_additive(values in prop::collection::vec(0.0..10.0f64, 50)) {
        let mesh = Mesh::unit_square(5, 5).unwrap();
        let total = mesh.integrate(&values).unwrap();
        prop_assert!(total >= 0.0);
        let (left, right): (Vec<f64>, Vec<f64>) =
            values.iter().enumerate().map(|(i, &v)| if i % 2 == 0 { (v, 0.0) } else { (0.0, v) }).unzip();
        let parts = mesh.integrate(&left).unwrap() + mesh.integrate(&right).unwrap();
        prop_assert!((parts - total).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn projection_is_idempotent_and_linear(
        a in prop::collection::vec(-5.0..5.0f64, 36),
        b in prop::collection::vec(-5.0..5.0f64, 36),
        s in -3.0..3.0f64,
    ) {
        let mesh = Mesh::unit_square(5, 5).unwrap();
        let u = GridFunction::from_values(&mesh, a).unwrap();
        let v = GridFunction::from_values(&mesh, b).unwrap();
        let pu = project_dirichlet(&u, &mesh).unwrap();
        prop_assert_eq!(&project_dirichlet(&pu, &mesh).unwrap(), &pu);
        let lhs = project_dirichlet(&u.add_scaled(s, &v), &mesh).unwrap();
        let rhs = pu.add_scaled(s, &project_dirichlet(&v, &mesh).unwrap());
        prop_assert!(lhs.max_distance(&rhs) <= 1e-12);
    }

    #[test]
    fn affine_gradients_are_exact(c in -4.0..4.0f64, gx in -4.0..4.0f64, gy in -4.0..4.0f64) {
        let mesh = Mesh::rectangle(4, 3, [-1.0, 0.5], [2.0, 1.5]).unwrap();
        let u = GridFunction::from_fn(&mesh, |x| c + gx * x[0] + gy * x[1]);
        for e in 0..mesh.num_elements() {
            let g = element_gradient(&u, &mesh, e);
            prop_assert!((g[0] - gx).abs() <= 1e-13 && (g[1] - gy).abs() <= 1e-13);
        }
    }

    #[test]
    fn duality_identity(values in prop::collection::vec(-2.0..2.0f64, 17), pair in 0usize..3) {
        let mesh = Arc::new(Mesh::interval(16).unwrap());
        let exps = match pair {
            0 => vec![ExponentField::constant(&mesh, 2.0).unwrap(), ExponentField::constant(&mesh, 3.0).unwrap()],
            1 => vec![ExponentField::constant(&mesh, 1.5).unwrap()],
            _ => vec![
                ExponentField::from_preset(&mesh, &ExponentPreset::Affine { base: 1.5, slope: [0.5, 0.0] }).unwrap(),
                ExponentField::from_preset(&mesh, &ExponentPreset::SinBump { base: 2.5, amplitude: 1.0 }).unwrap(),
            ],
        };
        let spec = EnergySpec::new(mesh.clone(), exps).unwrap();
        let u = nodal(&mesh, &values);
        let pairing = duality_pairing(&residual_l(&u, &spec).unwrap(), &u, &mesh).unwrap();
        let modular_sum = gradient_modular_sum(&u, &spec).unwrap();
        prop_assert!((pairing - modular_sum).abs() <= 1e-12 * modular_sum.max(1.0));
    }

    #[test]
    fn coercivity_trend(values in prop::collection::vec(-1.0..1.0f64, 17)) {
        let mesh = Arc::new(Mesh::interval(16).unwrap());
        let spec = spec_on(&mesh, &[1.5, 2.5]);
        let u = nodal(&mesh, &values);
        prop_assume!(u.max_norm() > 1e-3);
        let ratio = |t: f64| {
            let v = u.scaled(t);
            duality_pairing(&residual_l(&v, &spec).unwrap(), &v, &mesh).unwrap()
                / x_norm(&v, &spec, &NormOptions::default()).unwrap()
        };
        let (r1, r10, r100) = (ratio(1.0), ratio(10.0), ratio(100.0));
        prop_assert!(r1 < r10 && r10 < r100);
    }

    #[test]
    fn evenness_under_oddness(values in prop::collection::vec(-2.0..2.0f64, 17)) {
        let mesh = Arc::new(Mesh::interval(16).unwrap());
        let spec = spec_on(&mesh, &[2.0, 3.0]).with_nonlinearity(cubic(4.0));
        let u = nodal(&mesh, &values);
        let m = u.scaled(-1.0);
        prop_assert!((phi(&u, &spec).unwrap() - phi(&m, &spec).unwrap()).abs() <= 1e-10);
        let (a, b) = (phi_grad(&u, &spec).unwrap().norm(), phi_grad(&m, &spec).unwrap().norm());
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn primitive_vanishes_at_zero_and_is_even_for_odd_f(x in 0.0..1.0f64, t in 0.0..5.0f64, q in 2.0..6.0f64) {
        let odd = Nonlinearity::expr(&format!("t * abs(t)^{} * (1 + x)", q - 2.0)).unwrap();
        let plain = Nonlinearity::expr("exp(t) - 1 + x").unwrap();
        for nl in [&odd, &plain, &Nonlinearity::power(2.0, q).unwrap()] {
            prop_assert_eq!(nl.primitive(&[x], 0.0).unwrap(), 0.0);
        }
        let mesh = Mesh::interval(8).unwrap();
        let plan = SamplePlan::new(&mesh, SamplePlan::log_spaced(1e-3, 1e2, 20));
        prop_assert!(check_odd(&odd, &plan).unwrap().passed);
        let (fp, fm) = (odd.primitive(&[x], t).unwrap(), odd.primitive(&[x], -t).unwrap());
        prop_assert!((fp - fm).abs() <= 1e-8 * fp.abs().max(1.0));
    }
}

#[test]
fn checker_reports_are_deterministic() {
    let mesh = Mesh::interval(16).unwrap();
    let plan = SamplePlan::default_for(&mesh);
    let nl = Nonlinearity::expr("sin(5 * t) + t^3").unwrap();
    assert_eq!(check_odd(&nl, &plan).unwrap(), check_odd(&nl, &plan).unwrap());
}

#[test]
fn descent_trace_and_restart() {
    let mesh = Arc::new(Mesh::unit_square(8, 8).unwrap());
    let spec = spec_on(&mesh, &[1.7, 3.0]);
    let f = Nonlinearity::load(LoadProfile::SinBump { amplitude: 4.0 });
    let opts = SolverOptions::default();
    let r = solve_load(&f, &spec, &opts).unwrap();
    assert!(r.converged(), "{:?}", r.status);
    assert!(r.residual_norm <= opts.tol);
    assert!(r.trace.windows(2).all(|w| w[1].phi <= w[0].phi + 1e-13 * w[0].phi.abs().max(1.0)));
    let again = solve_load_from(&f, &spec, &r.u, &opts).unwrap();
    assert!(again.iterations <= 2);
}

#[test]
fn mountain_pass_level_dominates_sphere_level() {
    let mesh = Arc::new(Mesh::interval(32).unwrap());
    let spec = spec_on(&mesh, &[2.0, 2.0]);
    let nl = cubic(4.0);
    let opts = SolverOptions::mountain_pass();
    let w = project_dirichlet(&GridFunction::from_fn(&mesh, |x| x[0] * (1.0 - x[0])), &mesh).unwrap();
    let e = find_descent_point(&nl, &spec, &w, &opts).unwrap();
    let r = mountain_pass(&nl, &spec, &e.e, &opts).unwrap();
    let delta = sphere_level(&nl, &spec, opts.sphere_radius, &opts).unwrap();
    assert!(delta > 0.0, "sphere level {delta}");
    assert!(r.phi_value >= delta);
}

#[test]
fn mountain_pass_refinement_trend() {
    // Baseline C for |u_n − u_2n|∞ ≤ C/n on the shared nodes.
    const C: f64 = 1.0;
    let nl = cubic(4.0);
    let opts = SolverOptions::mountain_pass();
    let solve = |n: usize| {
        let mesh = Arc::new(Mesh::interval(n).unwrap());
        let spec = spec_on(&mesh, &[2.0, 2.0]);
        let w = project_dirichlet(&GridFunction::from_fn(&mesh, |x| (std::f64::consts::PI * x[0]).sin()), &mesh).unwrap();
        let e = find_descent_point(&nl, &spec, &w, &opts).unwrap();
        let r = mountain_pass(&nl, &spec, &e.e, &opts).unwrap();
        assert!(r.converged());
        let sign = r.u.values()[n / 2].signum();
        r.u.values().iter().map(|v| sign * v).collect::<Vec<_>>()
    };
    for n in [16, 32] {
        let (coarse, fine) = (solve(n), solve(2 * n));
        let gap = coarse.iter().enumerate().map(|(i, v)| (v - fine[2 * i]).abs()).fold(0.0, f64::max);
        assert!(gap <= C / n as f64, "n = {n}: gap {gap}");
    }
}
