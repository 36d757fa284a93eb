//! Modulars and Luxemburg norms in `L^{p(x)}`, the Hölder pairing bound, the
//! Nemytskii operator and the discrete Poincaré ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::mesh::{pairwise_sum, ElementField, GridFunction, Mesh};
use crate::nonlinearity::Nonlinearity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Stopping tolerance on `|ρ(u/λ) − 1|`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Cap on geometric bracket expansion steps from `λ = 1`.
    pub max_expansions: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iterations: 200, max_expansions: 2100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub iterations: usize,
    /// `|ρ(u/λ) − 1|` at the returned `λ`; zero for the zero function.
    pub residual: f64,
}

fn check_pair(mesh: &Mesh, u: &ElementField, p: &ExponentField) -> Result<()> {
    mesh.check(u.mesh_id())?;
    mesh.check(p.mesh_id())
}

/// `ρ(u) = ∫ |u|^{p(x)}` with one-point quadrature.
pub fn modular(mesh: &Mesh, u: &ElementField, p: &ExponentField) -> Result<f64> {
    check_pair(mesh, u, p)?;
    Ok(scaled_modular(mesh, u, p, 1.0))
}

/// `ρ(u/λ)`.
fn scaled_modular(mesh: &Mesh, u: &ElementField, p: &ExponentField, lambda: f64) -> f64 {
    let terms: Vec<f64> = mesh
        .element_measures()
        .iter()
        .zip(u.values())
        .zip(p.values())
        .map(|((m, v), pe)| m * (v.abs() / lambda).powf(*pe))
        .collect();
    pairwise_sum(&terms)
}

/// Luxemburg norm `inf{λ > 0 : ρ(u/λ) ≤ 1}`, found by bisection on the
/// strictly decreasing map `λ ↦ ρ(u/λ)` after bracketing from `λ = 1`.
pub fn luxemburg_norm(mesh: &Mesh, u: &ElementField, p: &ExponentField, opts: &NormOptions) -> Result<NormResult> {
    check_pair(mesh, u, p)?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("norm tolerance must be positive, got {}", opts.tol)));
    }
    if u.is_zero() {
        return Ok(NormResult { value: 0.0, iterations: 0, residual: 0.0 });
    }
    let rho = |lambda: f64| scaled_modular(mesh, u, p, lambda);

    // Invariant after bracketing: rho(lo) >= 1 >= rho(hi).
    let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
    let at_one = rho(1.0);
    if (at_one - 1.0).abs() <= opts.tol {
        return Ok(NormResult { value: 1.0, iterations: 0, residual: (at_one - 1.0).abs() });
    }
    let mut expansions = 0;
    if at_one > 1.0 {
        while rho(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > opts.max_expansions || !hi.is_finite() {
                return Err(Error::BracketExpansion { cap: opts.max_expansions });
            }
        }
    } else {
        while rho(lo) < 1.0 {
            hi = lo;
            lo *= 0.5;
            expansions += 1;
            if expansions > opts.max_expansions || lo == 0.0 {
                return Err(Error::BracketExpansion { cap: opts.max_expansions });
            }
        }
    }

    let mut best = (hi, (rho(hi) - 1.0).abs());
    for iteration in 1..=opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        let value = rho(mid);
        let residual = (value - 1.0).abs();
        if residual < best.1 {
            best = (mid, residual);
        }
        if residual <= opts.tol || mid == lo || mid == hi {
            return Ok(NormResult { value: best.0, iterations: iteration, residual: best.1 });
        }
        if value > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NormResult { value: best.0, iterations: opts.max_iterations, residual: best.1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderBound {
    /// `|∫ u v|`.
    pub lhs: f64,
    /// `(1/p⁻ + 1/q⁻)·|u|_{p(x)}·|v|_{q(x)}` with `q` the conjugate of `p`.
    pub rhs: f64,
}

impl HolderBound {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn holder_pairing(
    mesh: &Mesh,
    u: &ElementField,
    v: &ElementField,
    p: &ExponentField,
    opts: &NormOptions,
) -> Result<HolderBound> {
    check_pair(mesh, u, p)?;
    mesh.check(v.mesh_id())?;
    let products: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a * b).collect();
    let lhs = mesh.integrate(&products)?.abs();
    let q = p.conjugate();
    let norm_u = luxemburg_norm(mesh, u, p, opts)?.value;
    let norm_v = luxemburg_norm(mesh, v, &q, opts)?.value;
    let rhs = (1.0 / p.p_minus() + 1.0 / q.p_minus()) * norm_u * norm_v;
    Ok(HolderBound { lhs, rhs })
}

/// Nodal composition `x ↦ f(x, u(x))`. The result is a plain nodal function;
/// it is Dirichlet compliant only when `f(x, 0) = 0` on the boundary.
pub fn nemytskii(mesh: &Mesh, f: &Nonlinearity, u: &GridFunction) -> Result<GridFunction> {
    mesh.check(u.mesh_id())?;
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let x = mesh.node(i);
            let value = f.eval(x, t);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonlinearityOverflow { x: x.to_vec(), t, value })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    GridFunction::from_values(mesh, values)
}

/// `|u|_{p(x)} / |∇u|_{p(x)}`, a lower estimate for the discrete Poincaré
/// constant.
pub fn poincare_ratio(mesh: &Mesh, u: &GridFunction, p: &ExponentField, opts: &NormOptions) -> Result<f64> {
    u.require_dirichlet(mesh)?;
    let grad = u.gradient_magnitudes(mesh)?;
    if grad.is_zero() {
        return Err(Error::ZeroFunction("Poincaré ratio needs a nonzero function"));
    }
    let values = u.at_centroids(mesh)?;
    let num = luxemburg_norm(mesh, &values, p, opts)?.value;
    let den = luxemburg_norm(mesh, &grad, p, opts)?.value;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, p: f64) -> (Mesh, ExponentField) {
        let mesh = Mesh::interval(n).unwrap();
        let p = ExponentField::constant(&mesh, p).unwrap();
        (mesh, p)
    }

    #[test]
    fn modular_examples() {
        let (mesh, p) = setup(16, 2.0);
        let one = ElementField::from_fn(&mesh, |_| 1.0);
        assert!((modular(&mesh, &one, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(modular(&mesh, &one.scaled(0.0), &p).unwrap(), 0.0);

        let (mesh, p) = setup(128, 2.0);
        let u = ElementField::from_fn(&mesh, |x| x[0]);
        // fine composite Simpson oracle for ∫₀¹ x² dx
        let m = 10_000;
        let h = 1.0 / m as f64;
        let simpson: f64 = (0..m)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                h / 6.0 * (a * a + 4.0 * (0.5 * (a + b)).powi(2) + b * b)
            })
            .sum();
        assert!((modular(&mesh, &u, &p).unwrap() - simpson).abs() < 1e-4);
    }

    #[test]
    fn norm_of_constant_is_the_constant() {
        for &pv in &[1.5, 2.0, 3.7] {
            let (mesh, p) = setup(32, pv);
            let u = ElementField::from_fn(&mesh, |_| 2.75);
            let r = luxemburg_norm(&mesh, &u, &p, &NormOptions::default()).unwrap();
            assert!((r.value - 2.75).abs() < 1e-9, "{pv}: {r:?}");
            assert!(r.residual <= 1e-10);
        }
    }

    #[test]
    fn norm_of_identity_matches_classical_l2() {
        let (mesh, p) = setup(128, 2.0);
        let u = ElementField::from_fn(&mesh, |x| x[0]);
        let r = luxemburg_norm(&mesh, &u, &p, &NormOptions::default()).unwrap();
        assert!((r.value - (1.0f64 / 3.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn zero_function_short_circuits() {
        let (mesh, p) = setup(8, 2.0);
        let z = ElementField::from_fn(&mesh, |_| 0.0);
        let r = luxemburg_norm(&mesh, &z, &p, &NormOptions::default()).unwrap();
        assert_eq!(r, NormResult { value: 0.0, iterations: 0, residual: 0.0 });
    }

    #[test]
    fn absolute_homogeneity_and_extreme_scales() {
        let mesh = Mesh::interval(40).unwrap();
        let p = ExponentField::from_sampler(&mesh, |x| 2.0 + x[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let opts = NormOptions::default();
        for _ in 0..50 {
            let u = ElementField::from_values(&mesh, (0..40).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let t: f64 = rng.random_range(-20.0..20.0);
            let a = luxemburg_norm(&mesh, &u.scaled(t), &p, &opts).unwrap().value;
            let b = t.abs() * luxemburg_norm(&mesh, &u, &p, &opts).unwrap().value;
            assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{a} vs {b}");
        }
        let tiny = ElementField::from_fn(&mesh, |_| 1e-200);
        assert!((luxemburg_norm(&mesh, &tiny, &p, &opts).unwrap().value / 1e-200 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bracket_cap_reported() {
        let (mesh, p) = setup(4, 2.0);
        let u = ElementField::from_fn(&mesh, |_| 1e200);
        let opts = NormOptions { max_expansions: 10, ..NormOptions::default() };
        assert!(matches!(luxemburg_norm(&mesh, &u, &p, &opts), Err(Error::BracketExpansion { cap: 10 })));
        let bad = NormOptions { tol: 0.0, ..NormOptions::default() };
        assert!(luxemburg_norm(&mesh, &u, &p, &bad).is_err());
    }

    #[test]
    fn holder_examples() {
        let (mesh, p) = setup(10, 2.0);
        let one = ElementField::from_fn(&mesh, |_| 1.0);
        let b = holder_pairing(&mesh, &one, &one, &p, &NormOptions::default()).unwrap();
        assert!((b.lhs - 1.0).abs() < 1e-14 && (b.rhs - 1.0).abs() < 1e-9);
        let b = holder_pairing(&mesh, &one, &one.scaled(0.0), &p, &NormOptions::default()).unwrap();
        assert_eq!((b.lhs, b.rhs), (0.0, 0.0));
    }

    #[test]
    fn nemytskii_compositions() {
        let mesh = Mesh::interval(8).unwrap();
        let u = GridFunction::from_fn(&mesh, |x| x[0]);
        let id = Nonlinearity::custom("identity", |_, t| t);
        assert_eq!(nemytskii(&mesh, &id, &u).unwrap(), u);
        let zero = Nonlinearity::custom("zero", |_, _| 0.0);
        assert!(nemytskii(&mesh, &zero, &u).unwrap().values().iter().all(|&v| v == 0.0));
        let sq = Nonlinearity::custom("signed square", |_, t| t.abs() * t);
        let out = nemytskii(&mesh, &sq, &u).unwrap();
        for (i, v) in out.values().iter().enumerate() {
            let x = i as f64 / 8.0;
            assert!((v - x * x).abs() < 1e-15);
        }
        let blow = Nonlinearity::custom("blow-up", |_, t| 1.0 / (t - 0.5));
        assert!(matches!(nemytskii(&mesh, &blow, &u), Err(Error::NonlinearityOverflow { t, .. }) if t == 0.5));
    }

    #[test]
    fn poincare_ratio_of_two_element_hat() {
        let mesh = Mesh::interval(2).unwrap();
        let p = ExponentField::constant(&mesh, 2.0).unwrap();
        let hat = GridFunction::hat(&mesh, 1);
        // piecewise oracle with one-point quadrature: u(mid) = 1/2 on both halves
        // of length 1/2, |u'| = 2 on both halves.
        let u_norm = (2.0 * 0.5 * 0.25f64).sqrt();
        let g_norm = (2.0 * 0.5 * 4.0f64).sqrt();
        let r = poincare_ratio(&mesh, &hat, &p, &NormOptions::default()).unwrap();
        assert!((r - u_norm / g_norm).abs() < 1e-9, "{r}");

        // on a refined mesh the same hat profile approaches the continuum value
        // |u|₂/|u'|₂ = (1/3)^{1/2} / 2
        let fine = Mesh::interval(512).unwrap();
        let pf = ExponentField::constant(&fine, 2.0).unwrap();
        let tent = GridFunction::from_fn(&fine, |x| 1.0 - (2.0 * x[0] - 1.0).abs());
        let r = poincare_ratio(&fine, &tent, &pf, &NormOptions::default()).unwrap();
        assert!((r - (1.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-5, "{r}");
    }

    #[test]
    fn poincare_ratio_errors_and_scaling() {
        let (mesh, p) = setup(16, 3.0);
        assert!(matches!(
            poincare_ratio(&mesh, &GridFunction::zeros(&mesh), &p, &NormOptions::default()),
            Err(Error::ZeroFunction(_))
        ));
        let bump = GridFunction::from_fn(&mesh, |x| (x[0] * (1.0 - x[0])).powf(0.7) * (1.0 + x[0]));
        let r1 = poincare_ratio(&mesh, &bump, &p, &NormOptions::default()).unwrap();
        let r2 = poincare_ratio(&mesh, &bump.scaled(-37.0), &p, &NormOptions::default()).unwrap();
        assert!((r1 - r2).abs() < 1e-10);
        let noncompliant = GridFunction::from_fn(&mesh, |_| 1.0);
        assert!(poincare_ratio(&mesh, &noncompliant, &p, &NormOptions::default()).is_err());
    }
}
