//! The energy `J(u) = Σᵢ ∫ |∇u|^{pᵢ(x)}/pᵢ(x)`, its derivative
//! `L = J′` (the sum of `pᵢ(x)`-Laplacians), the full functional
//! `φ(u) = J(u) − ∫ F(x, u)` and its gradient, for any number of exponents.
//!
//! Dual vectors carry one component per interior node. With one-point
//! quadrature the discrete identity `⟨L(u), u⟩ = Σᵢ ∫ |∇u|^{pᵢ}` is exact up
//! to rounding.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{envelope, ExponentField};
use crate::lebesgue::{luxemburg_norm, NormOptions};
use crate::mesh::{element_gradient, pairwise_sum, GridFunction, Mesh, MeshId};
use crate::nonlinearity::Nonlinearity;

#[derive(Debug, Clone)]
pub struct EnergySpec {
    mesh: Arc<Mesh>,
    exponents: Vec<ExponentField>,
    nonlinearity: Option<Nonlinearity>,
    regularization: f64,
}

impl EnergySpec {
    pub fn new(mesh: Arc<Mesh>, exponents: Vec<ExponentField>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument("at least one exponent field is required".into()));
        }
        for p in &exponents {
            mesh.check(p.mesh_id())?;
        }
        Ok(Self { mesh, exponents, nonlinearity: None, regularization: 0.0 })
    }

    pub fn with_nonlinearity(mut self, nl: Nonlinearity) -> Self {
        self.nonlinearity = Some(nl);
        self
    }

    /// Replaces `|∇u|` by `(|∇u|² + ε²)^{1/2}` in the integrands (shifted so
    /// that `J(0) = 0`). Off by default.
    pub fn with_regularization(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("regularization must be nonnegative, got {epsilon}")));
        }
        self.regularization = epsilon;
        Ok(self)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn exponents(&self) -> &[ExponentField] {
        &self.exponents
    }

    pub fn nonlinearity(&self) -> Option<&Nonlinearity> {
        self.nonlinearity.as_ref()
    }

    pub(crate) fn require_nonlinearity(&self) -> Result<&Nonlinearity> {
        self.nonlinearity.as_ref().ok_or(Error::MissingNonlinearity)
    }

    /// Elementwise `(p_M, p_m)` over all exponents.
    pub fn exponent_envelope(&self) -> (ExponentField, ExponentField) {
        envelope(&self.exponents).expect("exponents validated at construction")
    }

    /// `Σᵢ |g|^{pᵢ−2}`, the scalar multiplying `g` in the flux; zero at `g = 0`.
    fn flux_coefficient(&self, e: usize, magnitude: f64) -> f64 {
        let eps = self.regularization;
        if eps == 0.0 {
            if magnitude == 0.0 {
                return 0.0;
            }
            self.exponents.iter().map(|p| magnitude.powf(p.at(e) - 2.0)).sum()
        } else {
            let s = magnitude.hypot(eps);
            self.exponents.iter().map(|p| s.powf(p.at(e) - 2.0)).sum()
        }
    }

    fn energy_density(&self, e: usize, magnitude: f64) -> f64 {
        let eps = self.regularization;
        self.exponents
            .iter()
            .map(|p| {
                let pe = p.at(e);
                if eps == 0.0 {
                    magnitude.powf(pe) / pe
                } else {
                    (magnitude.hypot(eps).powf(pe) - eps.powf(pe)) / pe
                }
            })
            .sum()
    }
}

/// Functional on the discrete space, one component per interior node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector {
    mesh_id: MeshId,
    components: Vec<f64>,
}

impl DualVector {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self { mesh_id: mesh.id(), components: vec![0.0; mesh.num_interior()] }
    }

    pub fn from_components(mesh: &Mesh, components: Vec<f64>) -> Result<Self> {
        if components.len() != mesh.num_interior() {
            return Err(Error::LengthMismatch { expected: mesh.num_interior(), found: components.len() });
        }
        Ok(Self { mesh_id: mesh.id(), components })
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Euclidean norm of the interior components; a mesh-dependent stand-in
    /// for the dual norm.
    pub fn norm(&self) -> f64 {
        pairwise_sum(&self.components.iter().map(|c| c * c).collect::<Vec<_>>()).sqrt()
    }

    pub fn sub(&self, other: &DualVector) -> DualVector {
        DualVector {
            mesh_id: self.mesh_id,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> DualVector {
        DualVector { mesh_id: self.mesh_id, components: self.components.iter().map(|c| t * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0.0)
    }
}

fn check_u(spec: &EnergySpec, u: &GridFunction) -> Result<()> {
    u.require_dirichlet(spec.mesh())
}

/// `J(u) = Σᵢ Σₑ |e|·|∇u|ₑ^{pᵢ(e)}/pᵢ(e)`.
pub fn energy_j(u: &GridFunction, spec: &EnergySpec) -> Result<f64> {
    check_u(spec, u)?;
    let mesh = spec.mesh();
    let densities: Vec<f64> = (0..mesh.num_elements())
        .map(|e| {
            let g = element_gradient(u, mesh, e);
            spec.energy_density(e, g[0].hypot(g[1]))
        })
        .collect();
    mesh.integrate(&densities)
}

/// `Σᵢ ∫ |∇u|^{pᵢ(x)}`, the right-hand side of the discrete duality identity.
pub fn gradient_modular_sum(u: &GridFunction, spec: &EnergySpec) -> Result<f64> {
    check_u(spec, u)?;
    let mesh = spec.mesh();
    let values: Vec<f64> = (0..mesh.num_elements())
        .map(|e| {
            let g = element_gradient(u, mesh, e);
            let m = g[0].hypot(g[1]);
            spec.exponents.iter().map(|p| m.powf(p.at(e))).sum()
        })
        .collect();
    mesh.integrate(&values)
}

/// Assembled `⟨L(u), φⱼ⟩ = Σᵢ ∫ |∇u|^{pᵢ−2}∇u·∇φⱼ` for interior hats `φⱼ`.
pub fn residual_l(u: &GridFunction, spec: &EnergySpec) -> Result<DualVector> {
    check_u(spec, u)?;
    let mesh = spec.mesh();
    let mut r = vec![0.0; mesh.num_interior()];
    for e in 0..mesh.num_elements() {
        let g = element_gradient(u, mesh, e);
        let coef = spec.flux_coefficient(e, g[0].hypot(g[1]));
        if coef == 0.0 {
            continue;
        }
        let scale = mesh.element_measures()[e] * coef;
        if !scale.is_finite() {
            return Err(Error::NonFiniteAssembly { element: e });
        }
        for (&node, grad) in mesh.element_nodes(e).iter().zip(mesh.basis_gradients(e)) {
            if let Some(j) = mesh.interior_index(node) {
                r[j] += scale * (g[0] * grad[0] + g[1] * grad[1]);
            }
        }
    }
    if let Some(j) = r.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFiniteAssembly { element: j });
    }
    Ok(DualVector { mesh_id: mesh.id(), components: r })
}

/// `f(x, u)` at element centroids, with `u` interpolated linearly.
fn centroid_loads(u: &GridFunction, mesh: &Mesh, nl: &Nonlinearity) -> Result<Vec<f64>> {
    let um = u.at_centroids(mesh)?;
    um.values()
        .iter()
        .enumerate()
        .map(|(e, &t)| {
            let x = mesh.centroid(e);
            let value = nl.eval(x, t);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonlinearityOverflow { x: x.to_vec(), t, value })
            }
        })
        .collect()
}

/// Assembled `∫ f(x, u) φⱼ` for interior hats, one-point quadrature.
pub fn load_vector(u: &GridFunction, spec: &EnergySpec) -> Result<DualVector> {
    check_u(spec, u)?;
    let nl = spec.require_nonlinearity()?;
    let mesh = spec.mesh();
    let loads = centroid_loads(u, mesh, nl)?;
    let share = 1.0 / (mesh.dim() + 1) as f64;
    let mut b = vec![0.0; mesh.num_interior()];
    for (e, load) in loads.iter().enumerate() {
        let w = mesh.element_measures()[e] * load * share;
        for &node in mesh.element_nodes(e) {
            if let Some(j) = mesh.interior_index(node) {
                b[j] += w;
            }
        }
    }
    Ok(DualVector { mesh_id: mesh.id(), components: b })
}

/// `∫ F(x, u)` with `F` at element centroids.
pub fn potential_integral(u: &GridFunction, spec: &EnergySpec) -> Result<f64> {
    check_u(spec, u)?;
    let nl = spec.require_nonlinearity()?;
    let mesh = spec.mesh();
    let um = u.at_centroids(mesh)?;
    let values = um
        .values()
        .iter()
        .enumerate()
        .map(|(e, &t)| {
            let x = mesh.centroid(e);
            let value = nl.primitive(x, t)?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonlinearityOverflow { x: x.to_vec(), t, value })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    mesh.integrate(&values)
}

/// `φ(u) = J(u) − ∫ F(x, u)`.
pub fn phi(u: &GridFunction, spec: &EnergySpec) -> Result<f64> {
    Ok(energy_j(u, spec)? - potential_integral(u, spec)?)
}

/// Gradient of `φ`: `L(u)` minus the assembled load of `f(x, u)`.
pub fn phi_grad(u: &GridFunction, spec: &EnergySpec) -> Result<DualVector> {
    let r = residual_l(u, spec)?;
    let b = load_vector(u, spec)?;
    Ok(r.sub(&b))
}

/// `Σ_j r_j v_j` over interior nodes.
pub fn duality_pairing(r: &DualVector, v: &GridFunction, mesh: &Mesh) -> Result<f64> {
    mesh.check(r.mesh_id)?;
    mesh.check(v.mesh_id())?;
    let terms: Vec<f64> = mesh.interior_nodes().iter().zip(&r.components).map(|(&n, c)| c * v.values()[n]).collect();
    Ok(pairwise_sum(&terms))
}

/// `⟨L(u) − L(v), u − v⟩`.
pub fn monotonicity_gap(u: &GridFunction, v: &GridFunction, spec: &EnergySpec) -> Result<f64> {
    let diff = residual_l(u, spec)?.sub(&residual_l(v, spec)?);
    duality_pairing(&diff, &u.sub(v), spec.mesh())
}

/// `‖u‖ = Σᵢ |∇u|_{pᵢ(x)}`, the norm of the intersection space.
pub fn x_norm(u: &GridFunction, spec: &EnergySpec, opts: &NormOptions) -> Result<f64> {
    check_u(spec, u)?;
    let mesh = spec.mesh();
    let grad = u.gradient_magnitudes(mesh)?;
    spec.exponents.iter().try_fold(0.0, |acc, p| Ok(acc + luxemburg_norm(mesh, &grad, p, opts)?.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityGap {
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of the elementary vector inequalities behind strict
/// monotonicity of the `p`-Laplacian:
///
/// * `p ≥ 2`: `(|ξ|^{p−2}ξ − |η|^{p−2}η)·(ξ − η) ≥ 2^{−p}|ξ − η|^p`
/// * `1 < p < 2`: `[(|ξ|^{p−2}ξ − |η|^{p−2}η)·(ξ − η)]·(|ξ|^p + |η|^p)^{(2−p)/p} ≥ (p − 1)|ξ − η|²`
pub fn vector_inequality_gap(xi: &[f64], eta: &[f64], p: f64) -> Result<InequalityGap> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {p}")));
    }
    if xi.len() != eta.len() {
        return Err(Error::LengthMismatch { expected: xi.len(), found: eta.len() });
    }
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let flux = |v: &[f64]| {
        let n = norm(v);
        let w = if n == 0.0 { 0.0 } else { n.powf(p - 2.0) };
        v.iter().map(|c| w * c).collect::<Vec<_>>()
    };
    let (a, b) = (flux(xi), flux(eta));
    let diff: Vec<f64> = xi.iter().zip(eta).map(|(x, y)| x - y).collect();
    let dot: f64 = a.iter().zip(&b).zip(&diff).map(|((a, b), d)| (a - b) * d).sum();
    let dist = norm(&diff);
    if p >= 2.0 {
        Ok(InequalityGap { lhs: dot, rhs: dist.powf(p) / 2f64.powf(p) })
    } else {
        let weight = norm(xi).powf(p) + norm(eta).powf(p);
        let lhs = if weight == 0.0 { 0.0 } else { dot * weight.powf((2.0 - p) / p) };
        Ok(InequalityGap { lhs, rhs: (p - 1.0) * dist * dist })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::project_dirichlet;
    use crate::nonlinearity::LoadProfile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec_1d(n: usize, ps: &[f64]) -> EnergySpec {
        let mesh = Arc::new(Mesh::interval(n).unwrap());
        let exps = ps.iter().map(|&p| ExponentField::constant(&mesh, p).unwrap()).collect();
        EnergySpec::new(mesh, exps).unwrap()
    }

    fn random_u(spec: &EnergySpec, rng: &mut ChaCha8Rng) -> GridFunction {
        let mesh = spec.mesh();
        let raw = GridFunction::from_values(mesh, (0..mesh.num_nodes()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        project_dirichlet(&raw, mesh).unwrap()
    }

    /// Independent linear FEM oracle: 1D stiffness matrix `K_ij = ∫ φᵢ′φⱼ′`.
    fn stiffness_product(n: usize, u: &[f64]) -> Vec<f64> {
        let h = 1.0 / n as f64;
        (1..n).map(|i| (2.0 * u[i] - u[i - 1] - u[i + 1]) / h).collect()
    }

    #[test]
    fn energy_examples() {
        let spec = spec_1d(2, &[2.0, 2.0]);
        assert_eq!(energy_j(&GridFunction::zeros(spec.mesh()), &spec).unwrap(), 0.0);
        let hat = GridFunction::hat(spec.mesh(), 1);
        // |u'| = 2 on both halves: 2·(1/2)·∫|u'|² = ∫|u'|² = 4
        assert!((energy_j(&hat, &spec).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn energy_scaling_splits_by_exponent() {
        let (a, b) = (1.7, 3.2);
        let both = spec_1d(32, &[a, b]);
        let only_a = EnergySpec::new(both.mesh_arc().clone(), vec![both.exponents()[0].clone()]).unwrap();
        let only_b = EnergySpec::new(both.mesh_arc().clone(), vec![both.exponents()[1].clone()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_u(&both, &mut rng);
        let (ta, tb) = (energy_j(&u, &only_a).unwrap(), energy_j(&u, &only_b).unwrap());
        for t in [0.3f64, 1.0, 4.5] {
            let expected = t.powf(a) * ta + t.powf(b) * tb;
            assert!((energy_j(&u.scaled(t), &both).unwrap() - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn residual_of_zero_and_duality_identity() {
        let mesh = Arc::new(Mesh::unit_square(6, 5).unwrap());
        let p1 = ExponentField::from_sampler(&mesh, |x| 1.5 + x[0]).unwrap();
        let p2 = ExponentField::from_sampler(&mesh, |x| 2.5 + 0.5 * x[1]).unwrap();
        let spec = EnergySpec::new(mesh.clone(), vec![p1, p2]).unwrap();
        assert!(residual_l(&GridFunction::zeros(&mesh), &spec).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_u(&spec, &mut rng);
            let lhs = duality_pairing(&residual_l(&u, &spec).unwrap(), &u, &mesh).unwrap();
            let rhs = gradient_modular_sum(&u, &spec).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn quadratic_case_matches_linear_stiffness() {
        let n = 24;
        let spec = spec_1d(n, &[2.0, 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_u(&spec, &mut rng);
        let v = random_u(&spec, &mut rng);
        let r = residual_l(&u, &spec).unwrap();
        let ku = stiffness_product(n, u.values());
        for (a, b) in r.components().iter().zip(&ku) {
            assert!((a - 2.0 * b).abs() < 1e-11, "{a} vs {}", 2.0 * b);
        }
        let w = u.sub(&v);
        let kw = stiffness_product(n, w.values());
        let quad: f64 = kw.iter().zip(&w.values()[1..n]).map(|(a, b)| a * b).sum();
        assert!((monotonicity_gap(&u, &v, &spec).unwrap() - 2.0 * quad).abs() < 1e-10);
        assert_eq!(monotonicity_gap(&u, &u, &spec).unwrap(), 0.0);
    }

    #[test]
    fn phi_examples() {
        let spec = spec_1d(16, &[2.0, 3.0]).with_nonlinearity(Nonlinearity::load(LoadProfile::Affine { base: 1.0, slope: [2.0, 0.0] }));
        assert_eq!(phi(&GridFunction::zeros(spec.mesh()), &spec).unwrap(), 0.0);
        assert!(phi_grad(&GridFunction::zeros(spec.mesh()), &spec).unwrap().components().iter().all(|&c| c != 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_u(&spec, &mut rng);
        // split evaluation: J(u) − Σ |e| f(x_e) u(x_e)
        let mesh = spec.mesh();
        let um = u.at_centroids(mesh).unwrap();
        let load: f64 = (0..mesh.num_elements())
            .map(|e| mesh.element_measures()[e] * (1.0 + 2.0 * mesh.centroid(e)[0]) * um.values()[e])
            .sum();
        assert!((phi(&u, &spec).unwrap() - (energy_j(&u, &spec).unwrap() - load)).abs() < 1e-13);
        let pure = EnergySpec::new(spec.mesh_arc().clone(), spec.exponents().to_vec()).unwrap();
        assert!(matches!(phi(&u, &pure), Err(Error::MissingNonlinearity)));
    }

    #[test]
    fn odd_nonlinearity_gives_even_phi() {
        let spec = spec_1d(20, &[2.0, 2.6]).with_nonlinearity(Nonlinearity::power(1.0, 4.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let u = random_u(&spec, &mut rng);
            let m = u.scaled(-1.0);
            assert!((phi(&u, &spec).unwrap() - phi(&m, &spec).unwrap()).abs() < 1e-12);
            let (a, b) = (phi_grad(&u, &spec).unwrap().norm(), phi_grad(&m, &spec).unwrap().norm());
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_grad_matches_central_differences() {
        let mesh = Arc::new(Mesh::unit_square(5, 4).unwrap());
        let p1 = ExponentField::from_sampler(&mesh, |x| 2.0 + x[0]).unwrap();
        let p2 = ExponentField::constant(&mesh, 1.6).unwrap();
        let spec = EnergySpec::new(mesh.clone(), vec![p1, p2])
            .unwrap()
            .with_nonlinearity(Nonlinearity::sum(0.7, 3.5, LoadProfile::SinBump { amplitude: 2.0 }).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let u = random_u(&spec, &mut rng);
            let v = random_u(&spec, &mut rng);
            let h = 1e-6;
            let fd = (phi(&u.add_scaled(h, &v), &spec).unwrap() - phi(&u.add_scaled(-h, &v), &spec).unwrap()) / (2.0 * h);
            let an = duality_pairing(&phi_grad(&u, &spec).unwrap(), &v, &mesh).unwrap();
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(fd.abs()), "{fd} vs {an}");
        }
    }

    #[test]
    fn regularized_energy_is_consistent() {
        let spec = spec_1d(12, &[1.2]).with_regularization(1e-3).unwrap().with_nonlinearity(Nonlinearity::power(1.0, 3.0).unwrap());
        assert_eq!(energy_j(&GridFunction::zeros(spec.mesh()), &spec).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_u(&spec, &mut rng);
        let v = random_u(&spec, &mut rng);
        let h = 1e-6;
        let fd = (phi(&u.add_scaled(h, &v), &spec).unwrap() - phi(&u.add_scaled(-h, &v), &spec).unwrap()) / (2.0 * h);
        let an = duality_pairing(&phi_grad(&u, &spec).unwrap(), &v, spec.mesh()).unwrap();
        assert!((fd - an).abs() <= 1e-6 * an.abs());
        assert!(spec_1d(4, &[2.0]).with_regularization(-1.0).is_err());
    }

    #[test]
    fn non_compliant_or_foreign_inputs_rejected() {
        let spec = spec_1d(8, &[2.0]);
        let bad = GridFunction::from_fn(spec.mesh(), |_| 1.0);
        assert!(matches!(energy_j(&bad, &spec), Err(Error::NotDirichletCompliant { node: 0, .. })));
        let other = Mesh::interval(8).unwrap();
        assert!(matches!(residual_l(&GridFunction::zeros(&other), &spec), Err(Error::MeshMismatch { .. })));
        assert!(EnergySpec::new(spec.mesh_arc().clone(), vec![]).is_err());
        let foreign = ExponentField::constant(&other, 2.0).unwrap();
        assert!(EnergySpec::new(spec.mesh_arc().clone(), vec![foreign]).is_err());
    }

    #[test]
    fn inequality_gap_examples() {
        let g = vector_inequality_gap(&[1.0, 0.0], &[0.0, 0.0], 2.0).unwrap();
        assert_eq!((g.lhs, g.rhs), (1.0, 0.25));
        for p in [1.3, 2.0, 4.5] {
            let g = vector_inequality_gap(&[0.3, -0.2], &[0.3, -0.2], p).unwrap();
            assert_eq!((g.lhs, g.rhs), (0.0, 0.0));
        }
        assert!(vector_inequality_gap(&[1.0], &[0.0], 1.0).is_err());
        assert!(vector_inequality_gap(&[1.0], &[0.0, 1.0], 2.0).is_err());
    }

    #[test]
    fn dual_pairing_is_bilinear() {
        let spec = spec_1d(10, &[2.0]);
        let mesh = spec.mesh();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = DualVector::from_components(mesh, (0..9).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let s = DualVector::from_components(mesh, (0..9).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let u = random_u(&spec, &mut rng);
        let v = random_u(&spec, &mut rng);
        let pair = |a: &DualVector, b: &GridFunction| duality_pairing(a, b, mesh).unwrap();
        assert_eq!(pair(&DualVector::zeros(mesh), &u), 0.0);
        assert!((pair(&r, &u.add_scaled(2.5, &v)) - (pair(&r, &u) + 2.5 * pair(&r, &v))).abs() < 1e-12);
        assert!((pair(&r.sub(&s.scaled(-3.0)), &u) - (pair(&r, &u) + 3.0 * pair(&s, &u))).abs() < 1e-12);
        let manual: f64 = (0..9).map(|j| r.components()[j] * u.values()[j + 1]).sum();
        assert!((pair(&r, &u) - manual).abs() < 1e-14);
    }
}
