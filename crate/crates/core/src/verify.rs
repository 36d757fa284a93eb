//! Randomized property suites over a fixed mesh: norm–modular relations,
//! the Hölder bound, the elementary vector inequalities, strict
//! monotonicity of `L`, and consistency of `φ′` with finite differences.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{duality_pairing, monotonicity_gap, phi, phi_grad, vector_inequality_gap, EnergySpec};
use crate::error::Result;
use crate::exponent::{ExponentField, ExponentPreset};
use crate::lebesgue::{holder_pairing, luxemburg_norm, modular, NormOptions};
use crate::mesh::{project_dirichlet, ElementField, GridFunction, Mesh};
use crate::nonlinearity::{LoadProfile, Nonlinearity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    /// Random cases per suite and configuration.
    pub samples: usize,
    pub seed: u64,
    pub norm: NormOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { samples: 200, seed: 0, norm: NormOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    /// First violation, if any.
    pub witness: Option<String>,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), cases: 0, violations: 0, witness: None, passed: true }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            self.passed = false;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
    pub passed: bool,
}

/// Exponent presets exercised by the norm suites: constant 2, `2 + x`, and a
/// sine bump `2 + ½ Π sin(πxᵢ)`.
pub fn standard_presets() -> Vec<(&'static str, ExponentPreset)> {
    vec![
        ("constant-2", ExponentPreset::Constant { value: 2.0 }),
        ("affine-2+x", ExponentPreset::Affine { base: 2.0, slope: [1.0, 0.0] }),
        ("sin-bump", ExponentPreset::SinBump { base: 2.0, amplitude: 0.5 }),
    ]
}

/// Exponent pairs for the monotonicity and gradient suites.
pub fn standard_pairs(mesh: &Mesh) -> Result<Vec<(&'static str, Vec<ExponentField>)>> {
    let c = |p| ExponentField::constant(mesh, p);
    let affine = |base, slope| ExponentField::from_preset(mesh, &ExponentPreset::Affine { base, slope: [slope, 0.0] });
    Ok(vec![
        ("(2,3)", vec![c(2.0)?, c(3.0)?]),
        ("(1.5,2.5)", vec![c(1.5)?, c(2.5)?]),
        ("affine", vec![affine(1.5, 0.5)?, affine(2.5, 1.0)?]),
    ])
}

/// Built-in nonlinearities for the gradient-consistency suite.
pub fn standard_nonlinearities() -> Result<Vec<Nonlinearity>> {
    Ok(vec![
        Nonlinearity::power(1.0, 4.0)?,
        Nonlinearity::load(LoadProfile::SinBump { amplitude: 3.0 }),
        Nonlinearity::sum(1.0, 1.5, LoadProfile::Constant { value: 1.0 })?,
        Nonlinearity::expr("t^3 + x")?,
    ])
}

/// Nodal values uniform in `[−1, 1]` times `10^s` with `s` uniform in
/// `[−2, 2]`, projected onto the Dirichlet subspace.
pub fn random_function(mesh: &Mesh, rng: &mut ChaCha8Rng) -> GridFunction {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let raw = GridFunction::from_values(mesh, (0..mesh.num_nodes()).map(|_| scale * rng.random_range(-1.0..1.0)).collect())
        .expect("length matches mesh");
    project_dirichlet(&raw, mesh).expect("same mesh")
}

fn random_field(mesh: &Mesh, rng: &mut ChaCha8Rng) -> ElementField {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    ElementField::from_values(mesh, (0..mesh.num_elements()).map(|_| scale * rng.random_range(-1.0..1.0)).collect())
        .expect("length matches mesh")
}

/// Runs every suite on `mesh`.
pub fn run_all(mesh: &Arc<Mesh>, opts: &VerifyOptions) -> Result<VerifyReport> {
    let suites = vec![
        norm_modular_suite(mesh, opts)?,
        modular_convergence_suite(mesh, opts)?,
        holder_suite(mesh, opts)?,
        inequality_suite(opts)?,
        monotonicity_suite(mesh, opts)?,
        gradient_suite(mesh, opts)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport { suites, passed })
}

/// Trichotomy (`ρ(u) ⋚ 1 ⟺ |u| ⋚ 1`) and the sandwich
/// `|u|^{p⁺} ≤ ρ(u) ≤ |u|^{p⁻}` for `|u| < 1`, reversed for `|u| > 1`.
pub fn norm_modular_suite(mesh: &Mesh, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("norm-modular");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let slack = 1e-8;
    for (name, preset) in standard_presets() {
        let p = ExponentField::from_preset(mesh, &preset)?;
        let (lo, hi) = (p.p_minus(), p.p_plus());
        for _ in 0..opts.samples {
            let u = random_field(mesh, &mut rng);
            let rho = modular(mesh, &u, &p)?;
            let norm = luxemburg_norm(mesh, &u, &p, &opts.norm)?.value;
            let trichotomy = (rho - 1.0).abs() < slack || (rho < 1.0) == (norm < 1.0);
            let (a, b) = (norm.powf(lo), norm.powf(hi));
            let (below, above) = if norm > 1.0 { (a, b) } else { (b, a) };
            let sandwich = below <= rho * (1.0 + slack) && rho <= above * (1.0 + slack);
            out.record(trichotomy && sandwich, || format!("{name}: |u| = {norm:e}, rho = {rho:e}, p in [{lo}, {hi}]"));
        }
    }
    Ok(out)
}

/// `|u_k − u| → 0` together with `ρ(u_k − u) → 0` for `u_k = u + 2^{−k} w`.
pub fn modular_convergence_suite(mesh: &Mesh, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("norm-modular-convergence");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let tol = 1e-8;
    for (name, preset) in standard_presets() {
        let p = ExponentField::from_preset(mesh, &preset)?;
        for _ in 0..opts.samples.div_ceil(10) {
            let w = random_field(mesh, &mut rng);
            let mut norms = Vec::new();
            let mut rhos = Vec::new();
            for k in 0..60 {
                let d = w.scaled(0.5f64.powi(k));
                norms.push(luxemburg_norm(mesh, &d, &p, &opts.norm)?.value);
                rhos.push(modular(mesh, &d, &p)?);
            }
            let decreasing = |v: &[f64]| v.windows(2).all(|x| x[1] <= x[0]);
            let ok = decreasing(&norms) && decreasing(&rhos) && norms[59] < tol && rhos[59] < tol;
            out.record(ok, || format!("{name}: final norm {:e}, modular {:e}", norms[59], rhos[59]));
        }
    }
    Ok(out)
}

/// `|∫uv| ≤ (1/p⁻ + 1/q⁻)|u|_p|v|_q` with `p = 2 + x`.
pub fn holder_suite(mesh: &Mesh, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("holder");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(2));
    let p = ExponentField::from_preset(mesh, &ExponentPreset::Affine { base: 2.0, slope: [1.0, 0.0] })?;
    for _ in 0..opts.samples {
        let u = random_field(mesh, &mut rng);
        let v = random_field(mesh, &mut rng);
        let bound = holder_pairing(mesh, &u, &v, &p, &opts.norm)?;
        out.record(bound.holds(1e-12), || format!("lhs {:e} > rhs {:e}", bound.lhs, bound.rhs));
    }
    Ok(out)
}

/// Elementary vector inequalities in 1D and 2D; equality only at `ξ = η`.
pub fn inequality_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("inequality-gap");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(3));
    for p in [1.3, 1.7, 2.0, 3.0, 4.5] {
        for dim in [1, 2] {
            for k in 0..opts.samples {
                let xi: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                let eta: Vec<f64> = if k % 10 == 0 { xi.clone() } else { (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect() };
                let gap = vector_inequality_gap(&xi, &eta, p)?;
                let equal = (gap.lhs - gap.rhs).abs() <= 1e-12 * gap.lhs.abs().max(gap.rhs.abs());
                let ok = gap.lhs >= gap.rhs - 1e-12 && equal == (xi == eta);
                out.record(ok, || format!("p = {p}, xi = {xi:?}, eta = {eta:?}: lhs {:e}, rhs {:e}", gap.lhs, gap.rhs));
            }
        }
    }
    Ok(out)
}

/// `⟨L(u) − L(v), u − v⟩ > 0` for distinct random `u, v`.
pub fn monotonicity_suite(mesh: &Arc<Mesh>, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("monotonicity");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(4));
    for (name, exps) in standard_pairs(mesh)? {
        let spec = EnergySpec::new(mesh.clone(), exps)?;
        for _ in 0..opts.samples {
            let u = random_function(mesh, &mut rng);
            let v = random_function(mesh, &mut rng);
            if u == v {
                continue;
            }
            let gap = monotonicity_gap(&u, &v, &spec)?;
            out.record(gap > 0.0, || format!("{name}: gap {gap:e}"));
        }
    }
    Ok(out)
}

/// `⟨φ′(u), v⟩` against the central difference `(φ(u+hv) − φ(u−hv)) / 2h`.
pub fn gradient_suite(mesh: &Arc<Mesh>, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("gradient-check");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(5));
    let exps = vec![ExponentField::constant(mesh, 2.0)?, ExponentField::constant(mesh, 3.0)?];
    for nl in standard_nonlinearities()? {
        let spec = EnergySpec::new(mesh.clone(), exps.clone())?.with_nonlinearity(nl.clone());
        for _ in 0..opts.samples.div_ceil(2) {
            let err = gradient_error(&spec, &mut rng)?;
            out.record(err <= 1e-5, || format!("{}: relative error {err:e}", nl.describe()));
        }
    }
    Ok(out)
}

/// Relative mismatch between `⟨φ′(u), v⟩` and a central difference of `φ`
/// for one random pair with entries in `[−1, 1]`.
pub fn gradient_error(spec: &EnergySpec, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mesh = spec.mesh();
    let draw = |rng: &mut ChaCha8Rng| {
        let raw = GridFunction::from_values(mesh, (0..mesh.num_nodes()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .expect("length matches mesh");
        project_dirichlet(&raw, mesh).expect("same mesh")
    };
    let u = draw(rng);
    let v = draw(rng);
    let h = 1e-5;
    let fd = (phi(&u.add_scaled(h, &v), spec)? - phi(&u.add_scaled(-h, &v), spec)?) / (2.0 * h);
    let exact = duality_pairing(&phi_grad(&u, spec)?, &v, mesh)?;
    Ok((fd - exact).abs() / exact.abs().max(1e-6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_small_meshes() {
        let opts = VerifyOptions { samples: 20, ..VerifyOptions::default() };
        for mesh in [Mesh::interval(32).unwrap(), Mesh::unit_square(6, 6).unwrap()] {
            let report = run_all(&Arc::new(mesh), &opts).unwrap();
            for s in &report.suites {
                assert!(s.passed, "{}: {:?}", s.name, s.witness);
                assert!(s.cases > 0);
            }
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let mesh = Arc::new(Mesh::interval(16).unwrap());
        let opts = VerifyOptions { samples: 5, seed: 9, ..VerifyOptions::default() };
        assert_eq!(run_all(&mesh, &opts).unwrap(), run_all(&mesh, &opts).unwrap());
    }
}
