//! Variable-exponent Lebesgue–Sobolev machinery and variational solvers for
//! Dirichlet problems driven by sums of `p(x)`-Laplace operators,
//!
//! ```text
//! −Σᵢ div(|∇u|^{pᵢ(x)−2}∇u) = f(x, u)  in Ω,   u = 0  on ∂Ω,
//! ```
//!
//! discretized with P1 finite elements and one-point quadrature on `(0,1)` or
//! axis-aligned rectangles.
//!
//! * [`exponent`]: exponent fields, conjugates, pointwise envelopes.
//! * [`lebesgue`]: modulars, Luxemburg norms, Hölder bound, Nemytskii operator.
//! * [`mesh`]: meshes, P1 gradients, quadrature, Dirichlet projection.
//! * [`energy`]: `J`, `L = J′`, `φ`, `φ′` and monotonicity primitives.
//! * [`nonlinearity`]: right-hand sides and sample-based condition checkers.
//! * [`solvers`]: unique solve, coercive minimization, mountain pass.
//! * [`report`]: CSV/JSON export of solutions and diagnostics.
//! * [`verify`]: randomized property suites.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod exponent;
pub mod lebesgue;
pub mod mesh;
pub mod nonlinearity;
pub mod report;
pub mod solvers;
pub mod verify;

pub use energy::{
    duality_pairing, energy_j, monotonicity_gap, phi, phi_grad, residual_l, vector_inequality_gap, x_norm, DualVector,
    EnergySpec, InequalityGap,
};
pub use error::{Error, Result};
pub use exponent::{pointwise_max_min, CriticalExponent, ExponentField, ExponentPreset, SobolevConjugate};
pub use lebesgue::{holder_pairing, luxemburg_norm, modular, nemytskii, poincare_ratio, NormOptions, NormResult};
pub use mesh::{build_mesh, element_gradient, integrate, project_dirichlet, ElementField, GridFunction, Mesh, MeshId};
pub use nonlinearity::{ConditionReport, GrowthExponent, GrowthParams, LoadProfile, Nonlinearity, SamplePlan};
pub use solvers::{
    find_descent_point, minimize_coercive, mountain_pass, odd_pair, palais_smale_diagnostic, solve_load, sphere_level,
    PreconditionerKind, SolveResult, SolveStatus, SolverOptions, TraceEntry,
};
