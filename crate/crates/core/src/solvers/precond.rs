use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Inner product in which descent directions are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionerKind {
    /// Discrete `H¹₀` inner product (P1 Dirichlet stiffness matrix).
    #[default]
    Laplacian,
    /// Euclidean inner product on interior nodal values.
    Identity,
}

pub(crate) enum Preconditioner {
    Identity,
    Laplacian { stiffness: CscMatrix<f64>, factor: Box<CscCholesky<f64>> },
}

impl Preconditioner {
    pub(crate) fn new(kind: PreconditionerKind, mesh: &Mesh) -> Result<Self> {
        match kind {
            PreconditionerKind::Identity => Ok(Self::Identity),
            PreconditionerKind::Laplacian => {
                let stiffness = stiffness_matrix(mesh);
                let factor = CscCholesky::factor(&stiffness).map_err(|e| Error::LinearAlgebra(e.to_string()))?;
                Ok(Self::Laplacian { stiffness, factor: Box::new(factor) })
            }
        }
    }

    /// Riesz representative `K⁻¹ r` of an interior dual vector.
    pub(crate) fn apply(&self, r: &[f64]) -> Vec<f64> {
        match self {
            Self::Identity => r.to_vec(),
            Self::Laplacian { factor, .. } => {
                let rhs = DMatrix::from_column_slice(r.len(), 1, r);
                factor.solve(&rhs).as_slice().to_vec()
            }
        }
    }

    /// `sᵀ K s`.
    pub(crate) fn metric(&self, s: &[f64]) -> f64 {
        match self {
            Self::Identity => dot(s, s),
            Self::Laplacian { stiffness, .. } => {
                let mut acc = 0.0;
                for (i, j, v) in stiffness.triplet_iter() {
                    acc += s[i] * v * s[j];
                }
                acc
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `K_ij = Σ_e |e| ∇φ_i · ∇φ_j` restricted to interior nodes.
fn stiffness_matrix(mesh: &Mesh) -> CscMatrix<f64> {
    let n = mesh.num_interior();
    let mut coo = CooMatrix::new(n, n);
    for (e, &measure) in mesh.element_measures().iter().enumerate() {
        let nodes = mesh.element_nodes(e);
        let grads = mesh.basis_gradients(e);
        for (a, &na) in nodes.iter().enumerate() {
            let Some(i) = mesh.interior_index(na) else { continue };
            for (b, &nb) in nodes.iter().enumerate() {
                let Some(j) = mesh.interior_index(nb) else { continue };
                let g = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                coo.push(i, j, measure * g);
            }
        }
    }
    CscMatrix::from(&coo)
}
