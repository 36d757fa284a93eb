//! Variable exponents `p(x) ∈ C₊(Ω̄)` sampled once per element.
//!
//! `p⁻` and `p⁺` are the extrema of the element samples, i.e. a
//! discretization of the infimum and supremum over the closed domain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, MeshId};

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    mesh_id: MeshId,
    values: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

/// Named exponent shapes accepted in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExponentPreset {
    /// `p(x) = value`.
    Constant { value: f64 },
    /// `p(x) = base + slope·x`.
    Affine {
        base: f64,
        #[serde(default = "unit_slope")]
        slope: [f64; 2],
    },
    /// `p(x) = base + amplitude·Π sin(π xᵢ)`.
    SinBump { base: f64, amplitude: f64 },
    /// Explicit per-element samples.
    Table { values: Vec<f64> },
}

fn unit_slope() -> [f64; 2] {
    [1.0, 0.0]
}

impl ExponentPreset {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ExponentPreset::Constant { value } => *value,
            ExponentPreset::Affine { base, slope } => {
                base + x.iter().zip(slope).map(|(xi, s)| xi * s).sum::<f64>()
            }
            ExponentPreset::SinBump { base, amplitude } => {
                base + amplitude * x.iter().map(|xi| (PI * xi).sin()).product::<f64>()
            }
            ExponentPreset::Table { .. } => f64::NAN,
        }
    }
}

impl ExponentField {
    /// Samples `sampler` at element midpoints/centroids.
    pub fn from_sampler(mesh: &Mesh, sampler: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = mesh.centroids().map(sampler).collect();
        Self::from_values(mesh, values)
    }

    pub fn constant(mesh: &Mesh, value: f64) -> Result<Self> {
        Self::from_values(mesh, vec![value; mesh.num_elements()])
    }

    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_elements() {
            return Err(Error::LengthMismatch { expected: mesh.num_elements(), found: values.len() });
        }
        Self::validated(mesh.id(), values)
    }

    pub fn from_preset(mesh: &Mesh, preset: &ExponentPreset) -> Result<Self> {
        match preset {
            ExponentPreset::Table { values } => Self::from_values(mesh, values.clone()),
            other => Self::from_sampler(mesh, |x| other.eval(x)),
        }
    }

    fn validated(mesh_id: MeshId, values: Vec<f64>) -> Result<Self> {
        // `!(v > 1)` also rejects NaN.
        if let Some((element, &value)) = values.iter().enumerate().find(|(_, &v)| !(v > 1.0 && v.is_finite())) {
            return Err(Error::ExponentNotInCPlus { element, value });
        }
        let (p_minus, p_plus) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(Self { mesh_id, values, p_minus, p_plus })
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, element: usize) -> f64 {
        self.values[element]
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// Conjugate exponent `q = p/(p − 1)`, so that `1/p + 1/q = 1`.
    pub fn conjugate(&self) -> ExponentField {
        let values: Vec<f64> = self.values.iter().map(|&p| p / (p - 1.0)).collect();
        let (p_minus, p_plus) = (self.p_plus / (self.p_plus - 1.0), self.p_minus / (self.p_minus - 1.0));
        ExponentField { mesh_id: self.mesh_id, values, p_minus, p_plus }
    }

    /// Sobolev conjugate `p* = N p/(N − p)` where `p < N`, infinite elsewhere.
    pub fn sobolev_conjugate(&self, dim: usize) -> Result<SobolevConjugate> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
        }
        let n = dim as f64;
        let values = self
            .values
            .iter()
            .map(|&p| if p < n { CriticalExponent::Finite(n * p / (n - p)) } else { CriticalExponent::Infinite })
            .collect();
        Ok(SobolevConjugate { mesh_id: self.mesh_id, values })
    }
}

/// Elementwise maximum `p_M` and minimum `p_m` of two exponent fields.
pub fn pointwise_max_min(p1: &ExponentField, p2: &ExponentField) -> Result<(ExponentField, ExponentField)> {
    envelope(&[p1.clone(), p2.clone()])
}

/// Elementwise maximum and minimum over any non-empty list of fields.
pub fn envelope(fields: &[ExponentField]) -> Result<(ExponentField, ExponentField)> {
    let (first, rest) = fields
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("at least one exponent field is required".into()))?;
    let mut upper = first.values.clone();
    let mut lower = first.values.clone();
    for field in rest {
        if field.mesh_id != first.mesh_id {
            return Err(Error::MeshMismatch { expected: first.mesh_id, found: field.mesh_id });
        }
        for ((hi, lo), &v) in upper.iter_mut().zip(lower.iter_mut()).zip(&field.values) {
            *hi = hi.max(v);
            *lo = lo.min(v);
        }
    }
    Ok((
        ExponentField::validated(first.mesh_id, upper)?,
        ExponentField::validated(first.mesh_id, lower)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalExponent {
    Finite(f64),
    Infinite,
}

impl CriticalExponent {
    /// Strict subcriticality `exponent < self`; always true for `Infinite`.
    pub fn exceeds(&self, exponent: f64) -> bool {
        match *self {
            CriticalExponent::Finite(v) => exponent < v,
            CriticalExponent::Infinite => true,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CriticalExponent::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevConjugate {
    mesh_id: MeshId,
    values: Vec<CriticalExponent>,
}

impl SobolevConjugate {
    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn values(&self) -> &[CriticalExponent] {
        &self.values
    }

    pub fn at(&self, element: usize) -> CriticalExponent {
        self.values[element]
    }

    pub fn all_infinite(&self) -> bool {
        self.values.iter().all(CriticalExponent::is_infinite)
    }
}
