use thiserror::Error;

use crate::mesh::MeshId;
use crate::nonlinearity::ConditionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent not in C₊: element {element} has sample {value} (samples must exceed 1)")]
    ExponentNotInCPlus { element: usize, value: f64 },

    #[error("mesh mismatch: expected mesh {expected}, found mesh {found}")]
    MeshMismatch { expected: MeshId, found: MeshId },

    #[error("degenerate mesh resolution: {0}")]
    DegenerateResolution(String),

    #[error("length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bracket expansion exceeded {cap} steps (input scale out of range)")]
    BracketExpansion { cap: usize },

    #[error("nonlinearity overflow at x = {x:?}, t = {t}: value {value}")]
    NonlinearityOverflow { x: Vec<f64>, t: f64, value: f64 },

    #[error("zero function: {0}")]
    ZeroFunction(&'static str),

    #[error("grid function is not Dirichlet compliant: boundary node {node} carries {value}")]
    NotDirichletCompliant { node: usize, value: f64 },

    #[error("non-finite value while assembling element {element}")]
    NonFiniteAssembly { element: usize },

    #[error("energy specification has no nonlinearity")]
    MissingNonlinearity,

    #[error("adaptive Simpson quadrature did not converge on [0, {t}] at x = {x:?}")]
    QuadratureNonConvergence { x: Vec<f64>, t: f64 },

    #[error("growth parameter `{0}` is not declared")]
    Undeclared(&'static str),

    #[error("condition check `{}` rejected the problem: {}", .0.condition, .0.summary)]
    ConditionRejected(Box<ConditionReport>),

    #[error("descent ray search exceeded scale cap {cap:e} without reaching the target level")]
    DescentCapExceeded { cap: f64 },

    #[error("mountain-pass iterate collapsed to the trivial solution (‖u‖∞ = {norm:e} below floor {floor:e})")]
    Collapsed { norm: f64, floor: f64 },

    #[error("mountain-pass endpoint must have negative energy, got phi(e) = {0}")]
    EndpointNotBelowZero(f64),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
