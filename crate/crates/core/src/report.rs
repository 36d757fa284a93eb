//! CSV and JSON renderings of solutions, traces and run diagnostics.
//!
//! Floats are written with 17 significant digits so a round trip through
//! text reproduces every bit.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mesh::{GridFunction, Mesh};
use crate::nonlinearity::ConditionReport;
use crate::solvers::{PalaisSmaleReport, SolveResult, SolveStatus, TraceEntry};
use crate::verify::VerifyReport;

fn float(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a String cannot fail");
}

/// `node_index,x[,y],u` with one row per node.
pub fn solution_csv(mesh: &Mesh, u: &GridFunction) -> Result<String> {
    mesh.check(u.mesh_id())?;
    let mut out = String::from(if mesh.dim() == 1 { "node_index,x,u\n" } else { "node_index,x,y,u\n" });
    for (i, &value) in u.values().iter().enumerate() {
        write!(out, "{i}").expect("infallible");
        for &c in mesh.node(i) {
            out.push(',');
            float(&mut out, c);
        }
        out.push(',');
        float(&mut out, value);
        out.push('\n');
    }
    Ok(out)
}

/// `iteration,phi,residual_norm,step,u_norm`.
pub fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut out = String::from("iteration,phi,residual_norm,step,u_norm\n");
    for t in trace {
        write!(out, "{}", t.iteration).expect("infallible");
        for v in [t.phi, t.residual_norm, t.step, t.u_norm] {
            out.push(',');
            float(&mut out, v);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub dim: usize,
    pub nodes: usize,
    pub elements: usize,
    pub interior: usize,
}

impl MeshSummary {
    pub fn of(mesh: &Mesh) -> Self {
        Self { dim: mesh.dim(), nodes: mesh.num_nodes(), elements: mesh.num_elements(), interior: mesh.num_interior() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub phi_value: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub max_abs_u: f64,
}

impl SolveSummary {
    pub fn of(result: &SolveResult) -> Self {
        Self {
            status: result.status,
            phi_value: result.phi_value,
            residual_norm: result.residual_norm,
            iterations: result.iterations,
            max_abs_u: result.u.max_norm(),
        }
    }
}

/// Everything a run reports, minus wall-clock data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub kind: String,
    pub seed: u64,
    pub passed: bool,
    pub mesh: MeshSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub condition_reports: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub palais_smale: Option<PalaisSmaleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_pair: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere_level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Diagnostics {
    pub fn new(kind: &str, seed: u64, mesh: &Mesh) -> Self {
        Self {
            kind: kind.to_string(),
            seed,
            passed: false,
            mesh: MeshSummary::of(mesh),
            solve: None,
            condition_reports: Vec::new(),
            palais_smale: None,
            odd_pair: None,
            sphere_level: None,
            verify: None,
            error: None,
        }
    }
}

/// Run metadata kept apart from [`Diagnostics`] so that reproducibility
/// comparisons can ignore it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Meta {
    pub fn now() -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { version: env!("CARGO_PKG_VERSION").to_string(), timestamp }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    pub diagnostics: Diagnostics,
    pub meta: Meta,
}

pub fn diagnostics_json(diagnostics: &Diagnostics, meta: &Meta) -> Result<String> {
    let file = DiagnosticsFile { diagnostics: diagnostics.clone(), meta: meta.clone() };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}
