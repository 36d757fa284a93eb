//! TOML run configuration with strict schema checking.

use std::path::PathBuf;
use std::sync::Arc;

use serde::Deserialize;

use pxlap_core::{
    build_mesh, EnergySpec, ExponentField, ExponentPreset, GrowthExponent, GrowthParams, LoadProfile, Mesh,
    Nonlinearity, PreconditionerKind, SolverOptions,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    /// Parse or schema failure at a key path such as `solver.tol`.
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

fn invalid(path: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Schema { path: path.to_string(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshConfig,
    #[serde(default = "default_exponents")]
    pub exponents: Vec<ExponentPreset>,
    #[serde(default)]
    pub nonlinearity: Option<NonlinearityConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_exponents() -> Vec<ExponentPreset> {
    vec![ExponentPreset::Constant { value: 2.0 }]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub dim: usize,
    pub resolution: Resolution,
}

/// A single cell count or one count per axis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

impl Resolution {
    pub fn counts(&self) -> Vec<usize> {
        match self {
            Resolution::Uniform(n) => vec![*n],
            Resolution::PerAxis(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    Power,
    Load,
    Sum,
    Expr,
}

/// A growth exponent given as a number or as an exponent preset table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    Number(f64),
    Preset(ExponentPreset),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub kind: NonlinearityKind,
    pub q: Option<f64>,
    pub kappa: Option<f64>,
    pub expr: Option<String>,
    pub load: Option<LoadProfile>,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    pub alpha: Option<ExponentValue>,
    pub beta: Option<ExponentValue>,
    pub theta: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[serde(default)]
    pub odd: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Load,
    Coercive,
    MountainPass,
    Verify,
}

/// Initial direction `w` for the mountain-pass descent-point search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `Π sin(π xᵢ)`.
    #[default]
    SinBump,
    /// `Π xᵢ(1 − xᵢ)`.
    Parabola,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: Option<SolverKind>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: Option<u64>,
    pub multistart: Option<usize>,
    pub path_points: Option<usize>,
    pub force: Option<bool>,
    pub preconditioner: Option<PreconditionerKind>,
    pub direction: Option<Direction>,
    /// Samples per verification suite.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), formats: default_formats() }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// Parses and validates a TOML document. Errors name the offending key path.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::new(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Schema { path, message: inner.message().trim().to_string() }
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let counts = self.mesh.resolution.counts();
        if counts.iter().any(|&n| n < 2) {
            return Err(invalid("mesh", "resolution ≥ 2"));
        }
        let mesh = self.build_mesh()?;
        if self.exponents.is_empty() {
            return Err(invalid("exponents", "at least one exponent is required"));
        }
        self.exponent_fields(&mesh)?;
        if let Some(nl) = &self.nonlinearity {
            nl.build(&mesh)?;
        }
        let kind = self.solver.kind;
        let is_load = self.nonlinearity.as_ref().map(|n| n.kind == NonlinearityKind::Load);
        match (kind, is_load) {
            (Some(SolverKind::Load), Some(false)) => {
                return Err(invalid("solver.kind", "the load solver requires a load nonlinearity"))
            }
            (Some(SolverKind::Load | SolverKind::Coercive | SolverKind::MountainPass), None) => {
                return Err(invalid("nonlinearity", "required by this solver kind"))
            }
            _ => {}
        }
        if let Some(tol) = self.solver.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(invalid("solver.tol", format!("must be positive, got {tol}")));
            }
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "at least one format is required"));
        }
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<Arc<Mesh>, ConfigError> {
        build_mesh(self.mesh.dim, &self.mesh.resolution.counts()).map(Arc::new).map_err(|e| invalid("mesh", e))
    }

    pub fn exponent_fields(&self, mesh: &Mesh) -> Result<Vec<ExponentField>, ConfigError> {
        self.exponents
            .iter()
            .enumerate()
            .map(|(i, preset)| ExponentField::from_preset(mesh, preset).map_err(|e| invalid(&format!("exponents[{i}]"), e)))
            .collect()
    }

    pub fn energy_spec(&self, mesh: &Arc<Mesh>) -> Result<EnergySpec, ConfigError> {
        EnergySpec::new(mesh.clone(), self.exponent_fields(mesh)?).map_err(|e| invalid("exponents", e))
    }

    pub fn nonlinearity(&self, mesh: &Mesh) -> Result<Nonlinearity, ConfigError> {
        self.nonlinearity.as_ref().ok_or_else(|| invalid("nonlinearity", "missing"))?.build(mesh)
    }

    /// Solver kind, inferred from the nonlinearity when not given.
    pub fn solver_kind(&self) -> SolverKind {
        self.solver.kind.unwrap_or(match self.nonlinearity.as_ref().map(|n| n.kind) {
            None => SolverKind::Verify,
            Some(NonlinearityKind::Load) => SolverKind::Load,
            Some(_) => SolverKind::Coercive,
        })
    }

    /// Library defaults for `kind` overridden by the configured values.
    pub fn solver_options(&self, kind: SolverKind) -> SolverOptions {
        let base = if kind == SolverKind::MountainPass { SolverOptions::mountain_pass() } else { SolverOptions::default() };
        let s = &self.solver;
        SolverOptions {
            tol: s.tol.unwrap_or(base.tol),
            max_iters: s.max_iters.unwrap_or(base.max_iters),
            seed: s.seed.unwrap_or(base.seed),
            multistart: s.multistart.unwrap_or(base.multistart),
            path_points: s.path_points.unwrap_or(base.path_points),
            force: s.force.unwrap_or(base.force),
            preconditioner: s.preconditioner.unwrap_or(base.preconditioner),
            ..base
        }
    }
}

impl NonlinearityConfig {
    fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T, ConfigError> {
        value.clone().ok_or_else(|| invalid(&format!("nonlinearity.{key}"), "required for this kind"))
    }

    fn reject(&self, key: &str, present: bool) -> Result<(), ConfigError> {
        if present {
            Err(invalid(&format!("nonlinearity.{key}"), format!("not used by kind {:?}", self.kind)))
        } else {
            Ok(())
        }
    }

    pub fn build(&self, mesh: &Mesh) -> Result<Nonlinearity, ConfigError> {
        let core = |key: &str, e: pxlap_core::Error| invalid(&format!("nonlinearity.{key}"), e);
        let kappa = self.kappa.unwrap_or(1.0);
        let base = match self.kind {
            NonlinearityKind::Power => {
                self.reject("expr", self.expr.is_some())?;
                self.reject("load", self.load.is_some())?;
                Nonlinearity::power(kappa, Self::require(&self.q, "q")?).map_err(|e| core("q", e))?
            }
            NonlinearityKind::Load => {
                self.reject("q", self.q.is_some())?;
                self.reject("kappa", self.kappa.is_some())?;
                self.reject("expr", self.expr.is_some())?;
                Nonlinearity::load(Self::require(&self.load, "load")?)
            }
            NonlinearityKind::Sum => {
                self.reject("expr", self.expr.is_some())?;
                Nonlinearity::sum(kappa, Self::require(&self.q, "q")?, Self::require(&self.load, "load")?)
                    .map_err(|e| core("q", e))?
            }
            NonlinearityKind::Expr => {
                self.reject("q", self.q.is_some())?;
                self.reject("kappa", self.kappa.is_some())?;
                self.reject("load", self.load.is_some())?;
                Nonlinearity::expr(&Self::require(&self.expr, "expr")?).map_err(|e| core("expr", e))?
            }
        };
        let growth = |key: &str, v: &Option<ExponentValue>| -> Result<Option<GrowthExponent>, ConfigError> {
            Ok(match v {
                None => None,
                Some(ExponentValue::Number(c)) => Some(GrowthExponent::Constant(*c)),
                Some(ExponentValue::Preset(p)) => {
                    Some(GrowthExponent::Field(ExponentField::from_preset(mesh, p).map_err(|e| core(key, e))?))
                }
            })
        };
        let params = GrowthParams {
            c1: self.c1,
            c2: self.c2,
            alpha: growth("alpha", &self.alpha)?,
            beta: growth("beta", &self.beta)?,
            theta: self.theta,
            m: self.m,
            odd: self.odd,
        };
        base.with_params(params).map_err(|e| invalid("nonlinearity", e))
    }
}
