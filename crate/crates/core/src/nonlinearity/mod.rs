//! Right-hand sides `f(x, t)`, their primitives `F(x, t) = ∫₀ᵗ f(x, s) ds`,
//! declared growth parameters, and sample-based condition checkers.

mod checks;
mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;

pub use checks::{
    check_ar_condition, check_growth_f0, check_odd, check_small_o_origin, check_subcritical_coercive,
    check_superlinear_alpha, Condition, ConditionReport, SamplePlan, Witness,
};
pub use quadrature::adaptive_simpson;

type Eval = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// `x`-only load profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoadProfile {
    Constant { value: f64 },
    /// `base + slope·x`.
    Affine { base: f64, slope: [f64; 2] },
    /// `amplitude·Π sin(π xᵢ)`.
    SinBump { amplitude: f64 },
}

impl LoadProfile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            LoadProfile::Constant { value } => *value,
            LoadProfile::Affine { base, slope } => base + x.iter().zip(slope).map(|(a, b)| a * b).sum::<f64>(),
            LoadProfile::SinBump { amplitude } => amplitude * x.iter().map(|xi| (PI * xi).sin()).product::<f64>(),
        }
    }
}

/// Exponent that may vary in space, e.g. `α(x)` or `β(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthExponent {
    Constant(f64),
    Field(ExponentField),
}

impl GrowthExponent {
    pub fn at(&self, element: usize) -> f64 {
        match self {
            GrowthExponent::Constant(c) => *c,
            GrowthExponent::Field(f) => f.at(element),
        }
    }

    pub fn minus(&self) -> f64 {
        match self {
            GrowthExponent::Constant(c) => *c,
            GrowthExponent::Field(f) => f.p_minus(),
        }
    }

    pub fn plus(&self) -> f64 {
        match self {
            GrowthExponent::Constant(c) => *c,
            GrowthExponent::Field(f) => f.p_plus(),
        }
    }
}

/// Constants appearing in the growth hypotheses. Undeclared entries make the
/// corresponding checker return [`Error::Undeclared`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GrowthParams {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub alpha: Option<GrowthExponent>,
    pub beta: Option<GrowthExponent>,
    pub theta: Option<f64>,
    pub m: Option<f64>,
    pub odd: bool,
}

impl GrowthParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("C1", self.c1), ("C2", self.c2)] {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} must be a nonnegative number, got {v}")));
                }
            }
        }
        for (name, value) in [("theta", self.theta), ("M", self.m)] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(theta) = self.theta {
            if theta <= 1.0 {
                return Err(Error::InvalidArgument(format!("theta must exceed 1, got {theta}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
enum Kind {
    /// `κ|t|^{q−2}t`.
    Power { kappa: f64, q: f64 },
    Load(LoadProfile),
    /// Power part plus load part.
    Sum { kappa: f64, q: f64, load: LoadProfile },
    Expr { source: String, expr: meval::Expr },
    Custom { name: String, eval: Arc<Eval>, primitive: Option<Arc<Eval>> },
}

#[derive(Clone)]
pub struct Nonlinearity {
    kind: Kind,
    params: GrowthParams,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity").field("kind", &self.describe()).field("params", &self.params).finish()
    }
}

thread_local! {
    static EXPR_CONTEXT: meval::Context<'static> = meval::Context::new();
}

fn signed_power(t: f64, q: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(q - 1.0).copysign(t)
    }
}

impl Nonlinearity {
    /// `f(x, t) = κ|t|^{q−2}t` with primitive `κ|t|^q/q`.
    pub fn power(kappa: f64, q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("power nonlinearity needs q > 1 and finite κ (q = {q}, κ = {kappa})")));
        }
        Ok(Self { kind: Kind::Power { kappa, q }, params: GrowthParams { odd: true, ..GrowthParams::default() } })
    }

    /// `f(x, t) = g(x)`.
    pub fn load(profile: LoadProfile) -> Self {
        Self { kind: Kind::Load(profile), params: GrowthParams::default() }
    }

    pub fn sum(kappa: f64, q: f64, load: LoadProfile) -> Result<Self> {
        Self::power(kappa, q)?;
        Ok(Self { kind: Kind::Sum { kappa, q, load }, params: GrowthParams::default() })
    }

    /// Expression in the variables `x`, `y`, `t` (e.g. `"abs(t)^2*t + sin(pi*x)"`).
    /// The primitive is evaluated by adaptive quadrature.
    pub fn expr(source: &str) -> Result<Self> {
        let expr: meval::Expr = source.parse().map_err(|e| Error::Expression(format!("{source:?}: {e}")))?;
        let nl = Self { kind: Kind::Expr { source: source.to_owned(), expr }, params: GrowthParams::default() };
        // Reject unknown variables/functions up front.
        nl.try_eval_expr(&[0.5, 0.5], 0.5)?;
        Ok(nl)
    }

    pub fn custom(name: &str, eval: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: Kind::Custom { name: name.to_owned(), eval: Arc::new(eval), primitive: None },
            params: GrowthParams::default(),
        }
    }

    pub fn custom_with_primitive(
        name: &str,
        eval: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        primitive: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: Kind::Custom { name: name.to_owned(), eval: Arc::new(eval), primitive: Some(Arc::new(primitive)) },
            params: GrowthParams::default(),
        }
    }

    pub fn with_params(mut self, params: GrowthParams) -> Result<Self> {
        params.validate()?;
        self.params = params;
        Ok(self)
    }

    pub fn params(&self) -> &GrowthParams {
        &self.params
    }

    /// `true` when `f` does not depend on `t`.
    pub fn is_load(&self) -> bool {
        matches!(self.kind, Kind::Load(_))
    }

    pub fn has_closed_form_primitive(&self) -> bool {
        match &self.kind {
            Kind::Expr { .. } => false,
            Kind::Custom { primitive, .. } => primitive.is_some(),
            _ => true,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Power { kappa, q } => format!("power(κ = {kappa}, q = {q})"),
            Kind::Load(p) => format!("load({p:?})"),
            Kind::Sum { kappa, q, load } => format!("power(κ = {kappa}, q = {q}) + load({load:?})"),
            Kind::Expr { source, .. } => format!("expr({source})"),
            Kind::Custom { name, .. } => format!("custom({name})"),
        }
    }

    fn try_eval_expr(&self, x: &[f64], t: f64) -> Result<f64> {
        let Kind::Expr { expr, source } = &self.kind else { unreachable!() };
        let vars = [("x", x.first().copied().unwrap_or(0.0)), ("y", x.get(1).copied().unwrap_or(0.0)), ("t", t)];
        EXPR_CONTEXT
            .with(|ctx| expr.eval_with_context((vars, ctx)))
            .map_err(|e| Error::Expression(format!("{source:?}: {e}")))
    }

    /// `f(x, t)`.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match &self.kind {
            Kind::Power { kappa, q } => kappa * signed_power(t, *q),
            Kind::Load(profile) => profile.eval(x),
            Kind::Sum { kappa, q, load } => kappa * signed_power(t, *q) + load.eval(x),
            Kind::Expr { .. } => self.try_eval_expr(x, t).unwrap_or(f64::NAN),
            Kind::Custom { eval, .. } => eval(x, t),
        }
    }

    /// `F(x, t)`: closed form when available, otherwise adaptive Simpson
    /// quadrature of `s ↦ f(x, s)` over `[0, t]` to tolerance `1e−10`.
    pub fn primitive(&self, x: &[f64], t: f64) -> Result<f64> {
        let closed = match &self.kind {
            Kind::Power { kappa, q } => Some(kappa * t.abs().powf(*q) / q),
            Kind::Load(profile) => Some(profile.eval(x) * t),
            Kind::Sum { kappa, q, load } => Some(kappa * t.abs().powf(*q) / q + load.eval(x) * t),
            Kind::Custom { primitive: Some(p), .. } => Some(p(x, t)),
            _ => None,
        };
        match closed {
            Some(v) => Ok(v),
            None => self.primitive_by_quadrature(x, t),
        }
    }

    /// Quadrature route for `F`, available for every kind.
    pub fn primitive_by_quadrature(&self, x: &[f64], t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        adaptive_simpson(|s| self.eval(x, s), 0.0, t, 1e-10)
            .ok_or_else(|| Error::QuadratureNonConvergence { x: x.to_vec(), t })
    }

    /// Checks the declared primitive against the evaluator by central
    /// differences; returns the worst relative discrepancy over the samples.
    pub fn primitive_consistency(&self, x: &[f64], ts: &[f64]) -> Result<f64> {
        let mut worst = 0.0_f64;
        for &t in ts {
            let h = 1e-5 * t.abs().max(1e-3);
            let derivative = (self.primitive(x, t + h)? - self.primitive(x, t - h)?) / (2.0 * h);
            let f = self.eval(x, t);
            worst = worst.max((derivative - f).abs() / f.abs().max(1e-8));
        }
        Ok(worst)
    }
}

/// Free-function form of [`Nonlinearity::primitive`].
pub fn primitive_f(nl: &Nonlinearity, x: &[f64], t: f64) -> Result<f64> {
    nl.primitive(x, t)
}
