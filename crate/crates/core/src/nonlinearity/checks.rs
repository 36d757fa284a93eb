//! Sample-based checkers for the growth hypotheses on `f`.
//!
//! The hypotheses are analytic statements; these checkers evaluate them on a
//! deterministic grid of `(x, t)` samples and report witnesses for every
//! violation they find. A passing report is evidence, not a proof.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GrowthExponent, Nonlinearity};
use crate::error::{Error, Result};
use crate::exponent::{ExponentField, SobolevConjugate};
use crate::mesh::Mesh;

/// Relative slack for inequalities that hold with equality in exact arithmetic.
const REL_SLACK: f64 = 1e-12;
const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `|f(x,t)| ≤ C₁ + C₂|t|^{α(x)−1}` with `α < p*_M`.
    F0,
    /// `α⁻ > p_M⁺`, the superlinear variant required by the mountain pass.
    F0Superlinear,
    /// `|f(x,t)| ≤ C₁ + C₂|t|^{β(x)−1}` with `1 ≤ β⁺ < p_m⁻`.
    Coercive6,
    /// Ambrosetti–Rabinowitz: `0 < θF(x,t) ≤ t f(x,t)` for `|t| ≥ M`, `θ > p_M⁺`.
    F1,
    /// `f(x,t) = o(|t|^{p_M⁺−1})` as `t → 0`.
    F2,
    /// `f(x,−t) = −f(x,t)`.
    F3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::F0 => "(f0)",
            Condition::F0Superlinear => "(f0) alpha- > pM+",
            Condition::Coercive6 => "(6)",
            Condition::F1 => "(f1)",
            Condition::F2 => "(f2)",
            Condition::F3 => "(f3)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    /// `None` for witnesses that concern exponents rather than a `t` sample.
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub passed: bool,
    pub summary: String,
    pub samples_checked: usize,
    pub violations: usize,
    /// First few violations, in sampling order.
    pub witnesses: Vec<Witness>,
}

impl ConditionReport {
    fn new(condition: Condition) -> Self {
        Self { condition, passed: true, summary: String::new(), samples_checked: 0, violations: 0, witnesses: Vec::new() }
    }

    fn violate(&mut self, witness: Witness) {
        self.passed = false;
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    fn finish(mut self, ok: &str) -> Self {
        self.summary = match self.witnesses.first() {
            None => format!("{} holds on {} samples: {ok}", self.condition, self.samples_checked),
            Some(w) => format!(
                "{} violated at {} of {} samples; first witness x = {:?}, t = {:?}: {}",
                self.condition, self.violations, self.samples_checked, w.x, w.t, w.note
            ),
        };
        self
    }

    /// Converts a failing report into [`Error::ConditionRejected`].
    pub fn into_gate(self) -> Result<Self> {
        if self.passed {
            Ok(self)
        } else {
            Err(Error::ConditionRejected(Box::new(self)))
        }
    }
}

/// Deterministic `(x, t)` sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    elements: Vec<usize>,
    positions: Vec<Vec<f64>>,
    t_values: Vec<f64>,
}

impl SamplePlan {
    /// `x` at every element midpoint/centroid, `t` log-spaced in
    /// `[1e−6, 1e3]` with ten points per decade, both signs, plus `t = 0`.
    pub fn default_for(mesh: &Mesh) -> Self {
        let mut t_values = vec![0.0];
        for t in Self::log_spaced(1e-6, 1e3, 10) {
            t_values.push(t);
            t_values.push(-t);
        }
        Self::new(mesh, t_values)
    }

    pub fn new(mesh: &Mesh, t_values: Vec<f64>) -> Self {
        let elements: Vec<usize> = (0..mesh.num_elements()).collect();
        let positions = elements.iter().map(|&e| mesh.centroid(e).to_vec()).collect();
        Self { elements, positions, t_values }
    }

    /// Keeps every `stride`-th element.
    pub fn thinned(mut self, stride: usize) -> Self {
        let stride = stride.max(1);
        let keep: Vec<usize> = (0..self.elements.len()).step_by(stride).collect();
        self.elements = keep.iter().map(|&i| self.elements[i]).collect();
        self.positions = keep.iter().map(|&i| self.positions[i].clone()).collect();
        self
    }

    pub fn log_spaced(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
        let (a, b) = (lo.log10(), hi.log10());
        let steps = ((b - a) * per_decade as f64).round().max(1.0) as usize;
        (0..=steps).map(|k| 10f64.powf(a + (b - a) * k as f64 / steps as f64)).collect()
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    fn points(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.elements.iter().copied().zip(self.positions.iter().map(Vec::as_slice))
    }
}

fn declared<T: Clone>(value: &Option<T>, name: &'static str) -> Result<T> {
    value.clone().ok_or(Error::Undeclared(name))
}

fn growth_bound(
    nl: &Nonlinearity,
    exponent: &GrowthExponent,
    c1: f64,
    c2: f64,
    plan: &SamplePlan,
    report: &mut ConditionReport,
    name: &str,
) {
    for (element, x) in plan.points() {
        let a = exponent.at(element);
        for &t in plan.t_values() {
            let lhs = nl.eval(x, t).abs();
            let rhs = c1 + c2 * t.abs().powf(a - 1.0);
            report.samples_checked += 1;
            if !(lhs <= rhs * (1.0 + REL_SLACK)) {
                report.violate(Witness {
                    x: x.to_vec(),
                    t: Some(t),
                    lhs,
                    rhs,
                    note: format!("|f| = {lhs:e} exceeds C1 + C2|t|^({name}-1) = {rhs:e}"),
                });
            }
        }
    }
}

/// `|f(x,t)| ≤ C₁ + C₂|t|^{α(x)−1}` on the plan and `α(x) < p*_M(x)` at every
/// sampled element (infinite conjugates always pass).
pub fn check_growth_f0(nl: &Nonlinearity, pm_star: &SobolevConjugate, plan: &SamplePlan) -> Result<ConditionReport> {
    let p = nl.params();
    let alpha = declared(&p.alpha, "alpha")?;
    let c1 = declared(&p.c1, "C1")?;
    let c2 = declared(&p.c2, "C2")?;
    let mut report = ConditionReport::new(Condition::F0);
    for (element, x) in plan.points() {
        let a = alpha.at(element);
        let critical = pm_star.at(element);
        report.samples_checked += 1;
        if !critical.exceeds(a) {
            report.violate(Witness {
                x: x.to_vec(),
                t: None,
                lhs: a,
                rhs: match critical {
                    crate::exponent::CriticalExponent::Finite(v) => v,
                    crate::exponent::CriticalExponent::Infinite => f64::INFINITY,
                },
                note: format!("alpha(x) = {a} is not below the Sobolev conjugate p*_M(x)"),
            });
        }
    }
    growth_bound(nl, &alpha, c1, c2, plan, &mut report, "alpha");
    Ok(report.finish("growth bound with alpha and subcritical alpha < p*_M"))
}

/// `α⁻ > p_M⁺`.
pub fn check_superlinear_alpha(nl: &Nonlinearity, pm_plus: f64) -> Result<ConditionReport> {
    let alpha = declared(&nl.params().alpha, "alpha")?;
    let mut report = ConditionReport::new(Condition::F0Superlinear);
    report.samples_checked = 1;
    if !(alpha.minus() > pm_plus) {
        report.violate(Witness {
            x: vec![],
            t: None,
            lhs: alpha.minus(),
            rhs: pm_plus,
            note: format!("alpha- = {} is not strictly above pM+ = {pm_plus}", alpha.minus()),
        });
    }
    Ok(report.finish("alpha- > pM+"))
}

/// Condition (6): `1 ≤ β⁺ < p_m⁻` and the growth bound with exponent `β`.
pub fn check_subcritical_coercive(nl: &Nonlinearity, pm: &ExponentField, plan: &SamplePlan) -> Result<ConditionReport> {
    let p = nl.params();
    let beta = declared(&p.beta, "beta")?;
    let c1 = declared(&p.c1, "C1")?;
    let c2 = declared(&p.c2, "C2")?;
    let mut report = ConditionReport::new(Condition::Coercive6);
    report.samples_checked += 1;
    let (b_plus, pm_minus) = (beta.plus(), pm.p_minus());
    if !(1.0 <= b_plus && b_plus < pm_minus) {
        let argmin = pm.values().iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(e, _)| e).unwrap_or(0);
        let x = plan
            .points()
            .find(|&(e, _)| e == argmin)
            .map(|(_, x)| x.to_vec())
            .unwrap_or_default();
        report.violate(Witness {
            x,
            t: None,
            lhs: b_plus,
            rhs: pm_minus,
            note: format!("beta+ = {b_plus} must satisfy 1 <= beta+ < pm- = {pm_minus}"),
        });
    }
    growth_bound(nl, &beta, c1, c2, plan, &mut report, "beta");
    Ok(report.finish("1 <= beta+ < pm- and growth bound with beta"))
}

/// Ambrosetti–Rabinowitz: `θ > p_M⁺` and `0 < θF(x,t) ≤ t f(x,t)` for all
/// samples with `|t| ≥ M` (`t = ±M` is always included).
pub fn check_ar_condition(nl: &Nonlinearity, pm_plus: f64, plan: &SamplePlan) -> Result<ConditionReport> {
    let p = nl.params();
    let theta = declared(&p.theta, "theta")?;
    let m = declared(&p.m, "M")?;
    let mut report = ConditionReport::new(Condition::F1);
    report.samples_checked += 1;
    if !(theta > pm_plus) {
        report.violate(Witness {
            x: vec![],
            t: None,
            lhs: theta,
            rhs: pm_plus,
            note: format!("theta = {theta} must be strictly greater than pM+ = {pm_plus}"),
        });
    }
    let mut ts: Vec<f64> = plan.t_values().iter().copied().filter(|t| t.abs() >= m).collect();
    ts.extend([m, -m]);
    for (_, x) in plan.points() {
        for &t in &ts {
            let lhs = theta * nl.primitive(x, t)?;
            let rhs = t * nl.eval(x, t);
            report.samples_checked += 1;
            if !(lhs > 0.0 && lhs <= rhs + REL_SLACK * rhs.abs()) {
                report.violate(Witness {
                    x: x.to_vec(),
                    t: Some(t),
                    lhs,
                    rhs,
                    note: format!("need 0 < theta*F = {lhs:e} <= t*f = {rhs:e}"),
                });
            }
        }
    }
    Ok(report.finish("0 < theta F <= t f for |t| >= M and theta > pM+"))
}

/// Small-o at the origin: the ratio `max_x |f(x,±t)| / |t|^{p_M⁺−1}` must be
/// non-increasing along the decreasing sequence and end below `threshold`.
pub fn check_small_o_origin(
    nl: &Nonlinearity,
    pm_plus: f64,
    t_sequence: &[f64],
    plan: &SamplePlan,
    threshold: f64,
) -> Result<ConditionReport> {
    if t_sequence.is_empty()
        || t_sequence.iter().any(|&t| !(t > 0.0))
        || t_sequence.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::InvalidArgument("t_sequence must be positive and strictly decreasing".into()));
    }
    let mut report = ConditionReport::new(Condition::F2);
    let mut ratios = Vec::with_capacity(t_sequence.len());
    for &t in t_sequence {
        let mut worst: (f64, Vec<f64>, f64) = (0.0, vec![], t);
        for (_, x) in plan.points() {
            for s in [t, -t] {
                let r = nl.eval(x, s).abs() / t.powf(pm_plus - 1.0);
                report.samples_checked += 1;
                if !(r <= worst.0) {
                    worst = (r, x.to_vec(), s);
                }
            }
        }
        ratios.push(worst);
    }
    for (k, pair) in ratios.windows(2).enumerate() {
        if pair[1].0 > pair[0].0 * (1.0 + 1e-9) {
            report.violate(Witness {
                x: pair[1].1.clone(),
                t: Some(pair[1].2),
                lhs: pair[1].0,
                rhs: pair[0].0,
                note: format!(
                    "ratio |f|/|t|^(pM+-1) grows from {:e} to {:e} between sequence entries {k} and {}",
                    pair[0].0,
                    pair[1].0,
                    k + 1
                ),
            });
        }
    }
    let last = ratios.last().expect("non-empty sequence");
    if !(last.0 < threshold) {
        report.violate(Witness {
            x: last.1.clone(),
            t: Some(last.2),
            lhs: last.0,
            rhs: threshold,
            note: format!("ratio at smallest t is {:e}, not below {threshold:e}", last.0),
        });
    }
    Ok(report.finish("f(x,t) = o(|t|^(pM+-1)) along the sequence"))
}

/// Oddness `f(x,−t) + f(x,t) = 0` within `1e−12` (relative to `max(1, |f|)`).
pub fn check_odd(nl: &Nonlinearity, plan: &SamplePlan) -> Result<ConditionReport> {
    let mut report = ConditionReport::new(Condition::F3);
    for (_, x) in plan.points() {
        for &t in plan.t_values() {
            let (a, b) = (nl.eval(x, t), nl.eval(x, -t));
            report.samples_checked += 1;
            if !((a + b).abs() <= 1e-12 * a.abs().max(1.0)) {
                report.violate(Witness {
                    x: x.to_vec(),
                    t: Some(t),
                    lhs: a + b,
                    rhs: 0.0,
                    note: format!("f(x,t) + f(x,-t) = {:e}", a + b),
                });
            }
        }
    }
    Ok(report.finish("f is odd in t"))
}
