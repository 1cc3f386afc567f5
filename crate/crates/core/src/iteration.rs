//! The multi-map iteration
//!
//! ```text
//! x_{n+1} = a_{0n} x_n + sum_{i=1}^m a_{in} T_i^n x_n,    x_1 in K,
//! ```
//!
//! with weights in `[gamma1, gamma2]` summing to one, and the per-step
//! diagnostics that make its convergence theory measurable: residuals
//! `||x_n - T_i^n x_n||`, successive differences, distance to a known common
//! fixed point `p`, and a running bound on `||x_n - p||`.

use serde::{Deserialize, Serialize};

use crate::analysis::RecursiveEnvelope;
use crate::error::{Error, Result};
use crate::mappings::{FamilyMember, DOMAIN_TOL};
use crate::spaces::{check_simplex, convex_combine, domain_contains, Point};

/// Largest supported family size.
pub const MAX_FAMILY: usize = 64;

/// Slack in the per-step Fejér-type audit.
pub const FEJER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightRule {
    /// `a_{in} = 1 / (m + 1)` for every `i` and `n`.
    #[default]
    Uniform,
    /// The same `m + 1` weights at every step.
    Constant { weights: Vec<f64> },
    /// Step `n` uses `patterns[(n - 1) % patterns.len()]`.
    Cyclic { patterns: Vec<Vec<f64>> },
}

/// The weights `(a_{0n}, ..., a_{mn})` together with their bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSchedule {
    #[serde(flatten)]
    pub rule: WeightRule,
    #[serde(default = "default_gamma1")]
    pub gamma1: f64,
    #[serde(default = "default_gamma2")]
    pub gamma2: f64,
}

fn default_gamma1() -> f64 {
    0.05
}

fn default_gamma2() -> f64 {
    0.95
}

impl Default for WeightSchedule {
    fn default() -> Self {
        WeightSchedule {
            rule: WeightRule::Uniform,
            gamma1: default_gamma1(),
            gamma2: default_gamma2(),
        }
    }
}

impl WeightSchedule {
    pub fn constant(weights: Vec<f64>) -> Self {
        WeightSchedule {
            rule: WeightRule::Constant { weights },
            ..Default::default()
        }
    }

    /// Validates the bounds and every weight vector the rule can produce for
    /// a family of `m` maps.
    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.gamma1 > 0.0 && self.gamma1 < self.gamma2 && self.gamma2 < 1.0) {
            return Err(Error::Weights(format!(
                "gamma bounds must satisfy 0 < gamma1 < gamma2 < 1 (got {}, {})",
                self.gamma1, self.gamma2
            )));
        }
        let check = |w: &[f64]| -> Result<()> {
            if w.len() != m + 1 {
                return Err(Error::Weights(format!(
                    "expected {} weights for {m} maps, got {}",
                    m + 1,
                    w.len()
                )));
            }
            check_simplex(w)?;
            if let Some(i) = w.iter().position(|&a| a < self.gamma1 || a > self.gamma2) {
                return Err(Error::Weights(format!(
                    "weight {i} = {} outside [gamma1, gamma2] = [{}, {}]",
                    w[i], self.gamma1, self.gamma2
                )));
            }
            Ok(())
        };
        match &self.rule {
            WeightRule::Uniform => check(&vec![1.0 / (m + 1) as f64; m + 1]),
            WeightRule::Constant { weights } => check(weights),
            WeightRule::Cyclic { patterns } => {
                if patterns.is_empty() {
                    return Err(Error::Weights("cyclic schedule has no patterns".into()));
                }
                patterns.iter().try_for_each(|p| check(p))
            }
        }
    }

    /// Weights at step `n >= 1` for `m` maps.
    pub fn weights_at(&self, n: usize, m: usize) -> Vec<f64> {
        match &self.rule {
            WeightRule::Uniform => vec![1.0 / (m + 1) as f64; m + 1],
            WeightRule::Constant { weights } => weights.clone(),
            WeightRule::Cyclic { patterns } => patterns[(n - 1) % patterns.len()].clone(),
        }
    }
}

/// A validated iteration problem.
#[derive(Debug, Clone)]
pub struct IterationConfig {
    pub family: Vec<FamilyMember>,
    pub weights: WeightSchedule,
    pub x1: Point,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub reference_point: Option<Point>,
}

impl IterationConfig {
    pub fn new(
        family: Vec<FamilyMember>,
        weights: WeightSchedule,
        x1: Point,
        max_iters: usize,
        residual_tol: f64,
        reference_point: Option<Point>,
    ) -> Result<Self> {
        let config = IterationConfig {
            family,
            weights,
            x1,
            max_iters,
            residual_tol,
            reference_point,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn m(&self) -> usize {
        self.family.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.family.len();
        if m == 0 || m > MAX_FAMILY {
            return Err(Error::Config(format!("family size {m} outside 1..={MAX_FAMILY}")));
        }
        let domain = self.family[0].map.domain();
        for (i, member) in self.family.iter().enumerate().skip(1) {
            if member.map.domain() != domain {
                return Err(Error::Config(format!(
                    "map {} has a different domain than map 1",
                    i + 1
                )));
            }
        }
        for member in &self.family {
            member.params.validate()?;
        }
        self.weights.validate(m)?;
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if !(self.residual_tol.is_finite() && self.residual_tol >= 0.0) {
            return Err(Error::Config(format!(
                "residual_tol {} must be >= 0",
                self.residual_tol
            )));
        }
        if !domain_contains(domain, &self.x1, DOMAIN_TOL)? {
            return Err(Error::Config(format!("x1 = {} is not in the domain", self.x1)));
        }
        if let Some(p) = &self.reference_point {
            for (i, member) in self.family.iter().enumerate() {
                let d = member.map.apply(p)?.distance(p)?;
                if d > 1e-10 {
                    return Err(Error::Config(format!(
                        "reference point {p} is not fixed by map {}: ||T(p) - p|| = {d:e}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `x_{n+1}` from `x_n`.
pub fn step(config: &IterationConfig, n: usize, x: &Point) -> Result<Point> {
    step_with_images(config, n, x).map(|(next, _)| next)
}

fn step_with_images(config: &IterationConfig, n: usize, x: &Point) -> Result<(Point, Vec<Point>)> {
    let m = config.m();
    let weights = config.weights.weights_at(n, m);
    let mut points = Vec::with_capacity(m + 1);
    points.push(x.clone());
    for member in &config.family {
        points.push(member.map.apply_power(n, x)?);
    }
    let next = convex_combine(&weights, &points)?;
    points.remove(0);
    Ok((next, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// `max_i ||x_n - T_i^n x_n|| <= residual_tol`.
    Converged,
    MaxIters,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxIters => "max-iters",
        }
    }
}

/// Diagnostics at step `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub x: Point,
    /// `||x_n - T_i^n x_n||` for `i = 1..=m`.
    pub residuals: Vec<f64>,
    /// `||x_{n+1} - x_n||`.
    pub step_diff: f64,
    pub dist_to_p: Option<f64>,
    /// Running upper bound on `||x_n - p||`.
    pub theorem31_bound: Option<f64>,
}

impl StepRecord {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<StepRecord>,
    /// `x_{N+1}` for the last recorded step `N`.
    pub final_point: Point,
    pub stop: StopReason,
}

impl IterationTrace {
    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("trace is never empty")
    }

    pub fn final_max_residual(&self) -> f64 {
        self.last().max_residual()
    }

    /// `x_{n+1}` for the record at index `k`.
    pub fn next_point(&self, k: usize) -> &Point {
        self.records.get(k + 1).map_or(&self.final_point, |r| &r.x)
    }
}

/// Per-step growth terms `(alpha_n, b_n)` of the squared-distance recursion
/// `||x_{n+1} - p||^2 <= (1 + alpha_n) ||x_n - p||^2 + b_n`.
///
/// With `k_i = mu_in phi_i(M_i) + l_in` and `s_i = mu_in M_i*`, the per-step
/// excess `sum_i a_in (2 d c_i + c_i^2)`, `c_i = k_i + s_i d`, is bounded using
/// `2d <= d^2 + 1` and `(u + v)^2 <= 2u^2 + 2v^2`.
pub fn envelope_terms(config: &IterationConfig, n: usize) -> (f64, f64) {
    let weights = config.weights.weights_at(n, config.m());
    let mut alpha = 0.0;
    let mut b = 0.0;
    for (w, member) in weights[1..].iter().zip(&config.family) {
        let p = &member.params;
        let mu = p.mu(n);
        let k = mu * p.phi.evaluate(p.phi.big_m) + p.ell(n);
        let s = mu * p.phi.m_star;
        alpha += w * (2.0 * s + k + 2.0 * s * s);
        b += w * (k + 2.0 * k * k);
    }
    (alpha, b)
}

/// Runs the iteration from `x_1` until the residual test passes or
/// `max_iters` steps have been recorded.
pub fn run(config: &IterationConfig) -> Result<IterationTrace> {
    let mut records = Vec::with_capacity(config.max_iters.min(1 << 16));
    let mut x = config.x1.clone();
    let mut envelope = config
        .reference_point
        .as_ref()
        .map(|p| x.distance(p).map(|d| RecursiveEnvelope::new(d * d)))
        .transpose()?;
    for n in 1..=config.max_iters {
        let (next, images) = step_with_images(config, n, &x).map_err(|e| e.at_step(n))?;
        let residuals = images
            .iter()
            .map(|t| x.distance(t))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.at_step(n))?;
        let step_diff = next.distance(&x)?;
        let dist_to_p = match &config.reference_point {
            Some(p) => Some(x.distance(p)?),
            None => None,
        };
        let theorem31_bound = envelope.as_ref().map(|e| e.current().sqrt());
        let record = StepRecord {
            n,
            x,
            residuals,
            step_diff,
            dist_to_p,
            theorem31_bound,
        };
        let converged = record.max_residual() <= config.residual_tol;
        records.push(record);
        if let Some(env) = envelope.as_mut() {
            let (alpha, b) = envelope_terms(config, n);
            env.push(alpha, b);
        }
        if converged || n == config.max_iters {
            return Ok(IterationTrace {
                records,
                final_point: next,
                stop: if converged {
                    StopReason::Converged
                } else {
                    StopReason::MaxIters
                },
            });
        }
        x = next;
    }
    unreachable!("max_iters >= 1 is validated")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerReport {
    pub steps_checked: usize,
    pub steps_satisfied: usize,
    /// `min (rhs - lhs)` over all steps, slack excluded.
    pub worst_margin: f64,
    pub worst_step: usize,
    pub violating_steps: Vec<usize>,
}

impl FejerReport {
    pub fn holds(&self) -> bool {
        self.violating_steps.is_empty()
    }
}

/// Audits `||x_{n+1} - p||^2 <= ||x_n - p||^2 + sum_i a_in (2 ||x_n - p|| c_in + c_in^2)`
/// with `c_in = mu_in phi_i(M_i) + mu_in M_i* ||x_n - p|| + l_in` at every
/// recorded step.
pub fn check_fejer_bound(trace: &IterationTrace, config: &IterationConfig) -> Result<FejerReport> {
    let p = config
        .reference_point
        .as_ref()
        .ok_or_else(|| Error::Config("Fejér audit needs a reference point".into()))?;
    let mut worst = (f64::INFINITY, 0);
    let mut satisfied = 0;
    let mut violating = Vec::new();
    for (k, rec) in trace.records.iter().enumerate() {
        let n = rec.n;
        let d = rec.x.distance(p)?;
        let d_next = trace.next_point(k).distance(p)?;
        let weights = config.weights.weights_at(n, config.m());
        let mut excess = 0.0;
        for (w, member) in weights[1..].iter().zip(&config.family) {
            let prm = &member.params;
            let mu = prm.mu(n);
            let c = mu * prm.phi.evaluate(prm.phi.big_m) + mu * prm.phi.m_star * d + prm.ell(n);
            excess += w * (2.0 * d * c + c * c);
        }
        let margin = d * d + excess - d_next * d_next;
        if margin < worst.0 {
            worst = (margin, n);
        }
        if margin + FEJER_SLACK >= 0.0 {
            satisfied += 1;
        } else {
            violating.push(n);
        }
    }
    Ok(FejerReport {
        steps_checked: trace.records.len(),
        steps_satisfied: satisfied,
        worst_margin: worst.0,
        worst_step: worst.1,
        violating_steps: violating,
    })
}
