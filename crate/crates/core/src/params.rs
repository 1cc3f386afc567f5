//! Parameter sequences `mu_n`, `l_n`, `a_n` and the gauge `phi` attached to a
//! total asymptotically nonexpansive mapping.
//!
//! Sequence rules form a closed set whose series sums are known in closed
//! form, so summability hypotheses can be certified instead of assumed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `lambda` probed when checking `phi(lambda) <= M* lambda`.
pub const DEFAULT_LAMBDA_MAX: f64 = 1e6;

/// A nonnegative real sequence indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceRule {
    #[default]
    Zero,
    /// `coeff / n^2`
    InverseSquare { coeff: f64 },
    /// `coeff * ratio^n`, `0 < ratio < 1`
    Geometric { coeff: f64, ratio: f64 },
    /// `values[n - 1]` for `n <= values.len()`, zero afterwards.
    FinitelySupported { values: Vec<f64> },
    /// `coeff / n`: a null sequence that is not summable.
    Harmonic { coeff: f64 },
    /// `value` for every `n`: not null unless zero.
    Constant { value: f64 },
}

impl SequenceRule {
    pub fn inverse_square(coeff: f64) -> Self {
        SequenceRule::InverseSquare { coeff }
    }

    pub fn geometric(coeff: f64, ratio: f64) -> Self {
        SequenceRule::Geometric { coeff, ratio }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self {
            SequenceRule::Zero => Ok(()),
            SequenceRule::InverseSquare { coeff }
            | SequenceRule::Harmonic { coeff }
            | SequenceRule::Constant { value: coeff } => {
                if coeff.is_finite() && *coeff >= 0.0 {
                    Ok(())
                } else {
                    bad(format!("coefficient {coeff} must be finite and >= 0"))
                }
            }
            SequenceRule::Geometric { coeff, ratio } => {
                if !(coeff.is_finite() && *coeff >= 0.0) {
                    return bad(format!("coefficient {coeff} must be finite and >= 0"));
                }
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return bad(format!("geometric ratio {ratio} must lie in (0, 1)"));
                }
                Ok(())
            }
            SequenceRule::FinitelySupported { values } => {
                match values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                    Some(i) => bad(format!("value {i} = {} must be finite and >= 0", values[i])),
                    None => Ok(()),
                }
            }
        }
    }

    /// The `n`-th term, `n >= 1`.
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        let nf = n as f64;
        match self {
            SequenceRule::Zero => 0.0,
            SequenceRule::InverseSquare { coeff } => coeff / (nf * nf),
            SequenceRule::Geometric { coeff, ratio } => coeff * ratio.powi(n.min(i32::MAX as usize) as i32),
            SequenceRule::FinitelySupported { values } => values.get(n - 1).copied().unwrap_or(0.0),
            SequenceRule::Harmonic { coeff } => coeff / nf,
            SequenceRule::Constant { value } => *value,
        }
    }

    pub fn is_summable(&self) -> bool {
        match self {
            SequenceRule::Harmonic { coeff } => *coeff == 0.0,
            SequenceRule::Constant { value } => *value == 0.0,
            _ => true,
        }
    }

    /// Exact value of `sum_{n>=1}` for summable rules.
    pub fn series_sum(&self) -> Option<f64> {
        if !self.is_summable() {
            return None;
        }
        Some(match self {
            SequenceRule::Zero | SequenceRule::Harmonic { .. } | SequenceRule::Constant { .. } => 0.0,
            SequenceRule::InverseSquare { coeff } => coeff * PI * PI / 6.0,
            SequenceRule::Geometric { coeff, ratio } => coeff * ratio / (1.0 - ratio),
            SequenceRule::FinitelySupported { values } => values.iter().sum(),
        })
    }

    /// True when the terms tend to zero.
    pub fn is_null(&self) -> bool {
        match self {
            SequenceRule::Constant { value } => *value == 0.0,
            _ => true,
        }
    }

    /// True when the terms are nonincreasing in `n`.
    pub fn is_monotone(&self) -> bool {
        match self {
            SequenceRule::FinitelySupported { values } => values.windows(2).all(|w| w[1] <= w[0]),
            _ => true,
        }
    }

    pub fn partial_sum(&self, n_max: usize) -> f64 {
        (1..=n_max).map(|n| self.value(n)).sum()
    }

    /// Rejects rules whose series diverges, then checks the declared sum
    /// bounds the partial sums at a few horizons.
    pub fn certify_summable(&self, what: &str) -> Result<f64> {
        self.validate()?;
        let total = self
            .series_sum()
            .ok_or_else(|| Error::Config(format!("{what}: rule {self:?} is not summable")))?;
        let mut acc = 0.0;
        let mut next_check = 1;
        for n in 1..=10_000 {
            acc += self.value(n);
            if n == next_check {
                if acc > total * (1.0 + 1e-12) + 1e-15 {
                    return Err(Error::Config(format!(
                        "{what}: partial sum {acc} at N={n} exceeds declared sum {total}"
                    )));
                }
                next_check *= 10;
            }
        }
        Ok(total)
    }
}

/// The gauge `phi` of the total-asymptotic inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhiKind {
    Identity,
    Power {
        exponent: f64,
    },
    /// Piecewise-linear through `(lambda, phi)` knots starting at `(0, 0)`;
    /// extended past the last knot with the final slope.
    Table {
        knots: Vec<(f64, f64)>,
    },
}

/// `phi` together with constants `M, M* > 0` such that
/// `phi(lambda) <= M* lambda` for `lambda >= M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSpec {
    #[serde(flatten)]
    pub kind: PhiKind,
    #[serde(rename = "m")]
    pub big_m: f64,
    #[serde(rename = "m_star")]
    pub m_star: f64,
}

impl Default for PhiSpec {
    fn default() -> Self {
        PhiSpec::identity()
    }
}

impl PhiSpec {
    pub fn identity() -> Self {
        PhiSpec {
            kind: PhiKind::Identity,
            big_m: 1.0,
            m_star: 1.0,
        }
    }

    pub fn with_constants(kind: PhiKind, big_m: f64, m_star: f64) -> Self {
        PhiSpec { kind, big_m, m_star }
    }

    pub fn evaluate(&self, lambda: f64) -> f64 {
        match &self.kind {
            PhiKind::Identity => lambda,
            PhiKind::Power { exponent } => lambda.powf(*exponent),
            PhiKind::Table { knots } => {
                let seg = knots
                    .windows(2)
                    .position(|w| lambda <= w[1].0)
                    .unwrap_or(knots.len() - 2);
                let ((x0, y0), (x1, y1)) = (knots[seg], knots[seg + 1]);
                y0 + (y1 - y0) * (lambda - x0) / (x1 - x0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_up_to(DEFAULT_LAMBDA_MAX)
    }

    pub fn validate_up_to(&self, lambda_max: f64) -> Result<()> {
        if !(self.big_m.is_finite() && self.big_m > 0.0) {
            return Err(Error::Config(format!("phi: M = {} must be > 0", self.big_m)));
        }
        if !(self.m_star.is_finite() && self.m_star > 0.0) {
            return Err(Error::Config(format!("phi: M* = {} must be > 0", self.m_star)));
        }
        match &self.kind {
            PhiKind::Identity => {}
            PhiKind::Power { exponent } => {
                if !(exponent.is_finite() && *exponent > 0.0) {
                    return Err(Error::Config(format!("phi: exponent {exponent} must be > 0")));
                }
            }
            PhiKind::Table { knots } => {
                if knots.len() < 2 || knots[0] != (0.0, 0.0) {
                    return Err(Error::Config(
                        "phi: table needs >= 2 knots starting at (0, 0)".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) || !w[1].0.is_finite() || !w[1].1.is_finite() {
                        return Err(Error::Config(format!(
                            "phi: table knots must strictly increase in both coordinates near {:?}",
                            w[1]
                        )));
                    }
                }
            }
        }
        if self.evaluate(0.0) != 0.0 {
            return Err(Error::Config("phi(0) != 0".into()));
        }
        // monotonicity on a grid over [0, 2M]
        let grid: Vec<f64> = (0..=200).map(|k| 2.0 * self.big_m * k as f64 / 200.0).collect();
        for w in grid.windows(2) {
            if self.evaluate(w[1]) <= self.evaluate(w[0]) {
                return Err(Error::Config(format!(
                    "phi not strictly increasing near lambda = {}",
                    w[1]
                )));
            }
        }
        // phi(lambda) <= M* lambda on a geometric grid in [M, lambda_max]
        let mut lambda = self.big_m;
        while lambda <= lambda_max {
            let v = self.evaluate(lambda);
            if v > self.m_star * lambda * (1.0 + 1e-12) {
                return Err(Error::Config(format!(
                    "phi({lambda}) = {v} exceeds M* * lambda = {}",
                    self.m_star * lambda
                )));
            }
            lambda *= 1.1;
        }
        Ok(())
    }
}

/// The sequences attached to one mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ParameterSequences {
    #[serde(default)]
    pub mu: SequenceRule,
    #[serde(default)]
    pub ell: SequenceRule,
    #[serde(default)]
    pub a: SequenceRule,
    #[serde(default)]
    pub phi: PhiSpec,
}

impl ParameterSequences {
    /// `mu_n = l_n = 0`: the nonexpansive case.
    pub fn nonexpansive() -> Self {
        ParameterSequences::default()
    }

    pub fn new(mu: SequenceRule, ell: SequenceRule, phi: PhiSpec) -> Self {
        ParameterSequences {
            mu,
            ell,
            a: SequenceRule::Zero,
            phi,
        }
    }

    pub fn with_a(mut self, a: SequenceRule) -> Self {
        self.a = a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.mu.certify_summable("mu")?;
        self.ell.certify_summable("ell")?;
        self.a.validate()?;
        if !self.a.is_null() || !self.a.is_monotone() {
            return Err(Error::Config("a: rule must be a monotone null sequence".into()));
        }
        self.phi.validate()
    }

    pub fn mu(&self, n: usize) -> f64 {
        self.mu.value(n)
    }

    pub fn ell(&self, n: usize) -> f64 {
        self.ell.value(n)
    }

    pub fn a(&self, n: usize) -> f64 {
        self.a.value(n)
    }
}

/// `(1 + mu_n M*) dist + mu_n phi(M) + l_n`: the linear majorant of the
/// total-asymptotic inequality obtained from `phi(lambda) <= phi(M) + M* lambda`.
pub fn linearized_bound(params: &ParameterSequences, n: usize, dist: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    if !(dist.is_finite() && dist >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "distance {dist} must be finite and >= 0"
        )));
    }
    let mu = params.mu(n);
    let phi = &params.phi;
    Ok((1.0 + mu * phi.m_star) * dist + mu * phi.evaluate(phi.big_m) + params.ell(n))
}
