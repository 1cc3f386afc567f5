use rand::Rng;

use crate::error::{Error, Result};
use crate::params::SequenceRule;
use crate::sampling;
use crate::spaces::{check_simplex, convex_combine, norm, ConvexityFunction, Point};

/// Successive-difference threshold taken as numeric evidence that a limit
/// exists.
pub const LIMIT_DIFF_TOL: f64 = 1e-10;

/// The recursion `a_{n+1} = (1 + alpha_n) a_n + b_n`, advanced one step at a
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveEnvelope {
    value: f64,
    product: f64,
    sum_alpha: f64,
    sum_b: f64,
    a1: f64,
}

impl RecursiveEnvelope {
    pub fn new(a1: f64) -> Self {
        RecursiveEnvelope {
            value: a1,
            product: 1.0,
            sum_alpha: 0.0,
            sum_b: 0.0,
            a1,
        }
    }

    pub fn push(&mut self, alpha: f64, b: f64) {
        self.value = (1.0 + alpha) * self.value + b;
        self.product *= 1.0 + alpha;
        self.sum_alpha += alpha;
        self.sum_b += b;
    }

    pub fn current(&self) -> f64 {
        self.value
    }

    /// `prod (1 + alpha_k)` over the pushed terms.
    pub fn product(&self) -> f64 {
        self.product
    }

    pub fn sum_b(&self) -> f64 {
        self.sum_b
    }

    /// `exp(sum alpha_k) (a_1 + sum b_k)`, which dominates the current value.
    pub fn exp_bound(&self) -> f64 {
        self.sum_alpha.exp() * (self.a1 + self.sum_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeEntry {
    pub n: usize,
    pub value: f64,
    /// `prod_{k<n} (1 + alpha_k)`
    pub product: f64,
    /// `sum_{k<n} b_k`
    pub sum_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceEnvelope {
    pub entries: Vec<EnvelopeEntry>,
    /// `exp(sum alpha) (a_1 + sum b)` over the computed horizon.
    pub exp_bound: f64,
    /// First `n` with `a_{n+1} - a_n < LIMIT_DIFF_TOL`, if any.
    pub settled_at: Option<usize>,
}

impl SequenceEnvelope {
    pub fn max_value(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn final_value(&self) -> f64 {
        self.entries.last().map_or(f64::NAN, |e| e.value)
    }

    pub fn value_at(&self, n: usize) -> Option<f64> {
        self.entries.get(n.checked_sub(1)?).map(|e| e.value)
    }
}

/// Evaluates the extremal sequence of `a_{n+1} <= (1 + alpha_n) a_n + b_n`
/// for `n = 1..=horizon`.
pub fn sequence_bound(
    a1: f64,
    alpha: &SequenceRule,
    b: &SequenceRule,
    horizon: usize,
) -> Result<SequenceEnvelope> {
    if !(a1.is_finite() && a1 >= 0.0) {
        return Err(Error::InvalidInput(format!("a1 = {a1} must be finite and >= 0")));
    }
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be >= 1".into()));
    }
    alpha.certify_summable("alpha")?;
    b.certify_summable("b")?;

    let mut env = RecursiveEnvelope::new(a1);
    let mut entries = Vec::with_capacity(horizon);
    let mut settled_at = None;
    for n in 1..=horizon {
        entries.push(EnvelopeEntry {
            n,
            value: env.current(),
            product: env.product(),
            sum_b: env.sum_b(),
        });
        if n == horizon {
            break;
        }
        let before = env.current();
        env.push(alpha.value(n), b.value(n));
        if settled_at.is_none() && env.current() - before < LIMIT_DIFF_TOL {
            settled_at = Some(n);
        }
    }
    let exp_bound = env.exp_bound();
    if let Some(e) = entries.iter().find(|e| e.value > exp_bound * (1.0 + 1e-12)) {
        return Err(Error::NumericRange(format!(
            "envelope {} at n={} exceeds exp bound {exp_bound}",
            e.value, e.n
        )));
    }
    Ok(SequenceEnvelope {
        entries,
        exp_bound,
        settled_at,
    })
}

/// Signed margin of
/// `||sum a_i x_i||^2 <= sum a_i ||x_i||^2 - a_s a_t g(||x_s - x_t||)`;
/// nonnegative when the inequality holds.
pub fn check_convexity_inequality(
    weights: &[f64],
    points: &[Point],
    s: usize,
    t: usize,
    g: &ConvexityFunction,
) -> Result<f64> {
    if s == t {
        return Err(Error::Index(format!("s and t must differ (both {s})")));
    }
    if s >= points.len() || t >= points.len() {
        return Err(Error::Index(format!(
            "indices ({s}, {t}) out of range for {} points",
            points.len()
        )));
    }
    check_simplex(weights)?;
    let combo = convex_combine(weights, points)?;
    let lhs = norm(&combo).powi(2);
    let avg_sq: f64 = weights.iter().zip(points).map(|(w, p)| w * norm(p).powi(2)).sum();
    let rhs = avg_sq - weights[s] * weights[t] * g.evaluate(points[s].distance(&points[t])?);
    Ok(rhs - lhs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityAudit {
    pub instances: usize,
    pub min_margin: f64,
    /// Index of the instance attaining `min_margin`.
    pub worst_instance: usize,
}

/// Evaluates the convexity inequality on `instances` seeded random cases with
/// dimension `1..=max_dim` and `2..=max_points` points in `[-10, 10]^d`.
pub fn convexity_audit(
    instances: usize,
    max_dim: usize,
    max_points: usize,
    g: &ConvexityFunction,
    seed: u64,
) -> Result<ConvexityAudit> {
    if max_dim == 0 || max_points < 2 {
        return Err(Error::InvalidInput(
            "need max_dim >= 1 and max_points >= 2".into(),
        ));
    }
    let mut rng = sampling::rng(seed);
    let mut worst = (f64::INFINITY, 0);
    for k in 0..instances {
        let d = rng.random_range(1..=max_dim);
        let r = rng.random_range(2..=max_points);
        let raw: Vec<f64> = (0..r).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // absorb rounding so the simplex check passes
        let drift = 1.0 - weights.iter().sum::<f64>();
        weights[0] += drift;
        let points = (0..r)
            .map(|_| Point::new((0..d).map(|_| rng.random_range(-10.0..10.0)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let s = rng.random_range(0..r);
        let t = (s + rng.random_range(1..r)) % r;
        let margin = check_convexity_inequality(&weights, &points, s, t, g)?;
        if margin < worst.0 {
            worst = (margin, k);
        }
    }
    Ok(ConvexityAudit {
        instances,
        min_margin: worst.0,
        worst_instance: worst.1,
    })
}
