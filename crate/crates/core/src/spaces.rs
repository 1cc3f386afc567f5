//! Finite-dimensional Euclidean primitives: points, norms, convex domains and
//! the convexity gauge `g` used by the uniform-convexity inequality.
//!
//! Every space in the laboratory is `R^d` with the `l2` norm. In that setting
//! the gauge can be taken as `g(t) = t^2`, which turns the convexity
//! inequality into an identity that is checkable to rounding error.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(weights) == 1` for convex combinations.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A coordinate vector in `R^d` with `d >= 1` and finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have dimension >= 1".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Point(coords))
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Point::new(vec![value])
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Builds a point from arithmetic results, reporting overflow as a
    /// numeric-range error rather than an invalid input.
    pub(crate) fn from_computed(coords: Vec<f64>, what: &str) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NumericRange(format!(
                "{what} produced a non-finite coordinate"
            )));
        }
        Ok(Point(coords))
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        check_same_dim(self, other)?;
        let coords = self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect();
        Point::from_computed(coords, "subtraction")
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &Point) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(hypot_iter(self.0.iter().zip(&other.0).map(|(a, b)| a - b)))
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_same_dim(a: &Point, b: &Point) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

fn hypot_iter(values: impl Iterator<Item = f64>) -> f64 {
    values.map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean norm of `x`.
pub fn norm(x: &Point) -> f64 {
    hypot_iter(x.0.iter().copied())
}

/// Euclidean norm of a raw coordinate slice, rejecting non-finite entries.
pub fn norm_of(coords: &[f64]) -> Result<f64> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    Ok(hypot_iter(coords.iter().copied()))
}

/// Checks that `weights` lie on the probability simplex.
pub fn check_simplex(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Weights("no weights given".into()));
    }
    if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Weights(format!(
            "weight {i} = {} is negative or not finite",
            weights[i]
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::Weights(format!("weights sum to {total:.17}, expected 1")));
    }
    Ok(())
}

/// Returns `sum_i weights[i] * points[i]`.
///
/// Summation runs in index order so results are reproducible bit for bit.
pub fn convex_combine(weights: &[f64], points: &[Point]) -> Result<Point> {
    if weights.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    check_simplex(weights)?;
    let dim = points[0].dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {dim}",
            p.dim()
        )));
    }
    let mut out = vec![0.0; dim];
    for (w, p) in weights.iter().zip(points) {
        for (acc, c) in out.iter_mut().zip(&p.0) {
            *acc += w * c;
        }
    }
    Point::from_computed(out, "convex combination")
}

/// Diameter of a domain; unbounded sets carry an explicit marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diameter {
    Bounded(f64),
    Unbounded,
}

impl Diameter {
    pub fn bounded(self) -> Option<f64> {
        match self {
            Diameter::Bounded(d) => Some(d),
            Diameter::Unbounded => None,
        }
    }
}

/// A closed convex subset of `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// Axis-aligned box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Point, radius: f64 },
    /// One-dimensional interval; a missing end is unbounded.
    #[serde(alias = "halfline-interval")]
    Interval {
        #[serde(default)]
        lo: Option<f64>,
        #[serde(default)]
        hi: Option<f64>,
    },
}

impl DomainSpec {
    pub fn unit_interval() -> Self {
        DomainSpec::Interval {
            lo: Some(0.0),
            hi: Some(1.0),
        }
    }

    pub fn real_line() -> Self {
        DomainSpec::Interval { lo: None, hi: None }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        DomainSpec::Interval {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        DomainSpec::Box {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidInput(format!(
                        "box bounds have lengths {} and {}",
                        lo.len(),
                        hi.len()
                    )));
                }
                for (i, (l, h)) in lo.iter().zip(hi).enumerate() {
                    if !l.is_finite() || !h.is_finite() {
                        return Err(Error::InvalidInput(format!("box bound {i} is not finite")));
                    }
                    if l > h {
                        return Err(Error::InvalidInput(format!("box bound {i}: lo {l} > hi {h}")));
                    }
                }
                Ok(())
            }
            DomainSpec::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidInput(format!("ball radius {radius} must be > 0")));
                }
                Ok(())
            }
            DomainSpec::Interval { lo, hi } => {
                if lo.is_some_and(|l| !l.is_finite()) || hi.is_some_and(|h| !h.is_finite()) {
                    return Err(Error::InvalidInput("interval end is not finite".into()));
                }
                if let (Some(l), Some(h)) = (lo, hi) {
                    if l > h {
                        return Err(Error::InvalidInput(format!("interval lo {l} > hi {h}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box { lo, .. } => lo.len(),
            DomainSpec::Ball { center, .. } => center.dim(),
            DomainSpec::Interval { .. } => 1,
        }
    }

    pub fn diameter(&self) -> Diameter {
        match self {
            DomainSpec::Box { lo, hi } => {
                Diameter::Bounded(hypot_iter(lo.iter().zip(hi).map(|(l, h)| h - l)))
            }
            DomainSpec::Ball { radius, .. } => Diameter::Bounded(2.0 * radius),
            DomainSpec::Interval {
                lo: Some(l),
                hi: Some(h),
            } => Diameter::Bounded(h - l),
            DomainSpec::Interval { .. } => Diameter::Unbounded,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.diameter(), Diameter::Bounded(_))
    }

    /// Smallest axis-aligned box containing the domain, if bounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            DomainSpec::Box { lo, hi } => Some((lo.clone(), hi.clone())),
            DomainSpec::Ball { center, radius } => Some((
                center.coords().iter().map(|c| c - radius).collect(),
                center.coords().iter().map(|c| c + radius).collect(),
            )),
            DomainSpec::Interval {
                lo: Some(l),
                hi: Some(h),
            } => Some((vec![*l], vec![*h])),
            DomainSpec::Interval { .. } => None,
        }
    }

    /// Nearest point of the domain to `x` (Euclidean projection).
    pub fn project(&self, x: &Point) -> Point {
        match self {
            DomainSpec::Box { lo, hi } => Point(
                x.0.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (l, h))| c.clamp(*l, *h))
                    .collect(),
            ),
            DomainSpec::Ball { center, radius } => {
                let d = x.distance(center).unwrap_or(0.0);
                if d <= *radius {
                    x.clone()
                } else {
                    let s = radius / d;
                    Point(center.0.iter().zip(&x.0).map(|(c, v)| c + s * (v - c)).collect())
                }
            }
            DomainSpec::Interval { lo, hi } => {
                let mut v = x.0[0];
                if let Some(l) = lo {
                    v = v.max(*l);
                }
                if let Some(h) = hi {
                    v = v.min(*h);
                }
                Point(vec![v])
            }
        }
    }
}

/// True iff `x` lies in `domain` inflated by `tol`.
pub fn domain_contains(domain: &DomainSpec, x: &Point, tol: f64) -> Result<bool> {
    if domain.dim() != x.dim() {
        return Err(Error::InvalidInput(format!(
            "point of dimension {} tested against domain of dimension {}",
            x.dim(),
            domain.dim()
        )));
    }
    Ok(match domain {
        DomainSpec::Box { lo, hi } => {
            x.0.iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (l, h))| *c >= l - tol && *c <= h + tol)
        }
        DomainSpec::Ball { center, radius } => x.distance(center)? <= radius + tol,
        DomainSpec::Interval { lo, hi } => {
            let v = x.0[0];
            lo.is_none_or(|l| v >= l - tol) && hi.is_none_or(|h| v <= h + tol)
        }
    })
}

/// The gauge `g` of the uniform-convexity inequality
/// `||sum a_i x_i||^2 <= sum a_i ||x_i||^2 - a_s a_t g(||x_s - x_t||)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ConvexityFunction {
    /// `g(t) = t^2`, valid in every inner-product space.
    #[default]
    Square,
    /// `g(t) = c * t^p` with `c > 0`, `p >= 1`.
    Power { coeff: f64, exponent: f64 },
}

impl ConvexityFunction {
    pub fn evaluate(&self, t: f64) -> f64 {
        match *self {
            ConvexityFunction::Square => t * t,
            ConvexityFunction::Power { coeff, exponent } => coeff * t.powf(exponent),
        }
    }

    /// Checks `g(0) = 0`, strict monotonicity and midpoint convexity on a grid
    /// of `samples + 1` points in `[0, t_max]`.
    pub fn check_on_grid(&self, t_max: f64, samples: usize) -> Result<()> {
        if self.evaluate(0.0) != 0.0 {
            return Err(Error::InvalidInput("g(0) != 0".into()));
        }
        let samples = samples.max(2);
        let ts: Vec<f64> = (0..=samples).map(|k| t_max * k as f64 / samples as f64).collect();
        for w in ts.windows(2) {
            let (a, b) = (self.evaluate(w[0]), self.evaluate(w[1]));
            if b <= a {
                return Err(Error::InvalidInput(format!(
                    "g not strictly increasing between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        for w in ts.windows(3) {
            let mid = self.evaluate(w[1]);
            let chord = 0.5 * (self.evaluate(w[0]) + self.evaluate(w[2]));
            if mid > chord + 1e-12 {
                return Err(Error::InvalidInput(format!("g not convex near {}", w[1])));
            }
        }
        Ok(())
    }
}
