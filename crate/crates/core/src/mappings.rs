//! Self-maps `T: K -> K` of a convex domain and their iterates `T^n`.
//!
//! Mappings come from a closed, tagged set. Kinds with a known formula for
//! `T^n` evaluate it directly; the rest fall back to `n`-fold application.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSequences;
use crate::sampling;
use crate::spaces::{domain_contains, DomainSpec, Point};

/// Membership tolerance for inputs and images.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Cap on applications per `apply_power` call without a closed form.
pub const MAX_ITERATED_APPLICATIONS: usize = 1_000_000;

/// Slack allowed in the total-asymptotic inequality.
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// The closed set of supported maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    /// `x -> A x + b`
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    /// `x -> factor * x`
    Scale {
        factor: f64,
    },
    /// On `[0, 1]`: `1/2` for `x <= 1/2`, `0` otherwise.
    SahuStep,
    Constant {
        value: Point,
    },
    /// Applies `maps[0]` first.
    Composed {
        maps: Vec<MapKind>,
    },
}

impl MapKind {
    pub fn identity(dim: usize) -> Self {
        MapKind::Affine {
            matrix: (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            offset: vec![0.0; dim],
        }
    }

    fn input_dim(&self) -> Option<usize> {
        match self {
            MapKind::Affine { offset, .. } => Some(offset.len()),
            MapKind::SahuStep => Some(1),
            MapKind::Constant { value } => Some(value.dim()),
            MapKind::Scale { .. } => None,
            MapKind::Composed { maps } => maps.iter().find_map(MapKind::input_dim),
        }
    }
}

#[derive(Debug, Clone)]
enum Compiled {
    Affine { a: DMatrix<f64>, b: DVector<f64> },
    Scale(f64),
    SahuStep,
    Constant(Point),
    Composed(Vec<Compiled>),
}

impl Compiled {
    fn build(kind: &MapKind, dim: usize) -> Result<Self> {
        Ok(match kind {
            MapKind::Affine { matrix, offset } => {
                if matrix.len() != dim || offset.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidInput(format!(
                        "affine map must be {dim}x{dim} with offset of length {dim}"
                    )));
                }
                if matrix.iter().flatten().chain(offset).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("affine map has non-finite entries".into()));
                }
                Compiled::Affine {
                    a: DMatrix::from_fn(dim, dim, |i, j| matrix[i][j]),
                    b: DVector::from_column_slice(offset),
                }
            }
            MapKind::Scale { factor } => {
                if !factor.is_finite() {
                    return Err(Error::InvalidInput("scale factor is not finite".into()));
                }
                Compiled::Scale(*factor)
            }
            MapKind::SahuStep => {
                if dim != 1 {
                    return Err(Error::InvalidInput(
                        "sahu-step is defined on the real line".into(),
                    ));
                }
                Compiled::SahuStep
            }
            MapKind::Constant { value } => {
                if value.dim() != dim {
                    return Err(Error::InvalidInput(format!(
                        "constant value has dimension {}, domain has {dim}",
                        value.dim()
                    )));
                }
                Compiled::Constant(value.clone())
            }
            MapKind::Composed { maps } => {
                if maps.is_empty() {
                    return Err(Error::InvalidInput(
                        "composed map needs at least one member".into(),
                    ));
                }
                Compiled::Composed(
                    maps.iter()
                        .map(|m| Compiled::build(m, dim))
                        .collect::<Result<_>>()?,
                )
            }
        })
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Compiled::Affine { a, b } => {
                let y = a * DVector::from_column_slice(x) + b;
                y.as_slice().to_vec()
            }
            Compiled::Scale(c) => x.iter().map(|v| c * v).collect(),
            Compiled::SahuStep => vec![if x[0] <= 0.5 { 0.5 } else { 0.0 }],
            Compiled::Constant(p) => p.coords().to_vec(),
            Compiled::Composed(maps) => maps.iter().fold(x.to_vec(), |acc, m| m.apply(&acc)),
        }
    }

    fn discontinuities(&self, out: &mut Vec<f64>) {
        match self {
            Compiled::SahuStep => out.push(0.5),
            Compiled::Composed(maps) => maps.iter().for_each(|m| m.discontinuities(out)),
            _ => {}
        }
    }
}

/// Sign and base-10 logarithm of a magnitude, for values beyond `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitude {
    pub sign: i8,
    pub log10: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude {
        sign: 0,
        log10: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            LogMagnitude::ZERO
        } else {
            LogMagnitude {
                sign: if v > 0.0 { 1 } else { -1 },
                log10: v.abs().log10(),
            }
        }
    }

    /// The value as an `f64`, or `None` when it overflows.
    pub fn to_f64(self) -> Option<f64> {
        if self.sign == 0 {
            return Some(0.0);
        }
        let v = 10f64.powf(self.log10);
        v.is_finite().then_some(f64::from(self.sign) * v)
    }
}

/// A validated self-map of a convex domain.
#[derive(Debug, Clone)]
pub struct MappingSpec {
    kind: MapKind,
    domain: DomainSpec,
    known_fixed_points: Vec<Point>,
    compiled: Compiled,
}

/// Seed used for the sampled invariant checks at construction.
const VALIDATION_SEED: u64 = 0x5eed;

impl MappingSpec {
    /// Builds and validates a mapping.
    ///
    /// Besides structural checks, this samples at least 1000 domain points to
    /// confirm `T(K) ⊂ K`, compares the closed-form power against iterated
    /// application for `n <= 8`, and confirms each declared fixed point.
    pub fn new(kind: MapKind, domain: DomainSpec, known_fixed_points: Vec<Point>) -> Result<Self> {
        domain.validate()?;
        let dim = domain.dim();
        if let Some(d) = kind.input_dim() {
            if d != dim {
                return Err(Error::InvalidInput(format!(
                    "map acts on dimension {d}, domain has dimension {dim}"
                )));
            }
        }
        let compiled = Compiled::build(&kind, dim)?;
        let spec = MappingSpec {
            kind,
            domain,
            known_fixed_points,
            compiled,
        };
        spec.check_sampled_invariants()?;
        Ok(spec)
    }

    pub fn identity(domain: DomainSpec) -> Result<Self> {
        let dim = domain.dim();
        MappingSpec::new(MapKind::identity(dim), domain, vec![])
    }

    pub fn sahu_step() -> Self {
        MappingSpec::new(
            MapKind::SahuStep,
            DomainSpec::unit_interval(),
            vec![Point::scalar(0.5).expect("finite")],
        )
        .expect("sahu-step on [0, 1] is valid")
    }

    pub fn scale(factor: f64, domain: DomainSpec) -> Result<Self> {
        let fixed = vec![Point::zeros(domain.dim())];
        let fixed = if domain_contains(&domain, &fixed[0], DOMAIN_TOL)? {
            fixed
        } else {
            vec![]
        };
        MappingSpec::new(MapKind::Scale { factor }, domain, fixed)
    }

    /// `x -> p + A (x - p)`, an affine map fixing `p`.
    pub fn affine_about(matrix: Vec<Vec<f64>>, p: &Point, domain: DomainSpec) -> Result<Self> {
        let dim = p.dim();
        if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!("matrix must be {dim}x{dim}")));
        }
        let offset = (0..dim)
            .map(|i| p.coords()[i] - (0..dim).map(|j| matrix[i][j] * p.coords()[j]).sum::<f64>())
            .collect();
        MappingSpec::new(MapKind::Affine { matrix, offset }, domain, vec![p.clone()])
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn known_fixed_points(&self) -> &[Point] {
        &self.known_fixed_points
    }

    pub fn has_closed_power(&self) -> bool {
        !matches!(self.compiled, Compiled::Composed(_))
    }

    /// Coordinate-0 positions where the map jumps.
    pub fn discontinuity_loci(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.compiled.discontinuities(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn check_input(&self, x: &Point) -> Result<()> {
        if !domain_contains(&self.domain, x, DOMAIN_TOL)? {
            return Err(Error::Domain(format!("{x} is not in {:?}", self.domain)));
        }
        Ok(())
    }

    /// `T(x)`.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.check_input(x)?;
        Point::from_computed(self.compiled.apply(x.coords()), "map application")
    }

    /// `T^n(x)`, through the closed form when the kind has one.
    pub fn apply_power(&self, n: usize, x: &Point) -> Result<Point> {
        if n == 0 {
            return Err(Error::InvalidInput("power must be >= 1".into()));
        }
        self.check_input(x)?;
        match &self.compiled {
            Compiled::Composed(_) => self.iterate_unchecked(n, x),
            closed => closed_power(closed, n, x),
        }
    }

    /// `T^n(x)` by `n`-fold application, ignoring any closed form.
    pub fn apply_power_iterated(&self, n: usize, x: &Point) -> Result<Point> {
        if n == 0 {
            return Err(Error::InvalidInput("power must be >= 1".into()));
        }
        self.check_input(x)?;
        self.iterate_unchecked(n, x)
    }

    fn iterate_unchecked(&self, n: usize, x: &Point) -> Result<Point> {
        if n > MAX_ITERATED_APPLICATIONS {
            return Err(Error::Config(format!(
                "power {n} exceeds the iterated-application cap {MAX_ITERATED_APPLICATIONS}"
            )));
        }
        let mut cur = x.coords().to_vec();
        for k in 1..=n {
            cur = self.compiled.apply(&cur);
            if cur.iter().any(|c| !c.is_finite()) {
                return Err(Error::NumericRange(format!("T^{k} overflowed at {x}")));
            }
        }
        Point::from_computed(cur, "iterated application")
    }

    /// `T^n(x)` per coordinate in log-magnitude form. Only scale and constant
    /// maps have this form; it never overflows.
    pub fn apply_power_log(&self, n: usize, x: &Point) -> Result<Vec<LogMagnitude>> {
        if n == 0 {
            return Err(Error::InvalidInput("power must be >= 1".into()));
        }
        self.check_input(x)?;
        match &self.compiled {
            Compiled::Scale(c) => Ok(x.coords().iter().map(|&v| scale_power_log(*c, n, v)).collect()),
            Compiled::Constant(p) => Ok(p.coords().iter().map(|&v| LogMagnitude::from_value(v)).collect()),
            _ => Err(Error::InvalidInput(
                "log-magnitude power needs a scale or constant map".into(),
            )),
        }
    }

    fn check_sampled_invariants(&self) -> Result<()> {
        let region = self.sampling_region();
        let sample = sampling::stratified(&region, 1000, VALIDATION_SEED, &self.discontinuity_loci())?;
        for x in &sample.points {
            let y = Point::new(self.compiled.apply(x.coords()))
                .map_err(|_| Error::NumericRange(format!("T({x}) is not finite")))?;
            if !domain_contains(&self.domain, &y, DOMAIN_TOL)? {
                return Err(Error::InvalidInput(format!(
                    "map does not send the domain into itself: T({x}) = {y}"
                )));
            }
        }
        if self.has_closed_power() {
            for x in sample.points.iter().step_by((sample.points.len() / 100).max(1)) {
                for n in 1..=8 {
                    let iterated = match self.iterate_unchecked(n, x) {
                        Ok(p) => p,
                        Err(e) if e.is_numeric_range() => continue,
                        Err(e) => return Err(e),
                    };
                    let closed = closed_power(&self.compiled, n, x)?;
                    let err = closed.distance(&iterated)?;
                    let scale = crate::spaces::norm(&iterated).max(1.0);
                    if err > 1e-9 * scale {
                        return Err(Error::InvalidInput(format!(
                            "closed-form T^{n} disagrees with iteration at {x}: {closed} vs {iterated}"
                        )));
                    }
                }
            }
        }
        for p in &self.known_fixed_points {
            if p.dim() != self.dim() {
                return Err(Error::InvalidInput(format!(
                    "fixed point {p} has wrong dimension"
                )));
            }
            let tp = self.apply(p)?;
            let d = tp.distance(p)?;
            if d > 1e-10 {
                return Err(Error::InvalidInput(format!(
                    "{p} is not a fixed point: ||T(p) - p|| = {d:e}"
                )));
            }
        }
        Ok(())
    }

    /// The domain if bounded, otherwise a width-2 window of it (`[-1, 1]` for
    /// the whole line).
    pub fn sampling_region(&self) -> DomainSpec {
        if self.domain.is_bounded() {
            return self.domain.clone();
        }
        match &self.domain {
            DomainSpec::Interval { lo, hi } => match (lo, hi) {
                (Some(l), None) => DomainSpec::interval(*l, l + 2.0),
                (None, Some(h)) => DomainSpec::interval(h - 2.0, *h),
                _ => DomainSpec::interval(-1.0, 1.0),
            },
            other => other.clone(),
        }
    }
}

fn scale_power_log(c: f64, n: usize, v: f64) -> LogMagnitude {
    if c == 0.0 || v == 0.0 {
        return LogMagnitude::ZERO;
    }
    let negative = (v < 0.0) ^ (c < 0.0 && n % 2 == 1);
    LogMagnitude {
        sign: if negative { -1 } else { 1 },
        log10: n as f64 * c.abs().log10() + v.abs().log10(),
    }
}

fn closed_power(compiled: &Compiled, n: usize, x: &Point) -> Result<Point> {
    match compiled {
        Compiled::Affine { a, b } => {
            // T^n via the n-th power of the augmented matrix [[A, b], [0, 1]]
            let d = b.len();
            let mut aug = DMatrix::<f64>::zeros(d + 1, d + 1);
            aug.view_mut((0, 0), (d, d)).copy_from(a);
            aug.view_mut((0, d), (d, 1)).copy_from(b);
            aug[(d, d)] = 1.0;
            let pow = matrix_power(&aug, n);
            let mut xa = DVector::<f64>::zeros(d + 1);
            xa.rows_mut(0, d).copy_from_slice(x.coords());
            xa[d] = 1.0;
            let y = pow * xa;
            Point::from_computed(y.as_slice()[..d].to_vec(), "affine power")
        }
        Compiled::Scale(c) => {
            let direct: Vec<f64> = {
                let cn = c.powi(n.min(i32::MAX as usize) as i32);
                x.coords().iter().map(|v| cn * v).collect()
            };
            if direct.iter().all(|v| v.is_finite()) {
                return Point::from_computed(direct, "scale power");
            }
            let coords = x
                .coords()
                .iter()
                .map(|&v| {
                    scale_power_log(*c, n, v)
                        .to_f64()
                        .ok_or_else(|| Error::NumericRange(format!("{c}^{n} * {v:e} exceeds f64 range")))
                })
                .collect::<Result<Vec<_>>>()?;
            Point::from_computed(coords, "scale power")
        }
        Compiled::SahuStep => {
            if n == 1 {
                Point::from_computed(compiled.apply(x.coords()), "sahu-step")
            } else {
                Point::scalar(0.5)
            }
        }
        Compiled::Constant(p) => Ok(p.clone()),
        Compiled::Composed(_) => unreachable!("composed maps have no closed power"),
    }
}

fn matrix_power(m: &DMatrix<f64>, mut n: usize) -> DMatrix<f64> {
    let mut result = DMatrix::<f64>::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Worst margin of the total-asymptotic inequality at one power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMargin {
    pub n: usize,
    /// `min (rhs - lhs)` over sampled pairs.
    pub worst_margin: f64,
    pub worst_pair: (Point, Point),
    pub violations: usize,
    /// First violating pair in sample order.
    pub first_violation: Option<(Point, Point)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalAsymptoticReport {
    pub per_n: Vec<PowerMargin>,
    pub pairs_per_n: usize,
}

impl TotalAsymptoticReport {
    pub fn total_violations(&self) -> usize {
        self.per_n.iter().map(|m| m.violations).sum()
    }

    pub fn holds(&self) -> bool {
        self.total_violations() == 0
    }
}

/// Checks `||T^n x - T^n y|| <= ||x - y|| + mu_n phi(||x - y||) + l_n` on
/// stratified sample pairs for each `n <= n_max`.
///
/// `region` overrides the sampling region; it is required when the domain is
/// unbounded. A clean report means no violation was found at this
/// resolution, not that the inequality holds everywhere.
pub fn verify_total_asymptotic(
    map: &MappingSpec,
    params: &ParameterSequences,
    n_max: usize,
    samples: usize,
    seed: u64,
    region: Option<&DomainSpec>,
) -> Result<TotalAsymptoticReport> {
    let region = match region {
        Some(r) => r.clone(),
        None if map.domain().is_bounded() => map.domain().clone(),
        None => {
            return Err(Error::Config(
                "unbounded domain: supply an explicit sampling box".into(),
            ))
        }
    };
    if region.dim() != map.dim() {
        return Err(Error::Config(
            "sampling region dimension differs from the map's".into(),
        ));
    }
    let sample = sampling::stratified(&region, samples, seed, &map.discontinuity_loci())?;
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let images = sample
            .points
            .iter()
            .map(|x| map.apply_power(n, x))
            .collect::<Result<Vec<_>>>()?;
        let (mu, ell) = (params.mu(n), params.ell(n));
        let mut worst = (f64::INFINITY, 0usize);
        let mut violations = 0;
        let mut first_violation = None;
        for (k, &(i, j)) in sample.pairs.iter().enumerate() {
            let dist = sample.points[i].distance(&sample.points[j])?;
            let lhs = images[i].distance(&images[j])?;
            let rhs = dist + mu * params.phi.evaluate(dist) + ell;
            let margin = rhs - lhs;
            if margin < worst.0 {
                worst = (margin, k);
            }
            if margin < -INEQUALITY_SLACK {
                violations += 1;
                if first_violation.is_none() {
                    first_violation = Some((sample.points[i].clone(), sample.points[j].clone()));
                }
            }
        }
        let (wi, wj) = sample.pairs[worst.1];
        per_n.push(PowerMargin {
            n,
            worst_margin: worst.0,
            worst_pair: (sample.points[wi].clone(), sample.points[wj].clone()),
            violations,
            first_violation,
        });
    }
    Ok(TotalAsymptoticReport {
        per_n,
        pairs_per_n: sample.pairs.len(),
    })
}

/// A mapping together with the parameter sequences certifying its class.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub map: MappingSpec,
    pub params: ParameterSequences,
}

impl FamilyMember {
    pub fn new(map: MappingSpec, params: ParameterSequences) -> Result<Self> {
        params.validate()?;
        Ok(FamilyMember { map, params })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{PhiSpec, SequenceRule};

    fn s(v: f64) -> Point {
        Point::scalar(v).unwrap()
    }

    #[test]
    fn sahu_step_values() {
        let t = MappingSpec::sahu_step();
        assert_eq!(t.apply(&s(0.3)).unwrap(), s(0.5));
        assert_eq!(t.apply(&s(0.8)).unwrap(), s(0.0));
        assert_eq!(t.apply(&s(0.5)).unwrap(), s(0.5));
        assert_eq!(t.apply_power(2, &s(0.8)).unwrap(), s(0.5));
        assert_eq!(t.apply_power_iterated(2, &s(0.8)).unwrap(), s(0.5));
        assert_eq!(t.discontinuity_loci(), vec![0.5]);
    }

    #[test]
    fn scale_values() {
        let t = MappingSpec::scale(3.0, DomainSpec::real_line()).unwrap();
        assert_eq!(t.apply(&s(1.0)).unwrap(), s(3.0));
        assert_eq!(t.apply_power(3, &s(1.0)).unwrap(), s(27.0));
        assert_eq!(t.apply_power_iterated(3, &s(1.0)).unwrap(), s(27.0));
    }

    #[test]
    fn identity_power() {
        let t = MappingSpec::identity(DomainSpec::cube(2, -5.0, 5.0)).unwrap();
        let x = Point::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(t.apply_power(7, &x).unwrap(), x);
    }

    #[test]
    fn outside_domain_is_domain_error() {
        let t = MappingSpec::sahu_step();
        assert!(matches!(t.apply(&s(1.5)), Err(Error::Domain(_))));
        assert!(matches!(t.apply_power(3, &s(-0.1)), Err(Error::Domain(_))));
    }

    #[test]
    fn overflow_is_numeric_range_error() {
        let t = MappingSpec::scale(3.0, DomainSpec::real_line()).unwrap();
        let err = t.apply_power(700, &s(1.0)).unwrap_err();
        assert!(err.is_numeric_range(), "{err}");
        let err = t.apply_power_iterated(700, &s(1.0)).unwrap_err();
        assert!(err.is_numeric_range(), "{err}");
        // tiny inputs survive through the log path
        let v = t.apply_power(700, &s(1e-300)).unwrap();
        let expect = 700.0 * 3f64.log10() - 300.0;
        assert!((v.coords()[0].log10() - expect).abs() < 1e-12);
    }

    #[test]
    fn log_power_matches_direct() {
        let t = MappingSpec::scale(-3.0, DomainSpec::real_line()).unwrap();
        let lm = t.apply_power_log(5, &s(0.5)).unwrap()[0];
        assert_eq!(lm.sign, -1);
        assert!((lm.to_f64().unwrap() - (-121.5)).abs() < 1e-12);
        let big = t.apply_power_log(1000, &s(1.0)).unwrap()[0];
        assert_eq!(big.sign, 1);
        assert!(big.to_f64().is_none());
    }

    #[test]
    fn non_self_map_rejected() {
        let err = MappingSpec::new(
            MapKind::Scale { factor: 3.0 },
            DomainSpec::unit_interval(),
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)), "{err}");
    }

    #[test]
    fn wrong_fixed_point_rejected() {
        let err = MappingSpec::new(MapKind::SahuStep, DomainSpec::unit_interval(), vec![s(0.2)]).unwrap_err();
        assert!(err.to_string().contains("not a fixed point"));
    }

    #[test]
    fn composed_map_iterates() {
        let kind = MapKind::Composed {
            maps: vec![MapKind::Scale { factor: 0.5 }, MapKind::SahuStep],
        };
        let t = MappingSpec::new(kind, DomainSpec::unit_interval(), vec![s(0.5)]).unwrap();
        assert!(!t.has_closed_power());
        assert_eq!(t.apply(&s(1.0)).unwrap(), s(0.5));
        assert_eq!(t.apply_power(3, &s(0.9)).unwrap(), s(0.5));
    }

    #[test]
    fn affine_closed_power_matches_iteration() {
        let p = Point::new(vec![0.2, -0.1]).unwrap();
        let t = MappingSpec::affine_about(
            vec![vec![0.5, 0.2], vec![-0.1, 0.6]],
            &p,
            DomainSpec::cube(2, -1.0, 1.0),
        )
        .unwrap();
        let x = Point::new(vec![0.9, -0.7]).unwrap();
        for n in [1, 2, 5, 13, 40] {
            let a = t.apply_power(n, &x).unwrap();
            let b = t.apply_power_iterated(n, &x).unwrap();
            assert!(a.distance(&b).unwrap() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn total_asymptotic_examples() {
        let sahu = MappingSpec::sahu_step();
        let params = ParameterSequences::new(
            SequenceRule::Zero,
            SequenceRule::geometric(1.0, 0.5),
            PhiSpec::identity(),
        );
        let rep = verify_total_asymptotic(&sahu, &params, 6, 2000, 3, None).unwrap();
        assert!(rep.holds(), "{rep:?}");

        let id = MappingSpec::identity(DomainSpec::cube(2, 0.0, 1.0)).unwrap();
        let rep = verify_total_asymptotic(&id, &ParameterSequences::nonexpansive(), 4, 500, 3, None).unwrap();
        assert!(rep.holds());

        let triple = MappingSpec::scale(3.0, DomainSpec::real_line()).unwrap();
        assert!(matches!(
            verify_total_asymptotic(&triple, &ParameterSequences::nonexpansive(), 1, 100, 0, None),
            Err(Error::Config(_))
        ));
        let rep = verify_total_asymptotic(
            &triple,
            &ParameterSequences::nonexpansive(),
            2,
            100,
            0,
            Some(&DomainSpec::unit_interval()),
        )
        .unwrap();
        assert!(!rep.holds());
        assert!(rep.per_n[0].first_violation.is_some());
    }
}
