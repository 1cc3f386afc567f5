use crate::error::{Error, Result};
use crate::mappings::{MappingSpec, DOMAIN_TOL};
use crate::params::SequenceRule;
use crate::sampling::{self, Sample};
use crate::spaces::{domain_contains, DomainSpec, Point};

/// Pairs with `||x - y|| + a_n` below this are skipped by the eta estimator.
pub const DIVISION_GUARD: f64 = 1e-14;

/// Slack on the sample-level inclusion chains.
const CHAIN_SLACK: f64 = 1e-9;

/// Lower estimate of the nearly Lipschitz constant
/// `eta(T^n) = sup ||T^n x - T^n y|| / (||x - y|| + a_n)` at one power.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaEstimate {
    pub n: usize,
    pub eta_hat: f64,
    pub a_n: f64,
    /// Declared `k_n`, when one was supplied.
    pub k_n: Option<f64>,
    pub sample_count: usize,
    /// Pairs dropped by the division guard.
    pub skipped: usize,
    pub witness: (Point, Point),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NearlyLipschitzReport {
    pub entries: Vec<EtaEstimate>,
}

impl NearlyLipschitzReport {
    /// Powers whose estimate differs from 1 by more than `tol`. A map labelled
    /// nearly nonexpansive should have none; the step map has `eta = 0` from
    /// `n = 2` on.
    pub fn powers_off_unity(&self, tol: f64) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| (e.eta_hat - 1.0).abs() > tol)
            .map(|e| e.n)
            .collect()
    }
}

fn images(map: &MappingSpec, n: usize, sample: &Sample) -> Result<Vec<Point>> {
    sample.points.iter().map(|x| map.apply_power(n, x)).collect()
}

fn resolve_region(map: &MappingSpec, region: &DomainSpec) -> Result<()> {
    if region.dim() != map.dim() {
        return Err(Error::Config("region dimension differs from the map's".into()));
    }
    if !region.is_bounded() {
        return Err(Error::Config("estimators need a bounded region".into()));
    }
    Ok(())
}

/// Max of the eta ratio over the pairs of a fixed sample. Ties keep the
/// lowest pair index.
pub fn eta_over_sample(map: &MappingSpec, n: usize, a_n: f64, sample: &Sample) -> Result<EtaEstimate> {
    if !(a_n.is_finite() && a_n >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "a_n = {a_n} must be finite and >= 0"
        )));
    }
    let imgs = images(map, n, sample)?;
    let mut best: Option<(f64, usize)> = None;
    let mut skipped = 0;
    for (k, &(i, j)) in sample.pairs.iter().enumerate() {
        let denom = sample.points[i].distance(&sample.points[j])? + a_n;
        if denom < DIVISION_GUARD {
            skipped += 1;
            continue;
        }
        let ratio = imgs[i].distance(&imgs[j])? / denom;
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, k));
        }
    }
    let (eta_hat, k) = best.ok_or_else(|| {
        Error::DivisionGuard(format!(
            "all {} pairs have ||x - y|| + a_n < {DIVISION_GUARD:e}",
            sample.pairs.len()
        ))
    })?;
    let (i, j) = sample.pairs[k];
    Ok(EtaEstimate {
        n,
        eta_hat,
        a_n,
        k_n: None,
        sample_count: sample.pairs.len() - skipped,
        skipped,
        witness: (sample.points[i].clone(), sample.points[j].clone()),
    })
}

/// Estimates `eta(T^n)` from a stratified sample of `region`.
pub fn estimate_eta(
    map: &MappingSpec,
    n: usize,
    a_n: f64,
    region: &DomainSpec,
    samples: usize,
    seed: u64,
) -> Result<EtaEstimate> {
    resolve_region(map, region)?;
    let sample = sampling::stratified(region, samples, seed, &map.discontinuity_loci())?;
    eta_over_sample(map, n, a_n, &sample)
}

/// Sampled `a_n = sup (||T^n x - T^n y|| - ||x - y||)` and
/// `sigma_n = max(0, a_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateDefect {
    pub n: usize,
    pub a_n_hat: f64,
    pub sigma_n_hat: f64,
    pub witness: (Point, Point),
}

fn defect_over_sample(map: &MappingSpec, n: usize, sample: &Sample) -> Result<IntermediateDefect> {
    let imgs = images(map, n, sample)?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, &(i, j)) in sample.pairs.iter().enumerate() {
        let v = imgs[i].distance(&imgs[j])? - sample.points[i].distance(&sample.points[j])?;
        if v > best.0 {
            best = (v, k);
        }
    }
    let (i, j) = sample.pairs[best.1];
    Ok(IntermediateDefect {
        n,
        a_n_hat: best.0,
        sigma_n_hat: best.0.max(0.0),
        witness: (sample.points[i].clone(), sample.points[j].clone()),
    })
}

pub fn estimate_intermediate_defect(
    map: &MappingSpec,
    n: usize,
    region: &DomainSpec,
    samples: usize,
    seed: u64,
) -> Result<IntermediateDefect> {
    resolve_region(map, region)?;
    let sample = sampling::stratified(region, samples, seed, &map.discontinuity_loci())?;
    defect_over_sample(map, n, &sample)
}

/// Outcome of a sample-level inclusion chain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainReport {
    pub powers: usize,
    pub pairs_per_power: usize,
    /// Pairs where the class hypothesis itself failed.
    pub premise_violations: usize,
    /// Pairs (or powers) where the hypothesis held but the conclusion failed.
    pub violations: usize,
    /// `min (rhs - lhs)` of the conclusion.
    pub worst_margin: f64,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.premise_violations == 0 && self.violations == 0
    }
}

fn sample_inside_domain(map: &MappingSpec, samples: usize, seed: u64) -> Result<Sample> {
    let region = map.domain();
    if !region.is_bounded() {
        return Err(Error::Config("inclusion chains need a bounded domain".into()));
    }
    let sample = sampling::stratified(region, samples, seed, &map.discontinuity_loci())?;
    debug_assert!(sample
        .points
        .iter()
        .all(|p| domain_contains(region, p, DOMAIN_TOL).unwrap_or(false)));
    Ok(sample)
}

/// Asymptotically nonexpansive with factors `mu_n` on a bounded domain
/// implies `||T^n x - T^n y|| <= ||x - y|| + diam(K) mu_n`.
///
/// Checks the hypothesis `||T^n x - T^n y|| <= (1 + mu_n) ||x - y||` and the
/// conclusion on every sampled pair for `n <= n_max`.
pub fn remark1_chain(
    map: &MappingSpec,
    mu: &SequenceRule,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<ChainReport> {
    mu.validate()?;
    let sample = sample_inside_domain(map, samples, seed)?;
    let diam = map.domain().diameter().bounded().expect("bounded domain");
    let mut report = ChainReport {
        powers: n_max,
        pairs_per_power: sample.pairs.len(),
        worst_margin: f64::INFINITY,
        ..Default::default()
    };
    for n in 1..=n_max {
        let imgs = images(map, n, &sample)?;
        let mu_n = mu.value(n);
        for &(i, j) in &sample.pairs {
            let dist = sample.points[i].distance(&sample.points[j])?;
            let lhs = imgs[i].distance(&imgs[j])?;
            if lhs > (1.0 + mu_n) * dist + 1e-12 {
                report.premise_violations += 1;
                continue;
            }
            let margin = dist + diam * mu_n - lhs;
            report.worst_margin = report.worst_margin.min(margin);
            if margin < -CHAIN_SLACK {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

/// Nearly asymptotically nonexpansive on a bounded domain implies
/// `sup (||T^n x - T^n y|| - ||x - y||) <= (eta_n - 1) diam(K) + eta_n a_n`.
///
/// For each `n`, `eta_n` is the declared `k_n` when given (the nearly
/// Lipschitz inequality with `k_n` is then checked pair by pair as the
/// hypothesis), otherwise the sampled estimate. The implication presumes
/// `eta_n >= 1`, so smaller values are raised to 1; a sampled estimate is a
/// lower bound of the true constant, which for this class is at least 1.
pub fn remark2_chain(
    map: &MappingSpec,
    a: &SequenceRule,
    k: Option<&SequenceRule>,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<ChainReport> {
    a.validate()?;
    let sample = sample_inside_domain(map, samples, seed)?;
    let diam = map.domain().diameter().bounded().expect("bounded domain");
    let mut report = ChainReport {
        powers: n_max,
        pairs_per_power: sample.pairs.len(),
        worst_margin: f64::INFINITY,
        ..Default::default()
    };
    for n in 1..=n_max {
        let a_n = a.value(n);
        let eta = match k {
            Some(rule) => {
                let k_n = rule.value(n);
                let imgs = images(map, n, &sample)?;
                for &(i, j) in &sample.pairs {
                    let dist = sample.points[i].distance(&sample.points[j])?;
                    if imgs[i].distance(&imgs[j])? > k_n * (dist + a_n) + 1e-12 {
                        report.premise_violations += 1;
                    }
                }
                k_n
            }
            None => eta_over_sample(map, n, a_n, &sample)?.eta_hat,
        }
        .max(1.0);
        let defect = defect_over_sample(map, n, &sample)?;
        let margin = (eta - 1.0) * diam + eta * a_n - defect.a_n_hat;
        report.worst_margin = report.worst_margin.min(margin);
        if margin < -CHAIN_SLACK {
            report.violations += 1;
        }
    }
    Ok(report)
}
