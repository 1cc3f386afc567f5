//! Scenario files.
//!
//! A scenario file is TOML holding an array of `[[scenario]]` tables. Each
//! has a `name`, a `kind` (`iterate`, `certify`, `lemma-audit` or
//! `counterexample`), an `output` path, an optional `seed`, and exactly one
//! payload table named after its kind (`lemma-audit` uses `lemma_audit`).
//! See `scenarios/README.md` for the full grammar.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use fixpoint_core::{
    DomainSpec, FamilyMember, IterationConfig, MapKind, MappingSpec, ParameterSequences, Point, SequenceRule,
    WeightSchedule,
};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: parse error: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {field}: {message}")]
    Invalid {
        path: PathBuf,
        field: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Iterate,
    Certify,
    LemmaAudit,
    Counterexample,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Iterate => "iterate",
            ScenarioKind::Certify => "certify",
            ScenarioKind::LemmaAudit => "lemma-audit",
            ScenarioKind::Counterexample => "counterexample",
        }
    }

    fn table(self) -> &'static str {
        match self {
            ScenarioKind::LemmaAudit => "lemma_audit",
            other => other.as_str(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    scenario: Vec<RawScenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    kind: ScenarioKind,
    output: PathBuf,
    seed: Option<u64>,
    iterate: Option<RawIterate>,
    certify: Option<RawCertify>,
    lemma_audit: Option<RawLemmaAudit>,
    counterexample: Option<RawCounterexample>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    map: MapKind,
    #[serde(default)]
    fixed_points: Vec<Point>,
    #[serde(default)]
    params: ParameterSequences,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIterate {
    domain: DomainSpec,
    family: Vec<RawMember>,
    x1: Point,
    max_iters: usize,
    residual_tol: f64,
    reference_point: Option<Point>,
    #[serde(default)]
    weights: WeightSchedule,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertify {
    map: MapKind,
    domain: DomainSpec,
    #[serde(default)]
    fixed_points: Vec<Point>,
    #[serde(default)]
    params: ParameterSequences,
    region: Option<DomainSpec>,
    n_max: usize,
    samples: usize,
    declared_k: Option<SequenceRule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLemmaAudit {
    a1: f64,
    alpha: SequenceRule,
    b: SequenceRule,
    horizon: usize,
    #[serde(default)]
    convexity_instances: usize,
    #[serde(default = "default_max_dim")]
    convexity_max_dim: usize,
    #[serde(default = "default_max_points")]
    convexity_max_points: usize,
}

fn default_max_dim() -> usize {
    8
}

fn default_max_points() -> usize {
    5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCounterexample {
    rows: usize,
}

/// Validated inputs of a `certify` scenario.
#[derive(Debug, Clone)]
pub struct CertifyPlan {
    pub map: MappingSpec,
    pub params: ParameterSequences,
    pub region: DomainSpec,
    pub explicit_region: bool,
    pub n_max: usize,
    pub samples: usize,
    pub declared_k: Option<SequenceRule>,
}

#[derive(Debug, Clone)]
pub struct LemmaAuditPlan {
    pub a1: f64,
    pub alpha: SequenceRule,
    pub b: SequenceRule,
    pub horizon: usize,
    pub convexity_instances: usize,
    pub convexity_max_dim: usize,
    pub convexity_max_points: usize,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Iterate(IterationConfig),
    Certify(Box<CertifyPlan>),
    LemmaAudit(LemmaAuditPlan),
    Counterexample { rows: usize },
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub payload: Payload,
    pub output_path: PathBuf,
    pub seed: u64,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub max_iters: Option<usize>,
    pub residual_tol: Option<f64>,
    pub seed: Option<u64>,
    /// Used only when neither the flag nor the file sets a seed.
    pub fallback_seed: Option<u64>,
}

/// Loads and validates every scenario in `path` without overrides.
pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>, LoadError> {
    load_scenarios_with(path, &Overrides::default())
}

pub fn load_scenarios_with(path: &Path, overrides: &Overrides) -> Result<Vec<Scenario>, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_scenarios(&text, path, overrides)
}

/// Loads a scenario file, or every `*.toml` file (sorted) in a directory.
pub fn load_path(path: &Path, overrides: &Overrides) -> Result<Vec<Scenario>, LoadError> {
    let io = |source| LoadError::Io {
        path: path.to_owned(),
        source,
    };
    if !path.is_dir() {
        return load_scenarios_with(path, overrides);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.extension().is_some_and(|e| e == "toml") && p.is_file());
    files.sort();
    let mut all: Vec<Scenario> = Vec::new();
    for f in files {
        for s in load_scenarios_with(&f, overrides)? {
            if all.iter().any(|o| o.name == s.name) {
                return Err(LoadError::Invalid {
                    path: f.clone(),
                    field: format!("scenario \"{}\".name", s.name),
                    message: "name already used by another file in this directory".into(),
                });
            }
            all.push(s);
        }
    }
    Ok(all)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

pub fn parse_scenarios(text: &str, path: &Path, overrides: &Overrides) -> Result<Vec<Scenario>, LoadError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        LoadError::Parse {
            path: path.to_owned(),
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.scenario.len());
    for (idx, s) in raw.scenario.into_iter().enumerate() {
        let invalid = |field: &str, message: String| LoadError::Invalid {
            path: path.to_owned(),
            field: format!("scenario[{idx}] \"{}\".{field}", s.name),
            message,
        };
        if s.name.is_empty()
            || !s
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(invalid(
                "name",
                "must be a non-empty identifier ([A-Za-z0-9_-])".into(),
            ));
        }
        if !seen.insert(s.name.clone()) {
            return Err(invalid("name", "duplicate scenario name".into()));
        }
        let present: Vec<&str> = [
            s.iterate.is_some().then_some("iterate"),
            s.certify.is_some().then_some("certify"),
            s.lemma_audit.is_some().then_some("lemma_audit"),
            s.counterexample.is_some().then_some("counterexample"),
        ]
        .into_iter()
        .flatten()
        .collect();
        if present != [s.kind.table()] {
            return Err(invalid(
                s.kind.table(),
                format!(
                    "kind \"{}\" needs exactly one [{}] payload table, found {:?}",
                    s.kind.as_str(),
                    s.kind.table(),
                    present
                ),
            ));
        }
        let seed = overrides.seed.or(s.seed).or(overrides.fallback_seed).unwrap_or(0);
        let payload = match s.kind {
            ScenarioKind::Iterate => {
                let raw = s.iterate.as_ref().expect("checked above");
                Payload::Iterate(build_iterate(raw, overrides).map_err(|(f, m)| invalid(&f, m))?)
            }
            ScenarioKind::Certify => {
                let raw = s.certify.as_ref().expect("checked above");
                Payload::Certify(Box::new(build_certify(raw).map_err(|(f, m)| invalid(&f, m))?))
            }
            ScenarioKind::LemmaAudit => {
                let raw = s.lemma_audit.as_ref().expect("checked above");
                Payload::LemmaAudit(build_lemma_audit(raw).map_err(|(f, m)| invalid(&f, m))?)
            }
            ScenarioKind::Counterexample => {
                let rows = s.counterexample.as_ref().expect("checked above").rows;
                if rows == 0 {
                    return Err(invalid("counterexample.rows", "must be >= 1".into()));
                }
                Payload::Counterexample { rows }
            }
        };
        out.push(Scenario {
            name: s.name,
            kind: s.kind,
            payload,
            output_path: s.output,
            seed,
        });
    }
    Ok(out)
}

type FieldError = (String, String);

fn field<T>(name: &str, r: fixpoint_core::Result<T>) -> Result<T, FieldError> {
    r.map_err(|e| (name.to_string(), e.to_string()))
}

fn build_iterate(raw: &RawIterate, overrides: &Overrides) -> Result<IterationConfig, FieldError> {
    field("iterate.domain", raw.domain.validate())?;
    let mut family = Vec::with_capacity(raw.family.len());
    for (i, m) in raw.family.iter().enumerate() {
        let mut fixed = m.fixed_points.clone();
        if let Some(p) = &raw.reference_point {
            if !fixed.contains(p) {
                fixed.push(p.clone());
            }
        }
        let map = field(
            &format!("iterate.family[{i}].map"),
            MappingSpec::new(m.map.clone(), raw.domain.clone(), fixed),
        )?;
        family.push(field(
            &format!("iterate.family[{i}].params"),
            FamilyMember::new(map, m.params.clone()),
        )?);
    }
    field(
        "iterate.weights (gamma1, gamma2, weights)",
        raw.weights.validate(family.len()),
    )?;
    field(
        "iterate",
        IterationConfig::new(
            family,
            raw.weights.clone(),
            raw.x1.clone(),
            overrides.max_iters.unwrap_or(raw.max_iters),
            overrides.residual_tol.unwrap_or(raw.residual_tol),
            raw.reference_point.clone(),
        ),
    )
}

fn build_certify(raw: &RawCertify) -> Result<CertifyPlan, FieldError> {
    let map = field(
        "certify.map",
        MappingSpec::new(raw.map.clone(), raw.domain.clone(), raw.fixed_points.clone()),
    )?;
    field("certify.params", raw.params.validate())?;
    if let Some(k) = &raw.declared_k {
        field("certify.declared_k", k.validate())?;
    }
    let (region, explicit_region) = match &raw.region {
        Some(r) => {
            field("certify.region", r.validate())?;
            if !r.is_bounded() || r.dim() != map.dim() {
                return Err((
                    "certify.region".into(),
                    format!("must be bounded and of dimension {}", map.dim()),
                ));
            }
            (r.clone(), true)
        }
        None if raw.domain.is_bounded() => (raw.domain.clone(), false),
        None => {
            return Err((
                "certify.region".into(),
                "unbounded domain: supply an explicit sampling region".into(),
            ))
        }
    };
    if raw.n_max == 0 {
        return Err(("certify.n_max".into(), "must be >= 1".into()));
    }
    if raw.samples < 2 {
        return Err(("certify.samples".into(), "must be >= 2".into()));
    }
    Ok(CertifyPlan {
        map,
        params: raw.params.clone(),
        region,
        explicit_region,
        n_max: raw.n_max,
        samples: raw.samples,
        declared_k: raw.declared_k.clone(),
    })
}

fn build_lemma_audit(raw: &RawLemmaAudit) -> Result<LemmaAuditPlan, FieldError> {
    if !(raw.a1.is_finite() && raw.a1 >= 0.0) {
        return Err(("lemma_audit.a1".into(), "must be finite and >= 0".into()));
    }
    field("lemma_audit.alpha", raw.alpha.certify_summable("alpha").map(drop))?;
    field("lemma_audit.b", raw.b.certify_summable("b").map(drop))?;
    if raw.horizon == 0 {
        return Err(("lemma_audit.horizon".into(), "must be >= 1".into()));
    }
    if raw.convexity_max_dim == 0 || raw.convexity_max_points < 2 {
        return Err((
            "lemma_audit.convexity_max_dim".into(),
            "need max_dim >= 1 and max_points >= 2".into(),
        ));
    }
    Ok(LemmaAuditPlan {
        a1: raw.a1,
        alpha: raw.alpha.clone(),
        b: raw.b.clone(),
        horizon: raw.horizon,
        convexity_instances: raw.convexity_instances,
        convexity_max_dim: raw.convexity_max_dim,
        convexity_max_points: raw.convexity_max_points,
    })
}
