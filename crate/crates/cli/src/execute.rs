//! Runs validated scenarios and writes their artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use fixpoint_core::analysis::{
    convexity_audit, counterexample_demo, estimate_eta, estimate_intermediate_defect, sequence_bound,
    CounterexampleRow,
};
use fixpoint_core::export::{
    fmt17, write_counterexample_csv, write_envelope_csv, write_json, write_table_csv, write_trace_csv,
};
use fixpoint_core::iteration::FejerReport;
use fixpoint_core::{
    check_fejer_bound, run, verify_total_asymptotic, ConvexityFunction, Error, IterationConfig,
    IterationTrace, Point,
};

use crate::scenario::{CertifyPlan, LemmaAuditPlan, Payload, Scenario, ScenarioKind};

/// Convexity margins below this count as a failed instance.
pub const CONVEXITY_SLACK: f64 = 1e-10;

/// Slack allowed when comparing an estimated `eta` against a declared `k_n`.
pub const DECLARED_K_SLACK: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("{name}: {source}")]
    Core {
        name: String,
        #[source]
        source: Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExecError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExecError::Io { .. } => 1,
            ExecError::Core { source, .. } => match source.root() {
                Error::NumericRange(_) | Error::DivisionGuard(_) => 3,
                _ => 2,
            },
        }
    }
}

/// Result of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub kind: ScenarioKind,
    /// `converged`, `max-iters`, `pass` or `violation`.
    pub stop: String,
    pub metric: &'static str,
    pub value: f64,
    pub violation: bool,
    pub files: Vec<PathBuf>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violation {
            4
        } else {
            0
        }
    }

    /// One-line report for the terminal.
    pub fn summary_line(&self) -> String {
        format!(
            "{} [{}] stop={} {}={:.6e} time={:.3}s",
            self.name,
            self.kind.as_str(),
            self.stop,
            self.metric,
            self.value,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Resolves a scenario's output path against `out_dir`.
pub fn output_path(scenario: &Scenario, out_dir: &Path) -> PathBuf {
    out_dir.join(&scenario.output_path)
}

fn write_file(path: &Path, bytes: Vec<u8>) -> Result<(), ExecError> {
    let io = |source| ExecError::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

struct Rendered {
    stop: String,
    metric: &'static str,
    value: f64,
    violation: bool,
    files: Vec<(PathBuf, Vec<u8>)>,
}

pub fn execute(scenario: &Scenario, out_dir: &Path) -> Result<Outcome, ExecError> {
    let start = Instant::now();
    let base = output_path(scenario, out_dir);
    let core = |source| ExecError::Core {
        name: scenario.name.clone(),
        source,
    };
    let rendered = match &scenario.payload {
        Payload::Iterate(cfg) => render_iterate(scenario, cfg, &base),
        Payload::Certify(plan) => render_certify(scenario, plan, &base),
        Payload::LemmaAudit(plan) => render_lemma_audit(scenario, plan, &base),
        Payload::Counterexample { rows } => render_counterexample(*rows, &base),
    }
    .map_err(core)?;
    let mut files = Vec::with_capacity(rendered.files.len());
    for (path, bytes) in rendered.files {
        write_file(&path, bytes)?;
        files.push(path);
    }
    Ok(Outcome {
        name: scenario.name.clone(),
        kind: scenario.kind,
        stop: rendered.stop,
        metric: rendered.metric,
        value: rendered.value,
        violation: rendered.violation,
        files,
        elapsed: start.elapsed(),
    })
}

#[derive(Serialize)]
struct IterateDocument<'a> {
    name: &'a str,
    m: usize,
    max_iters: usize,
    residual_tol: f64,
    reference_point: Option<&'a Point>,
    trace: &'a IterationTrace,
    fejer: Option<&'a FejerReport>,
}

fn render_iterate(
    scenario: &Scenario,
    cfg: &IterationConfig,
    base: &Path,
) -> fixpoint_core::Result<Rendered> {
    let trace = run(cfg)?;
    let fejer = match cfg.reference_point {
        Some(_) => Some(check_fejer_bound(&trace, cfg)?),
        None => None,
    };
    let mut csv = Vec::new();
    write_trace_csv(&trace, &mut csv)?;
    let mut json = Vec::new();
    write_json(
        &IterateDocument {
            name: &scenario.name,
            m: cfg.m(),
            max_iters: cfg.max_iters,
            residual_tol: cfg.residual_tol,
            reference_point: cfg.reference_point.as_ref(),
            trace: &trace,
            fejer: fejer.as_ref(),
        },
        &mut json,
    )?;
    Ok(Rendered {
        stop: trace.stop.as_str().to_string(),
        metric: "final_max_residual",
        value: trace.final_max_residual(),
        violation: fejer.as_ref().is_some_and(|f| !f.holds()),
        files: vec![(base.to_owned(), csv), (base.with_extension("json"), json)],
    })
}

#[derive(Serialize)]
struct CertifyRow {
    n: usize,
    worst_margin: f64,
    violations: usize,
    eta_hat: f64,
    a_n: f64,
    k_n: Option<f64>,
    a_n_hat: f64,
    sigma_n_hat: f64,
}

#[derive(Serialize)]
struct CertifyDocument<'a> {
    name: &'a str,
    seed: u64,
    samples: usize,
    region_explicit: bool,
    pairs_per_n: usize,
    total_violations: usize,
    eta_above_declared: Vec<usize>,
    rows: &'a [CertifyRow],
}

fn render_certify(scenario: &Scenario, plan: &CertifyPlan, base: &Path) -> fixpoint_core::Result<Rendered> {
    let seed = scenario.seed;
    let report = verify_total_asymptotic(
        &plan.map,
        &plan.params,
        plan.n_max,
        plan.samples,
        seed,
        Some(&plan.region),
    )?;
    let mut rows = Vec::with_capacity(plan.n_max);
    let mut eta_above_declared = Vec::new();
    for margin in &report.per_n {
        let n = margin.n;
        let a_n = plan.params.a(n);
        let eta = estimate_eta(&plan.map, n, a_n, &plan.region, plan.samples, seed)?;
        let defect = estimate_intermediate_defect(&plan.map, n, &plan.region, plan.samples, seed)?;
        let k_n = plan.declared_k.as_ref().map(|k| k.value(n));
        if k_n.is_some_and(|k| eta.eta_hat > k + DECLARED_K_SLACK) {
            eta_above_declared.push(n);
        }
        rows.push(CertifyRow {
            n,
            worst_margin: margin.worst_margin,
            violations: margin.violations,
            eta_hat: eta.eta_hat,
            a_n,
            k_n,
            a_n_hat: defect.a_n_hat,
            sigma_n_hat: defect.sigma_n_hat,
        });
    }
    let total = report.total_violations();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt17(r.worst_margin),
                r.violations.to_string(),
                fmt17(r.eta_hat),
                fmt17(r.a_n),
                r.k_n.map(fmt17).unwrap_or_default(),
                fmt17(r.a_n_hat),
                fmt17(r.sigma_n_hat),
            ]
        })
        .collect();
    let mut csv = Vec::new();
    write_table_csv(
        &[
            "n",
            "worst_margin",
            "violations",
            "eta_hat",
            "a_n",
            "k_n",
            "a_n_hat",
            "sigma_n_hat",
        ],
        &table,
        &mut csv,
    )?;
    let violation = total > 0 || !eta_above_declared.is_empty();
    let mut json = Vec::new();
    write_json(
        &CertifyDocument {
            name: &scenario.name,
            seed,
            samples: plan.samples,
            region_explicit: plan.explicit_region,
            pairs_per_n: report.pairs_per_n,
            total_violations: total,
            eta_above_declared,
            rows: &rows,
        },
        &mut json,
    )?;
    Ok(Rendered {
        stop: if violation { "violation" } else { "pass" }.into(),
        metric: "violations",
        value: total as f64,
        violation,
        files: vec![(base.to_owned(), csv), (base.with_extension("json"), json)],
    })
}

#[derive(Serialize)]
struct LemmaDocument<'a> {
    name: &'a str,
    seed: u64,
    a1: f64,
    horizon: usize,
    max_value: f64,
    final_value: f64,
    exp_bound: f64,
    settled_at: Option<usize>,
    convexity_instances: usize,
    convexity_min_margin: Option<f64>,
    convexity_worst_instance: Option<usize>,
}

fn render_lemma_audit(
    scenario: &Scenario,
    plan: &LemmaAuditPlan,
    base: &Path,
) -> fixpoint_core::Result<Rendered> {
    let env = sequence_bound(plan.a1, &plan.alpha, &plan.b, plan.horizon)?;
    let audit = if plan.convexity_instances > 0 {
        Some(convexity_audit(
            plan.convexity_instances,
            plan.convexity_max_dim,
            plan.convexity_max_points,
            &ConvexityFunction::Square,
            scenario.seed,
        )?)
    } else {
        None
    };
    let violation = audit.as_ref().is_some_and(|a| a.min_margin < -CONVEXITY_SLACK);
    let mut csv = Vec::new();
    write_envelope_csv(&env, &mut csv)?;
    let mut json = Vec::new();
    write_json(
        &LemmaDocument {
            name: &scenario.name,
            seed: scenario.seed,
            a1: plan.a1,
            horizon: plan.horizon,
            max_value: env.max_value(),
            final_value: env.final_value(),
            exp_bound: env.exp_bound,
            settled_at: env.settled_at,
            convexity_instances: plan.convexity_instances,
            convexity_min_margin: audit.as_ref().map(|a| a.min_margin),
            convexity_worst_instance: audit.as_ref().map(|a| a.worst_instance),
        },
        &mut json,
    )?;
    Ok(Rendered {
        stop: if violation { "violation" } else { "pass" }.into(),
        metric: "max_value",
        value: env.max_value(),
        violation,
        files: vec![(base.to_owned(), csv), (base.with_extension("json"), json)],
    })
}

fn render_counterexample(rows: usize, base: &Path) -> fixpoint_core::Result<Rendered> {
    let table: Vec<CounterexampleRow> = counterexample_demo(rows)?;
    let mut csv = Vec::new();
    write_counterexample_csv(&table, &mut csv)?;
    Ok(Rendered {
        stop: "pass".into(),
        metric: "image_diff_log10",
        value: table.last().map_or(f64::NEG_INFINITY, |r| r.image_diff_log10),
        violation: false,
        files: vec![(base.to_owned(), csv)],
    })
}

/// `name, kind, stop, metric, value`, one row per outcome.
pub fn write_summary(outcomes: &[Outcome], path: &Path) -> Result<(), ExecError> {
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.name.clone(),
                o.kind.as_str().to_string(),
                o.stop.clone(),
                o.metric.to_string(),
                fmt17(o.value),
            ]
        })
        .collect();
    let mut buf = Vec::new();
    write_table_csv(&["name", "kind", "stop", "metric", "value"], &rows, &mut buf).map_err(|source| {
        ExecError::Core {
            name: "summary".into(),
            source,
        }
    })?;
    write_file(path, buf)
}
