use fixpoint_core::catalog;
use fixpoint_core::export::{read_trace_csv, write_trace_csv};
use fixpoint_core::iteration::envelope_terms;
use fixpoint_core::{
    check_fejer_bound, domain_contains, run, FamilyMember, IterationConfig, IterationTrace, MappingSpec,
    ParameterSequences, WeightRule, WeightSchedule,
};

fn convergent_configs() -> Vec<(&'static str, IterationConfig)> {
    vec![
        (
            "two_contractions",
            catalog::two_contractions_config(10_000, 1e-6).unwrap(),
        ),
        (
            "step_identity",
            catalog::step_and_identity_config(catalog::step_map_params(), 0.9, 10_000, 1e-9).unwrap(),
        ),
        (
            "step_identity_geometric",
            catalog::step_and_identity_config(catalog::geometric_params(), 0.1, 10_000, 1e-9).unwrap(),
        ),
    ]
}

fn check_trace_invariants(name: &str, cfg: &IterationConfig, trace: &IterationTrace) {
    let domain = cfg.family[0].map.domain();
    let gamma2 = cfg.weights.gamma2;
    assert!(trace.records.len() <= cfg.max_iters);
    for (k, rec) in trace.records.iter().enumerate() {
        assert!(
            domain_contains(domain, &rec.x, 1e-9).unwrap(),
            "{name}: x_{} left K",
            rec.n
        );
        let next = trace.next_point(k);
        let recomputed = next.distance(&rec.x).unwrap();
        assert!(
            (rec.step_diff - recomputed).abs() <= 1e-12,
            "{name}: step_diff at {}",
            rec.n
        );
        let sum: f64 = rec.residuals.iter().sum();
        assert!(
            rec.step_diff <= gamma2 * sum + 1e-9,
            "{name}: step bound at {}",
            rec.n
        );
        assert!(rec.residuals.iter().all(|r| r.is_finite() && *r >= 0.0));
        if let (Some(d), Some(bound)) = (rec.dist_to_p, rec.theorem31_bound) {
            assert!(
                d <= bound * (1.0 + 1e-12),
                "{name}: {d} > envelope {bound} at {}",
                rec.n
            );
        }
    }
    assert!(domain_contains(domain, &trace.final_point, 1e-9).unwrap());
}

#[test]
fn shipped_scenarios_keep_trace_invariants() {
    for (name, cfg) in convergent_configs() {
        let trace = run(&cfg).unwrap();
        check_trace_invariants(name, &cfg, &trace);
        let fejer = check_fejer_bound(&trace, &cfg).unwrap();
        assert!(fejer.holds(), "{name}: {fejer:?}");
    }
}

#[test]
fn distance_to_p_settles() {
    for (name, cfg) in convergent_configs() {
        let trace = run(&cfg).unwrap();
        let d: Vec<f64> = trace.records.iter().map(|r| r.dist_to_p.unwrap()).collect();
        let settled = d.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-6);
        assert!(settled, "{name}");
    }
}

#[test]
fn fixed_point_start_is_absorbing() {
    for (name, cfg) in convergent_configs() {
        let p = cfg.reference_point.clone().unwrap();
        let cfg = IterationConfig {
            x1: p.clone(),
            residual_tol: 0.0,
            max_iters: 50,
            ..cfg
        };
        let trace = run(&cfg).unwrap();
        for rec in &trace.records {
            let tol = rec.n as f64 * 1e-9;
            assert!(rec.x.distance(&p).unwrap() <= tol, "{name}");
            assert!(rec.max_residual() <= tol, "{name}");
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    for (_, cfg) in convergent_configs() {
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
    }
}

#[test]
fn trace_csv_round_trips() {
    for (name, cfg) in convergent_configs() {
        let trace = run(&cfg).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let rows = read_trace_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), trace.records.len(), "{name}");
        for (row, rec) in rows.iter().zip(&trace.records) {
            assert_eq!(row.n, rec.n);
            assert_eq!(row.coords, rec.x.coords());
            assert_eq!(row.residuals, rec.residuals);
            assert_eq!(row.step_diff, rec.step_diff);
            assert_eq!(row.dist_to_p, rec.dist_to_p);
        }
    }
}

#[test]
fn trace_csv_without_reference_point_leaves_column_empty() {
    let mut cfg = catalog::two_contractions_config(5, 0.0).unwrap();
    cfg.reference_point = None;
    let trace = run(&cfg).unwrap();
    assert!(trace
        .records
        .iter()
        .all(|r| r.dist_to_p.is_none() && r.theorem31_bound.is_none()));
    let mut buf = Vec::new();
    write_trace_csv(&trace, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,coord_0,coord_1,coord_2,coord_3,residual_1,residual_2,step_diff,dist_to_p"
    );
    assert!(lines.all(|l| l.ends_with(',')));
}

#[test]
fn cyclic_weights_converge_too() {
    let base = catalog::two_contractions_config(10_000, 1e-10).unwrap();
    let weights = WeightSchedule {
        rule: WeightRule::Cyclic {
            patterns: vec![vec![0.6, 0.2, 0.2], vec![0.1, 0.45, 0.45], vec![0.3, 0.6, 0.1]],
        },
        gamma1: 0.1,
        gamma2: 0.6,
    };
    let cfg = IterationConfig::new(
        base.family.clone(),
        weights,
        base.x1.clone(),
        base.max_iters,
        base.residual_tol,
        base.reference_point.clone(),
    )
    .unwrap();
    let trace = run(&cfg).unwrap();
    assert_eq!(trace.stop, fixpoint_core::StopReason::Converged);
    check_trace_invariants("cyclic", &cfg, &trace);
    assert!(check_fejer_bound(&trace, &cfg).unwrap().holds());
}

#[test]
fn envelope_terms_vanish_for_nonexpansive_family() {
    let cfg = catalog::two_contractions_config(10, 0.0).unwrap();
    assert_eq!(envelope_terms(&cfg, 1), (0.0, 0.0));
    let cfg = catalog::step_and_identity_config(catalog::geometric_params(), 0.2, 10, 0.0).unwrap();
    let (a, b) = envelope_terms(&cfg, 1);
    assert!(a > 0.0 && b > 0.0);
}

#[test]
fn mixed_dimension_family_rejected() {
    let cfg = catalog::two_contractions_config(10, 0.0).unwrap();
    let mut family = cfg.family.clone();
    family.push(FamilyMember::new(MappingSpec::sahu_step(), ParameterSequences::nonexpansive()).unwrap());
    let err = IterationConfig::new(family, WeightSchedule::default(), cfg.x1.clone(), 10, 0.0, None);
    assert!(err.is_err());
}
