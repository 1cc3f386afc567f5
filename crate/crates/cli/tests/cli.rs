use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fixpoint_cli::scenario::Payload;
use fixpoint_cli::{execute, load_path, load_scenarios, LoadError, Overrides, ScenarioKind};
use fixpoint_core::export::read_trace_csv;
use fixpoint_core::run;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn fixpoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixpoint"))
        .args(args)
        .env_remove("FIXPOINT_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const DOUBLING: &str = r#"
[[scenario]]
name = "doubling"
kind = "iterate"
output = "doubling.csv"

[scenario.iterate]
domain = { kind = "interval", lo = 0.0 }
x1 = [1.0]
max_iters = 5000
residual_tol = 0.0

[[scenario.iterate.family]]
map = { kind = "scale", factor = 2.0 }

[[scenario.iterate.family]]
map = { kind = "affine", matrix = [[1.0]], offset = [0.0] }
"#;

#[test]
fn shipped_theorem35_file_has_one_two_map_scenario() {
    let s = load_scenarios(&scenarios_dir().join("theorem35_two_maps.toml")).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].kind, ScenarioKind::Iterate);
    match &s[0].payload {
        Payload::Iterate(cfg) => assert_eq!(cfg.m(), 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn shipped_directory_loads() {
    let all = load_path(&scenarios_dir(), &Overrides::default()).unwrap();
    let names: Vec<&str> = all.iter().map(|s| s.name.as_str()).collect();
    assert!(names.contains(&"two_maps_r4"));
    assert!(names.contains(&"lemma21_audit"));
    assert!(!names.contains(&"certify_scale3"));
}

#[test]
fn gamma_order_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenarios_dir().join("theorem35_two_maps.toml"))
        .unwrap()
        .replace("gamma1 = 0.05", "gamma1 = 0.95");
    let path = write(dir.path(), "bad.toml", &text);
    let err = load_scenarios(&path).unwrap_err();
    assert!(matches!(err, LoadError::Invalid { .. }));
    assert!(err.to_string().contains("gamma"), "{err}");

    let out = fixpoint(&["--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
}

#[test]
fn parse_errors_report_line_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "broken.toml", "[[scenario]]\nname = \"a\"\nkind = \n");
    let out = fixpoint(&["--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("broken.toml:3:"), "{err}");
}

#[test]
fn convergent_scenario_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = fixpoint(&[
        "--scenario",
        scenarios_dir().join("theorem35_two_maps.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert_eq!(stdout.lines().count(), 1);
    assert!(
        stdout.contains("stop=converged") && stdout.contains("time="),
        "{stdout}"
    );
    let rows = read_trace_csv(fs::File::open(dir.path().join("two_maps_r4.csv")).unwrap()).unwrap();
    let last = rows.last().unwrap();
    assert!(last.residuals.iter().all(|r| *r < 1e-6));
    // a single scenario writes no summary unless asked
    assert!(!dir.path().join("summary.csv").exists());
}

#[test]
fn scale3_certificate_reports_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = fixpoint(&[
        "--scenario",
        scenarios_dir()
            .join("violations/certify_scale3.toml")
            .to_str()
            .unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let csv = fs::read_to_string(dir.path().join("certify_scale3.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    let violations: usize = first.split(',').nth(2).unwrap().parse().unwrap();
    assert!(violations > 0);
}

#[test]
fn overflow_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "doubling.toml", DOUBLING);
    let out = fixpoint(&[
        "--scenario",
        path.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("doubling") && err.contains("at step"), "{err}");
}

#[test]
fn only_and_max_iters_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = fixpoint(&[
        "--scenario",
        scenarios_dir().to_str().unwrap(),
        "--only",
        "step_identity",
        "--max-iters",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(
        stdout.starts_with("step_identity ") && stdout.contains("stop=max-iters"),
        "{stdout}"
    );
    let rows = read_trace_csv(fs::File::open(dir.path().join("step_identity.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);

    let missing = fixpoint(&["--scenario", scenarios_dir().to_str().unwrap(), "--only", "nope"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn seed_flag_beats_file_and_environment() {
    let path = scenarios_dir().join("certify_step.toml");
    let file_seed = load_scenarios(&path).unwrap()[0].seed;
    assert_eq!(file_seed, 7);
    let o = Overrides {
        seed: Some(3),
        fallback_seed: Some(4),
        ..Default::default()
    };
    assert_eq!(load_path(&path, &o).unwrap()[0].seed, 3);
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_and_parallel_runs_are_byte_identical() {
    let runs: Vec<_> = [false, false, true]
        .iter()
        .map(|&parallel| {
            let dir = tempfile::tempdir().unwrap();
            let scen = scenarios_dir();
            let mut args = vec![
                "--scenario",
                scen.to_str().unwrap(),
                "--out-dir",
                dir.path().to_str().unwrap(),
            ];
            if parallel {
                args.push("--parallel");
            }
            let out = fixpoint(&args);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            let names: Vec<String> = String::from_utf8_lossy(&out.stdout)
                .lines()
                .map(|l| l.split(' ').next().unwrap().to_owned())
                .collect();
            (names, read_dir_sorted(dir.path()))
        })
        .collect();
    assert!(runs[0].1.iter().any(|(n, _)| n == "summary.csv"));
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn written_trace_matches_in_memory_run() {
    let dir = tempfile::tempdir().unwrap();
    for s in load_path(&scenarios_dir(), &Overrides::default()).unwrap() {
        let Payload::Iterate(cfg) = &s.payload else {
            continue;
        };
        let outcome = execute(&s, dir.path()).unwrap();
        let trace = run(cfg).unwrap();
        let rows = read_trace_csv(fs::File::open(&outcome.files[0]).unwrap()).unwrap();
        assert_eq!(rows.len(), trace.records.len());
        for (row, rec) in rows.iter().zip(&trace.records) {
            assert_eq!(row.coords, rec.x.coords());
            assert_eq!(row.residuals, rec.residuals);
            assert_eq!(row.step_diff, rec.step_diff);
            assert_eq!(row.dist_to_p, rec.dist_to_p);
        }
    }
}
