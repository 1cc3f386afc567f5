use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fixpoint_cli::{execute, load_path, write_summary, ExecError, Outcome, Overrides, Scenario};

/// Runs fixed-point iteration scenarios and audits.
#[derive(Debug, Parser)]
#[command(name = "fixpoint", version)]
struct Args {
    /// Scenario file, or a directory of `*.toml` scenario files.
    #[arg(long)]
    scenario: PathBuf,

    /// Run only the scenario with this name.
    #[arg(long)]
    only: Option<String>,

    #[arg(long)]
    max_iters: Option<usize>,

    /// Residual tolerance for iterate scenarios.
    #[arg(long)]
    tol: Option<f64>,

    /// Overrides every scenario's seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Directory that scenario output paths are resolved against.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    /// Run scenarios on separate threads. Output order is unchanged.
    #[arg(long)]
    parallel: bool,

    /// Where to write the summary CSV. Defaults to `<out-dir>/summary.csv`
    /// when more than one scenario runs.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var("FIXPOINT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| format!("FIXPOINT_SEED={v:?}: {e}")),
        Err(_) => Ok(None),
    }
}

fn run_all(scenarios: &[Scenario], args: &Args) -> Vec<Result<Outcome, ExecError>> {
    if !args.parallel {
        return scenarios.iter().map(|s| execute(s, &args.out_dir)).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(|| execute(s, &args.out_dir)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let fallback_seed = match env_seed() {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        max_iters: args.max_iters,
        residual_tol: args.tol,
        seed: args.seed,
        fallback_seed,
    };
    let mut scenarios = match load_path(&args.scenario, &overrides) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(only) = &args.only {
        scenarios.retain(|s| &s.name == only);
        if scenarios.is_empty() {
            eprintln!("error: no scenario named {only:?}");
            return ExitCode::from(2);
        }
    }

    let mut code = 0;
    let mut outcomes = Vec::new();
    for result in run_all(&scenarios, &args) {
        match result {
            Ok(o) => {
                println!("{}", o.summary_line());
                code = code.max(o.exit_code());
                outcomes.push(o);
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    let summary = args
        .summary
        .clone()
        .or_else(|| (scenarios.len() > 1).then(|| args.out_dir.join("summary.csv")));
    if let Some(path) = summary {
        if let Err(e) = write_summary(&outcomes, &path) {
            eprintln!("error: {e}");
            code = code.max(e.exit_code());
        }
    }
    ExitCode::from(code as u8)
}
