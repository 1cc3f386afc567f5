//! Scenario loading and execution behind the `fixpoint` binary.

pub mod execute;
pub mod scenario;

pub use execute::{execute, write_summary, ExecError, Outcome};
pub use scenario::{load_path, load_scenarios, LoadError, Overrides, Scenario, ScenarioKind};
