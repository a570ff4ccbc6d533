//! Scenario loading, execution and deterministic reporting around
//! [`fplab_core`].

pub mod builtins;
pub mod runner;
pub mod scenario;

pub use builtins::{builtin, list_builtins};
pub use runner::{run_scenario, trace_csv, Expectation, ScenarioOutcome, TraceArtifact};
pub use scenario::{Overrides, Scenario};
