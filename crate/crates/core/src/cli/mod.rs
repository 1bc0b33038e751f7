//! Scenario front end: JSON in, report out.

pub mod builtins;
pub mod report;
pub mod run;
pub mod scenario;

pub use builtins::{builtin_text, BUILTINS};
pub use report::{render, Format, Report, Status};
pub use run::{run, RunConfig};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
