//! Scenario files, batch simulation and CSV outputs for `sdcsim-core`.

pub mod config;
pub mod output;
pub mod reference;
pub mod run;

pub use config::{parse_scenario, scenario_hash, to_json, validate_scenario, ScenarioError};
pub use reference::reference_scenario;
