//! Scenario runner for the exceptional Hermite energy lab: configuration,
//! per-`n` evaluation, sweep fits and deterministic report bundles.

pub mod config;
pub mod fits;
pub mod quadrature;
pub mod report;
pub mod run;
pub mod scenarios;
pub mod semicircle;
pub mod tolerances;

pub use config::{Scenario, ScenarioConfig};
pub use run::{run, Bundle, Claim, Summary, Verdict};
