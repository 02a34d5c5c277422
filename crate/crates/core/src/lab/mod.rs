//! Experiment orchestration: distribution runs over a shared sieve pass,
//! Scourfield fits, the counterexample and restricted-input scenarios,
//! additive-function runs, configuration and report files.

pub mod config;
mod distribution;
mod report;
mod scenario;

pub use config::{ConfigFile, ExperimentConfig, Filter, Format, ScenarioName};
pub use distribution::{run_distribution, scourfield_fit, DistributionReport, DistributionRequest, ScourfieldFit, ScourfieldRow};
pub use report::{export_report, write_csv, write_json, JsonDocument, Record, CSV_COLUMNS, SCHEMA_VERSION};
pub use scenario::{
    additive_distribution, highlight, run_scenario, unit_classes, AdditiveDistribution, ClassHighlight, FilterComparison,
    ScenarioReport,
};
