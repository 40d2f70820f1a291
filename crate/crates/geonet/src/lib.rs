//! Configuration, experiment driver and output formats for `geonet-core`.
//!
//! [`run::execute`] runs one experiment from an [`config::ExperimentConfig`]
//! and returns the report plus the artifacts; [`run::run`] also writes
//! `report.json`, `trace.csv`, `net.json`, `family.json` and `net.svg`.

pub mod config;
pub mod exec;
pub mod report;
pub mod run;
pub mod svg;

pub use config::{Command, ConfigError, ExperimentConfig};
pub use exec::Rayon;
pub use report::{RunReport, Status};
pub use run::{execute, run, Run, RunError};
pub use svg::{render_svg, Drawing, Projection};
