//! Configuration-driven front end for `pxlap-core`.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig};
pub use run::{run, Outcome, Pipeline};
