//! Batch front end for the `largespin` simulator: scenario presets, run
//! configuration and file output.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::{list_scenarios, InitialState, RunConfig, Scenario};
pub use error::CliError;
pub use runner::{run_all, JobResult};

/// Resolves, integrates and writes a run. Returns the per-job results.
pub fn run_scenario(config: &RunConfig) -> Result<Vec<JobResult>, CliError> {
    let run = config.resolve()?;
    let results = run_all(&run)?;
    output::write_outputs(&run, &results)?;
    Ok(results)
}
