//! Reproducible experiments on breaking Riemann waves, driven by config files.

pub mod config;
pub mod experiments;
pub mod plot;

pub use config::{Experiment, ExperimentConfig, Overrides};
pub use experiments::{run, Artifact, ArtifactKind, RunReport};
pub use plot::emit_plot_data;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Runtime {
        context: String,
        #[source]
        source: riemann_spectra::Error,
    },
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Runs an experiment and emits its plot data.
pub fn run_and_plot(experiment: Experiment, config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let report = run(experiment, config)?;
    emit_plot_data(&report)?;
    Ok(report)
}
