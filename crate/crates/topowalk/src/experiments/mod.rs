//! Config-driven experiment runner behind the `topowalk` binary.

pub mod config;
pub mod presets;
pub mod run;

pub use config::{Experiment, ExperimentConfig, SweepGrid};
pub use presets::{preset, preset_names, PRESETS};
pub use run::{distribution_csv, run, write_outputs, RunReport, Table};

use crate::entangle::EntangleError;
use crate::multiport::MultiportError;
use crate::sshmodel::SshError;
use crate::walkgraph::GraphError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ssh(#[from] SshError),
    #[error(transparent)]
    Entangle(#[from] EntangleError),
    #[error(transparent)]
    Multiport(#[from] MultiportError),
}

impl ExperimentError {
    /// 2 for anything wrong with the input, 3 when a run breaks a physical
    /// invariant, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Invariant(_) => 3,
            ExperimentError::Io(_) => 1,
            ExperimentError::Graph(GraphError::Invariant(_)) => 3,
            ExperimentError::Graph(GraphError::Fit(_)) => 3,
            ExperimentError::Graph(_) => 2,
            ExperimentError::Ssh(SshError::InvalidParameter { .. }) => 2,
            ExperimentError::Ssh(_) => 3,
            ExperimentError::Entangle(EntangleError::InvalidParameter { .. })
            | ExperimentError::Entangle(EntangleError::Misconfigured { .. })
            | ExperimentError::Entangle(EntangleError::NotARing) => 2,
            ExperimentError::Entangle(_) => 3,
            ExperimentError::Multiport(_) => 2,
        }
    }
}
