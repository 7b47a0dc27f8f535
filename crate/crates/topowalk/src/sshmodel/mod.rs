//! Continuous-time SSH reference model and its link to the multiport chain.

pub mod analytic;
pub mod graph_winding;
pub mod transmission;

pub use analytic::{
    bloch_h, chiral_operator, eigenvectors, energy, exact_evolution, exact_evolution_oracle,
    real_space_hamiltonian, ssh_wavefunction, theta_k, winding_number, BlochModel, DVector, Evolution,
    SpectralPropagator, WindingResult,
};
pub use graph_winding::{
    effective_winding_from_graph, fit_ssh_from_graph, graph_bands, graph_winding, ring_band_vectors,
    track_band, winding_for_phases, GraphWinding, DEFAULT_NK,
};
pub use transmission::{boundary_transmission, run_transmission, TransmissionResult, TransmissionSetup};

use crate::multiport::MultiportError;
use crate::walkgraph::GraphError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SshError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("Bloch direction undefined at k = {k}")]
    Singular { k: f64 },
    #[error("band gap is closed")]
    GapClosed,
    #[error("{n_k} k-points cannot resolve the band")]
    Resolution { n_k: usize },
    #[error("winding not quantized: accumulated phase {raw_phase_accumulation}")]
    NotQuantized { raw_phase_accumulation: f64 },
    #[error("winding needs a single-region chain")]
    NotUniform,
    #[error("chain too short: {end_mass:e} of the probability reached the ends")]
    Sizing { end_mass: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Multiport(#[from] MultiportError),
}
