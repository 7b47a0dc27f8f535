//! Photon pairs on two chains: Bell inputs, entanglement entropy, the
//! winding/polarization register, and edge-state projections.

pub mod edge;
pub mod register;
pub mod two_photon;

pub use edge::{edge_projection, ChainEdgeBasis, EdgeBasisAmplitudes, EdgeCalibration, EDGE_LABELS};
pub use register::{
    polarization_flip_rate, register_read, register_windings, register_write, sector_flip_rate, FlipRateResult,
    MixingChannel, RegisterWindings, RingBand,
};
pub use two_photon::{
    bell_state, entanglement_entropy, entropy_bits, evolve_two_photon, schmidt_weights, BellSign, Partition,
    PolarizationQubit, TwoPhotonState, TwoPhotonTerm,
};

use crate::sshmodel::SshError;
use crate::walkgraph::{GraphError, Polarization};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntangleError {
    #[error("state not normalized: |ψ|² = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("register needs different windings for H and V, got {nu_h} and {nu_v}")]
    Misconfigured { nu_h: i32, nu_v: i32 },
    #[error("register must be a uniform periodic chain")]
    NotARing,
    #[error("no edge state for {polarization:?}: window mass {mass} below threshold")]
    NoEdgeState { polarization: Polarization, mass: f64 },
    #[error("state is at step {state}, calibration at step {calibration}")]
    StepMismatch { state: usize, calibration: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ssh(#[from] SshError),
}
