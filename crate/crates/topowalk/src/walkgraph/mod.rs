//! Chains of diamond-graph unit cells, their one-step evolution, and the
//! observables used in the boundary and perturbation runs.

pub mod analysis;
pub mod bloch;
pub mod graph;
pub mod state;

pub use analysis::{
    boundary_peak_mass, crossing_mass, fit_line, position_distribution, spread_slope,
    sqrt_spread_fit, ClassicalWalk, Distribution, LinearFit, Side,
};
pub use bloch::{bloch_operator, cell_step_matrix, chiral_grading, slot_positions};
pub use graph::{
    build_chain, slot, step_operator, ChainSpec, LatticeGraph, Polarization, Region, RegionPhases,
    StepOperator, Subsite, SLOTS_PER_CELL, VERTICES_PER_CELL,
};
pub use state::{
    evolve, inject, inject_superposition, inject_with, outgoing_slot, Direction, Evolver, Injection,
    PerturbationEntry, PerturbationSchedule, WalkState,
};

use crate::multiport::MultiportError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),
    #[error("cell {cell} outside chain of {cells} cells")]
    IndexOutOfRange { cell: usize, cells: usize },
    #[error("boundary {boundary} is not interior to a chain of {cells} cells")]
    BoundaryNotInterior { boundary: usize, cells: usize },
    #[error("perturbation lists {got} regions, chain has {expected}")]
    ScheduleMismatch { expected: usize, got: usize },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("graph invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Multiport(#[from] MultiportError),
}
