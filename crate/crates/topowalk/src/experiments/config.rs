use crate::entangle::{BellSign, MixingChannel, PolarizationQubit};
use crate::experiments::ExperimentError;
use crate::sshmodel::transmission::{DEFAULT_K0, DEFAULT_SIGMA_K};
use crate::walkgraph::{ChainSpec, Injection, PerturbationSchedule, Polarization, RegionPhases};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Largest sweep the runner accepts.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    /// Output directory; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Walk(WalkConfig),
    Boundary(BoundaryConfig),
    Perturb(PerturbConfig),
    WindingSweep(WindingSweepConfig),
    Transmission(TransmissionConfig),
    Register(RegisterConfig),
    EntangleBulk(EntangleBulkConfig),
    EntangleEdge(EntangleEdgeConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Walk(_) => "walk",
            Experiment::Boundary(_) => "boundary",
            Experiment::Perturb(_) => "perturb",
            Experiment::WindingSweep(_) => "winding-sweep",
            Experiment::Transmission(_) => "transmission",
            Experiment::Register(_) => "register",
            Experiment::EntangleBulk(_) => "entangle-bulk",
            Experiment::EntangleEdge(_) => "entangle-edge",
        }
    }
}

fn default_window() -> usize {
    2
}

fn default_fit_from() -> usize {
    10
}

fn default_nk() -> usize {
    crate::sshmodel::DEFAULT_NK
}

/// Free propagation with a ballistic-spread fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub chain: ChainSpec,
    pub injection: Injection,
    pub steps: usize,
    /// First step included in the spread fit.
    #[serde(default = "default_fit_from")]
    pub fit_from: usize,
    /// Also run the classical (probability) walk on the same graph.
    #[serde(default)]
    pub classical_oracle: bool,
}

/// Two-region chain: crossing and boundary-peak observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub chain: ChainSpec,
    pub injection: Injection,
    pub steps: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Repeat the run with the left region's phases everywhere.
    #[serde(default)]
    pub compare_uniform: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jolt {
    pub step: usize,
    pub target_region: usize,
    pub source_region: usize,
}

/// Boundary run with a phase perturbation, compared to the clean run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbConfig {
    pub chain: ChainSpec,
    pub injection: Injection,
    pub steps: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jolt: Option<Jolt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<PerturbationSchedule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SweepGrid {
    /// Cartesian grid of `(φ_a, φ_b)`.
    Phases { phi_a: Vec<f64>, phi_b: Vec<f64> },
    /// Explicit list of `(φ_a, φ_b)`.
    Points { points: Vec<[f64; 2]> },
    /// Cartesian grid of analytic SSH hoppings.
    Hopping { v: Vec<f64>, w: Vec<f64> },
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::Phases { phi_a, phi_b } => phi_a.len() * phi_b.len(),
            SweepGrid::Points { points } => points.len(),
            SweepGrid::Hopping { v, w } => v.len() * w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order, first axis outermost.
    pub fn points(&self) -> Vec<[f64; 2]> {
        match self {
            SweepGrid::Phases { phi_a: a, phi_b: b } | SweepGrid::Hopping { v: a, w: b } => {
                a.iter().flat_map(|&x| b.iter().map(move |&y| [x, y])).collect()
            }
            SweepGrid::Points { points } => points.clone(),
        }
    }
}

/// Each phase grid point becomes the right region of a two-region chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRun {
    pub left: RegionPhases,
    pub boundary: usize,
    pub cells: usize,
    pub injection: Injection,
    pub steps: usize,
    #[serde(default = "default_window")]
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingSweepConfig {
    pub threeport_theta: f64,
    #[serde(default = "default_nk")]
    pub n_k: usize,
    /// Polarization label written to phase-sweep rows.
    #[serde(default = "default_pol")]
    pub polarization: Polarization,
    pub grid: SweepGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_run: Option<BoundaryRun>,
}

fn default_pol() -> Polarization {
    Polarization::V
}

fn default_k0() -> f64 {
    DEFAULT_K0
}

fn default_sigma() -> f64 {
    DEFAULT_SIGMA_K
}

fn default_sum() -> f64 {
    2.0
}

/// Transmission across `(v, w) | (w, v)` for each contrast `(v−w)/(v+w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionConfig {
    #[serde(default = "default_sum")]
    pub hopping_sum: f64,
    pub contrasts: Vec<f64>,
    #[serde(default = "default_k0")]
    pub k0: f64,
    #[serde(default = "default_sigma")]
    pub sigma_k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingRun {
    pub mix_strength: f64,
    pub steps: usize,
    /// Cells the rotation acts on; all cells when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<usize>>,
    /// Qubit whose flip rate is reported.
    #[serde(default = "PolarizationQubit::h")]
    pub qubit: PolarizationQubit,
}

impl MixingRun {
    pub fn channel(&self) -> MixingChannel {
        MixingChannel { mix_strength: self.mix_strength, steps: None, cells: self.cells.clone() }
    }
}

fn default_qubit_count() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterConfig {
    pub ring: ChainSpec,
    /// Explicit qubits; when absent, `qubit_count` points spread evenly over
    /// the Bloch sphere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<PolarizationQubit>>,
    #[serde(default = "default_qubit_count")]
    pub qubit_count: usize,
    pub storage_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingRun>,
    /// Ring with equal H and V windings, for the unprotected comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivial_ring: Option<ChainSpec>,
}

fn default_sign() -> BellSign {
    BellSign::Plus
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntangleBulkConfig {
    pub upper: ChainSpec,
    pub lower: ChainSpec,
    pub injection: Injection,
    pub steps: usize,
    #[serde(default = "default_sign")]
    pub sign: BellSign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntangleEdgeConfig {
    pub upper: ChainSpec,
    pub lower: ChainSpec,
    pub injection: Injection,
    pub steps: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_sign")]
    pub sign: BellSign,
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Config(format!("{field}: {msg}"))
}

fn check_chain(field: &str, chain: &ChainSpec) -> Result<(), ExperimentError> {
    chain.validate().map_err(|e| config_err(field, e))
}

fn check_injection(field: &str, chain: &ChainSpec, inj: &Injection) -> Result<(), ExperimentError> {
    if inj.cell >= chain.total_cells() {
        return Err(config_err(
            &format!("{field}.cell"),
            format!("{} outside chain of {} cells", inj.cell, chain.total_cells()),
        ));
    }
    Ok(())
}

fn check_steps(field: &str, steps: usize) -> Result<(), ExperimentError> {
    if steps == 0 {
        return Err(config_err(field, "must be at least 1"));
    }
    Ok(())
}

fn check_two_region(field: &str, chain: &ChainSpec) -> Result<usize, ExperimentError> {
    let b = chain.boundary_positions();
    if b.len() != 1 {
        return Err(config_err(field, format!("needs exactly two regions, found {}", chain.regions.len())));
    }
    if b[0] < 1 || b[0] + 1 >= chain.total_cells() {
        return Err(config_err(field, "boundary must be interior"));
    }
    Ok(b[0])
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ExperimentError::Config(format!("parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.name.trim().is_empty() {
            return Err(config_err("name", "must not be empty"));
        }
        match &self.experiment {
            Experiment::Walk(c) => {
                check_chain("chain", &c.chain)?;
                check_injection("injection", &c.chain, &c.injection)?;
                check_steps("steps", c.steps)?;
                if c.fit_from + 10 > c.steps + 1 {
                    return Err(config_err("fit_from", "leaves fewer than 10 fit points"));
                }
            }
            Experiment::Boundary(c) => {
                check_chain("chain", &c.chain)?;
                check_two_region("chain", &c.chain)?;
                check_injection("injection", &c.chain, &c.injection)?;
                check_steps("steps", c.steps)?;
                check_steps("window", c.window)?;
            }
            Experiment::Perturb(c) => {
                check_chain("chain", &c.chain)?;
                check_two_region("chain", &c.chain)?;
                check_injection("injection", &c.chain, &c.injection)?;
                check_steps("steps", c.steps)?;
                check_steps("window", c.window)?;
                match (&c.jolt, &c.schedule) {
                    (Some(j), None) => {
                        let n = c.chain.regions.len();
                        if j.target_region >= n || j.source_region >= n {
                            return Err(config_err("jolt", "region index out of range"));
                        }
                    }
                    (None, Some(s)) => {
                        for (i, e) in s.entries.iter().enumerate() {
                            if e.regions.len() != c.chain.regions.len() {
                                return Err(config_err(
                                    &format!("schedule.entries[{i}].regions"),
                                    "must list one phase set per region",
                                ));
                            }
                        }
                    }
                    _ => return Err(config_err("jolt/schedule", "give exactly one of the two")),
                }
            }
            Experiment::WindingSweep(c) => {
                if c.grid.is_empty() {
                    return Err(config_err("grid", "must not be empty"));
                }
                if c.grid.len() > MAX_GRID_POINTS {
                    return Err(config_err("grid", format!("{} points exceeds {MAX_GRID_POINTS}", c.grid.len())));
                }
                if c.n_k < 16 {
                    return Err(config_err("n_k", "must be at least 16"));
                }
                if let Some(r) = &c.boundary_run {
                    if matches!(c.grid, SweepGrid::Hopping { .. }) {
                        return Err(config_err("boundary_run", "needs a phase grid"));
                    }
                    let probe = ChainSpec::two_region(r.left, r.left, r.boundary, r.cells, c.threeport_theta)
                        .map_err(|e| config_err("boundary_run", e))?;
                    check_two_region("boundary_run", &probe)?;
                    check_injection("boundary_run.injection", &probe, &r.injection)?;
                    check_steps("boundary_run.steps", r.steps)?;
                    check_steps("boundary_run.window", r.window)?;
                }
            }
            Experiment::Transmission(c) => {
                if c.contrasts.is_empty() {
                    return Err(config_err("contrasts", "must not be empty"));
                }
                if c.contrasts.len() > MAX_GRID_POINTS {
                    return Err(config_err("contrasts", "too many points"));
                }
                if let Some(x) = c.contrasts.iter().find(|x| !x.is_finite() || x.abs() >= 1.0) {
                    return Err(config_err("contrasts", format!("{x} not in (−1, 1)")));
                }
                if !(c.hopping_sum > 0.0 && c.hopping_sum.is_finite()) {
                    return Err(config_err("hopping_sum", "must be positive"));
                }
                if !(c.sigma_k > 0.0 && c.sigma_k < 1.0) {
                    return Err(config_err("sigma_k", "must lie in (0, 1)"));
                }
                if let Some(t) = c.time {
                    if !(t > 0.0 && t.is_finite()) {
                        return Err(config_err("time", "must be positive"));
                    }
                }
            }
            Experiment::Register(c) => {
                check_chain("ring", &c.ring)?;
                if !c.ring.periodic || !c.ring.is_uniform() {
                    return Err(config_err("ring", "must be periodic with a single region"));
                }
                check_steps("storage_steps", c.storage_steps)?;
                match &c.qubits {
                    Some(q) if q.is_empty() => return Err(config_err("qubits", "must not be empty")),
                    None if c.qubit_count == 0 => return Err(config_err("qubit_count", "must be at least 1")),
                    _ => {}
                }
                if let Some(m) = &c.mixing {
                    check_steps("mixing.steps", m.steps)?;
                    if !(0.0..=1.0).contains(&m.mix_strength) {
                        return Err(config_err("mixing.mix_strength", "must lie in [0, 1]"));
                    }
                    let n = (m.qubit.alpha.norm_sqr() + m.qubit.beta.norm_sqr() - 1.0).abs();
                    if n > 1e-12 {
                        return Err(config_err("mixing.qubit", "must be normalized"));
                    }
                }
                if let Some(t) = &c.trivial_ring {
                    check_chain("trivial_ring", t)?;
                    if !t.periodic || !t.is_uniform() || t.total_cells() != c.ring.total_cells() {
                        return Err(config_err("trivial_ring", "must be a uniform ring of the same size"));
                    }
                }
            }
            Experiment::EntangleBulk(c) => {
                check_chain("upper", &c.upper)?;
                check_chain("lower", &c.lower)?;
                check_injection("injection", &c.upper, &c.injection)?;
                check_injection("injection", &c.lower, &c.injection)?;
                check_steps("steps", c.steps)?;
            }
            Experiment::EntangleEdge(c) => {
                check_chain("upper", &c.upper)?;
                check_chain("lower", &c.lower)?;
                let bu = check_two_region("upper", &c.upper)?;
                let bl = check_two_region("lower", &c.lower)?;
                if bu != bl {
                    return Err(config_err("lower", "boundary must match the upper chain"));
                }
                check_injection("injection", &c.upper, &c.injection)?;
                check_injection("injection", &c.lower, &c.injection)?;
                check_steps("steps", c.steps)?;
                check_steps("window", c.window)?;
            }
        }
        Ok(())
    }
}
