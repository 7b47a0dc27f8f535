use crate::multiport::Port;
use crate::walkgraph::analysis::{position_distribution, Distribution};
use crate::walkgraph::graph::{
    build_chain, slot, step_operator, LatticeGraph, Polarization, RegionPhases, StepOperator,
    Subsite,
};
use crate::walkgraph::GraphError;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Photon amplitudes on every directed edge, one vector per polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amps: [Vec<C64>; 2],
    step: usize,
}

impl WalkState {
    pub fn zeros(slots: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); slots];
        WalkState { amps: [z.clone(), z], step: 0 }
    }

    pub fn from_amplitudes(h: Vec<C64>, v: Vec<C64>, step: usize) -> Self {
        assert_eq!(h.len(), v.len(), "polarization sectors must have equal length");
        WalkState { amps: [h, v], step }
    }

    pub fn slots(&self) -> usize {
        self.amps[0].len()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn set_step(&mut self, step: usize) {
        self.step = step;
    }

    pub fn amplitudes(&self, pol: Polarization) -> &[C64] {
        &self.amps[pol.index()]
    }

    pub fn amplitudes_mut(&mut self, pol: Polarization) -> &mut [C64] {
        &mut self.amps[pol.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.pol_probability(Polarization::H) + self.pol_probability(Polarization::V)
    }

    pub fn pol_probability(&self, pol: Polarization) -> f64 {
        self.amps[pol.index()].iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩` over both polarizations.
    pub fn inner(&self, other: &WalkState) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..2 {
            for (a, b) in self.amps[p].iter().zip(&other.amps[p]) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    pub fn scale(&mut self, c: C64) {
        for p in 0..2 {
            self.amps[p].iter_mut().for_each(|z| *z *= c);
        }
    }

    /// `self += c·other`
    pub fn add_scaled(&mut self, c: C64, other: &WalkState) {
        for p in 0..2 {
            for (a, b) in self.amps[p].iter_mut().zip(&other.amps[p]) {
                *a += c * b;
            }
        }
    }

    /// Largest amplitude difference to another state.
    pub fn max_deviation(&self, other: &WalkState) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..2 {
            for (a, b) in self.amps[p].iter().zip(&other.amps[p]) {
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
    /// Equal amplitude `1/√2` on both outgoing external edges.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    pub cell: usize,
    pub subsite: Subsite,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    #[serde(default = "default_polarization")]
    pub polarization: Polarization,
}

fn default_direction() -> Direction {
    Direction::Right
}

fn default_polarization() -> Polarization {
    Polarization::V
}

impl Injection {
    pub fn new(cell: usize, subsite: Subsite, polarization: Polarization) -> Self {
        Injection { cell, subsite, direction: Direction::Right, polarization }
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

/// Slot holding a photon that has just left the given subsite's diamond
/// through its external port on one side.
pub fn outgoing_slot(graph: &LatticeGraph, cell: usize, subsite: Subsite, rightward: bool) -> usize {
    let vertex = match (subsite, rightward) {
        (Subsite::A, false) => 0,
        (Subsite::A, true) => 1,
        (Subsite::B, false) => 2,
        (Subsite::B, true) => 3,
    };
    graph.partner(slot(cell, vertex, Port::A))
}

/// Unit-amplitude photon on the rightward external edge leaving `subsite`.
pub fn inject(
    graph: &LatticeGraph,
    cell: usize,
    subsite: Subsite,
    pol: Polarization,
) -> Result<WalkState, GraphError> {
    inject_with(graph, &Injection::new(cell, subsite, pol))
}

pub fn inject_with(graph: &LatticeGraph, inj: &Injection) -> Result<WalkState, GraphError> {
    inject_superposition(graph, inj, &[(inj.polarization, C64::new(1.0, 0.0))])
}

/// Inject with the given amplitude in each polarization.
pub fn inject_superposition(
    graph: &LatticeGraph,
    inj: &Injection,
    pols: &[(Polarization, C64)],
) -> Result<WalkState, GraphError> {
    if inj.cell >= graph.cells() {
        return Err(GraphError::IndexOutOfRange { cell: inj.cell, cells: graph.cells() });
    }
    let mut st = WalkState::zeros(graph.slots());
    let spots: Vec<(usize, f64)> = match inj.direction {
        Direction::Right => vec![(outgoing_slot(graph, inj.cell, inj.subsite, true), 1.0)],
        Direction::Left => vec![(outgoing_slot(graph, inj.cell, inj.subsite, false), 1.0)],
        Direction::Symmetric => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let r = outgoing_slot(graph, inj.cell, inj.subsite, true);
            let l = outgoing_slot(graph, inj.cell, inj.subsite, false);
            if r == l {
                vec![(r, 1.0)]
            } else {
                vec![(r, h), (l, h)]
            }
        }
    };
    for &(pol, a) in pols {
        for &(s, w) in &spots {
            st.amplitudes_mut(pol)[s] += a * w;
        }
    }
    Ok(st)
}

/// One scheduled phase override: the step taken from time `step` to
/// `step + 1` uses these region phases instead of the chain's own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEntry {
    pub step: usize,
    pub regions: Vec<RegionPhases>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSchedule {
    pub entries: Vec<PerturbationEntry>,
}

impl PerturbationSchedule {
    /// The brief jolt: at `step`, every region takes the phases of region
    /// `source_region`.
    pub fn jolt(graph: &LatticeGraph, step: usize, target_region: usize, source_region: usize) -> Self {
        let mut regions: Vec<RegionPhases> = graph.spec().regions.iter().map(|r| r.phases).collect();
        regions[target_region] = regions[source_region];
        PerturbationSchedule { entries: vec![PerturbationEntry { step, regions }] }
    }
}

/// Step operators for a graph, built once and reused.
#[derive(Debug, Clone)]
pub struct Evolver {
    graph: LatticeGraph,
    ops: [StepOperator; 2],
    scheduled: BTreeMap<usize, [StepOperator; 2]>,
}

impl Evolver {
    pub fn new(graph: &LatticeGraph) -> Self {
        let ops = [step_operator(graph, Polarization::H), step_operator(graph, Polarization::V)];
        Evolver { graph: graph.clone(), ops, scheduled: BTreeMap::new() }
    }

    pub fn with_schedule(graph: &LatticeGraph, schedule: &PerturbationSchedule) -> Result<Self, GraphError> {
        let mut ev = Self::new(graph);
        for e in &schedule.entries {
            let spec = graph.spec().with_region_phases(&e.regions)?;
            let g = build_chain(&spec)?;
            ev.scheduled
                .insert(e.step, [step_operator(&g, Polarization::H), step_operator(&g, Polarization::V)]);
        }
        Ok(ev)
    }

    pub fn graph(&self) -> &LatticeGraph {
        &self.graph
    }

    pub fn operator(&self, pol: Polarization) -> &StepOperator {
        &self.ops[pol.index()]
    }

    /// Advance one step in place; `scratch` must have the state's length.
    pub fn step_once(&self, state: &mut WalkState, scratch: &mut Vec<C64>) {
        let ops = self.scheduled.get(&state.step).unwrap_or(&self.ops);
        scratch.resize(state.slots(), C64::new(0.0, 0.0));
        for pol in Polarization::BOTH {
            let a = state.amplitudes_mut(pol);
            ops[pol.index()].apply(a, scratch);
            a.copy_from_slice(scratch);
        }
        state.step += 1;
    }

    pub fn run(&self, state: &mut WalkState, steps: usize) {
        let mut scratch = Vec::new();
        for _ in 0..steps {
            self.step_once(state, &mut scratch);
        }
    }

    /// Run and record the distribution at every time, initial one included.
    pub fn run_with_history(&self, state: &mut WalkState, steps: usize) -> Vec<Distribution> {
        let mut scratch = Vec::new();
        let mut history = Vec::with_capacity(steps + 1);
        history.push(position_distribution(state, &self.graph));
        for _ in 0..steps {
            self.step_once(state, &mut scratch);
            history.push(position_distribution(state, &self.graph));
        }
        history
    }

    /// Undo one unperturbed step.
    pub fn step_back(&self, state: &mut WalkState) {
        let mut scratch = vec![C64::new(0.0, 0.0); state.slots()];
        for pol in Polarization::BOTH {
            let a = state.amplitudes_mut(pol);
            self.ops[pol.index()].apply_adjoint(a, &mut scratch);
            a.copy_from_slice(&scratch);
        }
        state.step = state.step.saturating_sub(1);
    }
}

/// Evolve `steps` steps, returning the final state and the distribution
/// history (initial distribution included).
pub fn evolve(
    state: &WalkState,
    graph: &LatticeGraph,
    steps: usize,
    perturbation: Option<&PerturbationSchedule>,
) -> Result<(WalkState, Vec<Distribution>), GraphError> {
    let ev = match perturbation {
        Some(s) => Evolver::with_schedule(graph, s)?,
        None => Evolver::new(graph),
    };
    let mut st = state.clone();
    let hist = ev.run_with_history(&mut st, steps);
    Ok((st, hist))
}
