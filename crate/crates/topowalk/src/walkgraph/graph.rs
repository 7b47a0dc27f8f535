use crate::multiport::{build_threeport, wrap_phase, Port, ThreePortUnitary};
use crate::walkgraph::GraphError;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Three-ports per unit cell: diamond a is vertices 0 (left) and 1 (right),
/// diamond b is vertices 2 and 3.
pub const VERTICES_PER_CELL: usize = 4;
/// Edge slots per cell (one per vertex port).
pub const SLOTS_PER_CELL: usize = 3 * VERTICES_PER_CELL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn other(self) -> Polarization {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

/// The two diamond positions inside a unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsite {
    A,
    B,
}

impl Subsite {
    pub fn index(self) -> usize {
        match self {
            Subsite::A => 0,
            Subsite::B => 1,
        }
    }

    /// Offset of the subsite from the cell centre, in cells.
    pub fn offset(self) -> f64 {
        match self {
            Subsite::A => -0.25,
            Subsite::B => 0.25,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subsite::A => "A",
            Subsite::B => "B",
        }
    }
}

/// Accepts `phi_b` as shorthand for equal H and V settings.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhases {
    phi_a: f64,
    #[serde(default)]
    phi_b: Option<f64>,
    #[serde(default)]
    phi_b_h: Option<f64>,
    #[serde(default)]
    phi_b_v: Option<f64>,
}

/// Phase-shifter settings of one region. Only the second diamond's shifter
/// is polarization dependent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhases")]
pub struct RegionPhases {
    pub phi_a: f64,
    pub phi_b_h: f64,
    pub phi_b_v: f64,
}

impl TryFrom<RawPhases> for RegionPhases {
    type Error = String;

    fn try_from(r: RawPhases) -> Result<Self, String> {
        match (r.phi_b, r.phi_b_h, r.phi_b_v) {
            (Some(b), None, None) => Ok(RegionPhases::new(r.phi_a, b, b)),
            (None, Some(h), Some(v)) => Ok(RegionPhases::new(r.phi_a, h, v)),
            _ => Err("give either phi_b or both phi_b_h and phi_b_v".into()),
        }
    }
}

impl RegionPhases {
    pub fn new(phi_a: f64, phi_b_h: f64, phi_b_v: f64) -> Self {
        let w = |x: f64| if x.is_finite() { wrap_phase(x) } else { x };
        RegionPhases { phi_a: w(phi_a), phi_b_h: w(phi_b_h), phi_b_v: w(phi_b_v) }
    }

    /// Same phases for both polarizations.
    pub fn uniform(phi_a: f64, phi_b: f64) -> Self {
        Self::new(phi_a, phi_b, phi_b)
    }

    pub fn phi_b(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::H => self.phi_b_h,
            Polarization::V => self.phi_b_v,
        }
    }

    /// `(φ_a, φ_b)` as seen by one polarization.
    pub fn seen_by(&self, pol: Polarization) -> (f64, f64) {
        (self.phi_a, self.phi_b(pol))
    }

    pub fn is_finite(&self) -> bool {
        self.phi_a.is_finite() && self.phi_b_h.is_finite() && self.phi_b_v.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub phases: RegionPhases,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub regions: Vec<Region>,
    pub threeport_theta: f64,
    #[serde(default)]
    pub periodic: bool,
}

impl ChainSpec {
    pub fn new(regions: Vec<Region>, threeport_theta: f64) -> Result<Self, GraphError> {
        let spec = ChainSpec { regions, threeport_theta, periodic: false };
        spec.validate()?;
        Ok(spec)
    }

    /// Closed ring: the last cell links back to the first.
    pub fn ring(regions: Vec<Region>, threeport_theta: f64) -> Result<Self, GraphError> {
        let spec = ChainSpec { regions, threeport_theta, periodic: true };
        spec.validate()?;
        Ok(spec)
    }

    pub fn uniform(phases: RegionPhases, cells: usize, theta: f64) -> Result<Self, GraphError> {
        Self::new(vec![Region { phases, cells }], theta)
    }

    /// Two regions meeting at cell `boundary` (the first cell of the right
    /// region).
    pub fn two_region(
        left: RegionPhases,
        right: RegionPhases,
        boundary: usize,
        cells: usize,
        theta: f64,
    ) -> Result<Self, GraphError> {
        if boundary == 0 || boundary >= cells {
            return Err(GraphError::InvalidSpec(format!(
                "boundary {boundary} must lie inside a chain of {cells} cells"
            )));
        }
        Self::new(
            vec![
                Region { phases: left, cells: boundary },
                Region { phases: right, cells: cells - boundary },
            ],
            theta,
        )
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if !self.threeport_theta.is_finite() {
            return Err(GraphError::InvalidSpec("threeport_theta must be finite".into()));
        }
        if self.regions.is_empty() {
            return Err(GraphError::InvalidSpec("chain needs at least one region".into()));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.cells == 0 {
                return Err(GraphError::InvalidSpec(format!("region {i} has zero cells")));
            }
            if !r.phases.is_finite() {
                return Err(GraphError::InvalidSpec(format!("region {i} has a non-finite phase")));
            }
        }
        if self.total_cells() < 2 {
            return Err(GraphError::InvalidSpec("chain needs at least 2 cells".into()));
        }
        Ok(())
    }

    pub fn total_cells(&self) -> usize {
        self.regions.iter().map(|r| r.cells).sum()
    }

    /// Cells where a new region starts, excluding the first region.
    pub fn boundary_positions(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut out = Vec::with_capacity(self.regions.len().saturating_sub(1));
        for r in &self.regions[..self.regions.len() - 1] {
            acc += r.cells;
            out.push(acc);
        }
        out
    }

    pub fn region_of_cell(&self, cell: usize) -> usize {
        let mut acc = 0;
        for (i, r) in self.regions.iter().enumerate() {
            acc += r.cells;
            if cell < acc {
                return i;
            }
        }
        self.regions.len() - 1
    }

    pub fn phases_of_cell(&self, cell: usize) -> RegionPhases {
        self.regions[self.region_of_cell(cell)].phases
    }

    pub fn is_uniform(&self) -> bool {
        self.regions.windows(2).all(|w| w[0].phases == w[1].phases)
    }

    /// Same geometry with each region's phases replaced.
    pub fn with_region_phases(&self, phases: &[RegionPhases]) -> Result<ChainSpec, GraphError> {
        if phases.len() != self.regions.len() {
            return Err(GraphError::ScheduleMismatch {
                expected: self.regions.len(),
                got: phases.len(),
            });
        }
        let regions = self
            .regions
            .iter()
            .zip(phases)
            .map(|(r, p)| Region { phases: *p, cells: r.cells })
            .collect();
        let spec = ChainSpec { regions, threeport_theta: self.threeport_theta, periodic: self.periodic };
        spec.validate()?;
        Ok(spec)
    }
}

/// Slot of the edge arriving at `port` of vertex `vertex` in `cell`.
#[inline]
pub fn slot(cell: usize, vertex: usize, port: Port) -> usize {
    SLOTS_PER_CELL * cell + 3 * vertex + port.index()
}

#[inline]
pub fn decode_slot(s: usize) -> (usize, usize, usize) {
    (s / SLOTS_PER_CELL, (s % SLOTS_PER_CELL) / 3, s % 3)
}

/// Subsite (diamond) a vertex belongs to.
#[inline]
pub fn vertex_subsite(vertex: usize) -> Subsite {
    if vertex < 2 {
        Subsite::A
    } else {
        Subsite::B
    }
}

/// Raw wiring shared by finite chains and the Bloch cell.
pub(crate) struct Wiring {
    /// out-slot -> in-slot reached after travelling the edge
    pub partner: Vec<u32>,
    /// edge phase carried from out-slot `s`, per polarization
    pub phase: [Vec<C64>; 2],
}

pub(crate) fn wire(
    cells: usize,
    periodic: bool,
    phases_of_cell: impl Fn(usize) -> RegionPhases,
) -> Wiring {
    let n = SLOTS_PER_CELL * cells;
    let mut partner = vec![u32::MAX; n];
    let one = C64::new(1.0, 0.0);
    let mut phase = [vec![one; n], vec![one; n]];
    let mut link = |a: usize, b: usize, ph: [C64; 2]| {
        partner[a] = b as u32;
        partner[b] = a as u32;
        for p in 0..2 {
            phase[p][a] = ph[p];
            phase[p][b] = ph[p];
        }
    };
    for c in 0..cells {
        let rp = phases_of_cell(c);
        for d in 0..2 {
            let (l, r) = (2 * d, 2 * d + 1);
            let ph = if d == 0 {
                [C64::from_polar(1.0, rp.phi_a); 2]
            } else {
                [C64::from_polar(1.0, rp.phi_b_h), C64::from_polar(1.0, rp.phi_b_v)]
            };
            link(slot(c, l, Port::B), slot(c, r, Port::B), [one; 2]);
            link(slot(c, l, Port::C), slot(c, r, Port::C), ph);
        }
        link(slot(c, 1, Port::A), slot(c, 2, Port::A), [one; 2]);
        if c + 1 < cells {
            link(slot(c, 3, Port::A), slot(c + 1, 0, Port::A), [one; 2]);
        } else if periodic {
            link(slot(c, 3, Port::A), slot(0, 0, Port::A), [one; 2]);
        }
    }
    if !periodic {
        // dangling end ports reflect with unit amplitude
        let first = slot(0, 0, Port::A);
        let last = slot(cells - 1, 3, Port::A);
        partner[first] = first as u32;
        partner[last] = last as u32;
    }
    Wiring { partner, phase }
}

/// A chain of diamond-graph cells ready for evolution.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    spec: ChainSpec,
    threeport: ThreePortUnitary,
    partner: Vec<u32>,
    phase: [Vec<C64>; 2],
    source_site: Vec<u32>,
}

pub fn build_chain(spec: &ChainSpec) -> Result<LatticeGraph, GraphError> {
    spec.validate()?;
    let threeport = build_threeport(spec.threeport_theta)?;
    let cells = spec.total_cells();
    let w = wire(cells, spec.periodic, |c| spec.phases_of_cell(c));
    let source_site = (0..w.partner.len())
        .map(|t| {
            // edges are reciprocal: the edge into `t` leaves from partner[t]
            let (c, v, _) = decode_slot(w.partner[t] as usize);
            (2 * c + vertex_subsite(v).index()) as u32
        })
        .collect();
    Ok(LatticeGraph { spec: spec.clone(), threeport, partner: w.partner, phase: w.phase, source_site })
}

impl LatticeGraph {
    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn cells(&self) -> usize {
        self.spec.total_cells()
    }

    pub fn vertices(&self) -> usize {
        VERTICES_PER_CELL * self.cells()
    }

    pub fn slots(&self) -> usize {
        self.partner.len()
    }

    pub fn threeport(&self) -> &ThreePortUnitary {
        &self.threeport
    }

    pub fn boundary_positions(&self) -> Vec<usize> {
        self.spec.boundary_positions()
    }

    /// In-slot reached by light leaving through out-slot `s`.
    pub fn partner(&self, s: usize) -> usize {
        self.partner[s] as usize
    }

    pub fn edge_phase(&self, s: usize, pol: Polarization) -> C64 {
        self.phase[pol.index()][s]
    }

    /// Site index `2·cell + subsite` the edge arriving at slot `t` comes from.
    pub fn source_site(&self, t: usize) -> usize {
        self.source_site[t] as usize
    }

    /// Structural checks: the partner map is an involution and each vertex
    /// has its three ports wired.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        for s in 0..self.slots() {
            let p = self.partner(s);
            if p >= self.slots() || self.partner(p) != s {
                return Err(GraphError::Invariant(format!("slot {s} has no reverse partner")));
            }
        }
        Ok(())
    }
}

/// Sparse one-step operator. Every target slot receives light from exactly
/// the three ports of one vertex, so each row has three entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOperator {
    rows: Vec<[(u32, C64); 3]>,
}

pub fn step_operator(graph: &LatticeGraph, pol: Polarization) -> StepOperator {
    let u = graph.threeport().matrix();
    let zero = (0u32, C64::new(0.0, 0.0));
    let mut rows = vec![[zero; 3]; graph.slots()];
    for s in 0..graph.slots() {
        let (c, v, pout) = decode_slot(s);
        let base = SLOTS_PER_CELL * c + 3 * v;
        let ph = graph.edge_phase(s, pol);
        let tgt = graph.partner(s);
        for pin in 0..3 {
            rows[tgt][pin] = ((base + pin) as u32, ph * u[(pout, pin)]);
        }
    }
    StepOperator { rows }
}

impl StepOperator {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, t: usize) -> &[(u32, C64); 3] {
        &self.rows[t]
    }

    /// `y = S x`
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.rows.len());
        for (yt, row) in y.iter_mut().zip(&self.rows) {
            *yt = row[0].1 * x[row[0].0 as usize]
                + row[1].1 * x[row[1].0 as usize]
                + row[2].1 * x[row[2].0 as usize];
        }
    }

    /// `y = S† x`
    pub fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (t, row) in self.rows.iter().enumerate() {
            for &(src, a) in row {
                y[src as usize] += a.conj() * x[t];
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (t, row) in self.rows.iter().enumerate() {
            for &(src, a) in row {
                m[(t, src as usize)] += a;
            }
        }
        m
    }

    /// max |S†S − I| computed from the sparse structure.
    pub fn unitarity_defect(&self) -> f64 {
        let mut gram: HashMap<(u32, u32), C64> = HashMap::new();
        for row in &self.rows {
            for &(i, a) in row {
                for &(j, b) in row {
                    *gram.entry((i, j)).or_default() += a.conj() * b;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() as u32 {
            if !gram.contains_key(&(i, i)) {
                worst = worst.max(1.0);
            }
        }
        for ((i, j), v) in gram {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
        worst
    }

    /// Target slots whose rows differ between two operators.
    pub fn differing_rows(&self, other: &StepOperator) -> Vec<usize> {
        self.rows
            .iter()
            .zip(&other.rows)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(t, _)| t)
            .collect()
    }
}
