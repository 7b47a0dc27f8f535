//! Winding/polarization memory register on a ring, and its response to
//! polarization-mixing noise.

use crate::entangle::two_photon::PolarizationQubit;
use crate::entangle::EntangleError;
use crate::sshmodel::graph_winding::{ring_band_vectors, CellVector};
use crate::sshmodel::{effective_winding_from_graph, DEFAULT_NK};
use crate::walkgraph::{
    chiral_grading, inject_superposition, Direction, Evolver, Injection, LatticeGraph, Polarization, Subsite, WalkState,
    SLOTS_PER_CELL,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Windings of the two polarization sectors of a uniform ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterWindings {
    pub h: i32,
    pub v: i32,
}

/// Check that H and V see different windings on `ring`.
pub fn register_windings(ring: &LatticeGraph) -> Result<RegisterWindings, EntangleError> {
    if !ring.spec().periodic {
        return Err(EntangleError::NotARing);
    }
    let h = effective_winding_from_graph(ring, Polarization::H, DEFAULT_NK)?.nu;
    let v = effective_winding_from_graph(ring, Polarization::V, DEFAULT_NK)?.nu;
    if h == v {
        return Err(EntangleError::Misconfigured { nu_h: h, nu_v: v });
    }
    Ok(RegisterWindings { h, v })
}

/// Default write position: rightward edge out of cell 0, subsite A.
pub fn default_register_injection() -> Injection {
    Injection { cell: 0, subsite: Subsite::A, direction: Direction::Right, polarization: Polarization::H }
}

/// Store `α|H⟩ + β|V⟩`, i.e. `α|0_H⟩ + β|1_V⟩` on a ring whose H sector
/// winds differently from its V sector.
pub fn register_write(q: &PolarizationQubit, ring: &LatticeGraph) -> Result<WalkState, EntangleError> {
    register_windings(ring)?;
    Ok(inject_superposition(
        ring,
        &default_register_injection(),
        &[(Polarization::H, q.alpha), (Polarization::V, q.beta)],
    )?)
}

/// Polarization readout `(p_H, p_V)`, normalized to sum to one.
pub fn register_read(state: &WalkState) -> (f64, f64) {
    let h = state.pol_probability(Polarization::H);
    let v = state.pol_probability(Polarization::V);
    let t = h + v;
    if t == 0.0 {
        return (0.0, 0.0);
    }
    (h / t, v / t)
}

/// Local H/V rotation by `arcsin(mix_strength)`, applied after each
/// scheduled step on the listed cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingChannel {
    pub mix_strength: f64,
    /// Steps after which the rotation acts; `None` means every step.
    #[serde(default)]
    pub steps: Option<Vec<usize>>,
    /// Cells on which it acts; `None` means all cells.
    #[serde(default)]
    pub cells: Option<Vec<usize>>,
}

impl MixingChannel {
    pub fn global(mix_strength: f64) -> Self {
        MixingChannel { mix_strength, steps: None, cells: None }
    }

    pub fn angle(&self) -> Result<f64, EntangleError> {
        if !(0.0..=1.0).contains(&self.mix_strength) {
            return Err(EntangleError::InvalidParameter { name: "mix_strength", value: self.mix_strength });
        }
        Ok(self.mix_strength.asin())
    }

    fn acts_at(&self, step: usize) -> bool {
        self.steps.as_ref().is_none_or(|s| s.contains(&step))
    }

    /// Rotate `(h, v) → (c h − s v, s h + c v)` on the channel's cells.
    pub fn apply(&self, state: &mut WalkState, cells: usize) -> Result<(), EntangleError> {
        let a = self.angle()?;
        let (s, c) = a.sin_cos();
        let all: Vec<usize>;
        let list = match &self.cells {
            Some(l) => l,
            None => {
                all = (0..cells).collect();
                &all
            }
        };
        for &cell in list {
            if cell >= cells {
                return Err(EntangleError::InvalidParameter { name: "cell", value: cell as f64 });
            }
            for t in SLOTS_PER_CELL * cell..SLOTS_PER_CELL * (cell + 1) {
                let h = state.amplitudes(Polarization::H)[t];
                let v = state.amplitudes(Polarization::V)[t];
                state.amplitudes_mut(Polarization::H)[t] = c * h - s * v;
                state.amplitudes_mut(Polarization::V)[t] = s * h + c * v;
            }
        }
        Ok(())
    }
}

/// Winding sector of one polarization on a uniform ring: the tracked band
/// and its chiral partner `Γu` (eigenvalue `−λ`), i.e. the two-band chiral
/// subspace that carries the winding.
pub struct RingBand {
    vectors: Vec<CellVector>,
    cells: usize,
}

impl RingBand {
    pub fn new(ring: &LatticeGraph, pol: Polarization) -> Result<Self, EntangleError> {
        if !ring.spec().periodic || !ring.spec().is_uniform() {
            return Err(EntangleError::NotARing);
        }
        let (pa, pb) = ring.spec().phases_of_cell(0).seen_by(pol);
        let band = ring_band_vectors(ring.threeport(), pa, pb, ring.cells())?;
        let g = chiral_grading();
        let partner: Vec<CellVector> = band.iter().map(|v| CellVector::from_fn(|i, _| v[i] * g[i])).collect();
        let vectors = band.into_iter().chain(partner).collect();
        Ok(RingBand { vectors, cells: ring.cells() })
    }

    /// Basis vector `j` and its ring momentum index.
    fn member(&self, j: usize) -> (&CellVector, usize) {
        (&self.vectors[j], j % self.cells)
    }

    /// Cell-resolved Fourier component at `k = 2πm/n`.
    fn fourier(&self, amps: &[C64], m: usize) -> CellVector {
        let k = 2.0 * PI * m as f64 / self.cells as f64;
        let norm = 1.0 / (self.cells as f64).sqrt();
        CellVector::from_fn(|i, _| {
            (0..self.cells)
                .map(|c| amps[SLOTS_PER_CELL * c + i] * C64::from_polar(norm, -k * c as f64))
                .sum()
        })
    }

    /// Probability of `amps` inside the sector.
    pub fn weight(&self, amps: &[C64]) -> f64 {
        let f: Vec<CellVector> = (0..self.cells).map(|m| self.fourier(amps, m)).collect();
        (0..self.vectors.len())
            .map(|j| {
                let (v, m) = self.member(j);
                v.dotc(&f[m]).norm_sqr()
            })
            .sum()
    }

    /// Orthogonal projection of `amps` onto the sector.
    pub fn project(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        let norm = 1.0 / (self.cells as f64).sqrt();
        let f: Vec<CellVector> = (0..self.cells).map(|m| self.fourier(amps, m)).collect();
        for j in 0..self.vectors.len() {
            let (v, m) = self.member(j);
            let k = 2.0 * PI * m as f64 / self.cells as f64;
            let coef = v.dotc(&f[m]);
            for c in 0..self.cells {
                let ph = C64::from_polar(norm, k * c as f64) * coef;
                for i in 0..SLOTS_PER_CELL {
                    out[SLOTS_PER_CELL * c + i] += ph * v[i];
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipRateResult {
    /// Wrong-winding-band probability per mixing encounter.
    pub flip_rate: f64,
    /// Flipped probability that propagates in the other sector's winding band.
    pub wrong_sector_mass: f64,
    /// All flipped probability, band or not.
    pub flipped_mass: f64,
    pub encounters: usize,
}

/// Flip experiment for one stored polarization: the photon starts in its own
/// sector's winding band, mixing acts after each scheduled step, and at the
/// end only flipped probability inside the other sector's winding band
/// counts as an error.
pub fn sector_flip_rate(
    ring: &LatticeGraph,
    stored: Polarization,
    channel: &MixingChannel,
    steps: usize,
) -> Result<FlipRateResult, EntangleError> {
    channel.angle()?;
    let own = RingBand::new(ring, stored)?;
    let other = RingBand::new(ring, stored.other())?;
    let inj = Injection { polarization: stored, ..default_register_injection() };
    let raw = inject_superposition(ring, &inj, &[(stored, C64::new(1.0, 0.0))])?;
    let mut prepared = own.project(raw.amplitudes(stored));
    let n = prepared.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(EntangleError::InvalidParameter { name: "band weight", value: 0.0 });
    }
    prepared.iter_mut().for_each(|z| *z /= n);
    let mut state = WalkState::zeros(ring.slots());
    state.amplitudes_mut(stored).copy_from_slice(&prepared);

    let ev = Evolver::new(ring);
    let mut scratch = Vec::new();
    let mut encounters = 0;
    for _ in 0..steps {
        ev.step_once(&mut state, &mut scratch);
        if channel.acts_at(state.step()) && channel.mix_strength > 0.0 {
            channel.apply(&mut state, ring.cells())?;
            encounters += 1;
        }
    }
    let flipped = state.amplitudes(stored.other());
    let wrong_sector_mass = other.weight(flipped);
    let flipped_mass = flipped.iter().map(|z| z.norm_sqr()).sum();
    let flip_rate = if encounters == 0 { 0.0 } else { wrong_sector_mass / encounters as f64 };
    Ok(FlipRateResult { flip_rate, wrong_sector_mass, flipped_mass, encounters })
}

/// Flip rate of a stored qubit: the sectors are run separately and combined
/// with weights `|α|²`, `|β|²`.
pub fn polarization_flip_rate(
    ring: &LatticeGraph,
    q: &PolarizationQubit,
    channel: &MixingChannel,
    steps: usize,
) -> Result<FlipRateResult, EntangleError> {
    channel.angle()?;
    let (ph, pv) = q.probabilities();
    let mut out = FlipRateResult { flip_rate: 0.0, wrong_sector_mass: 0.0, flipped_mass: 0.0, encounters: 0 };
    for (pol, w) in [(Polarization::H, ph), (Polarization::V, pv)] {
        if w == 0.0 {
            continue;
        }
        let r = sector_flip_rate(ring, pol, channel, steps)?;
        out.flip_rate += w * r.flip_rate;
        out.wrong_sector_mass += w * r.wrong_sector_mass;
        out.flipped_mass += w * r.flipped_mass;
        out.encounters = r.encounters;
    }
    Ok(out)
}
