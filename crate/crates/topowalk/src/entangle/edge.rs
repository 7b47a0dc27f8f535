//! Projection of two-photon states onto "edge state present" (`e`) and
//! "absent" (`∅`) for each polarization.

use crate::entangle::two_photon::{entropy_bits, TwoPhotonState};
use crate::entangle::EntangleError;
use crate::sshmodel::{graph_winding, DEFAULT_NK};
use crate::walkgraph::{inject_with, Evolver, Injection, LatticeGraph, Polarization, WalkState, SLOTS_PER_CELL};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Calibration must leave at least this much probability in the window.
pub const EDGE_MASS_THRESHOLD: f64 = 0.05;
/// Steps averaged at the end of the calibration run for the mass check.
const AVERAGE_TAIL: usize = 20;

/// Basis labels, in order.
pub const EDGE_LABELS: [&str; 4] = ["e_H", "0_H", "e_V", "0_V"];

/// Reference vectors for one chain. A polarization whose two regions wind
/// alike has no `e` vector; its `∅` is then the whole calibration state.
#[derive(Debug, Clone)]
pub struct ChainEdgeBasis {
    /// Indexed like [`EDGE_LABELS`]; each vector lives in one polarization.
    vectors: [Option<Vec<C64>>; 4],
    pub window_mass: [f64; 2],
}

impl ChainEdgeBasis {
    /// Run the injection in each polarization for `steps` steps and split the
    /// final amplitudes at the `±window` cells around `boundary`.
    pub fn calibrate(
        graph: &LatticeGraph,
        inj: &Injection,
        steps: usize,
        boundary: usize,
        window: usize,
    ) -> Result<Self, EntangleError> {
        if boundary == 0 || boundary + 1 >= graph.cells() {
            return Err(EntangleError::InvalidParameter { name: "boundary", value: boundary as f64 });
        }
        let lo = boundary.saturating_sub(window);
        let hi = (boundary + window).min(graph.cells() - 1);
        let ev = Evolver::new(graph);
        let mut vectors: [Option<Vec<C64>>; 4] = Default::default();
        let mut window_mass = [0.0; 2];
        for pol in Polarization::BOTH {
            let mut st = inject_with(graph, &Injection { polarization: pol, ..*inj })?;
            let mut scratch = Vec::new();
            let mut tail = 0.0;
            for s in 1..=steps {
                ev.step_once(&mut st, &mut scratch);
                if s + AVERAGE_TAIL > steps {
                    tail += mass_in_cells(st.amplitudes(pol), lo, hi);
                }
            }
            let tail = tail / AVERAGE_TAIL.min(steps).max(1) as f64;
            window_mass[pol.index()] = tail;
            let amps = st.amplitudes(pol);
            let (inside, outside) = split(amps, lo, hi);
            let has_edge = polarization_sees_boundary(graph, pol)?;
            let i = 2 * pol.index();
            if has_edge {
                if tail < EDGE_MASS_THRESHOLD {
                    return Err(EntangleError::NoEdgeState { polarization: pol, mass: tail });
                }
                vectors[i] = normalized(inside);
                vectors[i + 1] = normalized(outside);
            } else {
                vectors[i + 1] = normalized(amps.to_vec());
            }
        }
        Ok(ChainEdgeBasis { vectors, window_mass })
    }

    pub fn has_edge(&self, pol: Polarization) -> bool {
        self.vectors[2 * pol.index()].is_some()
    }

    /// `⟨b|ψ⟩` for each basis vector (zero where the vector is absent).
    pub fn coordinates(&self, state: &WalkState) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for (i, v) in self.vectors.iter().enumerate() {
            if let Some(v) = v {
                let amps = state.amplitudes(if i < 2 { Polarization::H } else { Polarization::V });
                out[i] = v.iter().zip(amps).map(|(b, a)| b.conj() * a).sum();
            }
        }
        out
    }
}

/// Whether the two regions of a two-region chain wind differently for `pol`.
pub fn polarization_sees_boundary(graph: &LatticeGraph, pol: Polarization) -> Result<bool, EntangleError> {
    let spec = graph.spec();
    if spec.regions.len() != 2 {
        return Err(EntangleError::InvalidParameter { name: "regions", value: spec.regions.len() as f64 });
    }
    let nu = |r: usize| -> Result<i32, EntangleError> {
        let (pa, pb) = spec.regions[r].phases.seen_by(pol);
        Ok(graph_winding(graph.threeport(), pa, pb, DEFAULT_NK)?.nu)
    };
    Ok(nu(0)? != nu(1)?)
}

fn mass_in_cells(amps: &[C64], lo: usize, hi: usize) -> f64 {
    amps[SLOTS_PER_CELL * lo..SLOTS_PER_CELL * (hi + 1)].iter().map(|z| z.norm_sqr()).sum()
}

fn split(amps: &[C64], lo: usize, hi: usize) -> (Vec<C64>, Vec<C64>) {
    let (a, b) = (SLOTS_PER_CELL * lo, SLOTS_PER_CELL * (hi + 1));
    let zero = C64::new(0.0, 0.0);
    let inside = amps.iter().enumerate().map(|(i, &z)| if (a..b).contains(&i) { z } else { zero }).collect();
    let outside = amps.iter().enumerate().map(|(i, &z)| if (a..b).contains(&i) { zero } else { z }).collect();
    (inside, outside)
}

fn normalized(mut v: Vec<C64>) -> Option<Vec<C64>> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-12 {
        return None;
    }
    v.iter_mut().for_each(|z| *z /= n);
    Some(v)
}

/// Calibrated references for both chains of a photon pair.
#[derive(Debug, Clone)]
pub struct EdgeCalibration {
    pub upper: ChainEdgeBasis,
    pub lower: ChainEdgeBasis,
    pub steps: usize,
}

impl EdgeCalibration {
    pub fn new(
        upper: &LatticeGraph,
        lower: &LatticeGraph,
        inj: &Injection,
        steps: usize,
        boundary: usize,
        window: usize,
    ) -> Result<Self, EntangleError> {
        Ok(EdgeCalibration {
            upper: ChainEdgeBasis::calibrate(upper, inj, steps, boundary, window)?,
            lower: ChainEdgeBasis::calibrate(lower, inj, steps, boundary, window)?,
            steps,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeBasisAmplitudes {
    /// `amplitudes[u][l]` over [`EDGE_LABELS`] for the upper and lower photon.
    pub amplitudes: [[C64; 4]; 4],
    /// Probability outside the span of the basis.
    pub residual: f64,
}

impl EdgeBasisAmplitudes {
    /// Probabilities over `{e, ∅} ⊗ {e, ∅}`, polarization summed out;
    /// index 0 is `e`.
    pub fn collapsed(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (i, row) in self.amplitudes.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                out[i % 2][j % 2] += a.norm_sqr();
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.amplitudes.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    /// Entanglement of the state renormalized onto the edge basis.
    pub fn entropy_bits(&self) -> f64 {
        let m = DMatrix::from_fn(4, 4, |i, j| self.amplitudes[i][j]);
        let rho = &m * m.adjoint();
        let w: Vec<f64> = SymmetricEigen::new(rho).eigenvalues.iter().map(|x| x.max(0.0)).collect();
        entropy_bits(&w)
    }
}

/// Joint amplitudes of `state` on the calibrated edge basis.
pub fn edge_projection(state: &TwoPhotonState, cal: &EdgeCalibration) -> Result<EdgeBasisAmplitudes, EntangleError> {
    if state.step() != cal.steps {
        return Err(EntangleError::StepMismatch { state: state.step(), calibration: cal.steps });
    }
    let mut amplitudes = [[C64::new(0.0, 0.0); 4]; 4];
    for t in &state.terms {
        let u = cal.upper.coordinates(&t.upper);
        let l = cal.lower.coordinates(&t.lower);
        for i in 0..4 {
            for j in 0..4 {
                amplitudes[i][j] += t.coefficient * u[i] * l[j];
            }
        }
    }
    let mut out = EdgeBasisAmplitudes { amplitudes, residual: 0.0 };
    out.residual = (state.norm_sqr() - out.total()).max(0.0);
    Ok(out)
}
