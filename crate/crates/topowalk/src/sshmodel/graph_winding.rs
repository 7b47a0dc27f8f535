//! Effective SSH winding of a uniform multiport chain, read off from the
//! Zak phase of one quasi-energy band of the Bloch step operator.

use crate::multiport::{build_threeport, ThreePortUnitary};
use crate::sshmodel::analytic::BlochModel;
use crate::sshmodel::SshError;
use crate::walkgraph::analysis::fit_line;
use crate::walkgraph::bloch::{bloch_operator, slot_positions, CellMatrix};
use crate::walkgraph::graph::{LatticeGraph, Polarization, SLOTS_PER_CELL};
use nalgebra::{Schur, SVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type CellVector = SVector<C64, SLOTS_PER_CELL>;

/// Overlap below which consecutive k samples are too far apart to track.
const TRACK_MIN_OVERLAP: f64 = 0.5;
const QUANTIZATION_TOL: f64 = 1e-6;
const GAP_TOL: f64 = 1e-9;
pub const DEFAULT_NK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphWinding {
    pub nu: i32,
    /// Twice the Zak phase; `2πν` when quantized.
    pub raw_phase_accumulation: f64,
    pub zak_phase: f64,
    pub n_k: usize,
    /// Smallest distance on the unit circle from the tracked eigenvalue to
    /// any other eigenvalue.
    pub gap: f64,
}

/// Eigenpairs of a unitary `12×12` matrix. A unitary is normal, so its
/// Schur form is diagonal and the Schur vectors are eigenvectors.
pub fn unitary_eigen(m: &CellMatrix) -> Result<Vec<(C64, CellVector)>, SshError> {
    let schur = Schur::try_new(*m, 1e-14, 100_000).ok_or(SshError::NoConvergence)?;
    let (q, t) = schur.unpack();
    Ok((0..SLOTS_PER_CELL).map(|j| (t[(j, j)], q.column(j).into_owned())).collect())
}

/// Quasi-energy `ω` with `λ = e^{−iω}`, in `(−π, π]`.
fn quasi_energy(lambda: C64) -> f64 {
    -lambda.arg()
}

/// Distance of `ω` from the nearest multiple of π.
fn distance_to_zero_or_pi(omega: f64) -> f64 {
    (2.0 * omega).sin().atan2((2.0 * omega).cos()).abs() / 2.0
}

/// Band at `k = 0` whose quasi-energy lies closest to 0 mod π. Chiral
/// partners `λ`, `−λ` share a Zak phase, so ties between them are harmless;
/// `|ω| ≤ π/2` breaks them. When the spectrum is also symmetric under
/// `ω → −ω` (e.g. `φ_a = −φ_b`) the two candidates can disagree; the lower
/// `ω` wins, which is a convention rather than physics.
fn select_band(eig: &[(C64, CellVector)]) -> usize {
    let key = |j: usize| {
        let w = quasi_energy(eig[j].0);
        (distance_to_zero_or_pi(w), (w.abs() > 0.5 * PI) as u8, w)
    };
    (0..eig.len())
        .min_by(|&a, &b| {
            let (ka, kb) = (key(a), key(b));
            if (ka.0 - kb.0).abs() > 1e-9 {
                ka.0.total_cmp(&kb.0)
            } else {
                ka.1.cmp(&kb.1).then(ka.2.total_cmp(&kb.2))
            }
        })
        .unwrap_or(0)
}

/// One point of a tracked band.
#[derive(Debug, Clone)]
pub struct BandSample {
    pub k: f64,
    pub eigenvalue: C64,
    /// Eigenvector of the position-gauge Bloch operator.
    pub vector: CellVector,
    pub gap: f64,
}

/// Follow the selected band over `k ∈ [0, 2π)` at `n_k` points by maximum
/// overlap between neighbouring samples.
pub fn track_band(u: &ThreePortUnitary, phi_a: f64, phi_b: f64, n_k: usize) -> Result<Vec<BandSample>, SshError> {
    if n_k < 16 {
        return Err(SshError::InvalidParameter { name: "n_k", value: n_k as f64 });
    }
    let mut out: Vec<BandSample> = Vec::with_capacity(n_k);
    for j in 0..n_k {
        let k = 2.0 * PI * j as f64 / n_k as f64;
        let eig = unitary_eigen(&bloch_operator(u, phi_a, phi_b, k))?;
        let pick = match out.last() {
            None => select_band(&eig),
            Some(prev) => {
                let (best, ov) = eig
                    .iter()
                    .enumerate()
                    .map(|(i, (_, v))| (i, prev.vector.dotc(v).norm()))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap_or((0, 0.0));
                if ov < TRACK_MIN_OVERLAP {
                    return Err(SshError::Resolution { n_k });
                }
                best
            }
        };
        let lambda = eig[pick].0;
        let gap = eig
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pick)
            .map(|(_, (l, _))| (l - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        out.push(BandSample { k, eigenvalue: lambda, vector: eig[pick].1, gap });
    }
    Ok(out)
}

/// Winding of a uniform chain with the given per-polarization phases.
pub fn graph_winding(u: &ThreePortUnitary, phi_a: f64, phi_b: f64, n_k: usize) -> Result<GraphWinding, SshError> {
    let band = track_band(u, phi_a, phi_b, n_k)?;
    let gap = band.iter().map(|b| b.gap).fold(f64::INFINITY, f64::min);
    if gap < GAP_TOL {
        return Err(SshError::GapClosed);
    }
    // Wilson loop; the last link closes with u(2π) = e^{−2πiX} u(0)
    let x = slot_positions();
    let mut prod = C64::new(1.0, 0.0);
    for w in band.windows(2) {
        let o = w[0].vector.dotc(&w[1].vector);
        prod *= o / o.norm();
    }
    let first = &band[0].vector;
    let closed = CellVector::from_fn(|i, _| first[i] * C64::from_polar(1.0, -2.0 * PI * x[i]));
    let o = band[band.len() - 1].vector.dotc(&closed);
    prod *= o / o.norm();
    let mut zak = -prod.arg();
    if zak <= -0.5 * PI {
        zak += 2.0 * PI;
    }
    let nu = (zak / PI).round() as i32 % 2;
    let raw = 2.0 * zak;
    if (raw / (2.0 * PI) - nu as f64).abs() >= QUANTIZATION_TOL {
        return Err(SshError::NotQuantized { raw_phase_accumulation: raw });
    }
    Ok(GraphWinding { nu, raw_phase_accumulation: raw, zak_phase: zak, n_k, gap })
}

/// Winding seen by `pol` on a single-region chain.
pub fn effective_winding_from_graph(
    graph: &LatticeGraph,
    pol: Polarization,
    n_k: usize,
) -> Result<GraphWinding, SshError> {
    if !graph.spec().is_uniform() {
        return Err(SshError::NotUniform);
    }
    let (pa, pb) = graph.spec().phases_of_cell(0).seen_by(pol);
    graph_winding(graph.threeport(), pa, pb, n_k)
}

/// Winding for raw phases and three-port angle.
pub fn winding_for_phases(theta: f64, phi_a: f64, phi_b: f64) -> Result<GraphWinding, SshError> {
    graph_winding(&build_threeport(theta)?, phi_a, phi_b, DEFAULT_NK)
}

/// Eigenvectors of the tracked band at the ring momenta `k = 2πm/n`, in the
/// plain cell gauge (`φ = e^{ikX} u`), so the ring state with momentum `k`
/// is `e^{ikc} φ / √n` on cell `c`.
pub fn ring_band_vectors(
    u: &ThreePortUnitary,
    phi_a: f64,
    phi_b: f64,
    ring_cells: usize,
) -> Result<Vec<CellVector>, SshError> {
    const REFINE: usize = 8;
    let band = track_band(u, phi_a, phi_b, ring_cells * REFINE)?;
    let x = slot_positions();
    Ok(band
        .iter()
        .step_by(REFINE)
        .map(|b| CellVector::from_fn(|i, _| b.vector[i] * C64::from_polar(1.0, b.k * x[i])))
        .collect())
}

/// All quasi-energies at each of `n_k` momenta, sorted ascending.
pub fn graph_bands(u: &ThreePortUnitary, phi_a: f64, phi_b: f64, n_k: usize) -> Result<Vec<(f64, Vec<f64>)>, SshError> {
    (0..n_k)
        .map(|j| {
            let k = 2.0 * PI * j as f64 / n_k as f64;
            let mut w: Vec<f64> =
                unitary_eigen(&bloch_operator(u, phi_a, phi_b, k))?.iter().map(|(l, _)| quasi_energy(*l)).collect();
            w.sort_by(f64::total_cmp);
            Ok((k, w))
        })
        .collect()
}

/// SSH model whose band edges match the tracked band. Fitting
/// `ω(k)² = A + B cos k` gives the band at `k = 0` and `k = π`; the larger
/// of the two is `v + w`, the smaller `|v − w|`. The larger hopping goes to
/// `w` when the chain winds. Diagnostic only: when the tracked band crosses
/// `ω = 0` (mod π) the two-band form does not apply and the fit degenerates
/// to `v = w`.
pub fn fit_ssh_from_graph(u: &ThreePortUnitary, phi_a: f64, phi_b: f64, n_k: usize) -> Result<BlochModel, SshError> {
    let wind = graph_winding(u, phi_a, phi_b, n_k)?;
    let band = track_band(u, phi_a, phi_b, n_k)?;
    let xs: Vec<f64> = band.iter().map(|b| b.k.cos()).collect();
    let ys: Vec<f64> = band.iter().map(|b| distance_to_zero_or_pi(quasi_energy(b.eigenvalue)).powi(2)).collect();
    let fit = fit_line(&xs, &ys)?;
    let (a, b) = (fit.intercept, fit.slope);
    let (e0, epi) = ((a + b).max(0.0).sqrt(), (a - b).max(0.0).sqrt());
    let (sum, diff) = (e0.max(epi), e0.min(epi));
    let (hi, lo) = (0.5 * (sum + diff), 0.5 * (sum - diff).max(0.0));
    if wind.nu == 1 {
        BlochModel::new(lo, hi)
    } else {
        BlochModel::new(hi, lo)
    }
}
