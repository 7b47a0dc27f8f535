//! Bloch form of the one-step operator on a uniform chain.

use crate::multiport::{Port, ThreePortUnitary};
use crate::walkgraph::graph::{decode_slot, slot, wire, RegionPhases, SLOTS_PER_CELL};
use nalgebra::SMatrix;
use num_complex::Complex64 as C64;

pub type CellMatrix = SMatrix<C64, SLOTS_PER_CELL, SLOTS_PER_CELL>;

/// Vertex positions within a cell, measured from the centre of diamond a.
pub const VERTEX_POSITIONS: [f64; 4] = [-0.125, 0.125, 0.375, 0.625];

/// Position of each slot's edge midpoint. The cell is inversion symmetric
/// about the origin (centre of diamond a) and about 1/2 (diamond b).
pub fn slot_positions() -> [f64; SLOTS_PER_CELL] {
    let mut x = [0.0; SLOTS_PER_CELL];
    for (s, xs) in x.iter_mut().enumerate() {
        let (_, v, p) = decode_slot(s);
        let other = if p == Port::A.index() {
            match v {
                0 => VERTEX_POSITIONS[3] - 1.0,
                1 => VERTEX_POSITIONS[2],
                2 => VERTEX_POSITIONS[1],
                _ => VERTEX_POSITIONS[0] + 1.0,
            }
        } else {
            VERTEX_POSITIONS[v ^ 1]
        };
        *xs = 0.5 * (VERTEX_POSITIONS[v] + other);
    }
    x
}

/// One-step operator of a single cell closed on itself (k = 0).
pub fn cell_step_matrix(u: &ThreePortUnitary, phi_a: f64, phi_b: f64) -> CellMatrix {
    let w = wire(1, true, |_| RegionPhases::uniform(phi_a, phi_b));
    let mut s = CellMatrix::zeros();
    for out in 0..SLOTS_PER_CELL {
        let (_, v, pout) = decode_slot(out);
        let tgt = w.partner[out] as usize;
        let ph = w.phase[0][out];
        for pin in 0..3 {
            s[(tgt, 3 * v + pin)] += ph * u.matrix()[(pout, pin)];
        }
    }
    s
}

/// Bloch operator `S(k)` in the position gauge `D S D⁻¹`, `D = diag(e^{-ikx})`.
///
/// Light crossing into the next cell picks up `e^{ik}` relative to the cell
/// it left, so `S(k + 2π) = e^{-2πiX} S(k) e^{2πiX}`.
pub fn bloch_operator(u: &ThreePortUnitary, phi_a: f64, phi_b: f64, k: f64) -> CellMatrix {
    let mut s = cell_step_matrix(u, phi_a, phi_b);
    let into_next = slot(0, 0, Port::A);
    let into_prev = slot(0, 3, Port::A);
    let fwd = C64::from_polar(1.0, -k);
    for c in 9..12 {
        s[(into_next, c)] *= fwd;
    }
    for c in 0..3 {
        s[(into_prev, c)] *= fwd.conj();
    }
    let x = slot_positions();
    let d: Vec<C64> = x.iter().map(|&xi| C64::from_polar(1.0, -k * xi)).collect();
    CellMatrix::from_fn(|i, j| d[i] * s[(i, j)] * d[j].conj())
}

/// Sublattice grading: +1 on slots arriving at even vertices, −1 on odd.
/// Every edge joins an even vertex to an odd one, so `Γ S Γ = −S`.
pub fn chiral_grading() -> [f64; SLOTS_PER_CELL] {
    let mut g = [0.0; SLOTS_PER_CELL];
    for (s, gs) in g.iter_mut().enumerate() {
        let (_, v, _) = decode_slot(s);
        *gs = if v % 2 == 0 { 1.0 } else { -1.0 };
    }
    g
}
