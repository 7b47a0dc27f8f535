//! Directionally-unbiased three-ports and the diamond units built from them.
//!
//! Ports are labelled A, B, C. A photon entering any port may leave through
//! any port, including the one it came in through.

use nalgebra::{Matrix2, Matrix3, SMatrix, Vector2};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use thiserror::Error;

/// Entrywise tolerance used for every unitarity check on small matrices.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiportError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("quasi-energy {omega} hits a bound mode of the diamond; response is singular")]
    SingularResponse { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Port {
    A = 0,
    B = 1,
    C = 2,
}

impl Port {
    pub const ALL: [Port; 3] = [Port::A, Port::B, Port::C];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Wrap a phase into [0, 2π).
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    // rem_euclid can return 2π itself for tiny negative inputs
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Three-port scattering matrix with all mirror units sharing one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePortUnitary {
    theta: f64,
    matrix: Matrix3<C64>,
}

impl ThreePortUnitary {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.matrix
    }

    /// Amplitude to leave through `out` after entering through `inp`.
    pub fn amp(&self, out: Port, inp: Port) -> C64 {
        self.matrix[(out.index(), inp.index())]
    }

    /// Prefactor `e^{iθ}/(2 + i e^{iθ})`.
    pub fn prefactor(&self) -> C64 {
        prefactor(self.theta)
    }

    /// Off-diagonal entry before the prefactor, `i e^{-iθ} - 1`.
    pub fn off_diagonal(&self) -> C64 {
        off_diagonal(self.theta)
    }

    pub fn unitarity_defect(&self) -> f64 {
        max_abs(&(self.matrix.adjoint() * self.matrix - Matrix3::identity()))
    }
}

fn prefactor(theta: f64) -> C64 {
    let e = C64::from_polar(1.0, theta);
    e / (C64::new(2.0, 0.0) + C64::i() * e)
}

fn off_diagonal(theta: f64) -> C64 {
    C64::i() * C64::from_polar(1.0, -theta) - 1.0
}

pub(crate) fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn build_threeport(theta: f64) -> Result<ThreePortUnitary, MultiportError> {
    if !theta.is_finite() {
        return Err(MultiportError::InvalidParameter { name: "theta", value: theta });
    }
    let p = prefactor(theta);
    let q = off_diagonal(theta);
    let one = C64::new(1.0, 0.0);
    let matrix = Matrix3::new(one, q, q, q, one, q, q, q, one) * p;
    Ok(ThreePortUnitary { theta, matrix })
}

/// Two three-ports joined port-to-port: B–B directly, C–C through a phase
/// shifter `e^{iφ}`. The two A ports are the external left/right ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondUnit {
    phi: f64,
    left: ThreePortUnitary,
    right: ThreePortUnitary,
}

/// Internal wiring: which port of the right three-port each port of the left
/// one is joined to, and with what phase. `None` marks the external port.
pub fn diamond_wiring(phi: f64) -> [(Port, Option<(Port, C64)>); 3] {
    [
        (Port::A, None),
        (Port::B, Some((Port::B, C64::new(1.0, 0.0)))),
        (Port::C, Some((Port::C, C64::from_polar(1.0, phi)))),
    ]
}

pub fn compose_diamond(
    phi: f64,
    t1: ThreePortUnitary,
    t2: ThreePortUnitary,
) -> Result<DiamondUnit, MultiportError> {
    if !phi.is_finite() {
        return Err(MultiportError::InvalidParameter { name: "phi", value: phi });
    }
    Ok(DiamondUnit { phi: wrap_phase(phi), left: t1, right: t2 })
}

impl DiamondUnit {
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn left(&self) -> &ThreePortUnitary {
        &self.left
    }

    pub fn right(&self) -> &ThreePortUnitary {
        &self.right
    }

    pub fn edge_phase(&self, port: Port) -> Option<C64> {
        diamond_wiring(self.phi)[port.index()].1.map(|(_, ph)| ph)
    }

    /// One scattering step of the isolated diamond.
    ///
    /// Slots are incoming amplitudes `(L.A, L.B, L.C, R.A, R.B, R.C)`. Light
    /// leaving an external A port is sent straight back into it, so the
    /// matrix is a closed unitary.
    pub fn step_matrix(&self) -> SMatrix<C64, 6, 6> {
        let mut s = SMatrix::<C64, 6, 6>::zeros();
        let wiring = diamond_wiring(self.phi);
        for (side, u) in [(0usize, &self.left), (1usize, &self.right)] {
            for pout in Port::ALL {
                let (tgt, ph) = match wiring[pout.index()].1 {
                    None => (3 * side + pout.index(), C64::new(1.0, 0.0)),
                    Some((other, ph)) => (3 * (1 - side) + other.index(), ph),
                };
                for pin in Port::ALL {
                    s[(tgt, 3 * side + pin.index())] += ph * u.amp(pout, pin);
                }
            }
        }
        s
    }

    /// Steady-state two-port response at quasi-energy `omega` (one step
    /// multiplies a stationary amplitude by `e^{-iω}`).
    ///
    /// Returns the 2×2 matrix mapping amplitudes arriving at the external
    /// (left A, right A) ports to the amplitudes leaving them.
    pub fn response(&self, omega: f64) -> Result<Matrix2<C64>, MultiportError> {
        let (ul, ur) = (self.left.matrix(), self.right.matrix());
        let eiphi = C64::from_polar(1.0, self.phi);
        // internal slots: (L.B, L.C, R.B, R.C) incoming
        // routing of internal outputs: L.B->R.B, L.C->R.C (e^{iφ}), and back
        let route = |side: usize, port: usize| -> (usize, C64) {
            let ph = if port == 2 { eiphi } else { C64::new(1.0, 0.0) };
            (2 * (1 - side) + (port - 1), ph)
        };
        let mut m = SMatrix::<C64, 4, 4>::zeros();
        let mut drive = SMatrix::<C64, 4, 2>::zeros();
        for (side, u) in [(0usize, ul), (1usize, ur)] {
            for pout in 1..3 {
                let (tgt, ph) = route(side, pout);
                for pin in 1..3 {
                    m[(tgt, 2 * side + pin - 1)] += ph * u[(pout, pin)];
                }
                drive[(tgt, side)] += ph * u[(pout, 0)];
            }
        }
        let z = C64::from_polar(1.0, -omega);
        let lhs = SMatrix::<C64, 4, 4>::identity() * z - m;
        let inv = lhs
            .try_inverse()
            .filter(|inv| inv.iter().all(|x| x.is_finite() && x.norm() < 1e10))
            .ok_or(MultiportError::SingularResponse { omega })?;
        let x = inv * drive;
        let mut out = Matrix2::<C64>::zeros();
        for (side, u) in [(0usize, ul), (1usize, ur)] {
            let direct = u[(0, 0)];
            out[(side, side)] += direct;
            for col in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for pin in 1..3 {
                    acc += u[(0, pin)] * x[(2 * side + pin - 1, col)];
                }
                out[(side, col)] += acc;
            }
        }
        Ok(out)
    }

    /// Transmission and reflection probabilities seen from the left port.
    pub fn transmission_reflection(&self, omega: f64) -> Result<Vector2<f64>, MultiportError> {
        let s = self.response(omega)?;
        Ok(Vector2::new(s[(1, 0)].norm_sqr(), s[(0, 0)].norm_sqr()))
    }
}
