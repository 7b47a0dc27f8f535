//! Wavepacket scattering off the interface between two SSH regions whose
//! hoppings are exchanged, `(v, w) | (w, v)`.

use crate::sshmodel::analytic::{site, BlochModel, Evolution, SpectralPropagator};
use crate::sshmodel::SshError;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default carrier momentum.
pub const DEFAULT_K0: f64 = PI / 2.0;
/// Default momentum width, `0.1·2π`.
pub const DEFAULT_SIGMA_K: f64 = 0.2 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSetup {
    pub v: f64,
    pub w: f64,
    pub k0: f64,
    /// Width of the Gaussian momentum amplitude `exp(−(k−k0)²/2σ²)`.
    pub sigma_k: f64,
    /// Packet centre to interface distance, in cells.
    pub start_distance: usize,
    /// Evolution time; `None` picks ten times the centre's arrival time.
    pub time: Option<f64>,
}

impl TransmissionSetup {
    pub fn new(v: f64, w: f64) -> Self {
        TransmissionSetup { v, w, k0: DEFAULT_K0, sigma_k: DEFAULT_SIGMA_K, start_distance: 15, time: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionResult {
    pub transmission: f64,
    pub reflection: f64,
    pub time: f64,
    pub cells: usize,
    /// Probability left in the two outermost cells at each end.
    pub end_mass: f64,
}

/// Mass allowed at the chain ends before the run counts as mis-sized.
const END_MASS_TOL: f64 = 1e-6;

/// Group velocity of the band with energy `sign·|v + w e^{−ik}|`.
fn group_velocity(m: &BlochModel, k: f64, sign: f64) -> f64 {
    let e = crate::sshmodel::analytic::energy(m, k);
    if e == 0.0 {
        return 0.0;
    }
    -sign * m.v * m.w * k.sin() / e
}

/// Two-region chain: cells `0..b` carry `(v, w)`, cells `b..` carry `(w, v)`.
/// The bond from cell `b−1` into cell `b` belongs to the left region.
pub fn two_region_hamiltonian(m: &BlochModel, b: usize, n: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for c in 0..n {
        let (v, w) = if c < b { (m.v, m.w) } else { (m.w, m.v) };
        let (a, bb) = (site(c, false), site(c, true));
        h[(a, bb)] = v;
        h[(bb, a)] = v;
        if c + 1 < n {
            let a2 = site(c + 1, false);
            h[(bb, a2)] = w;
            h[(a2, bb)] = w;
        }
    }
    h
}

/// Gaussian packet in the band moving towards larger cell index, centred
/// on cell `n0`.
pub fn wavepacket(m: &BlochModel, k0: f64, sigma_k: f64, n0: usize, n: usize) -> Result<Vec<C64>, SshError> {
    let sign = if k0.sin() > 0.0 { -1.0 } else { 1.0 };
    if group_velocity(m, k0, sign) <= 0.0 {
        return Err(SshError::InvalidParameter { name: "k0", value: k0 });
    }
    const NK: usize = 4096;
    let mut psi = vec![C64::new(0.0, 0.0); 2 * n];
    // midpoint grid, so k = ±π is never sampled
    let samples: Vec<(f64, f64, C64)> = (0..NK)
        .filter_map(|j| {
            let k = -PI + (j as f64 + 0.5) * 2.0 * PI / NK as f64;
            let g = (-(k - k0).powi(2) / (2.0 * sigma_k * sigma_k)).exp();
            let f = C64::new(m.v, 0.0) + C64::from_polar(m.w, k);
            (g > 1e-18 && f.norm() > 0.0).then(|| (k, g, f / f.norm() * sign))
        })
        .collect();
    for c in 0..n {
        let dn = c as f64 - n0 as f64;
        let (mut a, mut b) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &(k, g, ph) in &samples {
            let e = C64::from_polar(g, k * dn);
            a += e;
            b += e * ph;
        }
        psi[site(c, false)] = a;
        psi[site(c, true)] = b;
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    Ok(psi)
}

pub fn run_transmission(setup: &TransmissionSetup) -> Result<TransmissionResult, SshError> {
    let m = BlochModel::new(setup.v, setup.w)?;
    if !(setup.sigma_k > 0.0 && setup.sigma_k < 1.0) {
        return Err(SshError::InvalidParameter { name: "sigma_k", value: setup.sigma_k });
    }
    let sign = if setup.k0.sin() > 0.0 { -1.0 } else { 1.0 };
    let vg0 = group_velocity(&m, setup.k0, sign);
    if vg0 <= 0.0 {
        return Err(SshError::InvalidParameter { name: "k0", value: setup.k0 });
    }
    let d0 = setup.start_distance.max(1);
    let time = setup.time.unwrap_or(10.0 * d0 as f64 / vg0);
    // no SSH band moves faster than min(v, w) cells per unit time
    let vmax = m.v.min(m.w);
    let half = d0 + (1.25 * vmax * time).ceil() as usize + 40;
    let n = 2 * half;
    let b = half;
    let psi0 = wavepacket(&m, setup.k0, setup.sigma_k, b - d0, n)?;
    let prop = SpectralPropagator::new(two_region_hamiltonian(&m, b, n));
    let psi = prop.apply(&psi0, time, Evolution::MinusIHt);
    let p: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let transmission: f64 = p[2 * b..].iter().sum();
    let reflection: f64 = p[..2 * b].iter().sum();
    let end_mass = p[..4].iter().sum::<f64>() + p[2 * n - 4..].iter().sum::<f64>();
    if end_mass > END_MASS_TOL {
        return Err(SshError::Sizing { end_mass });
    }
    Ok(TransmissionResult { transmission, reflection, time, cells: n, end_mass })
}

/// Transmitted probability for a packet crossing `(v, w) | (w, v)`.
pub fn boundary_transmission(v: f64, w: f64, k0: f64, sigma_k: f64, time: Option<f64>) -> Result<f64, SshError> {
    let setup = TransmissionSetup { v, w, k0, sigma_k, start_distance: 15, time };
    Ok(run_transmission(&setup)?.transmission)
}
