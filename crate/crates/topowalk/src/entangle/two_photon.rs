use crate::entangle::EntangleError;
use crate::walkgraph::{inject_with, Evolver, Injection, LatticeGraph, Polarization, WalkState};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const NORM_TOL: f64 = 1e-10;
/// Eigenvalues of a Gram matrix below this are treated as zero.
const RANK_TOL: f64 = 1e-13;

/// `α|H⟩ + β|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationQubit {
    pub alpha: C64,
    pub beta: C64,
}

impl PolarizationQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self, EntangleError> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(EntangleError::NotNormalized { norm_sqr: n });
        }
        Ok(PolarizationQubit { alpha, beta })
    }

    /// Normalizes the given pair; fails only on the zero vector.
    pub fn normalized(alpha: C64, beta: C64) -> Result<Self, EntangleError> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(EntangleError::NotNormalized { norm_sqr: n * n });
        }
        Ok(PolarizationQubit { alpha: alpha / n, beta: beta / n })
    }

    pub fn h() -> Self {
        PolarizationQubit { alpha: C64::new(1.0, 0.0), beta: C64::new(0.0, 0.0) }
    }

    pub fn v() -> Self {
        PolarizationQubit { alpha: C64::new(0.0, 0.0), beta: C64::new(1.0, 0.0) }
    }

    pub fn amplitude(&self, pol: Polarization) -> C64 {
        match pol {
            Polarization::H => self.alpha,
            Polarization::V => self.beta,
        }
    }

    /// Expected readout `(|α|², |β|²)`.
    pub fn probabilities(&self) -> (f64, f64) {
        (self.alpha.norm_sqr(), self.beta.norm_sqr())
    }
}

#[derive(Debug, Clone)]
pub struct TwoPhotonTerm {
    pub coefficient: C64,
    pub upper: WalkState,
    pub lower: WalkState,
}

/// A sum of product states over an upper and a lower chain.
#[derive(Debug, Clone)]
pub struct TwoPhotonState {
    pub terms: Vec<TwoPhotonTerm>,
}

impl TwoPhotonState {
    pub fn product(upper: WalkState, lower: WalkState) -> Self {
        TwoPhotonState { terms: vec![TwoPhotonTerm { coefficient: C64::new(1.0, 0.0), upper, lower }] }
    }

    pub fn step(&self) -> usize {
        self.terms.first().map_or(0, |t| t.upper.step())
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &self.terms {
                acc += a.coefficient.conj() * b.coefficient * a.upper.inner(&b.upper) * a.lower.inner(&b.lower);
            }
        }
        acc.re
    }

    /// Probability that the photon on each chain carries the given
    /// polarization, as a 2×2 table indexed `[upper][lower]` (H = 0).
    pub fn polarization_table(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for pu in Polarization::BOTH {
            for pl in Polarization::BOTH {
                let mut acc = C64::new(0.0, 0.0);
                for a in &self.terms {
                    for b in &self.terms {
                        let iu = pol_inner(&a.upper, &b.upper, pu);
                        let il = pol_inner(&a.lower, &b.lower, pl);
                        acc += a.coefficient.conj() * b.coefficient * iu * il;
                    }
                }
                out[pu.index()][pl.index()] = acc.re;
            }
        }
        out
    }
}

fn pol_inner(a: &WalkState, b: &WalkState, pol: Polarization) -> C64 {
    a.amplitudes(pol).iter().zip(b.amplitudes(pol)).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Upper,
    Lower,
}

/// `(|H⟩_u|V⟩_l ± |V⟩_u|H⟩_l)/√2`, each photon injected at `inj` on its
/// own chain (the injection's polarization field is ignored).
pub fn bell_state(
    sign: BellSign,
    upper: &LatticeGraph,
    lower: &LatticeGraph,
    inj: &Injection,
) -> Result<TwoPhotonState, EntangleError> {
    let photon = |g: &LatticeGraph, pol| inject_with(g, &Injection { polarization: pol, ..*inj });
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = match sign {
        BellSign::Plus => h,
        BellSign::Minus => -h,
    };
    Ok(TwoPhotonState {
        terms: vec![
            TwoPhotonTerm {
                coefficient: C64::new(h, 0.0),
                upper: photon(upper, Polarization::H)?,
                lower: photon(lower, Polarization::V)?,
            },
            TwoPhotonTerm {
                coefficient: C64::new(s, 0.0),
                upper: photon(upper, Polarization::V)?,
                lower: photon(lower, Polarization::H)?,
            },
        ],
    })
}

/// Non-interacting photons: every factor evolves under its own chain.
pub fn evolve_two_photon(state: &TwoPhotonState, upper: &Evolver, lower: &Evolver, steps: usize) -> TwoPhotonState {
    let terms = state
        .terms
        .par_iter()
        .map(|t| {
            let (mut u, mut l) = (t.upper.clone(), t.lower.clone());
            upper.run(&mut u, steps);
            lower.run(&mut l, steps);
            TwoPhotonTerm { coefficient: t.coefficient, upper: u, lower: l }
        })
        .collect();
    TwoPhotonState { terms }
}

/// Schmidt coefficients (squared) of `Σ_i c_i |u_i⟩|l_i⟩`, from the Gram
/// matrices of the factors; the full tensor product is never formed.
pub fn schmidt_weights(state: &TwoPhotonState) -> Vec<f64> {
    let m = state.terms.len();
    if m == 0 {
        return Vec::new();
    }
    let gram = |f: &dyn Fn(&TwoPhotonTerm) -> &WalkState| {
        DMatrix::from_fn(m, m, |i, j| f(&state.terms[i]).inner(f(&state.terms[j])))
    };
    let ru = gram_factor(gram(&|t| &t.upper));
    let rl = gram_factor(gram(&|t| &t.lower));
    // M = R_u diag(c) R_lᵀ, so that the state is Σ M_ab |a⟩|b⟩ in orthonormal bases
    let c = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(m, state.terms.iter().map(|t| t.coefficient)));
    let mm = &ru * c * rl.transpose();
    let rho = &mm * mm.adjoint();
    let mut w: Vec<f64> = SymmetricEigen::new(rho).eigenvalues.iter().map(|x| x.max(0.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w
}

/// `R` with `G = R† R`, rows restricted to the nonzero spectrum.
fn gram_factor(g: DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(g);
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > RANK_TOL).collect();
    let m = eig.eigenvectors.nrows();
    DMatrix::from_fn(keep.len(), m, |r, j| {
        let i = keep[r];
        eig.eigenvectors[(j, i)].conj() * eig.eigenvalues[i].sqrt()
    })
}

/// Von Neumann entropy in bits of `weights` (need not be normalized).
pub fn entropy_bits(weights: &[f64]) -> f64 {
    let t: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|&w| w / t)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.log2())
        .sum()
}

/// Entropy of the reduced state of either photon over its full
/// polarization ⊗ position space. Both partitions give the same value for
/// a pure state; the argument is kept for clarity at call sites.
pub fn entanglement_entropy(state: &TwoPhotonState, _partition: Partition) -> Result<f64, EntangleError> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(EntangleError::NotNormalized { norm_sqr: n });
    }
    Ok(entropy_bits(&schmidt_weights(state)))
}
