use crate::sshmodel::SshError;
use nalgebra::{DMatrix, DVector as NVec, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this energy the Bloch direction is undefined.
const SINGULAR_TOL: f64 = 1e-12;

/// Two-band SSH model with intracell hopping `v` and intercell hopping `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochModel {
    pub v: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DVector {
    pub dx: f64,
    pub dy: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub nu: i32,
    pub raw_phase_accumulation: f64,
    pub n_k: usize,
    /// Smallest separation between the tracked band and any other band.
    pub gap: f64,
}

impl BlochModel {
    pub fn new(v: f64, w: f64) -> Result<Self, SshError> {
        for (name, x) in [("v", v), ("w", w)] {
            if !x.is_finite() || x < 0.0 {
                return Err(SshError::InvalidParameter { name, value: x });
            }
        }
        Ok(BlochModel { v, w })
    }

    pub fn gap_closed(&self) -> bool {
        (self.v - self.w).abs() <= 1e-12
    }

    pub fn d_vector(&self, k: f64) -> DVector {
        DVector { dx: self.v + self.w * k.cos(), dy: self.w * k.sin(), k }
    }

    /// `(v−w)/(v+w)`, the contrast that controls boundary reflection.
    pub fn contrast(&self) -> f64 {
        (self.v - self.w) / (self.v + self.w)
    }

    /// Model with the given hopping sum and contrast.
    pub fn from_contrast(sum: f64, contrast: f64) -> Result<Self, SshError> {
        Self::new(0.5 * sum * (1.0 + contrast), 0.5 * sum * (1.0 - contrast))
    }

    pub fn swapped(&self) -> Self {
        BlochModel { v: self.w, w: self.v }
    }
}

pub fn energy(m: &BlochModel, k: f64) -> f64 {
    (m.v * m.v + m.w * m.w + 2.0 * m.v * m.w * k.cos()).max(0.0).sqrt()
}

/// Berry-phase angle `θ_k = arctan[((v−w)/(v+w)) tan(k/2)]`, taken from the
/// two-argument arctangent so it stays continuous across `k = ±π`.
pub fn theta_k(m: &BlochModel, k: f64) -> Result<f64, SshError> {
    if energy(m, k) <= SINGULAR_TOL {
        return Err(SshError::Singular { k });
    }
    let h = 0.5 * k;
    Ok(((m.v - m.w) * h.sin()).atan2((m.v + m.w) * h.cos()))
}

/// `H(k) = E_k [[0, e^{i(θ_k − k/2)}], [e^{−i(θ_k − k/2)}, 0]]`.
pub fn bloch_h(m: &BlochModel, k: f64) -> Matrix2<C64> {
    let e = energy(m, k);
    let zero = C64::new(0.0, 0.0);
    match theta_k(m, k) {
        Ok(th) => {
            let off = C64::from_polar(e, th - 0.5 * k);
            Matrix2::new(zero, off, off.conj(), zero)
        }
        Err(_) => Matrix2::zeros(),
    }
}

/// `Γ = exp(−iπσ_z/2)`.
pub fn chiral_operator() -> Matrix2<C64> {
    Matrix2::new(-C64::i(), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::i())
}

/// `|±⟩ = (1, ±e^{−i(θ_k − k/2)})/√2`, returned as `(|+⟩, |−⟩)`.
pub fn eigenvectors(m: &BlochModel, k: f64) -> Result<(Vector2<C64>, Vector2<C64>), SshError> {
    let th = theta_k(m, k)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ph = C64::from_polar(s, -(th - 0.5 * k));
    let a = C64::new(s, 0.0);
    Ok((Vector2::new(a, ph), Vector2::new(a, -ph)))
}

/// Winding of `arg(dx + i·dy)` over one Brillouin zone sampled at `n_k`
/// points.
pub fn winding_number(m: &BlochModel, n_k: usize) -> Result<WindingResult, SshError> {
    if n_k < 64 {
        return Err(SshError::InvalidParameter { name: "n_k", value: n_k as f64 });
    }
    if m.gap_closed() {
        return Err(SshError::GapClosed);
    }
    let angle = |j: usize| {
        let d = m.d_vector(-PI + 2.0 * PI * j as f64 / n_k as f64);
        d.dy.atan2(d.dx)
    };
    let mut total = 0.0;
    let mut prev = angle(0);
    for j in 1..=n_k {
        let cur = angle(j);
        let step = (cur - prev + PI).rem_euclid(2.0 * PI) - PI;
        if step.abs() > 0.5 * PI {
            return Err(SshError::Resolution { n_k });
        }
        total += step;
        prev = cur;
    }
    Ok(WindingResult {
        nu: (total / (2.0 * PI)).round() as i32,
        raw_phase_accumulation: total,
        n_k,
        gap: 2.0 * (m.v - m.w).abs(),
    })
}

/// Site index of `(cell, subsite)` in the `2N` real-space basis.
#[inline]
pub fn site(cell: usize, b_subsite: bool) -> usize {
    2 * cell + b_subsite as usize
}

/// Amplitudes over `(cell, A/B)` for a photon started on `(n0, A)`, from the
/// Bloch sum with Kronecker-delta Wannier functions:
///
/// `ψ(n,A) = (1/N) Σ_k e^{ik(n−n0)} cos(E_k t)`,
/// `ψ(n,B) = (1/N) Σ_k e^{ik(n−n0)} i e^{−iθ_k + ik/2} sin(E_k t)`.
pub fn ssh_wavefunction(m: &BlochModel, n0: usize, t: f64, n: usize) -> Result<Vec<C64>, SshError> {
    if n < 8 {
        return Err(SshError::InvalidParameter { name: "N", value: n as f64 });
    }
    if n0 >= n {
        return Err(SshError::InvalidParameter { name: "n0", value: n0 as f64 });
    }
    let mut coef = Vec::with_capacity(n);
    for j in 0..n {
        let k = -PI + 2.0 * PI * j as f64 / n as f64;
        let e = energy(m, k);
        let a = C64::new((e * t).cos(), 0.0);
        let b = match theta_k(m, k) {
            Ok(th) => C64::i() * C64::from_polar(1.0, -th + 0.5 * k) * (e * t).sin(),
            // E_k = 0: the sine factor vanishes
            Err(_) => C64::new(0.0, 0.0),
        };
        coef.push((k, a, b));
    }
    let mut out = vec![C64::new(0.0, 0.0); 2 * n];
    let inv = 1.0 / n as f64;
    for cell in 0..n {
        let dn = cell as f64 - n0 as f64;
        let (mut sa, mut sb) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &(k, a, b) in &coef {
            let ph = C64::from_polar(1.0, k * dn);
            sa += ph * a;
            sb += ph * b;
        }
        out[site(cell, false)] = sa * inv;
        out[site(cell, true)] = sb * inv;
    }
    Ok(out)
}

/// Real-space Hamiltonian: `v` on `(n,A)–(n,B)`, `w` on `(n,B)–(n+1,A)`.
pub fn real_space_hamiltonian(m: &BlochModel, n: usize, periodic: bool) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for c in 0..n {
        let (a, b) = (site(c, false), site(c, true));
        h[(a, b)] = m.v;
        h[(b, a)] = m.v;
        if c + 1 < n || periodic {
            let a2 = site((c + 1) % n, false);
            h[(b, a2)] += m.w;
            h[(a2, b)] += m.w;
        }
    }
    h
}

/// Sign in the exponent of the propagator. The Bloch-sum wavefunction above
/// corresponds to `e^{+iHt}`; `e^{−iHt}` differs from it by the chiral map
/// `B → −B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evolution {
    MinusIHt,
    PlusIHt,
}

impl Evolution {
    fn sign(self) -> f64 {
        match self {
            Evolution::MinusIHt => -1.0,
            Evolution::PlusIHt => 1.0,
        }
    }
}

/// Diagonalized real symmetric Hamiltonian, reusable for many times.
pub struct SpectralPropagator {
    values: NVec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralPropagator {
    pub fn new(h: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(h);
        SpectralPropagator { values: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    /// `e^{±iHt} ψ`.
    pub fn apply(&self, psi: &[C64], t: f64, dir: Evolution) -> Vec<C64> {
        let n = psi.len();
        let v = &self.vectors;
        let mut coeff = vec![C64::new(0.0, 0.0); n];
        for (j, c) in coeff.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += psi[i] * v[(i, j)];
            }
            *c = acc * C64::from_polar(1.0, dir.sign() * self.values[j] * t);
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let c = coeff[j];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..n {
                out[i] += c * v[(i, j)];
            }
        }
        out
    }
}

/// Independent check of [`ssh_wavefunction`]: diagonalize the periodic
/// real-space Hamiltonian and apply the exact exponential to `(n0, A)`.
pub fn exact_evolution_oracle(m: &BlochModel, n0: usize, t: f64, n: usize) -> Vec<C64> {
    exact_evolution(m, n0, t, n, Evolution::PlusIHt)
}

pub fn exact_evolution(m: &BlochModel, n0: usize, t: f64, n: usize, dir: Evolution) -> Vec<C64> {
    let prop = SpectralPropagator::new(real_space_hamiltonian(m, n, true));
    let mut psi = vec![C64::new(0.0, 0.0); 2 * n];
    psi[site(n0, false)] = C64::new(1.0, 0.0);
    prop.apply(&psi, t, dir)
}
