use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use std::f64::consts::PI;
use topowalk::entangle::{
    bell_state, edge_projection, entanglement_entropy, entropy_bits, evolve_two_photon, polarization_flip_rate,
    register_read, register_windings, register_write, schmidt_weights, sector_flip_rate, BellSign, EdgeCalibration,
    EntangleError, MixingChannel, Partition, PolarizationQubit, RegisterWindings, RingBand, TwoPhotonState,
    TwoPhotonTerm,
};
use topowalk::experiments::{preset, run, Experiment};
use topowalk::walkgraph::{
    build_chain, inject, inject_with, ChainSpec, Direction, Evolver, Injection, LatticeGraph, Polarization, Region,
    RegionPhases, Subsite, WalkState,
};

const THETA: f64 = 3.0 * PI / 2.0;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn chain(phases: RegionPhases, cells: usize) -> LatticeGraph {
    build_chain(&ChainSpec::uniform(phases, cells, THETA).unwrap()).unwrap()
}

fn ring(phases: RegionPhases, cells: usize) -> LatticeGraph {
    build_chain(&ChainSpec::ring(vec![Region { phases, cells }], THETA).unwrap()).unwrap()
}

/// H winds 0, V winds 1.
fn register_phases() -> RegionPhases {
    RegionPhases::new(-PI / 2.0, 3.0, 0.0)
}

fn flat(st: &WalkState) -> Vec<C64> {
    let mut v = st.amplitudes(Polarization::H).to_vec();
    v.extend_from_slice(st.amplitudes(Polarization::V));
    v
}

// Entropy from the full two-photon amplitude matrix and its SVD.
fn dense_entropy(state: &TwoPhotonState) -> f64 {
    let t0 = &state.terms[0];
    let (nu, nl) = (2 * t0.upper.slots(), 2 * t0.lower.slots());
    let mut m = DMatrix::<C64>::zeros(nu, nl);
    for t in &state.terms {
        let (u, l) = (flat(&t.upper), flat(&t.lower));
        for i in 0..nu {
            if u[i] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..nl {
                m[(i, j)] += t.coefficient * u[i] * l[j];
            }
        }
    }
    let s = m.svd(false, false).singular_values;
    let w: Vec<f64> = s.iter().map(|x| x * x).collect();
    entropy_bits(&w)
}

// Reduced polarization state of the upper photon.
fn upper_polarization_rho(state: &TwoPhotonState) -> [[C64; 2]; 2] {
    let mut rho = [[c(0.0, 0.0); 2]; 2];
    for a in &state.terms {
        for b in &state.terms {
            let lower = b.lower.inner(&a.lower);
            for p in Polarization::BOTH {
                for q in Polarization::BOTH {
                    let pos: C64 = a
                        .upper
                        .amplitudes(p)
                        .iter()
                        .zip(b.upper.amplitudes(q))
                        .map(|(x, y)| x * y.conj())
                        .sum();
                    rho[p.index()][q.index()] += a.coefficient * b.coefficient.conj() * lower * pos;
                }
            }
        }
    }
    rho
}

#[test]
fn qubit_normalization() {
    assert!(matches!(PolarizationQubit::new(c(1.0, 0.0), c(1.0, 0.0)), Err(EntangleError::NotNormalized { .. })));
    let q = PolarizationQubit::normalized(c(3.0, 0.0), c(0.0, 4.0)).unwrap();
    let (ph, pv) = q.probabilities();
    assert!((ph - 0.36).abs() < 1e-15 && (pv - 0.64).abs() < 1e-15);
    assert!(PolarizationQubit::normalized(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    assert_eq!(PolarizationQubit::h().amplitude(Polarization::H), c(1.0, 0.0));
    assert_eq!(PolarizationQubit::v().amplitude(Polarization::H), c(0.0, 0.0));
}

#[test]
fn bell_state_structure() {
    let g = chain(register_phases(), 40);
    let inj = Injection::new(20, Subsite::A, Polarization::V);
    for (sign, s) in [(BellSign::Plus, 1.0), (BellSign::Minus, -1.0)] {
        let b = bell_state(sign, &g, &g, &inj).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(b.terms.len(), 2);
        assert_eq!(b.terms[0].coefficient, c(h, 0.0));
        assert_eq!(b.terms[1].coefficient, c(s * h, 0.0));
        assert!((b.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(b.terms[0].upper.pol_probability(Polarization::H), 1.0);
        assert_eq!(b.terms[0].lower.pol_probability(Polarization::V), 1.0);
        let rho = upper_polarization_rho(&b);
        for (i, row) in rho.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { 0.5 } else { 0.0 };
                assert!((x - want).norm() < 1e-15);
            }
        }
        let t = b.polarization_table();
        assert!(t[0][0] == 0.0 && t[1][1] == 0.0);
        assert!((t[0][1] - 0.5).abs() < 1e-15 && (t[1][0] - 0.5).abs() < 1e-15);
        assert!((entanglement_entropy(&b, Partition::Upper).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn factorwise_evolution_follows_each_polarization() {
    // H sees the ν = 0 operator, V the ν = 1 operator
    let g = chain(register_phases(), 120);
    let h_only = chain(RegionPhases::uniform(-PI / 2.0, 3.0), 120);
    let v_only = chain(RegionPhases::uniform(-PI / 2.0, 0.0), 120);
    let inj = Injection::new(60, Subsite::A, Polarization::V);
    let ev = Evolver::new(&g);
    let s = evolve_two_photon(&bell_state(BellSign::Plus, &g, &g, &inj).unwrap(), &ev, &ev, 50);
    assert_eq!(s.terms.len(), 2);
    assert_eq!(s.step(), 50);
    let mut h = inject(&h_only, 60, Subsite::A, Polarization::H).unwrap();
    Evolver::new(&h_only).run(&mut h, 50);
    let mut v = inject(&v_only, 60, Subsite::A, Polarization::V).unwrap();
    Evolver::new(&v_only).run(&mut v, 50);
    assert_eq!(s.terms[0].upper, h);
    assert_eq!(s.terms[0].lower, v);
    let rho = upper_polarization_rho(&s);
    assert!((rho[0][0] - 0.5).norm() < 1e-12 && rho[0][1].norm() < 1e-12);
}

#[test]
fn norm_and_entropy_over_500_steps() {
    let gu = build_chain(&ChainSpec::ring(vec![Region { phases: register_phases(), cells: 30 }], THETA).unwrap()).unwrap();
    let gl = build_chain(
        &ChainSpec::two_region(RegionPhases::new(-PI / 2.0, 1.0, 0.0), RegionPhases::new(-PI / 2.0, 1.0, 3.0), 15, 30, THETA)
            .unwrap(),
    )
    .unwrap();
    let inj = Injection::new(14, Subsite::B, Polarization::V).direction(Direction::Symmetric);
    let s0 = bell_state(BellSign::Minus, &gu, &gl, &inj).unwrap();
    let e0 = entanglement_entropy(&s0, Partition::Upper).unwrap();
    let (eu, el) = (Evolver::new(&gu), Evolver::new(&gl));
    let mut s = s0;
    for _ in 0..5 {
        s = evolve_two_photon(&s, &eu, &el, 100);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let e = entanglement_entropy(&s, Partition::Upper).unwrap();
        assert!((e - e0).abs() < 1e-8);
        assert_eq!(e, entanglement_entropy(&s, Partition::Lower).unwrap());
    }
    assert!((dense_entropy(&s) - e0).abs() < 1e-8);
}

#[test]
fn product_states_carry_no_entropy() {
    let g = chain(register_phases(), 20);
    let u = inject(&g, 5, Subsite::A, Polarization::H).unwrap();
    let l = inject(&g, 12, Subsite::B, Polarization::V).unwrap();
    let p = TwoPhotonState::product(u.clone(), l);
    assert!(entanglement_entropy(&p, Partition::Upper).unwrap().abs() < 1e-12);
    let ev = Evolver::new(&g);
    let q = evolve_two_photon(&p, &ev, &ev, 30);
    assert_eq!(q.terms.len(), 1);
    assert!(entanglement_entropy(&q, Partition::Lower).unwrap().abs() < 1e-12);
    assert_eq!(schmidt_weights(&TwoPhotonState { terms: vec![] }), Vec::<f64>::new());

    let mut half = p.clone();
    half.terms[0].coefficient = c(0.5, 0.0);
    assert!(matches!(entanglement_entropy(&half, Partition::Upper), Err(EntangleError::NotNormalized { .. })));
}

#[test]
fn entropy_bits_values() {
    assert_eq!(entropy_bits(&[1.0]), 0.0);
    assert!((entropy_bits(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
    assert!((entropy_bits(&[1.0, 1.0, 1.0, 1.0]) - 2.0).abs() < 1e-15);
    assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
}

#[test]
fn register_windings_and_errors() {
    let r = ring(register_phases(), 16);
    assert_eq!(register_windings(&r).unwrap(), RegisterWindings { h: 0, v: 1 });
    let same = ring(RegionPhases::uniform(-PI / 2.0, 0.0), 16);
    assert!(matches!(register_windings(&same), Err(EntangleError::Misconfigured { nu_h: 1, nu_v: 1 })));
    assert!(register_write(&PolarizationQubit::h(), &same).is_err());
    let open = chain(register_phases(), 16);
    assert!(matches!(register_windings(&open), Err(EntangleError::NotARing)));
    assert!(matches!(RingBand::new(&open, Polarization::H), Err(EntangleError::NotARing)));
}

#[test]
fn register_round_trip() {
    let r = ring(register_phases(), 16);
    let ev = Evolver::new(&r);

    let mut h = register_write(&PolarizationQubit::h(), &r).unwrap();
    ev.run(&mut h, 37);
    assert_eq!(register_read(&h), (1.0, 0.0));
    let mut v = register_write(&PolarizationQubit::v(), &r).unwrap();
    ev.run(&mut v, 37);
    assert_eq!(register_read(&v), (0.0, 1.0));

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut d = register_write(&PolarizationQubit::new(c(s, 0.0), c(0.0, s)).unwrap(), &r).unwrap();
    for _ in 0..5 {
        ev.run(&mut d, 97);
        let (ph, pv) = register_read(&d);
        assert!((ph - 0.5).abs() < 1e-10 && (pv - 0.5).abs() < 1e-10);
    }

    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let q = PolarizationQubit::normalized(
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
        .unwrap();
        let mut st = register_write(&q, &r).unwrap();
        ev.run(&mut st, 200);
        let (ph, pv) = register_read(&st);
        let (eh, evv) = q.probabilities();
        assert!((ph - eh).abs() < 1e-10 && (pv - evv).abs() < 1e-10);
    }
}

#[test]
fn mixing_channel_rotates_locally() {
    let r = ring(register_phases(), 6);
    let mut st = inject(&r, 2, Subsite::A, Polarization::H).unwrap();
    let ch = MixingChannel { mix_strength: 0.6, steps: None, cells: Some(vec![2]) };
    ch.apply(&mut st, r.cells()).unwrap();
    assert!((st.pol_probability(Polarization::V) - 0.36).abs() < 1e-15);
    assert!((st.norm_sqr() - 1.0).abs() < 1e-15);

    let mut far = inject(&r, 4, Subsite::A, Polarization::H).unwrap();
    ch.apply(&mut far, r.cells()).unwrap();
    assert_eq!(far.pol_probability(Polarization::V), 0.0);

    let bad = MixingChannel { mix_strength: 0.1, steps: None, cells: Some(vec![6]) };
    assert!(bad.apply(&mut far, r.cells()).is_err());
    assert!(MixingChannel::global(1.5).angle().is_err());
    assert!(MixingChannel::global(-0.1).angle().is_err());
}

#[test]
fn ring_band_is_a_projector() {
    let r = ring(register_phases(), 8);
    let st = inject(&r, 3, Subsite::B, Polarization::V).unwrap();
    for pol in Polarization::BOTH {
        let band = RingBand::new(&r, pol).unwrap();
        let x = st.amplitudes(Polarization::V);
        let p = band.project(x);
        let pp = band.project(&p);
        let dev = p.iter().zip(&pp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
        let w = band.weight(x);
        let n: f64 = p.iter().map(|z| z.norm_sqr()).sum();
        assert!((w - n).abs() < 1e-12 && w > 0.0 && w < 1.0);
    }
}

#[test]
fn flip_rate_zero_without_mixing() {
    let r = ring(register_phases(), 16);
    let q = PolarizationQubit::h();
    let f = polarization_flip_rate(&r, &q, &MixingChannel::global(0.0), 100).unwrap();
    assert_eq!(f.flip_rate, 0.0);
    assert_eq!(f.encounters, 0);
    assert!(polarization_flip_rate(&r, &q, &MixingChannel::global(2.0), 10).is_err());
}

#[test]
fn trivial_ring_flips_coherently() {
    // with identical H and V operators the rotations commute with the walk
    // and add up: flipped probability sin²(n·asin ε)
    let triv = ring(RegionPhases::uniform(-PI / 2.0, 0.0), 16);
    let n = 200;
    let mut rates = Vec::new();
    for eps in [1e-3, 2e-3] {
        let f = sector_flip_rate(&triv, Polarization::H, &MixingChannel::global(eps), n).unwrap();
        let oracle = (n as f64 * eps.asin()).sin().powi(2);
        assert!((f.wrong_sector_mass - oracle).abs() < 1e-12 * oracle.max(1.0) + 1e-15, "{f:?} vs {oracle}");
        assert_eq!(f.encounters, n);
        rates.push(f.flip_rate);
    }
    // quadratic in ε while n·ε stays small
    let want = (n as f64 * 2e-3f64.asin()).sin().powi(2) / (n as f64 * 1e-3f64.asin()).sin().powi(2);
    assert!((rates[1] / rates[0] - want).abs() < 1e-9 && (want - 4.0).abs() < 0.2);

    let prot = ring(register_phases(), 16);
    let p = sector_flip_rate(&prot, Polarization::H, &MixingChannel::global(1e-3), n).unwrap();
    assert!(p.flip_rate < 1e-3 && rates[0] > 100.0 * p.flip_rate, "{p:?}");
    assert!(p.wrong_sector_mass <= p.flipped_mass);
}

#[test]
fn edge_projection_configurations() {
    for (name, symmetric) in [("entangle-edge-symmetric", true), ("entangle-edge-crossed", false)] {
        let cfg = preset(name).unwrap();
        let Experiment::EntangleEdge(e) = &cfg.experiment else { panic!("{name} is not an edge preset") };
        let (gu, gl) = (build_chain(&e.upper).unwrap(), build_chain(&e.lower).unwrap());
        let cal = EdgeCalibration::new(&gu, &gl, &e.injection, e.steps, 86, e.window).unwrap();
        let s0 = bell_state(e.sign, &gu, &gl, &e.injection).unwrap();
        let s1 = evolve_two_photon(&s0, &Evolver::new(&gu), &Evolver::new(&gl), e.steps);
        let p = edge_projection(&s1, &cal).unwrap();
        assert!((p.total() + p.residual - 1.0).abs() < 1e-9);
        let t = p.collapsed();
        if symmetric {
            assert!(t[0][1] > t[0][0] && t[1][0] > t[0][0], "{name}: {t:?}");
        } else {
            assert!(t[0][0] > t[0][1] && t[1][1] > t[1][0], "{name}: {t:?}");
        }
        if p.residual < 0.1 {
            assert!((p.entropy_bits() - 1.0).abs() < 0.05, "{name}: {}", p.entropy_bits());
        }
        let r = run(&cfg).unwrap();
        assert_eq!(r.summary["residual"].as_f64().unwrap(), p.residual);

        assert!(matches!(edge_projection(&s0, &cal), Err(EntangleError::StepMismatch { state: 0, .. })));
    }
}

#[test]
fn edge_basis_misses_bulk_products() {
    let cfg = preset("entangle-edge-symmetric").unwrap();
    let Experiment::EntangleEdge(e) = &cfg.experiment else { unreachable!() };
    let (gu, gl) = (build_chain(&e.upper).unwrap(), build_chain(&e.lower).unwrap());
    let cal = EdgeCalibration::new(&gu, &gl, &e.injection, e.steps, 86, e.window).unwrap();
    let far = Injection::new(40, Subsite::A, Polarization::V);
    let p0 = TwoPhotonState::product(inject_with(&gu, &far).unwrap(), inject_with(&gl, &far).unwrap());
    let p = edge_projection(&evolve_two_photon(&p0, &Evolver::new(&gu), &Evolver::new(&gl), e.steps), &cal).unwrap();
    assert!(p.residual > 0.9, "{p:?}");
    assert!((p.total() + p.residual - 1.0).abs() < 1e-9);

    // no photon near the boundary after calibration: no edge state to find
    assert!(matches!(
        EdgeCalibration::new(&gu, &gl, &far, 100, 86, 2),
        Err(EntangleError::NoEdgeState { .. })
    ));
}

fn small_pair() -> impl Strategy<Value = (LatticeGraph, LatticeGraph)> {
    let phases = (-4.0..4.0f64, -4.0..4.0f64, -4.0..4.0f64).prop_map(|(a, h, v)| RegionPhases::new(a, h, v));
    (phases.clone(), phases, 3usize..6, 3usize..6).prop_map(|(p, q, n, m)| (ring(p, n), chain(q, m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schmidt_entropy_matches_dense_svd(
        (gu, gl) in small_pair(),
        coefs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5),
        steps in 0usize..30,
        seed in 0u64..1000,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut terms: Vec<TwoPhotonTerm> = coefs
            .iter()
            .map(|&(re, im)| {
                let pu = if rng.gen_bool(0.5) { Polarization::H } else { Polarization::V };
                let pl = if rng.gen_bool(0.5) { Polarization::H } else { Polarization::V };
                let su = if rng.gen_bool(0.5) { Subsite::A } else { Subsite::B };
                TwoPhotonTerm {
                    coefficient: c(re, im),
                    upper: inject(&gu, rng.gen_range(0..gu.cells()), su, pu).unwrap(),
                    lower: inject(&gl, rng.gen_range(0..gl.cells()), Subsite::A, pl).unwrap(),
                }
            })
            .collect();
        let mut s = TwoPhotonState { terms: terms.clone() };
        let n = s.norm_sqr();
        prop_assume!(n > 1e-6);
        for t in &mut terms {
            t.coefficient /= n.sqrt();
        }
        s = evolve_two_photon(&TwoPhotonState { terms }, &Evolver::new(&gu), &Evolver::new(&gl), steps);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let fast = entanglement_entropy(&s, Partition::Upper).unwrap();
        prop_assert!((fast - dense_entropy(&s)).abs() < 1e-8, "{} vs {}", fast, dense_entropy(&s));
    }
}
