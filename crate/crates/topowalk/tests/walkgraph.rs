use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::PI;
use topowalk::walkgraph::{
    bloch_operator, boundary_peak_mass, build_chain, chiral_grading, crossing_mass, evolve, inject,
    inject_superposition, inject_with, position_distribution, spread_slope, sqrt_spread_fit, step_operator,
    ChainSpec, ClassicalWalk, Direction, Distribution, Evolver, GraphError, Injection, LatticeGraph,
    PerturbationSchedule, Polarization, Region, RegionPhases, Side, Subsite, WalkState, SLOTS_PER_CELL,
};

const THETA: f64 = 3.0 * PI / 2.0;

fn topo() -> RegionPhases {
    RegionPhases::uniform(-PI / 2.0, 0.0)
}

fn trivial() -> RegionPhases {
    RegionPhases::uniform(1.5, 2.5)
}

fn uniform(phases: RegionPhases, cells: usize) -> LatticeGraph {
    build_chain(&ChainSpec::uniform(phases, cells, THETA).unwrap()).unwrap()
}

fn boundary_chain() -> LatticeGraph {
    build_chain(&ChainSpec::two_region(topo(), trivial(), 86, 172, THETA).unwrap()).unwrap()
}

fn history(g: &LatticeGraph, cell: usize, steps: usize) -> Vec<Distribution> {
    let st = inject(g, cell, Subsite::A, Polarization::V).unwrap();
    evolve(&st, g, steps, None).unwrap().1
}

#[test]
fn four_threeports_per_cell() {
    let g = uniform(topo(), 10);
    assert_eq!(g.vertices(), 40);
    assert_eq!(g.slots(), 40 * 3);
    g.check_invariants().unwrap();
}

#[test]
fn boundary_positions_follow_regions() {
    let spec = ChainSpec::new(
        vec![Region { phases: topo(), cells: 5 }, Region { phases: trivial(), cells: 5 }],
        THETA,
    )
    .unwrap();
    assert_eq!(spec.boundary_positions(), vec![5]);
    let g = boundary_chain();
    assert_eq!(g.boundary_positions(), vec![86]);
    assert_eq!(g.spec().region_of_cell(85), 0);
    assert_eq!(g.spec().region_of_cell(86), 1);
}

#[test]
fn spec_validation() {
    assert!(matches!(ChainSpec::uniform(topo(), 1, THETA), Err(GraphError::InvalidSpec(_))));
    assert!(ChainSpec::uniform(topo(), 0, THETA).is_err());
    assert!(ChainSpec::uniform(topo(), 4, f64::NAN).is_err());
    assert!(ChainSpec::uniform(RegionPhases::uniform(f64::INFINITY, 0.0), 4, THETA).is_err());
    assert!(ChainSpec::two_region(topo(), trivial(), 0, 10, THETA).is_err());
    assert!(ChainSpec::two_region(topo(), trivial(), 10, 10, THETA).is_err());
}

#[test]
fn region_phases_wrap_and_parse() {
    let p = RegionPhases::new(-PI / 2.0, 2.0 * PI + 1.0, 7.0);
    assert!((p.phi_a - 1.5 * PI).abs() < 1e-15);
    assert!((p.phi_b_h - 1.0).abs() < 1e-14);
    assert!((p.phi_b_v - (7.0 - 2.0 * PI)).abs() < 1e-14);

    let short: RegionPhases = serde_json::from_str(r#"{"phi_a": 1.5, "phi_b": 2.5}"#).unwrap();
    assert_eq!(short, RegionPhases::uniform(1.5, 2.5));
    let split: RegionPhases = serde_json::from_str(r#"{"phi_a": 0, "phi_b_h": 3, "phi_b_v": 0}"#).unwrap();
    assert_eq!(split, RegionPhases::new(0.0, 3.0, 0.0));
    assert!(serde_json::from_str::<RegionPhases>(r#"{"phi_a": 0, "phi_b_h": 3}"#).is_err());
    assert!(serde_json::from_str::<RegionPhases>(r#"{"phi_a": 0, "phi_b": 1, "phi_x": 2}"#).is_err());
    let back: RegionPhases = serde_json::from_str(&serde_json::to_string(&split).unwrap()).unwrap();
    assert_eq!(back, split);
}

#[test]
fn injection_is_a_delta() {
    let g = uniform(topo(), 172);
    let st = inject(&g, 68, Subsite::A, Polarization::V).unwrap();
    assert!((st.norm_sqr() - 1.0).abs() < 1e-15);
    let d = position_distribution(&st, &g);
    assert_eq!(d.prob(68, Subsite::A), 1.0);
    assert_eq!(d.total(), 1.0);
    assert_eq!(crossing_mass(&d, 86, Side::Right).unwrap(), 0.0);

    let (same, hist) = evolve(&st, &g, 0, None).unwrap();
    assert_eq!(same, st);
    assert_eq!(hist.len(), 1);

    for sub in [Subsite::A, Subsite::B] {
        for dir in [Direction::Right, Direction::Left, Direction::Symmetric] {
            let inj = Injection::new(40, sub, Polarization::H).direction(dir);
            let s = inject_with(&g, &inj).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
            let d = position_distribution(&s, &g);
            assert!((d.prob(40, sub) - 1.0).abs() < 1e-15, "{sub:?} {dir:?}");
        }
    }
    assert!(matches!(
        inject(&g, 172, Subsite::A, Polarization::V),
        Err(GraphError::IndexOutOfRange { cell: 172, cells: 172 })
    ));
}

#[test]
fn one_step_is_local() {
    let g = uniform(topo(), 12);
    for s in 0..g.slots() {
        let mut st = WalkState::zeros(g.slots());
        st.amplitudes_mut(Polarization::H)[s] = C64::new(1.0, 0.0);
        Evolver::new(&g).run(&mut st, 1);
        let hit: Vec<usize> = (0..g.slots()).filter(|&t| st.amplitudes(Polarization::H)[t] != C64::new(0.0, 0.0)).collect();
        assert!(!hit.is_empty() && hit.len() <= 3, "slot {s} reached {hit:?}");
        // everything leaves one vertex: the targets' partners share a vertex
        let verts: std::collections::BTreeSet<usize> = hit.iter().map(|&t| g.partner(t) / 3).collect();
        assert_eq!(verts.len(), 1);
    }
}

#[test]
fn polarization_operators_differ_only_on_b_shifters() {
    let split = uniform(RegionPhases::new(-PI / 2.0, 3.0, 0.0), 6);
    let h = step_operator(&split, Polarization::H);
    let v = step_operator(&split, Polarization::V);
    let mut expected: Vec<usize> = (0..split.slots())
        .filter(|&s| split.edge_phase(s, Polarization::H) != split.edge_phase(s, Polarization::V))
        .map(|s| split.partner(s))
        .collect();
    expected.sort();
    assert_eq!(expected.len(), 2 * 6);
    assert_eq!(h.differing_rows(&v), expected);

    let same = uniform(topo(), 6);
    assert!(step_operator(&same, Polarization::H).differing_rows(&step_operator(&same, Polarization::V)).is_empty());
}

#[test]
fn dense_operator_is_unitary() {
    let g = build_chain(&ChainSpec::two_region(topo(), trivial(), 3, 7, THETA).unwrap()).unwrap();
    for pol in Polarization::BOTH {
        let s = step_operator(&g, pol).to_dense();
        let defect = (s.adjoint() * &s - DMatrix::<C64>::identity(g.slots(), g.slots())).camax();
        assert!(defect < 1e-12, "{defect}");
    }
}

#[test]
fn bloch_operator_reproduces_ring_spectrum() {
    let cells = 6;
    let (a, b) = (-PI / 2.0, 0.0);
    let ring = build_chain(&ChainSpec::ring(vec![Region { phases: RegionPhases::uniform(a, b), cells }], THETA).unwrap())
        .unwrap();
    let dense = step_operator(&ring, Polarization::V).to_dense();
    let mut pool: Vec<C64> = dense.schur().eigenvalues().unwrap().iter().cloned().collect();
    let u = *ring.threeport();
    for m in 0..cells {
        let k = 2.0 * PI * m as f64 / cells as f64;
        let bk = bloch_operator(&u, a, b, k);
        let bk = DMatrix::from_fn(SLOTS_PER_CELL, SLOTS_PER_CELL, |i, j| bk[(i, j)]);
        for lam in bk.schur().eigenvalues().unwrap().iter() {
            let (idx, d) = pool
                .iter()
                .enumerate()
                .map(|(i, z)| (i, (z - lam).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(d < 1e-8, "k = {k}: eigenvalue {lam} missing from ring spectrum ({d:e})");
            pool.swap_remove(idx);
        }
    }
    assert!(pool.is_empty());
}

#[test]
fn chiral_grading_anticommutes_with_bloch_operator() {
    let g = chiral_grading();
    let u = topowalk::multiport::build_threeport(THETA).unwrap();
    for (a, b) in [(-PI / 2.0, 0.0), (1.5, 2.5), (0.2, 4.0)] {
        for j in 0..32 {
            let s = bloch_operator(&u, a, b, -PI + 2.0 * PI * j as f64 / 32.0);
            for r in 0..SLOTS_PER_CELL {
                for c in 0..SLOTS_PER_CELL {
                    assert!((g[r] * s[(r, c)] * g[c] + s[(r, c)]).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn norm_conserved_over_1000_steps() {
    let g = build_chain(
        &ChainSpec::ring(
            vec![
                Region { phases: RegionPhases::new(-PI / 2.0, 3.0, 0.0), cells: 20 },
                Region { phases: trivial(), cells: 20 },
            ],
            THETA,
        )
        .unwrap(),
    )
    .unwrap();
    let mut st = inject_superposition(
        &g,
        &Injection::new(19, Subsite::B, Polarization::H),
        &[(Polarization::H, C64::new(0.6, 0.0)), (Polarization::V, C64::new(0.0, 0.8))],
    )
    .unwrap();
    let ev = Evolver::new(&g);
    let mut scratch = Vec::new();
    for _ in 0..1000 {
        ev.step_once(&mut st, &mut scratch);
        assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
    }
    let d = position_distribution(&st, &g);
    assert!((d.total() - 1.0).abs() < 1e-10);
    assert!(d.probs.iter().all(|&p| p >= 0.0));
    assert_eq!(st.step(), 1000);
}

#[test]
fn translation_covariance() {
    let g = uniform(topo(), 80);
    let ev = Evolver::new(&g);
    let (n, shift, steps) = (30, 7, 40);
    let mut a = inject(&g, n, Subsite::A, Polarization::V).unwrap();
    let mut b = inject(&g, n + shift, Subsite::A, Polarization::V).unwrap();
    ev.run(&mut a, steps);
    ev.run(&mut b, steps);
    let off = shift * SLOTS_PER_CELL;
    let (xa, xb) = (a.amplitudes(Polarization::V), b.amplitudes(Polarization::V));
    for t in 0..g.slots() - off {
        assert!((xa[t] - xb[t + off]).norm() < 1e-13);
    }
}

#[test]
fn spreading_speed_is_bounded() {
    let g = uniform(topo(), 172);
    let hist = history(&g, 86, 100);
    for d in &hist {
        let reach = (d.step as f64 * 0.25).ceil() as isize + 1;
        let inside = d.mass_in(86 - reach, 86 + reach);
        assert!((inside - 1.0).abs() < 1e-12, "step {}: {inside}", d.step);
    }
}

#[test]
fn ballistic_against_classical_oracle() {
    let g = uniform(topo(), 172);
    let inj = Injection::new(68, Subsite::A, Polarization::V);
    let st = inject_with(&g, &inj).unwrap();
    let hist = evolve(&st, &g, 50, None).unwrap().1;
    let fit = spread_slope(&hist[10..]).unwrap();
    assert!(fit.r2 > 0.99 && fit.slope > 0.0, "{fit:?}");

    let op = step_operator(&g, Polarization::V);
    let p0: Vec<f64> = st.amplitudes(Polarization::V).iter().map(|z| z.norm_sqr()).collect();
    let walk = ClassicalWalk::new(&op);

    // oracle: the Markov matrix built entrywise from the dense operator
    let dense = op.to_dense();
    let markov = DMatrix::from_fn(g.slots(), g.slots(), |i, j| dense[(i, j)].norm_sqr());
    let mut p = nalgebra::DVector::from_vec(p0.clone());
    let mut q = p0.clone();
    for _ in 0..20 {
        p = &markov * p;
        q = walk.step(&q);
    }
    let dev = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-14);
    assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let ch = walk.history(&g, p0, 50);
    let lin = spread_slope(&ch[10..]).unwrap();
    let sq = sqrt_spread_fit(&ch[10..]).unwrap();
    assert!(sq.r2 > lin.r2, "sqrt {} vs linear {}", sq.r2, lin.r2);
    assert!(hist[50].std_dev() > 2.0 * ch[50].std_dev());
}

#[test]
fn fit_errors_and_stationary_slope() {
    let g = uniform(topo(), 20);
    let d = position_distribution(&inject(&g, 10, Subsite::A, Polarization::V).unwrap(), &g);
    assert!(matches!(spread_slope(&vec![d.clone(); 5]), Err(GraphError::Fit(_))));
    let frozen: Vec<Distribution> = (0..12).map(|s| Distribution { step: s, ..d.clone() }).collect();
    assert!(matches!(spread_slope(&frozen), Err(GraphError::Fit(_))));

    let mut two = vec![0.0; 40];
    two[4] = 0.5;
    two[30] = 0.5;
    let still: Vec<Distribution> = (0..12).map(|s| Distribution { step: s, probs: two.clone() }).collect();
    let fit = spread_slope(&still).unwrap();
    assert!(fit.slope.abs() < 1e-12);
}

#[test]
fn boundary_blocks_crossing() {
    let g = boundary_chain();
    let right = history(&g, 68, 100);
    assert!(crossing_mass(right.last().unwrap(), 86, Side::Right).unwrap() < 0.05);
    let left = history(&g, 88, 100);
    assert!(crossing_mass(left.last().unwrap(), 86, Side::Left).unwrap() < 0.05);
    assert!(matches!(crossing_mass(&right[0], 0, Side::Left), Err(GraphError::BoundaryNotInterior { .. })));
}

#[test]
fn boundary_state_persists() {
    let g = boundary_chain();
    let hist = history(&g, 85, 150);
    let peak = boundary_peak_mass(&hist, 86, 2).unwrap();
    let tail = &peak[100..];
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.3 && hi - lo < 0.1, "tail range {lo}..{hi}");

    let flat = history(&uniform(topo(), 172), 85, 100);
    let flat_peak = boundary_peak_mass(&flat, 86, 2).unwrap();
    let pinned = boundary_peak_mass(&history(&g, 85, 100), 86, 2).unwrap();
    assert!(flat_peak[100] < 0.15 && pinned[100] > 3.0 * flat_peak[100]);

    let whole = boundary_peak_mass(&hist, 86, 200).unwrap();
    assert!(whole.iter().all(|m| (m - 1.0).abs() < 1e-10));
    assert!(boundary_peak_mass(&hist, 86, 0).is_err());
}

#[test]
fn jolt_keeps_crossing_small() {
    let g = boundary_chain();
    let st = inject(&g, 85, Subsite::A, Polarization::V).unwrap();
    let jolt = PerturbationSchedule::jolt(&g, 30, 0, 1);
    assert_eq!(jolt.entries[0].regions, vec![trivial(), trivial()]);
    let (_, hp) = evolve(&st, &g, 100, Some(&jolt)).unwrap();
    let (_, hu) = evolve(&st, &g, 100, None).unwrap();
    let p = crossing_mass(&hp[100], 86, Side::Right).unwrap();
    let u = crossing_mass(&hu[100], 86, Side::Right).unwrap();
    assert!(p <= 2.0 * u && u <= 2.0 * p, "{p} vs {u}");
    assert_eq!(hp[30], hu[30]);
    assert_ne!(hp[31], hu[31]);

    let bad = PerturbationSchedule {
        entries: vec![topowalk::walkgraph::PerturbationEntry { step: 3, regions: vec![topo()] }],
    };
    assert!(matches!(evolve(&st, &g, 5, Some(&bad)), Err(GraphError::ScheduleMismatch { expected: 2, got: 1 })));
}

fn small_chain() -> impl Strategy<Value = ChainSpec> {
    let region = (-7.0..7.0f64, -7.0..7.0f64, -7.0..7.0f64, 1usize..5)
        .prop_map(|(a, h, v, cells)| Region { phases: RegionPhases::new(a, h, v), cells });
    (prop::collection::vec(region, 1..4), 0.0..2.0 * PI, any::<bool>()).prop_filter_map("too short", |(r, t, p)| {
        if p {
            ChainSpec::ring(r, t).ok()
        } else {
            ChainSpec::new(r, t).ok()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_chain_is_unitary(spec in small_chain()) {
        let g = build_chain(&spec).unwrap();
        g.check_invariants().unwrap();
        for pol in Polarization::BOTH {
            prop_assert!(step_operator(&g, pol).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn steps_are_reversible(spec in small_chain(), steps in 1usize..40, seed in 0usize..1000) {
        let g = build_chain(&spec).unwrap();
        let n = g.slots();
        let h: Vec<C64> = (0..n).map(|i| C64::new(((i * 7 + seed) % 13) as f64, ((i + seed) % 5) as f64)).collect();
        let mut st = WalkState::from_amplitudes(h.clone(), h, 0);
        let s = st.norm_sqr().sqrt();
        st.scale(C64::new(1.0 / s, 0.0));
        let start = st.clone();
        let ev = Evolver::new(&g);
        ev.run(&mut st, steps);
        prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
        for _ in 0..steps {
            ev.step_back(&mut st);
        }
        prop_assert!(st.max_deviation(&start) < 1e-10);
        prop_assert_eq!(st.step(), 0);
    }

    #[test]
    fn polarizations_never_mix(spec in small_chain(), steps in 0usize..60, cell_frac in 0.0..1.0f64) {
        let g = build_chain(&spec).unwrap();
        let cell = ((g.cells() as f64 * cell_frac) as usize).min(g.cells() - 1);
        for pol in Polarization::BOTH {
            let mut st = inject(&g, cell, Subsite::B, pol).unwrap();
            Evolver::new(&g).run(&mut st, steps);
            prop_assert!(st.amplitudes(pol.other()).iter().all(|z| *z == C64::new(0.0, 0.0)));
        }
    }
}
