// A polarization Bell pair walking on two chains. Each photon evolves on
// its own, so the entanglement entropy stays at one bit.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::entangle::{bell_state, entanglement_entropy, evolve_two_photon, BellSign, Partition};
use topowalk::walkgraph::{build_chain, ChainSpec, Evolver, Injection, Polarization, RegionPhases, Subsite};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = build_chain(&ChainSpec::uniform(RegionPhases::new(-PI / 2.0, 3.0, 0.0), 100, 3.0 * PI / 2.0)?)?;
    let ev = Evolver::new(&g);
    let mut s = bell_state(BellSign::Plus, &g, &g, &Injection::new(50, Subsite::A, Polarization::V))?;
    for _ in 0..4 {
        println!(
            "step {:>3}: S = {:.12} bits, |H,V|² = {:?}",
            s.step(),
            entanglement_entropy(&s, Partition::Upper)?,
            s.polarization_table()
        );
        s = evolve_two_photon(&s, &ev, &ev, 20);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
