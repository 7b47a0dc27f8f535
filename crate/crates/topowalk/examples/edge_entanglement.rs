// Project an evolved Bell pair onto edge (e) and no-edge (∅) states at a
// phase interface.
use std::error::Error;
use topowalk::entangle::{bell_state, edge_projection, evolve_two_photon, EdgeCalibration, EDGE_LABELS};
use topowalk::experiments::{preset, Experiment};
use topowalk::walkgraph::{build_chain, Evolver};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for name in ["entangle-edge-symmetric", "entangle-edge-crossed"] {
        let Experiment::EntangleEdge(c) = preset(name)?.experiment else { unreachable!() };
        let (gu, gl) = (build_chain(&c.upper)?, build_chain(&c.lower)?);
        let boundary = c.upper.boundary_positions()[0];
        let cal = EdgeCalibration::new(&gu, &gl, &c.injection, c.steps, boundary, c.window)?;
        let s = bell_state(c.sign, &gu, &gl, &c.injection)?;
        let s = evolve_two_photon(&s, &Evolver::new(&gu), &Evolver::new(&gl), c.steps);
        let p = edge_projection(&s, &cal)?;
        let t = p.collapsed();
        println!("{name}: residual {:.3}, entropy {:.3} bits", p.residual, p.entropy_bits());
        println!("  {EDGE_LABELS:?}");
        println!("  e⊗e {:.3}  e⊗∅ {:.3}  ∅⊗e {:.3}  ∅⊗∅ {:.3}", t[0][0], t[0][1], t[1][0], t[1][1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
