// Winding numbers of the diamond chain read off its Bloch bands, and the
// split winding seen by the two polarizations.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::multiport::build_threeport;
use topowalk::sshmodel::{effective_winding_from_graph, graph_winding};
use topowalk::walkgraph::{build_chain, ChainSpec, Polarization, RegionPhases};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let theta = 3.0 * PI / 2.0;
    let u = build_threeport(theta)?;
    for (a, b) in [(-PI / 2.0, 0.0), (1.5, 2.5), (1.0, 3.0), (-0.5, 0.75)] {
        let w = graph_winding(&u, a, b, 512)?;
        println!("φ_a = {a:+.3}, φ_b = {b:+.3}: ν = {} (Zak phase {:.3}, gap {:.3})", w.nu, w.zak_phase, w.gap);
    }
    // H and V see different shifter phases on the same graph
    let g = build_chain(&ChainSpec::uniform(RegionPhases::new(-PI / 2.0, 3.0, 0.0), 8, theta)?)?;
    for pol in Polarization::BOTH {
        println!("{pol:?} polarization: ν = {}", effective_winding_from_graph(&g, pol, 512)?.nu);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
