// A walker started at the interface between two phase regions. With
// different windings on the two sides more of it stays at the interface.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::walkgraph::{
    boundary_peak_mass, build_chain, crossing_mass, evolve, inject_with, ChainSpec, Direction, Injection,
    Polarization, RegionPhases, Side, Subsite,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let theta = 3.0 * PI / 2.0;
    let left = RegionPhases::uniform(-PI / 2.0, 0.0);
    for (label, right) in [("ν = 1 | ν = 0", RegionPhases::uniform(1.5, 2.5)), ("ν = 1 | ν = 1", left)] {
        let g = build_chain(&ChainSpec::two_region(left, right, 60, 120, theta)?)?;
        let inj = Injection::new(60, Subsite::A, Polarization::V).direction(Direction::Right);
        let (_, hist) = evolve(&inject_with(&g, &inj)?, &g, 100, None)?;
        let last = hist.last().unwrap();
        let peak = boundary_peak_mass(&hist, 60, 2)?;
        println!(
            "{label}: right {:.4}, left {:.4}, near boundary {:.4}",
            crossing_mass(last, 60, Side::Right)?,
            crossing_mass(last, 60, Side::Left)?,
            peak.last().unwrap()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
