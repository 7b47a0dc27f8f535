// Change the phases of one region mid-run and compare with the undisturbed
// walk.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::walkgraph::{
    build_chain, crossing_mass, evolve, inject, ChainSpec, PerturbationSchedule, Polarization, Region, RegionPhases,
    Side, Subsite,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let theta = 3.0 * PI / 2.0;
    // three regions: the middle one is briefly made to look like the left one
    let spec = ChainSpec::new(
        vec![
            Region { phases: RegionPhases::uniform(-PI / 2.0, 0.0), cells: 50 },
            Region { phases: RegionPhases::uniform(1.5, 2.5), cells: 10 },
            Region { phases: RegionPhases::uniform(1.5, 2.5), cells: 60 },
        ],
        theta,
    )?;
    let g = build_chain(&spec)?;
    let start = inject(&g, 50, Subsite::A, Polarization::V)?;
    let (_, calm) = evolve(&start, &g, 100, None)?;
    let jolt = PerturbationSchedule::jolt(&g, 30, 1, 0);
    let (_, shaken) = evolve(&start, &g, 100, Some(&jolt))?;
    let r0 = crossing_mass(calm.last().unwrap(), 50, Side::Right)?;
    let r1 = crossing_mass(shaken.last().unwrap(), 50, Side::Right)?;
    println!("mass right of the interface: undisturbed {r0:.4}, jolted {r1:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
