// Store a polarization qubit on a ring where H and V wind differently, then
// compare how weak polarization mixing leaks between sectors here and on a
// ring where both windings agree.
use std::error::Error;
use std::f64::consts::PI;
use num_complex::Complex64 as C64;
use topowalk::entangle::{
    register_read, register_windings, register_write, sector_flip_rate, MixingChannel, PolarizationQubit,
};
use topowalk::walkgraph::{build_chain, ChainSpec, Evolver, Polarization, Region, RegionPhases};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let theta = 3.0 * PI / 2.0;
    let ring = |p| build_chain(&ChainSpec::ring(vec![Region { phases: p, cells: 16 }], theta)?);
    let protected = ring(RegionPhases::new(-PI / 2.0, 3.0, 0.0))?;
    println!("windings {:?}", register_windings(&protected)?);

    let q = PolarizationQubit::normalized(C64::new(0.6, 0.0), C64::new(0.0, 0.8))?;
    let mut st = register_write(&q, &protected)?;
    Evolver::new(&protected).run(&mut st, 200);
    println!("wrote {:?}, read {:?} after 200 steps", q.probabilities(), register_read(&st));

    let trivial = ring(RegionPhases::uniform(-PI / 2.0, 0.0))?;
    let ch = MixingChannel::global(1e-3);
    let a = sector_flip_rate(&protected, Polarization::H, &ch, 200)?;
    let b = sector_flip_rate(&trivial, Polarization::H, &ch, 200)?;
    println!("flip rate: split windings {:.2e}, equal windings {:.2e}", a.flip_rate, b.flip_rate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
