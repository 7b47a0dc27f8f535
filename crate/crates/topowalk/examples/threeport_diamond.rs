// Build the symmetric three-port, wire two of them into a diamond cell and
// look at the flux it passes at a few frequencies.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::multiport::{build_threeport, compose_diamond, Port};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let u = build_threeport(3.0 * PI / 2.0)?;
    println!("three-port at θ = 3π/2 (unitarity defect {:.1e})", u.unitarity_defect());
    println!("  reflection   {:.4}", u.amp(Port::A, Port::A));
    println!("  transmission {:.4}", u.amp(Port::B, Port::A));

    let d = compose_diamond(PI / 3.0, u, u)?;
    for omega in [0.2, 1.0, 2.5] {
        let tr = d.transmission_reflection(omega)?;
        println!("ω = {omega:.1}: T = {:.4}, R = {:.4}", tr[0], tr[1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
