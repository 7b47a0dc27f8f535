// Two-band model: spectrum, chiral symmetry and winding number.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::sshmodel::{bloch_h, chiral_operator, energy, winding_number, BlochModel};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = chiral_operator();
    for (v, w) in [(1.0, 2.0), (2.0, 1.0), (1.0, 1.0)] {
        let m = BlochModel::new(v, w)?;
        let gap = (0..64).map(|j| energy(&m, -PI + 2.0 * PI * j as f64 / 64.0)).fold(f64::INFINITY, f64::min);
        let h = bloch_h(&m, 0.7);
        let anti = (g * h * g.try_inverse().unwrap() + h).norm();
        match winding_number(&m, 512) {
            Ok(r) => println!("v = {v}, w = {w}: ν = {}, min |E| {gap:.3}, ‖ΓHΓ⁻¹ + H‖ = {anti:.1e}", r.nu),
            Err(e) => println!("v = {v}, w = {w}: {e}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
