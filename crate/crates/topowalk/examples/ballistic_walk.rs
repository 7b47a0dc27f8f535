// Quantum versus classical spreading on a uniform chain.
use std::error::Error;
use std::f64::consts::PI;
use topowalk::walkgraph::{
    build_chain, evolve, inject, spread_slope, sqrt_spread_fit, step_operator, ChainSpec, ClassicalWalk,
    Polarization, RegionPhases, Subsite,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = ChainSpec::uniform(RegionPhases::uniform(-PI / 2.0, 0.0), 120, 3.0 * PI / 2.0)?;
    let g = build_chain(&spec)?;
    let start = inject(&g, 60, Subsite::A, Polarization::V)?;
    let (_, hist) = evolve(&start, &g, 40, None)?;
    let q = spread_slope(&hist[10..])?;
    println!("quantum:   σ ≈ {:.3}·t (R² {:.4})", q.slope, q.r2);

    let p0: Vec<f64> = start.amplitudes(Polarization::V).iter().map(|z| z.norm_sqr()).collect();
    let classical = ClassicalWalk::new(&step_operator(&g, Polarization::V)).history(&g, p0, 40);
    let c = sqrt_spread_fit(&classical[10..])?;
    println!("classical: σ ≈ {:.3}·√t (R² {:.4})", c.slope, c.r2);
    println!("σ at t = 40: quantum {:.2}, classical {:.2}", hist[40].std_dev(), classical[40].std_dev());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
