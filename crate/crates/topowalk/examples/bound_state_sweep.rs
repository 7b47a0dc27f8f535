// Sweep the right-region phases and record the winding and how much of the
// walker stays at the interface.
use std::error::Error;
use topowalk::experiments::{preset, run, Experiment, SweepGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut cfg = preset("fig10")?;
    if let Experiment::WindingSweep(s) = &mut cfg.experiment {
        s.grid = SweepGrid::Points { points: vec![[1.5, 2.5], [1.0, 3.0], [-0.5, 0.75]] };
    }
    let table = run(&cfg)?.sweep.expect("phase sweep has a table");
    print!("{}", table.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
