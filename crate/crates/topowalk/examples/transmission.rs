// A wavepacket sent across an interface between swapped hoppings. The
// transmitted fraction drops as the hopping contrast grows.
use std::error::Error;
use topowalk::sshmodel::{run_transmission, BlochModel, TransmissionSetup};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for contrast in [0.0, 0.5, 0.9] {
        let m = BlochModel::from_contrast(1.0, contrast)?;
        let r = run_transmission(&TransmissionSetup::new(m.v, m.w))?;
        println!(
            "contrast {contrast:.2} (v = {:.3}, w = {:.3}): T = {:.4}, R = {:.4}",
            m.v, m.w, r.transmission, r.reflection
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
