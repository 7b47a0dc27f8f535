// Run a bundled preset and write its outputs, as the binary does.
// Usage: cargo run --example run_preset -- fig7a /tmp/fig7a
use std::error::Error;
use std::path::PathBuf;
use topowalk::experiments::{preset, run, write_outputs};

fn run_named(name: &str, dir: &std::path::Path) -> Result<(), Box<dyn Error>> {
    let report = run(&preset(name)?)?;
    write_outputs(&report, dir)?;
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join(format!("topowalk-example-{}", std::process::id()));
    run_named("fig7a", &dir)?;
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    match args.next() {
        Some(name) => {
            let dir = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out").join(&name));
            run_named(&name, &dir)
        }
        None => run_example(),
    }
}
