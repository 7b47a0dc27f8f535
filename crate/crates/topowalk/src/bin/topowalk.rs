use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use topowalk::experiments::{preset, preset_names, run, write_outputs, ExperimentConfig, ExperimentError};

/// Run a quantum-walk experiment from a JSON config or a bundled preset.
#[derive(Parser, Debug)]
#[command(name = "topowalk", version)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (default: the config's `out`, else `out/<name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the bundled preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

fn load(args: &Args) -> Result<ExperimentConfig, ExperimentError> {
    match (&args.config, &args.preset) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ExperimentError::Config(format!("{}: {e}", p.display())))?;
            ExperimentConfig::from_json(&text)
        }
        (None, Some(name)) => preset(name),
        (None, None) => Err(ExperimentError::Config("give --config or --preset".into())),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_presets {
        for n in preset_names() {
            println!("{n}");
        }
        return ExitCode::SUCCESS;
    }
    let result = (|| {
        let cfg = load(&args)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(|e| ExperimentError::Config(format!("threads: {e}")))?;
        let report = pool.install(|| run(&cfg))?;
        let dir = args.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
        write_outputs(&report, &dir)?;
        println!("{}", serde_json::to_string_pretty(&report.summary).expect("summary serializes"));
        eprintln!("wrote {}", dir.display());
        Ok::<_, ExperimentError>(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
