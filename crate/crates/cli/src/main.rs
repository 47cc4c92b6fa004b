use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use courant::battery::BatteryConfig;
use courant_cli::{run, Command, Format, RunConfig};

/// Exact verification of Courant algebroids, Dorfman connections and
/// their cohomology.
#[derive(Debug, Parser)]
#[command(name = "courant", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Polynomial degree D of battery functions and sections.
    #[arg(long, global = true, default_value_t = BatteryConfig::default().degree)]
    battery_degree: u32,
    /// Seeded random extras t per argument slot.
    #[arg(long, global = true, default_value_t = BatteryConfig::default().extras)]
    extras: usize,
    #[arg(long, global = true, default_value_t = BatteryConfig::default().seed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Degree cap for the cochains checked by `cartan`.
    #[arg(long, global = true, default_value_t = 4)]
    max_degree: i32,
    /// Highest degree tabulated by `cohomology`.
    #[arg(long, global = true)]
    max_p: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        command: cli.command,
        battery: BatteryConfig { degree: cli.battery_degree, extras: cli.extras, seed: cli.seed },
        format: cli.format,
        max_degree: cli.max_degree,
        max_p: cli.max_p,
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(config.format);
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code as u8)
}
