use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tiretrack::cli::{run, RunConfig};

/// Run one tire-track computation described by a JSON config.
#[derive(Parser, Debug)]
#[command(name = "tiretrack", version, about)]
struct Args {
    /// Run config (JSON).
    config: PathBuf,
    /// Directory for CSV, SVG and summary.json.
    #[arg(short, long, default_value = "out")]
    out_dir: PathBuf,
    /// More logging; repeat for debug output.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = RunConfig::load(&args.config).and_then(|cfg| run(&cfg, &args.out_dir));
    match result {
        Ok(out) => {
            for f in &out.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tiretrack: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
