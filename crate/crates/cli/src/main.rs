use std::process::ExitCode;

use clap::Parser;
use streamfade_cli::args::Args;

fn main() -> ExitCode {
    let args = Args::parse();
    match streamfade_cli::run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("streamfade: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
