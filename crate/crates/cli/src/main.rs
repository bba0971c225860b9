mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use k2sym::Error;

use args::{Cli, Command};

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

/// Malformed invocation or input syntax.
const EXIT_USAGE: u8 = 64;
/// Well-formed input that is not a unit (or not in the ring) where one is required.
const EXIT_DATA: u8 = 65;
/// The computation itself failed.
const EXIT_SOFTWARE: u8 = 70;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidRing(_) => EXIT_USAGE,
        e if e.is_domain_error() => EXIT_DATA,
        _ => EXIT_SOFTWARE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_SOFTWARE);
    }
    let result = match &cli.command {
        Command::Compute(a) => run::compute(a),
        Command::Tame(a) => run::tame_cmd(a),
        Command::Rho(a) => run::rho_cmd(a),
        Command::Verify(a) => run::verify(a),
        Command::Stability(a) => run::stability_cmd(a),
        Command::WindowInfo(a) => run::window_info(a),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.render(cli.format).trim_end());
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
