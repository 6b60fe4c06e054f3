use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(xxz_harness::cli::run(std::env::args_os()) as u8)
}
