use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(stochres_core::cli::run(std::env::args_os()))
}
