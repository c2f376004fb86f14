use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fibsum::cli::run(std::env::args_os()))
}
