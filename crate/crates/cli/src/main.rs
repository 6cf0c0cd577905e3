use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(codecarta_cli::run(std::env::args_os()))
}
