use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(steiner_spanner_cli::run_from(std::env::args_os()))
}
