use std::process::ExitCode;

fn main() -> ExitCode {
    nonres_cli::main_with(std::env::args_os())
}
