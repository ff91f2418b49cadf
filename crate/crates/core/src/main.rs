use std::process::ExitCode;

fn main() -> ExitCode {
    antilde::cli::main_with(std::env::args_os())
}
