use std::process::ExitCode;

fn main() -> ExitCode {
    cyberepi::cli::main_with(std::env::args_os())
}
