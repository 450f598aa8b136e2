use std::process::ExitCode;

fn main() -> ExitCode {
    synlog::cli::main_with_args(std::env::args_os())
}
