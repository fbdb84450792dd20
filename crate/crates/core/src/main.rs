use std::process::ExitCode;

fn main() -> ExitCode {
    logdamp::cli::main_entry()
}
