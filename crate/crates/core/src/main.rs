use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cavity_dephasing::cli::main_entry())
}
