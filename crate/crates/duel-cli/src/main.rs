use std::process::ExitCode;

fn main() -> ExitCode {
    duel_cli::cli::main_entry()
}
