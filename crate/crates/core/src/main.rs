use std::process::ExitCode;

fn main() -> ExitCode {
    let code = chain_entanglement::cli::run(std::env::args().collect());
    ExitCode::from(code as u8)
}
