use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var("SOBOLEV_LAB_SEED").ok();
    let outcome = sobolev_lab::cli::main_with_args(std::env::args_os(), seed.as_deref());
    if let Some(message) = &outcome.message {
        eprintln!("{message}");
    }
    ExitCode::from(outcome.status as u8)
}
