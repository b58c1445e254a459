use std::process::ExitCode;

fn main() -> ExitCode {
    nafs::cli::run()
}
