use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = sailforge_cli::cli::init_threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = sailforge_cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(u8::try_from(code).unwrap_or(2))
}
