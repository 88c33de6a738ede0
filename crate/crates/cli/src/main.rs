use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = sgo_cli::run_cli(std::env::args_os());
    // a closed pipe is not an error of the run
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code)
}
