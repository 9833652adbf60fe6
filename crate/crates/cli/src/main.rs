use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = themeorder_cli::run(std::env::args_os(), &mut io::stdin().lock());
    let _ = io::stdout().write_all(&outcome.stdout);
    let _ = io::stderr().write_all(&outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
