use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = sparsegame::cli::run(std::env::args_os());
    if !out.stdout.is_empty() {
        let mut stdout = std::io::stdout().lock();
        if stdout
            .write_all(out.stdout.as_bytes())
            .and_then(|_| stdout.flush())
            .is_err()
        {
            return ExitCode::from(2);
        }
    }
    if let Some(line) = &out.stderr {
        eprintln!("{line}");
    }
    ExitCode::from(out.code as u8)
}
