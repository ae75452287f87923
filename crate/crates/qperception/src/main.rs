use std::io::ErrorKind;
use std::process::ExitCode;

use qperception::Error;

fn main() -> ExitCode {
    match qperception::cli::run() {
        Ok(()) => ExitCode::SUCCESS,
        // Downstream consumers closing the pipe early is not a failure.
        Err(Error::Io(err)) if err.kind() == ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
