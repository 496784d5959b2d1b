use std::process::ExitCode;

fn main() -> ExitCode {
    match rmlab::cli::run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(rmlab::cli::exit_code(&err) as u8)
        }
    }
}
