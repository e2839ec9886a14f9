use std::process::ExitCode;

use wardsim::cli::{execute, parse_invocation};
use wardsim::Error;

fn main() -> ExitCode {
    let result = parse_invocation(std::env::args_os()).and_then(|inv| {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        execute(inv, &mut lock)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Usage { text, success }) => {
            if success {
                print!("{text}");
                ExitCode::SUCCESS
            } else {
                eprint!("{text}");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {}", render(&e));
            ExitCode::FAILURE
        }
    }
}

fn render(e: &Error) -> String {
    let mut msg = e.to_string();
    let mut src = std::error::Error::source(e);
    while let Some(s) = src {
        let s_msg = s.to_string();
        if !msg.contains(&s_msg) {
            msg.push_str(": ");
            msg.push_str(&s_msg);
        }
        src = s.source();
    }
    msg
}
