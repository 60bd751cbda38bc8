use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, report) = oscillaton_cli::dispatch(std::env::args().skip(1));
    match (&report.message, report.is_ok()) {
        (Some(msg), true) => print!("{msg}"),
        (Some(msg), false) if msg.starts_with("error:") => eprint!("{msg}"),
        (Some(msg), false) => eprintln!("error: {msg}"),
        (None, _) => {}
    }
    if report.is_ok() && !report.outputs.is_empty() {
        println!("{}", report.command);
        print!("{}", report.summary());
    }
    ExitCode::from(code as u8)
}
