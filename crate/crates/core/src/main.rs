use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::panic;
use std::process;

use modelforge::cli::{
    filter_identities, install_signal_handlers, parse_args, run, Command, ExitCode,
};

fn main() {
    let interrupt = install_signal_handlers();
    let command = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(msg) => {
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            process::exit(ExitCode::InputError.code());
        }
    };
    let result = panic::catch_unwind(move || {
        let stdout = io::stdout();
        let mut out = BufWriter::new(stdout.lock());
        let mut err = io::stderr();
        let code = match command {
            Command::Help(text) => {
                let _ = write!(out, "{text}");
                let _ = out.flush();
                return 0;
            }
            Command::Filter { file, max_n } => match fs::read_to_string(&file) {
                Ok(text) => filter_identities(&text, max_n, &mut out, &mut err, Some(interrupt)),
                Err(e) => {
                    eprintln!("cannot read {file}: {e}");
                    ExitCode::InputError
                }
            },
            Command::Search(config) => {
                let mut input = String::new();
                if let Err(e) = io::stdin().read_to_string(&mut input) {
                    eprintln!("cannot read the input: {e}");
                    return ExitCode::InputError.code();
                }
                let summary = run(&config, &input, &mut out, &mut err, Some(interrupt));
                let _ = writeln!(
                    out,
                    "\nExit {} ({}), {} model(s).",
                    summary.exit.code(),
                    summary.exit.name(),
                    summary.models
                );
                summary.exit
            }
        };
        let _ = out.flush();
        code.code()
    });
    process::exit(result.unwrap_or(ExitCode::Abend.code()));
}
