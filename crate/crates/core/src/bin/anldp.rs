use std::io::{self, BufWriter, Read};
use std::panic;
use std::process;

use modelforge::cli::{install_signal_handlers, ExitCode};
use modelforge::sat::anldp_main;

fn main() {
    let interrupt = install_signal_handlers();
    let result = panic::catch_unwind(move || {
        let mut input = String::new();
        let wants_help = std::env::args().skip(1).any(|a| a == "-h" || a == "--help");
        if !wants_help {
            if let Err(e) = io::stdin().read_to_string(&mut input) {
                eprintln!("cannot read the input: {e}");
                return ExitCode::InputError.code();
            }
        }
        let stdout = io::stdout();
        let mut out = BufWriter::new(stdout.lock());
        match anldp_main(
            std::env::args_os(),
            &input,
            &mut out,
            &mut io::stderr(),
            Some(interrupt),
        ) {
            Some(code) => code.code(),
            None => 0,
        }
    });
    process::exit(result.unwrap_or(ExitCode::Abend.code()));
}
