//! The standalone propositional front end: an integer-stream CNF on input,
//! an exit code (and optionally the models) on output.

use std::io::Write;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::Parser;

use super::{parse_integer_stream, solve_with_budget, SatOutcome, SearchOptions};
use crate::cli::ExitCode;
use crate::limits::{Budget, DEFAULT_MAX_KBYTES};

#[derive(Parser, Debug)]
#[command(
    name = "anldp",
    about = "DPLL satisfiability check of clauses given as 0-terminated integer lists on stdin.",
    disable_version_flag = true
)]
struct Args {
    /// Print each model as a line of signed literals
    #[arg(short = 'p')]
    print: bool,
    /// Stop after n models (default 1)
    #[arg(short = 'm', value_name = "n", default_value_t = 1,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_models: u64,
    /// Stop after about n seconds (default unlimited)
    #[arg(short = 't', value_name = "n")]
    max_seconds: Option<f64>,
    /// Stop when more than n kilobytes are needed (default 48000)
    #[arg(short = 'k', value_name = "n", default_value_t = DEFAULT_MAX_KBYTES)]
    max_kbytes: u64,
    /// Unit subsumption: skip satisfied clauses during unit resolution
    #[arg(short = 's')]
    unit_subsumption: bool,
}

/// Runs the front end on `argv` (including the program name) and `input`.
/// Returns `None` after printing the help text.
pub fn anldp_main<I, T>(
    argv: I,
    input: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
    interrupt: Option<Arc<AtomicBool>>,
) -> Option<ExitCode>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if e.kind() == ErrorKind::DisplayHelp => {
            let _ = write!(out, "{e}");
            return None;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return Some(ExitCode::InputError);
        }
    };
    let cnf = match parse_integer_stream(input) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "input error: {e}");
            return Some(ExitCode::InputError);
        }
    };
    let mut budget = Budget::new(args.max_seconds, Some(args.max_kbytes));
    if let Some(flag) = interrupt {
        budget = budget.with_interrupt(flag);
    }
    if budget.charge(cnf.heap_bytes()).is_err() {
        return Some(ExitCode::MaxMem);
    }
    let options = SearchOptions {
        max_models: args.max_models,
        unit_subsumption: args.unit_subsumption,
    };
    let outcome = solve_with_budget(&cnf, options, &budget, |model| {
        if args.print {
            let lits: Vec<String> = (1..model.len())
                .map(|v| if model[v] { v as i64 } else { -(v as i64) }.to_string())
                .collect();
            let _ = writeln!(out, "{}", lits.join(" "));
        }
    });
    let _ = out.flush();
    Some(match outcome {
        SatOutcome::Unsatisfiable => ExitCode::Unsatisfiable,
        SatOutcome::ModelsFound {
            exhausted: false, ..
        } => ExitCode::MaxModels,
        SatOutcome::ModelsFound { .. } => ExitCode::AllModels,
        SatOutcome::Stopped { reason, .. } => ExitCode::from_stop(reason),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str], input: &str) -> (ExitCode, String) {
        let mut argv = vec!["anldp"];
        argv.extend_from_slice(args);
        let mut out = Vec::new();
        let code = anldp_main(argv, input, &mut out, &mut std::io::sink(), None).unwrap();
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run(&[], "1 2 0 1 -2 0 -1 2 0 -1 -2 0").0,
            ExitCode::Unsatisfiable
        );
        assert_eq!(run(&["-m", "1"], "1 0").0, ExitCode::MaxModels);
        assert_eq!(run(&["-m", "99"], "1 0").0, ExitCode::AllModels);
        assert_eq!(run(&[], "1 x 0").0, ExitCode::InputError);
        assert_eq!(run(&["-z"], "1 0").0, ExitCode::InputError);
    }

    #[test]
    fn prints_models() {
        let (code, out) = run(&["-p", "-m9", "-s"], "1 2 0 -1 0");
        assert_eq!(code, ExitCode::AllModels);
        assert_eq!(out, "-1 2\n");
    }
}
