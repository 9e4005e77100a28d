//! The `modelforge` command: option parsing, the domain-size loop, exit
//! codes, and the equation filter.

use std::io::{self, Write};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::flatten::{axiom_trace_line, flatten_theory, function_symbols};
use crate::ground::{build_ground_problem, GroundError, GroundOptions};
use crate::lang::{parse_input, validate, InputProblem};
use crate::limits::{Budget, Stop, DEFAULT_MAX_KBYTES};
use crate::model::{extract, find_violation, print_ivy, print_parsable, print_tabular};
use crate::sat::{solve_with_budget, SatOutcome, SearchOptions};

/// Process exit codes shared by `modelforge` and `anldp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExitCode {
    Abend = 11,
    Unsatisfiable = 12,
    MaxSeconds = 13,
    MaxMem = 14,
    MaxModels = 15,
    AllModels = 16,
    Sigint = 17,
    Segv = 18,
    InputError = 19,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_stop(stop: Stop) -> Self {
        match stop {
            Stop::TimeLimit => ExitCode::MaxSeconds,
            Stop::MemoryLimit => ExitCode::MaxMem,
            Stop::Interrupted => ExitCode::Sigint,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExitCode::Abend => "ABEND_EXIT",
            ExitCode::Unsatisfiable => "UNSATISFIABLE_EXIT",
            ExitCode::MaxSeconds => "MAX_SECONDS_EXIT",
            ExitCode::MaxMem => "MAX_MEM_EXIT",
            ExitCode::MaxModels => "MAX_MODELS_EXIT",
            ExitCode::AllModels => "ALL_MODELS_EXIT",
            ExitCode::Sigint => "SIGINT_EXIT",
            ExitCode::Segv => "SEGV_EXIT",
            ExitCode::InputError => "INPUT_ERROR_EXIT",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub start_n: u32,
    pub end_n: u32,
    pub distinct_constants: bool,
    pub qg_symmetry: bool,
    pub print_tabular: bool,
    pub print_parsable: bool,
    pub print_ivy: bool,
    pub max_models: u64,
    pub max_seconds: Option<f64>,
    pub max_kbytes: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            start_n: 2,
            end_n: 2,
            distinct_constants: false,
            qg_symmetry: false,
            print_tabular: false,
            print_parsable: false,
            print_ivy: false,
            max_models: 1,
            max_seconds: None,
            max_kbytes: DEFAULT_MAX_KBYTES,
        }
    }
}

impl SearchConfig {
    pub fn sizes(&self) -> std::ops::RangeInclusive<u32> {
        self.start_n..=self.end_n
    }
}

const ABOUT: &str = "Searches for finite models of first-order clauses read from stdin.";

#[derive(Parser, Debug)]
#[command(
    name = "modelforge",
    about = ABOUT,
    disable_version_flag = true,
    args_conflicts_with_subcommands = true
)]
struct Args {
    /// Starting domain size (default 2)
    #[arg(short = 'n', value_name = "n")]
    start: Option<u32>,
    /// Ending domain size (default: the starting size)
    #[arg(short = 'N', value_name = "n")]
    end: Option<u32>,
    /// Give the first constants distinct values
    #[arg(short = 'c')]
    distinct_constants: bool,
    /// Print models in tabular form
    #[arg(short = 'p')]
    tabular: bool,
    /// Print models as Prolog-readable facts
    #[arg(short = 'P')]
    parsable: bool,
    /// Print models as IVY S-expressions
    #[arg(short = 'I')]
    ivy: bool,
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
    /// Quasigroup isomorphism constraint on binary f
    #[arg(short = 'x')]
    qg_symmetry: bool,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Print the equations (one per line) over binary f that have no
    /// noncommutative model of size 2..N
    Filter {
        file: String,
        #[arg(short = 'N', value_name = "n", default_value_t = 4)]
        max_n: u32,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Search(SearchConfig),
    Filter {
        file: String,
        max_n: u32,
    },
    /// Help text was requested; print it and exit successfully.
    Help(String),
}

/// Parses the command line (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Command, String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if e.kind() == ErrorKind::DisplayHelp => return Ok(Command::Help(e.to_string())),
        Err(e) => return Err(e.to_string()),
    };
    if let Some(Sub::Filter { file, max_n }) = args.command {
        if max_n < 2 {
            return Err("filter needs -N of at least 2".into());
        }
        return Ok(Command::Filter { file, max_n });
    }
    let start_n = args.start.unwrap_or(2);
    let end_n = args.end.unwrap_or(start_n);
    if start_n < 1 {
        return Err("the domain size must be at least 1".into());
    }
    if end_n < start_n {
        return Err(format!("-N {end_n} is below the starting size {start_n}"));
    }
    if let Some(t) = args.max_seconds {
        if !(t >= 0.0 && t.is_finite()) {
            return Err("-t needs a non-negative number of seconds".into());
        }
    }
    Ok(Command::Search(SearchConfig {
        start_n,
        end_n,
        distinct_constants: args.distinct_constants,
        qg_symmetry: args.qg_symmetry,
        print_tabular: args.tabular,
        print_parsable: args.parsable,
        print_ivy: args.ivy,
        max_models: args.max_models,
        max_seconds: args.max_seconds,
        max_kbytes: args.max_kbytes,
    }))
}

/// Result of a search, with the models' count for callers that need it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSummary {
    pub exit: ExitCode,
    pub models: u64,
}

/// Runs the search on `input`. Models and trace lines go to `out`,
/// diagnostics to `err`. Output write failures are ignored.
pub fn run(
    config: &SearchConfig,
    input: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
    interrupt: Option<Arc<AtomicBool>>,
) -> RunSummary {
    let start = Instant::now();
    let summary = |exit, models| RunSummary { exit, models };
    let problem = match parse_input(input) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "input error: {e}");
            return summary(ExitCode::InputError, 0);
        }
    };
    for w in &problem.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let mut budget = Budget::new(config.max_seconds, Some(config.max_kbytes));
    if let Some(flag) = interrupt {
        budget = budget.with_interrupt(flag);
    }
    let flat = flatten_theory(&problem.theory, &problem.symbols);
    for c in &flat {
        let _ = writeln!(out, "Processing clause: {}.", c.display(&problem.symbols));
    }
    let options = GroundOptions {
        distinct_constants: config.distinct_constants,
        qg_symmetry: config.qg_symmetry,
    };
    let mut found = 0u64;
    for n in config.sizes() {
        if let Err(e) = validate(&problem, n) {
            let _ = writeln!(err, "input error: {e}");
            return summary(ExitCode::InputError, found);
        }
        let _ = writeln!(out, "\n--- Domain size {n} ---");
        for f in function_symbols(&problem.symbols) {
            let _ = writeln!(out, "{}", axiom_trace_line(f, &problem.symbols));
        }
        let ground = match build_ground_problem(&flat, &problem, &options, n, &budget) {
            Ok(g) => g,
            Err(GroundError::Input(e)) => {
                let _ = writeln!(err, "input error: {e}");
                return summary(ExitCode::InputError, found);
            }
            Err(GroundError::Stop(s)) => return summary(ExitCode::from_stop(s), found),
        };
        let _ = writeln!(
            out,
            "{} propositional variables, {} clauses.",
            ground.map.total(),
            ground.cnf.len()
        );
        let search = SearchOptions {
            max_models: config.max_models - found,
            unit_subsumption: false,
        };
        let mut failure = None;
        let outcome = solve_with_budget(&ground.cnf, search, &budget, |assignment| {
            if failure.is_some() {
                return;
            }
            found += 1;
            match report(config, &problem, &ground.map, assignment, found, start, out) {
                Ok(()) => {}
                Err(msg) => failure = Some(msg),
            }
        });
        budget.release(ground.charged_bytes);
        if let Some(msg) = failure {
            let _ = writeln!(err, "internal error: {msg}");
            return summary(ExitCode::Abend, found);
        }
        match outcome {
            SatOutcome::Stopped { reason, .. } => {
                return summary(ExitCode::from_stop(reason), found)
            }
            SatOutcome::ModelsFound {
                exhausted: false, ..
            } => return summary(ExitCode::MaxModels, found),
            SatOutcome::ModelsFound { .. } | SatOutcome::Unsatisfiable => {
                if found >= config.max_models {
                    return summary(ExitCode::MaxModels, found);
                }
            }
        }
    }
    let exit = if found > 0 {
        ExitCode::AllModels
    } else {
        ExitCode::Unsatisfiable
    };
    summary(exit, found)
}

/// Extracts, verifies, and prints one model.
fn report(
    config: &SearchConfig,
    problem: &InputProblem,
    map: &crate::ground::VariableMap,
    assignment: &[bool],
    index: u64,
    start: Instant,
    out: &mut dyn Write,
) -> Result<(), String> {
    let model = extract(assignment, map, &problem.symbols).map_err(|e| e.to_string())?;
    if let Some(v) = find_violation(&model, &problem.theory, &problem.symbols) {
        return Err(format!(
            "model #{index} falsifies clause {} under {:?}",
            v.clause + 1,
            v.assignment
        ));
    }
    let text = print_tabular(&model, index, start.elapsed().as_secs_f64());
    if config.print_tabular {
        let _ = write!(out, "\n{text}");
    } else {
        let _ = writeln!(out, "\n{}", text.lines().next().unwrap_or_default());
    }
    if config.print_parsable {
        let _ = write!(out, "{}", print_parsable(&model));
    }
    if config.print_ivy {
        let _ = write!(out, "{}", print_ivy(&model));
    }
    let _ = out.flush();
    Ok(())
}

/// Runs the equation filter: prints each equation over binary `f` that has
/// no model of size `2..=max_n` in which `f(0,1) != f(1,0)`.
pub fn filter_identities(
    equations: &str,
    max_n: u32,
    out: &mut dyn Write,
    err: &mut dyn Write,
    interrupt: Option<Arc<AtomicBool>>,
) -> ExitCode {
    let config = SearchConfig {
        start_n: 2,
        end_n: max_n,
        ..SearchConfig::default()
    };
    for (i, line) in equations.lines().enumerate() {
        let eq = line.trim();
        if eq.is_empty() || eq.starts_with('%') {
            continue;
        }
        let input = format!("list(usable). {eq} f(0,1)!=f(1,0). end_of_list.\n");
        let mut diagnostics = Vec::new();
        let result = run(
            &config,
            &input,
            &mut io::sink(),
            &mut diagnostics,
            interrupt.clone(),
        );
        match result.exit {
            ExitCode::Unsatisfiable => {
                let _ = writeln!(out, "{eq}");
            }
            ExitCode::InputError => {
                let _ = writeln!(
                    err,
                    "line {}: skipped: {}",
                    i + 1,
                    String::from_utf8_lossy(&diagnostics).trim()
                );
            }
            ExitCode::Sigint => return ExitCode::Sigint,
            _ => {}
        }
    }
    let _ = out.flush();
    ExitCode::AllModels
}

static INTERRUPT: std::sync::OnceLock<Arc<AtomicBool>> = std::sync::OnceLock::new();

extern "C" fn on_interrupt(_: libc::c_int) {
    if let Some(flag) = INTERRUPT.get() {
        if flag.swap(true, std::sync::atomic::Ordering::SeqCst) {
            // second interrupt while the first is still pending
            unsafe { libc::_exit(ExitCode::Sigint.code()) };
        }
    }
}

extern "C" fn on_crash(_: libc::c_int) {
    unsafe { libc::_exit(ExitCode::Segv.code()) };
}

/// Installs process signal handlers: SIGINT sets the returned flag (the
/// search stops at its next check), SIGSEGV and SIGBUS exit with the crash
/// code.
pub fn install_signal_handlers() -> Arc<AtomicBool> {
    let flag = INTERRUPT
        .get_or_init(|| Arc::new(AtomicBool::new(false)))
        .clone();
    let interrupt: extern "C" fn(libc::c_int) = on_interrupt;
    let crash: extern "C" fn(libc::c_int) = on_crash;
    unsafe {
        libc::signal(libc::SIGINT, interrupt as libc::sighandler_t);
        libc::signal(libc::SIGSEGV, crash as libc::sighandler_t);
        libc::signal(libc::SIGBUS, crash as libc::sighandler_t);
    }
    flag
}
