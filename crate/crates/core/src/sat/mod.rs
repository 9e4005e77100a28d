//! Propositional clauses and the DPLL decision procedure.

mod anldp;
mod cnf;
mod solver;

pub use anldp::anldp_main;
pub use cnf::{parse_integer_stream, Cnf, StreamError};
pub use solver::{
    solve, solve_with_budget, SatLimits, SatOutcome, SearchOptions, Solver, SolverStats,
};
