//! First-order models: extraction from propositional models, verification
//! against the input clauses, and output formats.

mod print;

use std::collections::HashMap;

use thiserror::Error;

pub use print::{
    parse_parsable, print_ivy, print_parsable, print_tabular, write_table, ParseModelError,
};

use crate::flatten::for_each_tuple;
use crate::ground::VariableMap;
use crate::lang::{Clause, SymbolKind, SymbolTable, Term};

/// The interpretation of one symbol. Values are listed in row-major order
/// of the argument tuples; relations use 1 for true and 0 for false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub kind: SymbolKind,
    pub arity: usize,
    pub values: Vec<u32>,
}

impl Table {
    pub fn index(&self, args: &[u32], n: u32) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        args.iter()
            .fold(0usize, |acc, &a| acc * n as usize + a as usize)
    }

    pub fn get(&self, args: &[u32], n: u32) -> u32 {
        self.values[self.index(args, n)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderModel {
    pub n: u32,
    /// Tables in symbol appearance order.
    pub tables: Vec<Table>,
}

impl FirstOrderModel {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Checks that every table is total and every function value is in the
    /// domain.
    pub fn is_well_formed(&self) -> bool {
        self.tables.iter().all(|t| {
            let size = (self.n as usize).pow(t.arity as u32);
            let bound = match t.kind {
                SymbolKind::Function => self.n,
                SymbolKind::Relation => 2,
            };
            t.values.len() == size && t.values.iter().all(|&v| v < bound)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{name}{args:?} has {count} values in the propositional model")]
    NotAFunction {
        name: String,
        args: Vec<u32>,
        count: usize,
    },
}

/// Reads the first-order model off a propositional model (indexed by
/// variable, slot 0 unused).
pub fn extract(
    assignment: &[bool],
    map: &VariableMap,
    symbols: &SymbolTable,
) -> Result<FirstOrderModel, ModelError> {
    let n = map.domain_size();
    let mut tables = Vec::new();
    for &sym in map.symbols() {
        let s = symbols.get(sym);
        let truth = |tuple: &[u32]| assignment[map.encode(sym, tuple) as usize];
        let mut values = Vec::new();
        let mut error = None;
        match s.kind {
            SymbolKind::Relation => {
                for_each_tuple(s.arity, n, |t| values.push(truth(t) as u32));
            }
            SymbolKind::Function => {
                let mut cell = vec![0; s.arity + 1];
                for_each_tuple(s.arity, n, |t| {
                    cell[..s.arity].copy_from_slice(t);
                    let mut found = Vec::new();
                    for v in 0..n {
                        cell[s.arity] = v;
                        if truth(&cell) {
                            found.push(v);
                        }
                    }
                    if found.len() == 1 {
                        values.push(found[0]);
                    } else if error.is_none() {
                        error = Some(ModelError::NotAFunction {
                            name: s.name.clone(),
                            args: t.to_vec(),
                            count: found.len(),
                        });
                    }
                });
            }
        }
        if let Some(e) = error {
            return Err(e);
        }
        tables.push(Table {
            name: s.name.clone(),
            kind: s.kind,
            arity: s.arity,
            values,
        });
    }
    Ok(FirstOrderModel { n, tables })
}

/// A clause instance that the model falsifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: usize,
    pub assignment: Vec<u32>,
}

struct Evaluator<'a> {
    model: &'a FirstOrderModel,
    symbols: &'a SymbolTable,
    tables: Vec<Option<&'a Table>>,
}

impl<'a> Evaluator<'a> {
    fn new(model: &'a FirstOrderModel, symbols: &'a SymbolTable) -> Self {
        let by_name: HashMap<&str, &Table> =
            model.tables.iter().map(|t| (t.name.as_str(), t)).collect();
        let tables = symbols
            .iter()
            .map(|(_, s)| by_name.get(s.name.as_str()).copied())
            .collect();
        Evaluator {
            model,
            symbols,
            tables,
        }
    }

    fn table(&self, sym: crate::lang::SymbolId) -> Option<&'a Table> {
        self.tables[sym.index()]
    }

    fn term(&self, t: &Term, vals: &[u32]) -> Option<u32> {
        match t {
            Term::Var(v) => Some(vals[v.0 as usize]),
            Term::Element(e) => (*e < self.model.n).then_some(*e),
            Term::App(sym, args) => {
                let args: Option<Vec<u32>> = args.iter().map(|a| self.term(a, vals)).collect();
                let table = self.table(*sym)?;
                Some(table.get(&args?, self.model.n))
            }
        }
    }

    /// `None` when the clause mentions something the model lacks.
    fn clause_holds(&self, clause: &Clause, vals: &[u32]) -> Option<bool> {
        for lit in &clause.literals {
            let sym = self.symbols.get(lit.atom.symbol);
            let args: Vec<u32> = lit
                .atom
                .args
                .iter()
                .map(|a| self.term(a, vals))
                .collect::<Option<_>>()?;
            let holds = if sym.is_equality {
                args[0] == args[1]
            } else if sym.is_order {
                args[0] < args[1]
            } else {
                self.table(lit.atom.symbol)?.get(&args, self.model.n) == 1
            };
            if holds == lit.sign {
                return Some(true);
            }
        }
        Some(false)
    }
}

/// The first falsified clause instance, trying clauses in order and
/// variable assignments lexicographically.
pub fn find_violation(
    model: &FirstOrderModel,
    theory: &[Clause],
    symbols: &SymbolTable,
) -> Option<Violation> {
    let eval = Evaluator::new(model, symbols);
    for (i, clause) in theory.iter().enumerate() {
        let mut bad = None;
        for_each_tuple(clause.var_count(), model.n, |vals| {
            if bad.is_none() && eval.clause_holds(clause, vals) != Some(true) {
                bad = Some(vals.to_vec());
            }
        });
        if let Some(assignment) = bad {
            return Some(Violation {
                clause: i,
                assignment,
            });
        }
    }
    None
}

/// Whether the model satisfies every clause under every variable
/// assignment, with equality read as identity.
pub fn verify(model: &FirstOrderModel, theory: &[Clause], symbols: &SymbolTable) -> bool {
    model.is_well_formed() && find_violation(model, theory, symbols).is_none()
}
