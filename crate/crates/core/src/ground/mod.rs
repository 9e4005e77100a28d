//! Grounding: flat clauses and constraints become propositional clauses
//! over the domain `{0..n-1}`.

mod constraint;
mod varmap;

use thiserror::Error;

pub use constraint::{AssignValue, Constraint, Property};
pub use varmap::VariableMap;

use crate::flatten::{
    function_axiom_clauses, function_symbols, AtomKind, AxiomKind, FlatArg, FlatClause,
    FunctionAxiomSchema,
};
use crate::lang::{InputError, InputProblem, SymbolId, SymbolKind, SymbolTable};
use crate::limits::{Budget, Stop};
use crate::sat::Cnf;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InstantiationStats {
    /// Assignments of domain elements to the clause's variables.
    pub candidates: u64,
    /// Clauses surviving builtin evaluation and tautology deletion.
    pub emitted: u64,
}

impl std::ops::AddAssign for InstantiationStats {
    fn add_assign(&mut self, other: Self) {
        self.candidates += other.candidates;
        self.emitted += other.emitted;
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Var(usize),
    Element(u32),
}

impl Slot {
    fn value(self, vals: &[u32]) -> u32 {
        match self {
            Slot::Var(v) => vals[v],
            Slot::Element(e) => e,
        }
    }
}

enum Prepared {
    Builtin {
        sign: bool,
        order: bool,
        a: Slot,
        b: Slot,
    },
    Atom {
        sign: bool,
        base: u32,
        terms: Vec<(usize, u32)>,
    },
}

fn prepare(flat: &FlatClause, map: &VariableMap, n: u32) -> Vec<Prepared> {
    let slot = |a: &FlatArg| match *a {
        FlatArg::Var(v) => Slot::Var(v as usize),
        FlatArg::Element(e) => Slot::Element(e),
    };
    flat.literals
        .iter()
        .map(|lit| match lit.kind {
            AtomKind::Equality | AtomKind::Order => Prepared::Builtin {
                sign: lit.sign,
                order: lit.kind == AtomKind::Order,
                a: slot(&lit.args[0]),
                b: slot(&lit.args[1]),
            },
            AtomKind::Relation | AtomKind::Function => {
                let mut base = map.base(lit.symbol).expect("symbol has a block");
                let mut terms = Vec::new();
                let mut mult = 1u32;
                for arg in lit.args.iter().rev() {
                    match *arg {
                        FlatArg::Element(e) => {
                            assert!(e < n, "element {e} outside the domain");
                            base += e * mult;
                        }
                        FlatArg::Var(v) => terms.push((v as usize, mult)),
                    }
                    mult = mult.wrapping_mul(n);
                }
                Prepared::Atom {
                    sign: lit.sign,
                    base,
                    terms,
                }
            }
        })
        .collect()
}

/// Grounds one flat clause, handing each surviving clause to `sink`.
///
/// Builtin literals are evaluated; a true one deletes the instance and a
/// false one is dropped. Duplicate literals are merged and tautologies
/// deleted.
pub fn instantiate_into<E>(
    flat: &FlatClause,
    map: &VariableMap,
    n: u32,
    mut sink: impl FnMut(&[i32]) -> Result<(), E>,
) -> Result<InstantiationStats, E> {
    let prepared = prepare(flat, map, n);
    let k = flat.var_count as usize;
    let mut stats = InstantiationStats::default();
    if n == 0 && k > 0 {
        return Ok(stats);
    }
    let mut vals = vec![0u32; k];
    let mut clause: Vec<i32> = Vec::with_capacity(prepared.len());
    loop {
        stats.candidates += 1;
        clause.clear();
        let mut satisfied = false;
        for p in &prepared {
            match p {
                Prepared::Builtin { sign, order, a, b } => {
                    let (a, b) = (a.value(&vals), b.value(&vals));
                    let holds = if *order { a < b } else { a == b };
                    if holds == *sign {
                        satisfied = true;
                        break;
                    }
                }
                Prepared::Atom { sign, base, terms } => {
                    let var = terms.iter().fold(*base, |acc, &(v, m)| acc + vals[v] * m) as i32;
                    let lit = if *sign { var } else { -var };
                    if clause.contains(&-lit) {
                        satisfied = true;
                        break;
                    }
                    if !clause.contains(&lit) {
                        clause.push(lit);
                    }
                }
            }
        }
        if !satisfied {
            stats.emitted += 1;
            sink(&clause)?;
        }
        // odometer, last variable fastest
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(stats);
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < n {
                break;
            }
            vals[i] = 0;
        }
    }
}

/// All ground instances of a flat clause.
pub fn instantiate(flat: &FlatClause, map: &VariableMap, n: u32) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    instantiate_into::<()>(flat, map, n, |c| {
        out.push(c.to_vec());
        Ok(())
    })
    .unwrap();
    out
}

fn check_element(e: u32, n: u32) -> Result<(), InputError> {
    if e < n {
        Ok(())
    } else {
        Err(InputError::new(format!(
            "domain element {e} does not exist at domain size {n}"
        )))
    }
}

/// The unit clause for an `assign(...)` constraint.
pub fn encode_assign(
    c: &Constraint,
    symbols: &SymbolTable,
    map: &VariableMap,
    n: u32,
) -> Result<Vec<i32>, InputError> {
    let Constraint::Assign {
        symbol,
        args,
        value,
        pos,
    } = c
    else {
        return Err(InputError::new("not an assignment"));
    };
    let at = |msg: String| InputError::at(*pos, msg);
    let sym = symbols.get(*symbol);
    if map.base(*symbol).is_none() {
        return Err(at(format!("cannot assign values to {}", sym.name)));
    }
    for &e in args {
        check_element(e, n).map_err(|e| e.or_at(*pos))?;
    }
    match (sym.kind, value) {
        (SymbolKind::Function, AssignValue::Element(v)) => {
            check_element(*v, n).map_err(|e| e.or_at(*pos))?;
            let mut tuple = args.clone();
            tuple.push(*v);
            Ok(vec![map.encode(*symbol, &tuple)])
        }
        (SymbolKind::Relation, AssignValue::Bool(b)) => {
            let var = map.encode(*symbol, args);
            Ok(vec![if *b { var } else { -var }])
        }
        (SymbolKind::Function, AssignValue::Bool(_)) => Err(at(format!(
            "function {} needs a domain element, not a truth value",
            sym.name
        ))),
        (SymbolKind::Relation, AssignValue::Element(_)) => Err(at(format!(
            "relation {} needs T or F, not a domain element",
            sym.name
        ))),
    }
}

/// Clauses for a `property(...)` constraint. Equality and order are
/// evaluated during instantiation and contribute no clauses.
pub fn encode_property(
    symbol: SymbolId,
    property: Property,
    symbols: &SymbolTable,
    map: &VariableMap,
    n: u32,
) -> Result<Vec<Vec<i32>>, InputError> {
    let sym = symbols.get(symbol);
    let expect = |kind: SymbolKind, arity: usize| {
        if sym.kind == kind && sym.arity == arity {
            Ok(())
        } else {
            Err(InputError::new(format!(
                "property does not fit {}/{}",
                sym.name, sym.arity
            )))
        }
    };
    let mut out = Vec::new();
    match property {
        Property::Equality | Property::Order => expect(SymbolKind::Relation, 2)?,
        Property::Bijection => {
            expect(SymbolKind::Function, 1)?;
            for v in 0..n {
                for x1 in 0..n {
                    for x2 in x1 + 1..n {
                        out.push(vec![
                            -map.encode(symbol, &[x1, v]),
                            -map.encode(symbol, &[x2, v]),
                        ]);
                    }
                }
            }
        }
        Property::Quasigroup => {
            expect(SymbolKind::Function, 2)?;
            for r in 0..n {
                for v in 0..n {
                    for c1 in 0..n {
                        for c2 in c1 + 1..n {
                            out.push(vec![
                                -map.encode(symbol, &[r, c1, v]),
                                -map.encode(symbol, &[r, c2, v]),
                            ]);
                        }
                    }
                }
            }
            for c in 0..n {
                for v in 0..n {
                    for r1 in 0..n {
                        for r2 in r1 + 1..n {
                            out.push(vec![
                                -map.encode(symbol, &[r1, c, v]),
                                -map.encode(symbol, &[r2, c, v]),
                            ]);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Units giving the first `min(#constants, n)` constants the values
/// `0, 1, ...` in appearance order.
pub fn encode_distinct_constants(
    symbols: &SymbolTable,
    map: &VariableMap,
    n: u32,
) -> Vec<Vec<i32>> {
    symbols
        .constants()
        .map(|(c, _)| c)
        .filter(|&c| map.base(c).is_some())
        .take(n as usize)
        .enumerate()
        .map(|(k, c)| vec![map.encode(c, &[k as u32])])
        .collect()
}

/// The function the `-x` units apply to: a binary function named `f`.
pub fn qg_symmetry_target(symbols: &SymbolTable) -> Option<SymbolId> {
    let f = symbols.lookup("f")?;
    let s = symbols.get(f);
    (s.kind == SymbolKind::Function && s.arity == 2).then_some(f)
}

/// Isomorphism-reducing units for a quasigroup `f`: for each row `x >= 1`,
/// the entry in the last column is at most `x`.
pub fn quasigroup_symmetry_units(f: SymbolId, map: &VariableMap, n: u32) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for x in 1..n {
        for v in x + 1..n {
            out.push(vec![-map.encode(f, &[x, n - 1, v])]);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroundOptions {
    /// `-c`: distinct values for the first constants.
    pub distinct_constants: bool,
    /// `-x`: quasigroup isomorphism units.
    pub qg_symmetry: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundStats {
    pub theory: InstantiationStats,
    pub axiom_clauses: usize,
    pub constraint_clauses: usize,
}

#[derive(Debug)]
pub struct GroundProblem {
    pub cnf: Cnf,
    pub map: VariableMap,
    pub n: u32,
    pub stats: GroundStats,
    /// Bytes charged to the budget; release them when the problem is dropped.
    pub charged_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("grounding stopped: {0:?}")]
    Stop(Stop),
}

impl From<Stop> for GroundError {
    fn from(s: Stop) -> Self {
        GroundError::Stop(s)
    }
}

const CHECK_INTERVAL: usize = 4096;

struct Sink<'a> {
    cnf: Cnf,
    budget: &'a Budget,
    charged: u64,
}

impl Sink<'_> {
    fn push(&mut self, clause: &[i32]) -> Result<(), Stop> {
        let bytes = 4 * clause.len() as u64 + 8;
        if let Err(e) = self.budget.charge(bytes) {
            self.budget.release(self.charged);
            return Err(e);
        }
        self.charged += bytes;
        self.cnf.push_clause(clause);
        if self.cnf.len().is_multiple_of(CHECK_INTERVAL) {
            if let Err(e) = self.budget.check() {
                self.budget.release(self.charged);
                return Err(e);
            }
        }
        Ok(())
    }

    fn extend(&mut self, clauses: &[Vec<i32>]) -> Result<(), Stop> {
        clauses.iter().try_for_each(|c| self.push(c))
    }
}

/// Builds the propositional problem for domain size `n`: theory instances,
/// function axioms, constraints (in input order), then `-c` and `-x` units.
pub fn build_ground_problem(
    theory: &[FlatClause],
    problem: &InputProblem,
    options: &GroundOptions,
    n: u32,
    budget: &Budget,
) -> Result<GroundProblem, GroundError> {
    let symbols = &problem.symbols;
    let map = VariableMap::new(symbols, n)?;
    let mut sink = Sink {
        cnf: Cnf::new(map.total()),
        budget,
        charged: 0,
    };
    let mut stats = GroundStats::default();
    for flat in theory {
        stats.theory += instantiate_into(flat, &map, n, |c| sink.push(c))?;
    }
    let before = sink.cnf.len();
    for f in function_symbols(symbols) {
        for kind in [AxiomKind::Closed, AxiomKind::WellDefined] {
            let schema = FunctionAxiomSchema { function: f, kind };
            sink.extend(&function_axiom_clauses(schema, &map, n))?;
        }
    }
    stats.axiom_clauses = sink.cnf.len() - before;
    let before = sink.cnf.len();
    let release_on_err = |e: InputError, charged: u64| {
        budget.release(charged);
        GroundError::Input(e)
    };
    for c in &problem.constraints {
        match c {
            Constraint::Assign { .. } => {
                let unit = encode_assign(c, symbols, &map, n)
                    .map_err(|e| release_on_err(e, sink.charged))?;
                sink.push(&unit)?;
            }
            Constraint::Property {
                symbol,
                property,
                pos,
            } => {
                let clauses = encode_property(*symbol, *property, symbols, &map, n)
                    .map_err(|e| release_on_err(e.or_at(*pos), sink.charged))?;
                sink.extend(&clauses)?;
            }
        }
    }
    if options.distinct_constants {
        sink.extend(&encode_distinct_constants(symbols, &map, n))?;
    }
    if options.qg_symmetry {
        if let Some(f) = qg_symmetry_target(symbols) {
            sink.extend(&quasigroup_symmetry_units(f, &map, n))?;
        }
    }
    stats.constraint_clauses = sink.cnf.len() - before;
    Ok(GroundProblem {
        cnf: sink.cnf,
        map,
        n,
        stats,
        charged_bytes: sink.charged,
    })
}
