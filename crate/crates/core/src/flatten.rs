//! Relational translation of clauses.
//!
//! Every n-ary function symbol becomes an (n+1)-ary relation whose last
//! argument carries the value. A subterm `f(t1..tn)` is replaced by a fresh
//! variable `v` together with the negative literal `-f(t1'..tn', v)`, so the
//! resulting literals contain only variables and domain elements.

use std::collections::HashMap;
use std::fmt;

use crate::ground::VariableMap;
use crate::lang::{Clause, Literal, SymbolId, SymbolKind, SymbolTable, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlatArg {
    Var(u32),
    Element(u32),
}

impl fmt::Display for FlatArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatArg::Var(v) => write!(f, "v{v}"),
            FlatArg::Element(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    /// An input relation.
    Relation,
    /// The relation standing for a function; the value is the last argument.
    Function,
    /// Identity on domain elements, decided during grounding.
    Equality,
    /// The order `0 < 1 < ... < n-1`, decided during grounding.
    Order,
}

impl AtomKind {
    pub fn is_builtin(self) -> bool {
        matches!(self, AtomKind::Equality | AtomKind::Order)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatLiteral {
    pub sign: bool,
    pub kind: AtomKind,
    pub symbol: SymbolId,
    pub args: Vec<FlatArg>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatClause {
    pub literals: Vec<FlatLiteral>,
    pub var_count: u32,
}

impl FlatClause {
    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> FlatClauseDisplay<'a> {
        FlatClauseDisplay {
            clause: self,
            symbols,
        }
    }

    pub fn has_builtin(&self) -> bool {
        self.literals.iter().any(|l| l.kind.is_builtin())
    }
}

pub struct FlatClauseDisplay<'a> {
    clause: &'a FlatClause,
    symbols: &'a SymbolTable,
}

impl fmt::Display for FlatClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, lit) in self.clause.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            let name = self.symbols.name(lit.symbol);
            match (lit.kind, name) {
                (AtomKind::Equality, "=") => {
                    let op = if lit.sign { "=" } else { "!=" };
                    write!(f, "{} {op} {}", lit.args[0], lit.args[1])?;
                }
                (AtomKind::Order, "<") => {
                    if lit.sign {
                        write!(f, "{} < {}", lit.args[0], lit.args[1])?;
                    } else {
                        write!(f, "-({} < {})", lit.args[0], lit.args[1])?;
                    }
                }
                _ => {
                    if !lit.sign {
                        write!(f, "-")?;
                    }
                    write!(f, "{name}")?;
                    if !lit.args.is_empty() {
                        write!(f, "(")?;
                        for (j, a) in lit.args.iter().enumerate() {
                            if j > 0 {
                                write!(f, ",")?;
                            }
                            write!(f, "{a}")?;
                        }
                        write!(f, ")")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// State for flattening one clause under one choice of signs.
struct Flattener<'a> {
    symbols: &'a SymbolTable,
    next_var: u32,
    definitions: Vec<FlatLiteral>,
    cache: HashMap<&'a Term, u32>,
}

impl<'a> Flattener<'a> {
    fn fresh(&mut self) -> u32 {
        self.next_var += 1;
        self.next_var - 1
    }

    /// Arguments are visited right to left; definitions of inner terms
    /// precede those of the terms containing them.
    fn args(&mut self, args: &'a [Term]) -> Vec<FlatArg> {
        let mut out: Vec<FlatArg> = args.iter().rev().map(|a| self.term(a)).collect();
        out.reverse();
        out
    }

    fn term(&mut self, t: &'a Term) -> FlatArg {
        match t {
            Term::Var(v) => FlatArg::Var(v.0),
            Term::Element(e) => FlatArg::Element(*e),
            Term::App(sym, args) => {
                if let Some(&v) = self.cache.get(t) {
                    return FlatArg::Var(v);
                }
                let mut flat = self.args(args);
                let value = self.fresh();
                flat.push(FlatArg::Var(value));
                self.definitions.push(FlatLiteral {
                    sign: false,
                    kind: AtomKind::Function,
                    symbol: *sym,
                    args: flat,
                });
                self.cache.insert(t, value);
                FlatArg::Var(value)
            }
        }
    }

    /// `f(args) = value` (or its negation) as a single function literal.
    fn function_literal(&mut self, sign: bool, t: &'a Term, value: FlatArg) -> FlatLiteral {
        let Term::App(sym, args) = t else {
            unreachable!("function_literal on a non-compound term")
        };
        let mut flat = self.args(args);
        flat.push(value);
        FlatLiteral {
            sign,
            kind: AtomKind::Function,
            symbol: *sym,
            args: flat,
        }
    }

    /// Flattens one literal. `left_positive` picks which side of a positive
    /// equation between two compound terms keeps its function literal positive.
    fn literal(&mut self, lit: &'a Literal, left_positive: bool) -> FlatLiteral {
        let sym = self.symbols.get(lit.atom.symbol);
        let args = &lit.atom.args;
        if sym.is_equality {
            let (l, r) = (&args[0], &args[1]);
            return match (l.is_compound(), r.is_compound(), lit.sign) {
                (false, false, _) => {
                    let rv = self.term(r);
                    let lv = self.term(l);
                    self.builtin(lit, AtomKind::Equality, vec![lv, rv])
                }
                (true, false, sign) => {
                    let rv = self.term(r);
                    self.function_literal(sign, l, rv)
                }
                (false, true, sign) => {
                    let lv = self.term(l);
                    self.function_literal(sign, r, lv)
                }
                (true, true, true) => {
                    if left_positive {
                        let value = self.term(r);
                        self.function_literal(true, l, value)
                    } else {
                        let value = FlatArg::Var(self.fresh());
                        let right = self.function_literal(true, r, value);
                        self.definitions.push(right);
                        self.function_literal(false, l, value)
                    }
                }
                (true, true, false) => {
                    let rv = self.term(r);
                    let lv = self.term(l);
                    self.builtin(lit, AtomKind::Equality, vec![lv, rv])
                }
            };
        }
        let flat = self.args(args);
        let kind = if sym.is_order {
            AtomKind::Order
        } else {
            AtomKind::Relation
        };
        FlatLiteral {
            sign: lit.sign,
            kind,
            symbol: lit.atom.symbol,
            args: flat,
        }
    }

    fn builtin(&self, lit: &Literal, kind: AtomKind, args: Vec<FlatArg>) -> FlatLiteral {
        FlatLiteral {
            sign: lit.sign,
            kind,
            symbol: lit.atom.symbol,
            args,
        }
    }
}

fn splits_sign(lit: &Literal, symbols: &SymbolTable) -> bool {
    lit.sign
        && symbols.get(lit.atom.symbol).is_equality
        && lit.atom.args.iter().all(Term::is_compound)
}

/// Flattens a clause. A positive equation between two compound terms yields
/// two flat clauses, one with each side's function literal positive; each
/// is equivalent to the original when functions are total and well defined.
pub fn flatten_clause(clause: &Clause, symbols: &SymbolTable) -> Vec<FlatClause> {
    let split: Vec<usize> = clause
        .literals
        .iter()
        .enumerate()
        .filter(|(_, l)| splits_sign(l, symbols))
        .map(|(i, _)| i)
        .collect();
    (0u64..1 << split.len())
        .map(|mask| {
            let mut fl = Flattener {
                symbols,
                next_var: clause.var_count() as u32,
                definitions: Vec::new(),
                cache: HashMap::new(),
            };
            let mut main = Vec::with_capacity(clause.literals.len());
            for (i, lit) in clause.literals.iter().enumerate() {
                let left_positive = match split.iter().position(|&j| j == i) {
                    Some(bit) => mask & (1 << bit) == 0,
                    None => true,
                };
                main.push(fl.literal(lit, left_positive));
            }
            let mut literals = fl.definitions;
            literals.extend(main);
            renumber(literals)
        })
        .collect()
}

/// Numbers variables densely in order of first occurrence.
fn renumber(mut literals: Vec<FlatLiteral>) -> FlatClause {
    let mut map: HashMap<u32, u32> = HashMap::new();
    for lit in literals.iter_mut() {
        for arg in lit.args.iter_mut() {
            if let FlatArg::Var(v) = arg {
                let next = map.len() as u32;
                *v = *map.entry(*v).or_insert(next);
            }
        }
    }
    FlatClause {
        literals,
        var_count: map.len() as u32,
    }
}

pub fn flatten_theory(theory: &[Clause], symbols: &SymbolTable) -> Vec<FlatClause> {
    theory
        .iter()
        .flat_map(|c| flatten_clause(c, symbols))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    /// At most one value per argument tuple.
    WellDefined,
    /// At least one value per argument tuple.
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionAxiomSchema {
    pub function: SymbolId,
    pub kind: AxiomKind,
}

/// Function symbols that need axioms, in symbol order.
pub fn function_symbols(symbols: &SymbolTable) -> impl Iterator<Item = SymbolId> + '_ {
    symbols
        .iter()
        .filter(|(_, s)| s.kind == SymbolKind::Function)
        .map(|(id, _)| id)
}

/// The trace line announcing the axioms of one function.
pub fn axiom_trace_line(function: SymbolId, symbols: &SymbolTable) -> String {
    let s = symbols.get(function);
    format!(
        "Function {}/{} well-defined and closed.",
        s.name,
        s.arity + 1
    )
}

/// Calls `emit` for each argument tuple in lexicographic order.
pub(crate) fn for_each_tuple(arity: usize, n: u32, mut emit: impl FnMut(&[u32])) {
    let mut tuple = vec![0u32; arity];
    loop {
        emit(&tuple);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < n {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// Ground clauses of one axiom schema over the domain `{0..n-1}`.
pub fn function_axiom_clauses(
    schema: FunctionAxiomSchema,
    map: &VariableMap,
    n: u32,
) -> Vec<Vec<i32>> {
    let arity = map.arity(schema.function).expect("function has a block") - 1;
    let mut out = Vec::new();
    let mut cell = vec![0u32; arity + 1];
    for_each_tuple(arity, n, |t| {
        cell[..arity].copy_from_slice(t);
        let var = |v: u32, cell: &mut Vec<u32>| {
            cell[arity] = v;
            map.encode(schema.function, cell)
        };
        match schema.kind {
            AxiomKind::Closed => {
                out.push((0..n).map(|v| var(v, &mut cell)).collect());
            }
            AxiomKind::WellDefined => {
                for u in 0..n {
                    for w in u + 1..n {
                        out.push(vec![-var(u, &mut cell), -var(w, &mut cell)]);
                    }
                }
            }
        }
    });
    out
}
