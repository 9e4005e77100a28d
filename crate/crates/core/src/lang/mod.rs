//! The Otter-like input language: lexing, parsing, symbol classification,
//! clausification of formulas, and answer-literal removal.

mod clausify;
mod input;
mod lexer;
mod parser;
mod symbols;
mod syntax;

use std::fmt;

use thiserror::Error;

pub use clausify::{clausify, SkolemNames};
pub use input::{parse_input, InputProblem, Settings};
pub use symbols::{
    Symbol, SymbolId, SymbolKind, SymbolTable, MAX_FUNCTION_ARITY, MAX_RELATION_ARITY,
};
pub use syntax::{
    Atom, Clause, ClauseDisplay, FAtom, FTerm, Formula, Literal, Quantifier, SourceList, Term,
    VarId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct InputError {
    pub message: String,
    pub pos: Option<Pos>,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError {
            message: message.into(),
            pos: None,
        }
    }

    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        InputError {
            message: message.into(),
            pos: Some(pos),
        }
    }

    pub(crate) fn or_at(mut self, pos: Pos) -> Self {
        self.pos.get_or_insert(pos);
        self
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(pos) => write!(f, "{pos}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenClass {
    Variable,
    Constant,
}

/// Decides whether an argument-free name in a clause is a variable.
pub fn classify_variables(token: &str, settings: &Settings) -> TokenClass {
    let first = token.chars().next();
    let is_var = if settings.prolog_style_variables {
        first.is_some_and(|c| c.is_ascii_uppercase())
    } else {
        first.is_some_and(|c| ('u'..='z').contains(&c))
    };
    if is_var {
        TokenClass::Variable
    } else {
        TokenClass::Constant
    }
}

/// Whether a binary relation name denotes equality.
pub fn classify_equality(name: &str, settings: &Settings) -> bool {
    if settings.tptp_eq {
        return name == "equal";
    }
    if name == "=" {
        return true;
    }
    let b = name.as_bytes();
    b.len() >= 2 && b[0].eq_ignore_ascii_case(&b'e') && b[1].eq_ignore_ascii_case(&b'q')
}

/// Removes answer literals. A clause consisting only of answer literals
/// would become empty, which is rejected.
pub fn strip_answer_literals(clause: &Clause, symbols: &SymbolTable) -> Result<Clause, InputError> {
    if !clause
        .literals
        .iter()
        .any(|l| symbols.get(l.atom.symbol).is_answer)
    {
        return Ok(clause.clone());
    }
    let literals: Vec<Literal> = clause
        .literals
        .iter()
        .filter(|l| !symbols.get(l.atom.symbol).is_answer)
        .cloned()
        .collect();
    if literals.is_empty() {
        return Err(InputError::new(format!(
            "clause {} is empty after removing answer literals",
            clause.display(symbols)
        )));
    }
    Ok(renumber_vars(Clause {
        literals,
        source: clause.source,
        var_names: clause.var_names.clone(),
    }))
}

/// Renumbers variables densely in first-occurrence order.
pub(crate) fn renumber_vars(clause: Clause) -> Clause {
    fn walk(t: &Term, map: &mut Vec<Option<u32>>, next: &mut u32) -> Term {
        match t {
            Term::Var(v) => {
                let slot = &mut map[v.0 as usize];
                let id = *slot.get_or_insert_with(|| {
                    *next += 1;
                    *next - 1
                });
                Term::Var(VarId(id))
            }
            Term::Element(e) => Term::Element(*e),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| walk(a, map, next)).collect()),
        }
    }
    let mut map = vec![None; clause.var_names.len()];
    let mut next = 0;
    let literals: Vec<Literal> = clause
        .literals
        .iter()
        .map(|l| Literal {
            sign: l.sign,
            atom: Atom {
                symbol: l.atom.symbol,
                args: l
                    .atom
                    .args
                    .iter()
                    .map(|a| walk(a, &mut map, &mut next))
                    .collect(),
            },
        })
        .collect();
    let mut var_names = vec![String::new(); next as usize];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = new {
            var_names[*new as usize] = clause.var_names[old].clone();
        }
    }
    Clause {
        literals,
        source: clause.source,
        var_names,
    }
}

/// Checks a parsed problem against a domain size: every natural-number
/// constant must name a domain element.
pub fn validate(problem: &InputProblem, domain_size: u32) -> Result<(), InputError> {
    let too_big = |e: u32, what: &dyn fmt::Display| {
        InputError::new(format!(
            "domain element {e} in {what} is not below the domain size {domain_size}"
        ))
    };
    for clause in &problem.theory {
        let mut bad = None;
        for lit in &clause.literals {
            for arg in &lit.atom.args {
                arg.visit_elements(&mut |e| {
                    if e >= domain_size {
                        bad.get_or_insert(e);
                    }
                });
            }
        }
        if let Some(e) = bad {
            return Err(too_big(
                e,
                &format_args!("clause {}", clause.display(&problem.symbols)),
            ));
        }
    }
    for (id, sym) in problem.symbols.iter() {
        let limit = match sym.kind {
            SymbolKind::Function => MAX_FUNCTION_ARITY,
            SymbolKind::Relation => MAX_RELATION_ARITY,
        };
        if sym.arity > limit {
            return Err(InputError::new(format!(
                "symbol {}/{} exceeds the arity limit",
                problem.symbols.name(id),
                sym.arity
            )));
        }
    }
    for c in &problem.constraints {
        if let Some(e) = c.elements().find(|&e| e >= domain_size) {
            return Err(too_big(e, &"mace_constraints").or_at(c.pos()));
        }
    }
    Ok(())
}
