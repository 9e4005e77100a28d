use std::fmt;

use super::symbols::{SymbolId, SymbolTable};

/// Index of a variable within a single clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    /// A natural-number constant, read as a member of the domain.
    Element(u32),
    App(SymbolId, Vec<Term>),
}

impl Term {
    pub fn is_compound(&self) -> bool {
        matches!(self, Term::App(..))
    }

    pub fn visit_elements(&self, f: &mut impl FnMut(u32)) {
        match self {
            Term::Var(_) => {}
            Term::Element(e) => f(*e),
            Term::App(_, args) => args.iter().for_each(|a| a.visit_elements(f)),
        }
    }

    pub fn visit_symbols(&self, f: &mut impl FnMut(SymbolId, usize)) {
        if let Term::App(sym, args) = self {
            f(*sym, args.len());
            args.iter().for_each(|a| a.visit_symbols(f));
        }
    }
}

/// An atom: a relation symbol applied to terms. Equality is an ordinary
/// binary relation whose symbol carries the equality attribute.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub symbol: SymbolId,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub sign: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn new(sign: bool, symbol: SymbolId, args: Vec<Term>) -> Self {
        Literal {
            sign,
            atom: Atom { symbol, args },
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            sign: !self.sign,
            atom: self.atom.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SourceList {
    Usable,
    Sos,
    Demodulators,
    Passive,
}

impl SourceList {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "usable" | "axioms" => Some(SourceList::Usable),
            "sos" => Some(SourceList::Sos),
            "demodulators" => Some(SourceList::Demodulators),
            "passive" => Some(SourceList::Passive),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SourceList::Usable => "usable",
            SourceList::Sos => "sos",
            SourceList::Demodulators => "demodulators",
            SourceList::Passive => "passive",
        }
    }
}

/// A disjunction of literals. Variables are implicitly universally
/// quantified and numbered densely from zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub source: SourceList,
    pub var_names: Vec<String>,
}

impl Clause {
    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> ClauseDisplay<'a> {
        ClauseDisplay {
            clause: self,
            symbols,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Exists,
}

/// Quantified boolean combination of atoms, before clausification.
/// Variables are named; a name is bound by the nearest enclosing quantifier.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Atom(FAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

/// Atom of a formula with named variables.
#[derive(Clone, Debug, PartialEq)]
pub struct FAtom {
    pub symbol: SymbolId,
    pub args: Vec<FTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FTerm {
    Var(String),
    Element(u32),
    App(SymbolId, Vec<FTerm>),
}

/// Names with a built-in infix declaration; printed infix when binary.
pub(crate) fn is_infix_name(name: &str) -> bool {
    matches!(
        name,
        "=" | "!=" | "<" | ">" | "<=" | ">=" | "+" | "-" | "*" | "/" | "^"
    )
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    term: &Term,
    symbols: &SymbolTable,
    names: &[String],
    nested_infix: bool,
) -> fmt::Result {
    match term {
        Term::Var(v) => match names.get(v.0 as usize) {
            Some(name) => write!(f, "{name}"),
            None => write!(f, "v{}", v.0),
        },
        Term::Element(e) => write!(f, "{e}"),
        Term::App(sym, args) => {
            let name = symbols.name(*sym);
            if args.len() == 2 && is_infix_name(name) {
                if nested_infix {
                    write!(f, "(")?;
                }
                write_term(f, &args[0], symbols, names, true)?;
                write!(f, " {name} ")?;
                write_term(f, &args[1], symbols, names, true)?;
                if nested_infix {
                    write!(f, ")")?;
                }
                Ok(())
            } else if args.is_empty() {
                write!(f, "{name}")
            } else {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write_term(f, a, symbols, names, false)?;
                }
                write!(f, ")")
            }
        }
    }
}

pub struct ClauseDisplay<'a> {
    clause: &'a Clause,
    symbols: &'a SymbolTable,
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = &self.clause.var_names;
        for (i, lit) in self.clause.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            let sym = self.symbols.get(lit.atom.symbol);
            let args = &lit.atom.args;
            if args.len() == 2 && sym.name == "=" {
                write_term(f, &args[0], self.symbols, names, false)?;
                write!(f, " {} ", if lit.sign { "=" } else { "!=" })?;
                write_term(f, &args[1], self.symbols, names, false)?;
                continue;
            }
            if !lit.sign {
                write!(f, "-")?;
            }
            if args.len() == 2 && is_infix_name(&sym.name) {
                write!(f, "(")?;
                write_term(f, &args[0], self.symbols, names, false)?;
                write!(f, " {} ", sym.name)?;
                write_term(f, &args[1], self.symbols, names, false)?;
                write!(f, ")")?;
            } else {
                let t = Term::App(lit.atom.symbol, args.clone());
                write_term(f, &t, self.symbols, names, false)?;
            }
        }
        Ok(())
    }
}
