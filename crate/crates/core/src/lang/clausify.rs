//! Formula to clause conversion: negation normal form, Skolemization, and
//! distribution of disjunction over conjunction.

use std::collections::HashSet;

use super::symbols::{SymbolKind, SymbolTable, MAX_FUNCTION_ARITY};
use super::syntax::{
    Atom, Clause, FAtom, FTerm, Formula, Literal, Quantifier, SourceList, Term, VarId,
};
use super::{classify_variables, renumber_vars, InputError, Settings, TokenClass};

/// Counters for fresh Skolem symbols (`$c1, $c2, ...` for constants and
/// `$f1, $f2, ...` for functions).
#[derive(Clone, Debug, Default)]
pub struct SkolemNames {
    constants: u32,
    functions: u32,
}

impl SkolemNames {
    fn fresh(&mut self, arity: usize, symbols: &SymbolTable) -> String {
        loop {
            let name = if arity == 0 {
                self.constants += 1;
                format!("$c{}", self.constants)
            } else {
                self.functions += 1;
                format!("$f{}", self.functions)
            };
            if symbols.lookup(&name).is_none() {
                return name;
            }
        }
    }
}

enum Nnf {
    Lit(bool, FAtom),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Quant(Quantifier, String, Box<Nnf>),
}

fn nnf(f: &Formula, positive: bool) -> Nnf {
    use Formula as F;
    let both =
        |a: &Formula, pa: bool, b: &Formula, pb: bool| (Box::new(nnf(a, pa)), Box::new(nnf(b, pb)));
    match f {
        F::Atom(a) => Nnf::Lit(positive, a.clone()),
        F::Not(g) => nnf(g, !positive),
        F::And(a, b) => {
            let (x, y) = both(a, positive, b, positive);
            if positive {
                Nnf::And(x, y)
            } else {
                Nnf::Or(x, y)
            }
        }
        F::Or(a, b) => {
            let (x, y) = both(a, positive, b, positive);
            if positive {
                Nnf::Or(x, y)
            } else {
                Nnf::And(x, y)
            }
        }
        F::Imp(a, b) => {
            let (x, y) = both(a, !positive, b, positive);
            if positive {
                Nnf::Or(x, y)
            } else {
                Nnf::And(x, y)
            }
        }
        F::Iff(a, b) => {
            if positive {
                let (a1, b1) = both(a, false, b, true);
                let (a2, b2) = both(a, true, b, false);
                Nnf::And(Box::new(Nnf::Or(a1, b1)), Box::new(Nnf::Or(a2, b2)))
            } else {
                let (a1, b1) = both(a, true, b, false);
                let (a2, b2) = both(a, false, b, true);
                Nnf::Or(Box::new(Nnf::And(a1, b1)), Box::new(Nnf::And(a2, b2)))
            }
        }
        F::Quant(q, v, g) => {
            let q = match (q, positive) {
                (Quantifier::All, true) | (Quantifier::Exists, false) => Quantifier::All,
                _ => Quantifier::Exists,
            };
            Nnf::Quant(q, v.clone(), Box::new(nnf(g, positive)))
        }
    }
}

/// Quantifier-free matrix after Skolemization.
enum Matrix {
    Lit(Literal),
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
}

enum Binding {
    Var(u32),
    Skolem(Term),
}

struct Skolemizer<'a> {
    symbols: &'a mut SymbolTable,
    names: &'a mut SkolemNames,
    env: Vec<(String, Binding)>,
    universals: Vec<u32>,
    var_names: Vec<String>,
}

impl Skolemizer<'_> {
    fn run(&mut self, f: Nnf) -> Result<Matrix, InputError> {
        match f {
            Nnf::Lit(sign, atom) => {
                let args = atom
                    .args
                    .iter()
                    .map(|t| self.term(t))
                    .collect::<Result<_, _>>()?;
                Ok(Matrix::Lit(Literal {
                    sign,
                    atom: Atom {
                        symbol: atom.symbol,
                        args,
                    },
                }))
            }
            Nnf::And(a, b) => Ok(Matrix::And(
                Box::new(self.run(*a)?),
                Box::new(self.run(*b)?),
            )),
            Nnf::Or(a, b) => Ok(Matrix::Or(Box::new(self.run(*a)?), Box::new(self.run(*b)?))),
            Nnf::Quant(Quantifier::All, name, body) => {
                let id = self.var_names.len() as u32;
                self.var_names.push(name.clone());
                self.env.push((name, Binding::Var(id)));
                self.universals.push(id);
                let m = self.run(*body);
                self.universals.pop();
                self.env.pop();
                m
            }
            Nnf::Quant(Quantifier::Exists, name, body) => {
                let arity = self.universals.len();
                if arity > MAX_FUNCTION_ARITY {
                    return Err(InputError::new(format!(
                        "Skolem function for {name} would need arity {arity}, above the limit {MAX_FUNCTION_ARITY}"
                    )));
                }
                let sk_name = self.names.fresh(arity, self.symbols);
                let sym = self.symbols.intern(&sk_name, SymbolKind::Function, arity)?;
                let term = Term::App(
                    sym,
                    self.universals
                        .iter()
                        .map(|&v| Term::Var(VarId(v)))
                        .collect(),
                );
                self.env.push((name, Binding::Skolem(term)));
                let m = self.run(*body);
                self.env.pop();
                m
            }
        }
    }

    fn term(&self, t: &FTerm) -> Result<Term, InputError> {
        Ok(match t {
            FTerm::Element(e) => Term::Element(*e),
            FTerm::App(s, args) => Term::App(
                *s,
                args.iter()
                    .map(|a| self.term(a))
                    .collect::<Result<_, _>>()?,
            ),
            FTerm::Var(name) => match self.env.iter().rev().find(|(n, _)| n == name) {
                Some((_, Binding::Var(id))) => Term::Var(VarId(*id)),
                Some((_, Binding::Skolem(t))) => t.clone(),
                None => {
                    return Err(InputError::new(format!(
                        "variable {name} is not bound by a quantifier"
                    )))
                }
            },
        })
    }
}

fn distribute(m: Matrix) -> Vec<Vec<Literal>> {
    match m {
        Matrix::Lit(l) => vec![vec![l]],
        Matrix::And(a, b) => {
            let mut out = distribute(*a);
            out.extend(distribute(*b));
            out
        }
        Matrix::Or(a, b) => {
            let left = distribute(*a);
            let right = distribute(*b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut c = l.clone();
                    c.extend(r.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
    }
}

/// Converts a closed formula to an equisatisfiable set of clauses.
pub fn clausify(
    formula: &Formula,
    source: SourceList,
    symbols: &mut SymbolTable,
    names: &mut SkolemNames,
    settings: &Settings,
) -> Result<Vec<Clause>, InputError> {
    let mut sk = Skolemizer {
        symbols,
        names,
        env: Vec::new(),
        universals: Vec::new(),
        var_names: Vec::new(),
    };
    let matrix = sk.run(nnf(formula, true))?;
    let global_names = sk.var_names;

    let mut clauses = Vec::new();
    for lits in distribute(matrix) {
        let mut literals: Vec<Literal> = Vec::with_capacity(lits.len());
        for l in lits {
            if !literals.contains(&l) {
                literals.push(l);
            }
        }
        if literals.iter().any(|l| literals.contains(&l.negated())) {
            continue;
        }
        let clause = renumber_vars(Clause {
            literals,
            source,
            var_names: global_names.clone(),
        });
        clauses.push(with_readable_names(clause, settings));
    }
    Ok(clauses)
}

/// Gives every variable a name that reads back as a variable and is unique
/// within the clause.
fn with_readable_names(mut clause: Clause, settings: &Settings) -> Clause {
    let mut used = HashSet::new();
    let fallback = if settings.prolog_style_variables {
        "V"
    } else {
        "v"
    };
    for name in clause.var_names.iter_mut() {
        let ok = classify_variables(name, settings) == TokenClass::Variable;
        let base = if ok {
            name.clone()
        } else {
            fallback.to_string()
        };
        let mut candidate = if ok { base.clone() } else { format!("{base}0") };
        let mut k = 1;
        while used.contains(&candidate) {
            candidate = format!("{base}{k}");
            k += 1;
        }
        used.insert(candidate.clone());
        *name = candidate;
    }
    clause
}
