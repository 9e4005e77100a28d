use std::collections::HashMap;

use super::clausify::{clausify, SkolemNames};
use super::lexer::tokenize;
use super::parser::{Parser, Raw};
use super::symbols::{SymbolKind, SymbolTable};
use super::syntax::{Clause, FAtom, FTerm, Formula, Literal, Quantifier, SourceList, Term, VarId};
use super::{
    classify_equality, classify_variables, strip_answer_literals, InputError, Pos, TokenClass,
};
use crate::ground::{AssignValue, Constraint, Property};

/// Flags set or cleared in the input that influence reading.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub prolog_style_variables: bool,
    pub tptp_eq: bool,
    pub auto: bool,
    /// Other `set(...)` flags; recorded, otherwise ignored.
    pub other_flags: Vec<String>,
    /// `assign(name, value)` commands; recorded, otherwise ignored.
    pub parameters: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct InputProblem {
    pub theory: Vec<Clause>,
    pub constraints: Vec<Constraint>,
    pub settings: Settings,
    pub symbols: SymbolTable,
    pub warnings: Vec<String>,
}

enum ListRole {
    Theory(SourceList),
    Constraints,
    Hot,
    Ignored,
}

fn list_role(name: &str) -> ListRole {
    match name {
        "mace_constraints" => ListRole::Constraints,
        "hot" => ListRole::Hot,
        other => match SourceList::from_name(other) {
            Some(src) => ListRole::Theory(src),
            None => ListRole::Ignored,
        },
    }
}

struct Builder {
    symbols: SymbolTable,
    settings: Settings,
    theory: Vec<Clause>,
    raw_constraints: Vec<Raw>,
    warnings: Vec<String>,
    skolem: SkolemNames,
}

/// Reads a complete input file.
pub fn parse_input(text: &str) -> Result<InputProblem, InputError> {
    let mut parser = Parser::new(tokenize(text)?);
    let mut b = Builder {
        symbols: SymbolTable::new(),
        settings: Settings::default(),
        theory: Vec::new(),
        raw_constraints: Vec::new(),
        warnings: Vec::new(),
        skolem: SkolemNames::default(),
    };
    while !parser.at_end() {
        let command = parser.sentence()?;
        b.command(&mut parser, command)?;
    }
    b.finish()
}

fn single_name<'a>(args: &'a [Raw], what: &str, pos: Pos) -> Result<&'a str, InputError> {
    match args {
        [arg] => arg
            .as_name()
            .ok_or_else(|| InputError::at(arg.pos(), format!("expected a {what} name"))),
        _ => Err(InputError::at(pos, format!("expected one {what} name"))),
    }
}

fn raw_text(raw: &Raw) -> String {
    match raw {
        Raw::Num(n, _) => n.to_string(),
        Raw::App { name, args, .. } if args.is_empty() => name.clone(),
        Raw::App { name, args, .. } => format!(
            "{name}({})",
            args.iter().map(raw_text).collect::<Vec<_>>().join(",")
        ),
        Raw::Quant { .. } => "<formula>".into(),
    }
}

impl Builder {
    fn command(&mut self, parser: &mut Parser, command: Raw) -> Result<(), InputError> {
        let pos = command.pos();
        let Raw::App { name, args, .. } = &command else {
            return Err(InputError::at(pos, "expected a command"));
        };
        match name.as_str() {
            "list" | "formula_list" | "weight_list" => {
                let list = single_name(args, "list", pos)?;
                let role = if name == "weight_list" {
                    ListRole::Ignored
                } else {
                    list_role(list)
                };
                if let ListRole::Ignored = role {
                    self.warnings
                        .push(format!("{pos}: ignoring {name}({list})"));
                }
                self.read_list(parser, role, name == "formula_list")
            }
            "set" | "clear" => {
                let flag = single_name(args, "flag", pos)?;
                let on = name == "set";
                match flag {
                    "prolog_style_variables" => self.settings.prolog_style_variables = on,
                    "tptp_eq" => self.settings.tptp_eq = on,
                    "auto" => self.settings.auto = on,
                    other => {
                        if on {
                            self.settings.other_flags.push(other.to_string());
                        }
                        self.warnings
                            .push(format!("{pos}: flag {other} has no effect here"));
                    }
                }
                Ok(())
            }
            "assign" => {
                let [param, value] = args.as_slice() else {
                    return Err(InputError::at(pos, "assign takes two arguments"));
                };
                let param = param
                    .as_name()
                    .ok_or_else(|| InputError::at(param.pos(), "expected a parameter name"))?;
                self.settings
                    .parameters
                    .push((param.to_string(), raw_text(value)));
                self.warnings
                    .push(format!("{pos}: parameter {param} has no effect here"));
                Ok(())
            }
            other => {
                self.warnings
                    .push(format!("{pos}: ignoring command {other}"));
                Ok(())
            }
        }
    }

    fn read_list(
        &mut self,
        parser: &mut Parser,
        role: ListRole,
        formulas: bool,
    ) -> Result<(), InputError> {
        loop {
            if parser.at_end() {
                return Err(InputError::at(parser.pos(), "missing end_of_list"));
            }
            let entry = parser.sentence()?;
            if entry.as_name() == Some("end_of_list") {
                return Ok(());
            }
            match role {
                ListRole::Theory(src) => {
                    if formulas {
                        self.formula_entry(&entry, src)?;
                    } else {
                        let clause = self.clause(&entry, src)?;
                        self.theory.push(clause);
                    }
                }
                ListRole::Constraints => self.raw_constraints.push(entry),
                ListRole::Hot => {
                    // Read against scratch state so the hot list leaves no trace.
                    let saved = (self.symbols.clone(), self.skolem.clone(), self.theory.len());
                    let result = if formulas {
                        self.formula_entry(&entry, SourceList::Usable)
                    } else {
                        self.clause(&entry, SourceList::Usable).map(|_| ())
                    };
                    self.symbols = saved.0;
                    self.skolem = saved.1;
                    self.theory.truncate(saved.2);
                    result?;
                }
                ListRole::Ignored => {}
            }
        }
    }

    fn formula_entry(&mut self, raw: &Raw, src: SourceList) -> Result<(), InputError> {
        let mut free = Vec::new();
        let formula = self.formula(raw, &mut Vec::new(), &mut free)?;
        let closed = free.into_iter().rev().fold(formula, |f, v| {
            Formula::Quant(Quantifier::All, v, Box::new(f))
        });
        let clauses = clausify(
            &closed,
            src,
            &mut self.symbols,
            &mut self.skolem,
            &self.settings,
        )
        .map_err(|e| e.or_at(raw.pos()))?;
        self.theory.extend(clauses);
        Ok(())
    }

    fn formula(
        &mut self,
        raw: &Raw,
        bound: &mut Vec<String>,
        free: &mut Vec<String>,
    ) -> Result<Formula, InputError> {
        match raw {
            Raw::Quant {
                exists, vars, body, ..
            } => {
                let depth = bound.len();
                bound.extend(vars.iter().cloned());
                let inner = self.formula(body, bound, free)?;
                bound.truncate(depth);
                let q = if *exists {
                    Quantifier::Exists
                } else {
                    Quantifier::All
                };
                Ok(vars
                    .iter()
                    .rev()
                    .fold(inner, |f, v| Formula::Quant(q, v.clone(), Box::new(f))))
            }
            Raw::App { name, args, pos } => {
                let bin = |s: &mut Self, b: &mut Vec<String>, fr: &mut Vec<String>| {
                    Ok::<_, InputError>((
                        Box::new(s.formula(&args[0], b, fr)?),
                        Box::new(s.formula(&args[1], b, fr)?),
                    ))
                };
                match (name.as_str(), args.len()) {
                    ("-", 1) => Ok(Formula::Not(Box::new(self.formula(&args[0], bound, free)?))),
                    ("&", 2) => bin(self, bound, free).map(|(a, b)| Formula::And(a, b)),
                    ("|", 2) => bin(self, bound, free).map(|(a, b)| Formula::Or(a, b)),
                    ("->", 2) => bin(self, bound, free).map(|(a, b)| Formula::Imp(a, b)),
                    ("<->", 2) => bin(self, bound, free).map(|(a, b)| Formula::Iff(a, b)),
                    ("!=", 2) => {
                        let atom = self.formula_atom("=", args, *pos, bound, free)?;
                        Ok(Formula::Not(Box::new(Formula::Atom(atom))))
                    }
                    _ => Ok(Formula::Atom(
                        self.formula_atom(name, args, *pos, bound, free)?,
                    )),
                }
            }
            Raw::Num(_, pos) => Err(InputError::at(
                *pos,
                "a domain element cannot be used as a formula",
            )),
        }
    }

    fn formula_atom(
        &mut self,
        name: &str,
        args: &[Raw],
        pos: Pos,
        bound: &[String],
        free: &mut Vec<String>,
    ) -> Result<FAtom, InputError> {
        let symbol = self
            .symbols
            .intern(name, SymbolKind::Relation, args.len())
            .map_err(|e| e.or_at(pos))?;
        let args = args
            .iter()
            .map(|a| self.formula_term(a, bound, free))
            .collect::<Result<_, _>>()?;
        Ok(FAtom { symbol, args })
    }

    fn formula_term(
        &mut self,
        raw: &Raw,
        bound: &[String],
        free: &mut Vec<String>,
    ) -> Result<FTerm, InputError> {
        match raw {
            Raw::Num(n, _) => Ok(FTerm::Element(*n)),
            Raw::App { name, args, pos } => {
                if args.is_empty() {
                    if bound.iter().any(|b| b == name) {
                        return Ok(FTerm::Var(name.clone()));
                    }
                    if classify_variables(name, &self.settings) == TokenClass::Variable {
                        if !free.contains(name) {
                            free.push(name.clone());
                        }
                        return Ok(FTerm::Var(name.clone()));
                    }
                }
                let symbol = self
                    .symbols
                    .intern(name, SymbolKind::Function, args.len())
                    .map_err(|e| e.or_at(*pos))?;
                let args = args
                    .iter()
                    .map(|a| self.formula_term(a, bound, free))
                    .collect::<Result<_, _>>()?;
                Ok(FTerm::App(symbol, args))
            }
            Raw::Quant { pos, .. } => Err(InputError::at(*pos, "quantifier inside a term")),
        }
    }

    fn clause(&mut self, raw: &Raw, source: SourceList) -> Result<Clause, InputError> {
        let mut body = raw;
        if let Some([clause, _attributes]) = raw.app("#") {
            body = clause;
        }
        let mut disjuncts = Vec::new();
        let mut stack = vec![body];
        while let Some(r) = stack.pop() {
            match r.app("|") {
                Some([a, b]) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => disjuncts.push(r),
            }
        }
        let mut vars: HashMap<String, VarId> = HashMap::new();
        let mut var_names = Vec::new();
        let mut literals = Vec::new();
        for d in disjuncts {
            literals.push(self.literal(d, &mut vars, &mut var_names)?);
        }
        Ok(Clause {
            literals,
            source,
            var_names,
        })
    }

    fn literal(
        &mut self,
        raw: &Raw,
        vars: &mut HashMap<String, VarId>,
        names: &mut Vec<String>,
    ) -> Result<Literal, InputError> {
        let mut sign = true;
        let mut atom = raw;
        while let Some([inner]) = atom.app("-") {
            sign = !sign;
            atom = inner;
        }
        match atom {
            Raw::App { name, args, pos } => {
                let (name, sign) = if name == "!=" && args.len() == 2 {
                    ("=", !sign)
                } else {
                    (name.as_str(), sign)
                };
                if matches!(name, "&" | "->" | "<->" | "|") {
                    return Err(InputError::at(
                        *pos,
                        format!("connective {name} is not allowed in a clause"),
                    ));
                }
                let symbol = self
                    .symbols
                    .intern(name, SymbolKind::Relation, args.len())
                    .map_err(|e| e.or_at(*pos))?;
                let args = args
                    .iter()
                    .map(|a| self.term(a, vars, names))
                    .collect::<Result<_, _>>()?;
                Ok(Literal::new(sign, symbol, args))
            }
            Raw::Num(_, pos) => Err(InputError::at(
                *pos,
                "a domain element cannot be used as an atom",
            )),
            Raw::Quant { pos, .. } => Err(InputError::at(
                *pos,
                "quantifiers belong in formula_list, not in a clause",
            )),
        }
    }

    fn term(
        &mut self,
        raw: &Raw,
        vars: &mut HashMap<String, VarId>,
        names: &mut Vec<String>,
    ) -> Result<Term, InputError> {
        match raw {
            Raw::Num(n, _) => Ok(Term::Element(*n)),
            Raw::App { name, args, pos } => {
                if args.is_empty()
                    && classify_variables(name, &self.settings) == TokenClass::Variable
                {
                    let next = VarId(names.len() as u32);
                    let id = *vars.entry(name.clone()).or_insert_with(|| {
                        names.push(name.clone());
                        next
                    });
                    return Ok(Term::Var(id));
                }
                let symbol = self
                    .symbols
                    .intern(name, SymbolKind::Function, args.len())
                    .map_err(|e| e.or_at(*pos))?;
                let args = args
                    .iter()
                    .map(|a| self.term(a, vars, names))
                    .collect::<Result<_, _>>()?;
                Ok(Term::App(symbol, args))
            }
            Raw::Quant { pos, .. } => Err(InputError::at(*pos, "quantifier inside a term")),
        }
    }

    fn finish(mut self) -> Result<InputProblem, InputError> {
        let raw = std::mem::take(&mut self.raw_constraints);
        // Properties first: they may introduce symbols and mark builtins.
        let mut constraints = Vec::new();
        for r in raw.iter().filter(|r| r.app("property").is_some()) {
            constraints.push((r.pos(), self.property(r)?));
        }
        for (id, sym) in self.symbols.clone().iter() {
            if sym.kind != SymbolKind::Relation || sym.arity != 2 {
                continue;
            }
            let s = self.symbols.get_mut(id);
            if classify_equality(&sym.name, &self.settings) {
                s.is_equality = true;
            }
            if sym.name == "<" {
                s.is_order = true;
            }
            if s.is_equality && s.is_order {
                return Err(InputError::new(format!(
                    "{} cannot be both an equality and an order relation",
                    sym.name
                )));
            }
        }
        for r in raw.iter().filter(|r| r.app("property").is_none()) {
            constraints.push((r.pos(), self.assignment(r)?));
        }
        constraints.sort_by_key(|(pos, _)| *pos);

        let theory = self
            .theory
            .iter()
            .map(|c| strip_answer_literals(c, &self.symbols))
            .collect::<Result<_, _>>()?;
        Ok(InputProblem {
            theory,
            constraints: constraints.into_iter().map(|(_, c)| c).collect(),
            settings: self.settings,
            symbols: self.symbols,
            warnings: self.warnings,
        })
    }

    fn property(&mut self, raw: &Raw) -> Result<Constraint, InputError> {
        let pos = raw.pos();
        let Some([pattern, prop]) = raw.app("property") else {
            return Err(InputError::at(pos, "property takes two arguments"));
        };
        let prop_name = prop
            .as_name()
            .ok_or_else(|| InputError::at(prop.pos(), "expected a property name"))?;
        let (property, kind, arity) = match prop_name {
            "equality" => (Property::Equality, SymbolKind::Relation, 2),
            "order" => (Property::Order, SymbolKind::Relation, 2),
            "bijection" => (Property::Bijection, SymbolKind::Function, 1),
            "quasigroup" => (Property::Quasigroup, SymbolKind::Function, 2),
            other => {
                return Err(InputError::at(
                    prop.pos(),
                    format!("unknown property {other}"),
                ))
            }
        };
        let Raw::App { name, args, .. } = pattern else {
            return Err(InputError::at(pattern.pos(), "expected a symbol pattern"));
        };
        if args.len() != arity {
            return Err(InputError::at(
                pattern.pos(),
                format!(
                    "property {prop_name} needs a {} of arity {arity}, got {name}/{}",
                    kind.as_str(),
                    args.len()
                ),
            ));
        }
        let symbol = self
            .symbols
            .intern(name, kind, arity)
            .map_err(|e| e.or_at(pattern.pos()))?;
        match property {
            Property::Equality => self.symbols.get_mut(symbol).is_equality = true,
            Property::Order => self.symbols.get_mut(symbol).is_order = true,
            _ => {}
        }
        Ok(Constraint::Property {
            symbol,
            property,
            pos,
        })
    }

    fn assignment(&mut self, raw: &Raw) -> Result<Constraint, InputError> {
        let pos = raw.pos();
        let Some([cell, value]) = raw.app("assign") else {
            return Err(InputError::at(
                pos,
                "mace_constraints accepts only assign(...) and property(...)",
            ));
        };
        let value = match value {
            Raw::Num(n, _) => AssignValue::Element(*n),
            other => match other.as_name() {
                Some("T") => AssignValue::Bool(true),
                Some("F") => AssignValue::Bool(false),
                _ => {
                    return Err(InputError::at(
                        other.pos(),
                        "assigned value must be a domain element, T, or F",
                    ))
                }
            },
        };
        let Raw::App { name, args, .. } = cell else {
            return Err(InputError::at(
                cell.pos(),
                "expected a function or relation cell",
            ));
        };
        let elements = args
            .iter()
            .map(|a| match a {
                Raw::Num(n, _) => Ok(*n),
                other => Err(InputError::at(
                    other.pos(),
                    "cell arguments must be domain elements",
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let symbol = self.symbols.lookup(name).ok_or_else(|| {
            InputError::at(cell.pos(), format!("assignment to unknown symbol {name}"))
        })?;
        let sym = self.symbols.get(symbol);
        let want = match value {
            AssignValue::Element(_) => SymbolKind::Function,
            AssignValue::Bool(_) => SymbolKind::Relation,
        };
        if sym.kind != want || sym.arity != elements.len() {
            return Err(InputError::at(
                cell.pos(),
                format!(
                    "assignment to {name}/{} does not match the {} {name}/{}",
                    elements.len(),
                    sym.kind.as_str(),
                    sym.arity
                ),
            ));
        }
        if sym.is_builtin() {
            return Err(InputError::at(
                cell.pos(),
                format!("{name} is a built-in relation and cannot be assigned"),
            ));
        }
        Ok(Constraint::Assign {
            symbol,
            args: elements,
            value,
            pos,
        })
    }
}
