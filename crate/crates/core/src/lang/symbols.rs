use std::collections::HashMap;

use super::InputError;

pub const MAX_FUNCTION_ARITY: usize = 3;
pub const MAX_RELATION_ARITY: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Function,
    Relation,
}

impl SymbolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SymbolKind::Function => "function",
            SymbolKind::Relation => "relation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub arity: usize,
    pub is_equality: bool,
    pub is_order: bool,
    pub is_answer: bool,
    /// Ordinal of first occurrence in the input; equal to the id.
    pub appearance: u32,
}

impl Symbol {
    pub fn is_constant(&self) -> bool {
        self.kind == SymbolKind::Function && self.arity == 0
    }

    /// Equality and order relations are evaluated on domain elements
    /// instead of being encoded as propositional variables.
    pub fn is_builtin(&self) -> bool {
        self.is_equality || self.is_order
    }
}

/// Every symbol of a problem, indexed by first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub(crate) fn get_mut(&mut self, id: SymbolId) -> &mut Symbol {
        &mut self.symbols[id.index()]
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i as u32), s))
    }

    /// Function symbols of arity zero, in appearance order.
    pub fn constants(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.iter().filter(|(_, s)| s.is_constant())
    }

    /// Looks up `name`, registering it on first use. A name keeps one kind
    /// and one arity for the whole input.
    pub fn intern(
        &mut self,
        name: &str,
        kind: SymbolKind,
        arity: usize,
    ) -> Result<SymbolId, InputError> {
        if let Some(id) = self.lookup(name) {
            let sym = self.get(id);
            if sym.kind != kind {
                return Err(InputError::new(format!(
                    "symbol {name} is used both as a {} and as a {}",
                    sym.kind.as_str(),
                    kind.as_str()
                )));
            }
            if sym.arity != arity {
                return Err(InputError::new(format!(
                    "symbol {name} is used with arities {} and {arity}",
                    sym.arity
                )));
            }
            return Ok(id);
        }
        let limit = match kind {
            SymbolKind::Function => MAX_FUNCTION_ARITY,
            SymbolKind::Relation => MAX_RELATION_ARITY,
        };
        if arity > limit {
            return Err(InputError::new(format!(
                "{} symbol {name}/{arity} exceeds the maximum arity {limit}",
                kind.as_str()
            )));
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(Symbol {
            name: name.to_string(),
            kind,
            arity,
            is_equality: false,
            is_order: false,
            is_answer: kind == SymbolKind::Relation && is_answer_name(name),
            appearance: id.0,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }
}

pub(crate) fn is_answer_name(name: &str) -> bool {
    name.len() >= 4 && name.as_bytes()[..4].eq_ignore_ascii_case(b"$ans")
}
