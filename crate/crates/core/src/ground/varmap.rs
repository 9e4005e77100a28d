use crate::lang::{InputError, SymbolId, SymbolKind, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Block {
    base: u32,
    arity: usize,
    size: u32,
}

/// Numbering of ground atoms as propositional variables.
///
/// Each relation (and each function, as its value relation) owns a
/// contiguous block of variables, assigned in symbol appearance order. Within
/// a block a tuple is read as a base-`n` number, most significant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableMap {
    n: u32,
    blocks: Vec<Option<Block>>,
    order: Vec<SymbolId>,
    total: u32,
}

impl VariableMap {
    /// Builds the map for every non-builtin, non-answer symbol.
    pub fn new(symbols: &SymbolTable, n: u32) -> Result<Self, InputError> {
        let mut blocks = vec![None; symbols.len()];
        let mut order = Vec::new();
        let mut next: u64 = 1;
        for (id, sym) in symbols.iter() {
            if sym.is_builtin() || sym.is_answer {
                continue;
            }
            let arity = match sym.kind {
                SymbolKind::Function => sym.arity + 1,
                SymbolKind::Relation => sym.arity,
            };
            let size = (n as u64).checked_pow(arity as u32).unwrap_or(u64::MAX);
            if next.saturating_add(size) > i32::MAX as u64 {
                return Err(InputError::new(format!(
                    "too many propositional variables at domain size {n}"
                )));
            }
            blocks[id.index()] = Some(Block {
                base: next as u32,
                arity,
                size: size as u32,
            });
            order.push(id);
            next += size;
        }
        Ok(VariableMap {
            n,
            blocks,
            order,
            total: (next - 1) as u32,
        })
    }

    pub fn domain_size(&self) -> u32 {
        self.n
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    /// Symbols with a block, in numbering order.
    pub fn symbols(&self) -> &[SymbolId] {
        &self.order
    }

    /// Number of tuple positions (functions include the value position).
    pub fn arity(&self, sym: SymbolId) -> Option<usize> {
        self.block(sym).map(|b| b.arity)
    }

    pub fn base(&self, sym: SymbolId) -> Option<u32> {
        self.block(sym).map(|b| b.base)
    }

    fn block(&self, sym: SymbolId) -> Option<&Block> {
        self.blocks.get(sym.index()).and_then(|b| b.as_ref())
    }

    /// Positive literal for `sym(tuple)`.
    ///
    /// Panics if the symbol has no block or the tuple is out of range.
    pub fn encode(&self, sym: SymbolId, tuple: &[u32]) -> i32 {
        let b = self.block(sym).expect("symbol has no propositional block");
        assert_eq!(tuple.len(), b.arity, "tuple length");
        let mut offset = 0u32;
        for &d in tuple {
            assert!(d < self.n, "element {d} outside the domain");
            offset = offset * self.n + d;
        }
        (b.base + offset) as i32
    }

    pub fn decode(&self, var: u32) -> Option<(SymbolId, Vec<u32>)> {
        if var == 0 || var > self.total {
            return None;
        }
        let idx = self
            .order
            .partition_point(|s| self.blocks[s.index()].unwrap().base <= var)
            - 1;
        let sym = self.order[idx];
        let b = self.blocks[sym.index()].unwrap();
        let mut offset = var - b.base;
        debug_assert!(offset < b.size);
        let mut tuple = vec![0; b.arity];
        for slot in tuple.iter_mut().rev() {
            *slot = offset % self.n;
            offset /= self.n;
        }
        Some((sym, tuple))
    }
}
