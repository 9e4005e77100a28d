use crate::lang::{Pos, SymbolId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignValue {
    Element(u32),
    Bool(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Equality,
    Order,
    Bijection,
    Quasigroup,
}

/// An entry of the `mace_constraints` list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Assign {
        symbol: SymbolId,
        args: Vec<u32>,
        value: AssignValue,
        pos: Pos,
    },
    Property {
        symbol: SymbolId,
        property: Property,
        pos: Pos,
    },
}

impl Constraint {
    pub fn pos(&self) -> Pos {
        match self {
            Constraint::Assign { pos, .. } | Constraint::Property { pos, .. } => *pos,
        }
    }

    /// Domain elements mentioned by the constraint.
    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        let (args, value): (&[u32], Option<u32>) = match self {
            Constraint::Assign {
                args,
                value: AssignValue::Element(v),
                ..
            } => (args, Some(*v)),
            Constraint::Assign { args, .. } => (args, None),
            Constraint::Property { .. } => (&[], None),
        };
        args.iter().copied().chain(value)
    }
}
