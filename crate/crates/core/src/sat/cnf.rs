use std::fmt;

use thiserror::Error;

/// Clauses over variables `1..=num_vars`, stored contiguously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    lits: Vec<i32>,
    ends: Vec<usize>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Cnf {
            num_vars,
            ..Cnf::default()
        }
    }

    pub fn from_clauses<C: AsRef<[i32]>>(clauses: &[C]) -> Self {
        let mut cnf = Cnf::new(0);
        for c in clauses {
            cnf.push_clause(c.as_ref());
        }
        cnf
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn num_literals(&self) -> usize {
        self.lits.len()
    }

    /// Appends a clause, raising the variable count if needed.
    ///
    /// Panics on a zero literal.
    pub fn push_clause(&mut self, clause: &[i32]) {
        for &l in clause {
            assert!(l != 0, "literal 0 inside a clause");
            self.num_vars = self.num_vars.max(l.unsigned_abs());
        }
        self.lits.extend_from_slice(clause);
        self.ends.push(self.lits.len());
    }

    pub fn clause(&self, i: usize) -> &[i32] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.lits[start..self.ends[i]]
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[i32]> + '_ {
        (0..self.len()).map(|i| self.clause(i))
    }

    /// Whether a total assignment (indexed by variable, slot 0 unused)
    /// satisfies every clause.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses().all(|c| {
            c.iter()
                .any(|&l| model[l.unsigned_abs() as usize] == (l > 0))
        })
    }

    /// Approximate heap size, charged against the memory limit.
    pub fn heap_bytes(&self) -> u64 {
        (self.lits.capacity() * 4 + self.ends.capacity() * 8) as u64
    }
}

/// The integer-stream format: one clause per line, `0`-terminated.
impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.clauses() {
            for l in c {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("token {index}: {token:?} is not an integer")]
    NotAnInteger { index: usize, token: String },
    #[error("the last clause is not terminated by 0")]
    Unterminated,
}

/// Reads whitespace-separated integers; `0` ends a clause. No comments.
pub fn parse_integer_stream(text: &str) -> Result<Cnf, StreamError> {
    let mut cnf = Cnf::new(0);
    let mut clause = Vec::new();
    for (index, token) in text.split_whitespace().enumerate() {
        let lit: i32 = token
            .parse()
            .ok()
            .filter(|l: &i32| *l != i32::MIN)
            .ok_or_else(|| StreamError::NotAnInteger {
                index,
                token: token.to_string(),
            })?;
        if lit == 0 {
            cnf.push_clause(&clause);
            clause.clear();
        } else {
            clause.push(lit);
        }
    }
    if !clause.is_empty() {
        return Err(StreamError::Unterminated);
    }
    Ok(cnf)
}
