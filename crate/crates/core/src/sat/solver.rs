//! Counter-based DPLL with model enumeration.
//!
//! Each clause keeps the number of literals that are not false, the number
//! that are true, and the number of unassigned negative literals. A clause
//! whose remaining literals are all positive is "positive"; the split
//! variable is the first unassigned literal of the first shortest positive
//! clause, tried true first.

use std::collections::BTreeSet;

use super::Cnf;
use crate::limits::{Budget, Stop, DEFAULT_MAX_KBYTES};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SatLimits {
    pub max_models: u64,
    pub max_seconds: Option<f64>,
    pub max_kbytes: Option<u64>,
    /// Skip clauses already satisfied when resolving away false literals.
    pub unit_subsumption: bool,
}

impl Default for SatLimits {
    fn default() -> Self {
        SatLimits {
            max_models: 1,
            max_seconds: None,
            max_kbytes: Some(DEFAULT_MAX_KBYTES),
            unit_subsumption: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatOutcome {
    Unsatisfiable,
    /// `exhausted` is true when the whole search space was covered.
    ModelsFound {
        count: u64,
        exhausted: bool,
    },
    Stopped {
        reason: Stop,
        models: u64,
    },
}

impl SatOutcome {
    pub fn models(&self) -> u64 {
        match *self {
            SatOutcome::Unsatisfiable => 0,
            SatOutcome::ModelsFound { count, .. } => count,
            SatOutcome::Stopped { models, .. } => models,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub splits: u64,
    pub propagations: u64,
    pub first_split: Option<i32>,
}

/// Options for [`Solver`] when the budget is managed by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_models: u64,
    pub unit_subsumption: bool,
}

#[inline]
fn lit_index(l: i32) -> usize {
    ((l.unsigned_abs() as usize) << 1) | (l < 0) as usize
}

struct Decision {
    trail_len: usize,
    lit: i32,
    flipped: bool,
}

pub struct Solver<'b> {
    num_vars: usize,
    lits: Vec<i32>,
    starts: Vec<usize>,
    occ_start: Vec<usize>,
    occ: Vec<u32>,
    occurs: Vec<bool>,
    nonfalse: Vec<u32>,
    true_count: Vec<u32>,
    neg_open: Vec<u32>,
    bucket: Vec<u32>,
    buckets: Vec<BTreeSet<u32>>,
    unsat_count: usize,
    value: Vec<i8>,
    trail: Vec<i32>,
    qhead: usize,
    decisions: Vec<Decision>,
    trivially_unsat: bool,
    options: SearchOptions,
    budget: &'b Budget,
    charged: u64,
    stats: SolverStats,
}

impl<'b> Solver<'b> {
    /// Loads the clauses, dropping tautologies and duplicate literals. The
    /// solver's memory is charged to `budget` and released on drop.
    pub fn new(cnf: &Cnf, options: SearchOptions, budget: &'b Budget) -> Result<Self, Stop> {
        let num_vars = cnf.num_vars() as usize;
        let mut lits = Vec::with_capacity(cnf.num_literals());
        let mut starts = vec![0];
        let mut trivially_unsat = false;
        let mut buf: Vec<i32> = Vec::new();
        // a variable seen only in tautologies is still free in every model
        let mut occurs = vec![false; num_vars + 1];
        for c in cnf.clauses() {
            buf.clear();
            for &l in c {
                occurs[l.unsigned_abs() as usize] = true;
            }
            let mut tautology = false;
            for &l in c {
                if buf.contains(&-l) {
                    tautology = true;
                    break;
                }
                if !buf.contains(&l) {
                    buf.push(l);
                }
            }
            if tautology {
                continue;
            }
            if buf.is_empty() {
                trivially_unsat = true;
            }
            lits.extend_from_slice(&buf);
            starts.push(lits.len());
        }
        let m = starts.len() - 1;
        let bytes = (lits.len() * 8 + m * 32 + num_vars * 40) as u64;
        budget.charge(bytes)?;

        let mut occ_count = vec![0usize; 2 * num_vars + 2];
        for &l in &lits {
            occ_count[lit_index(l)] += 1;
        }
        let mut occ_start = Vec::with_capacity(occ_count.len() + 1);
        let mut acc = 0;
        occ_start.push(0);
        for c in &occ_count {
            acc += c;
            occ_start.push(acc);
        }
        let mut fill = occ_start.clone();
        let mut occ = vec![0u32; lits.len()];
        let mut nonfalse = vec![0u32; m];
        let mut neg_open = vec![0u32; m];
        let mut max_len = 1;
        for ci in 0..m {
            let c = &lits[starts[ci]..starts[ci + 1]];
            nonfalse[ci] = c.len() as u32;
            neg_open[ci] = c.iter().filter(|&&l| l < 0).count() as u32;
            max_len = max_len.max(c.len());
            for &l in c {
                let i = lit_index(l);
                occ[fill[i]] = ci as u32;
                fill[i] += 1;
            }
        }
        let mut solver = Solver {
            num_vars,
            lits,
            starts,
            occ_start,
            occ,
            occurs,
            nonfalse,
            true_count: vec![0; m],
            neg_open,
            bucket: vec![0; m],
            buckets: vec![BTreeSet::new(); max_len + 1],
            unsat_count: m,
            value: vec![0; num_vars + 1],
            trail: Vec::with_capacity(num_vars),
            qhead: 0,
            decisions: Vec::new(),
            trivially_unsat,
            options,
            budget,
            charged: bytes,
            stats: SolverStats::default(),
        };
        for ci in 0..m {
            solver.update_bucket(ci);
        }
        Ok(solver)
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    fn clause(&self, ci: usize) -> &[i32] {
        &self.lits[self.starts[ci]..self.starts[ci + 1]]
    }

    fn occurrences(&self, l: i32) -> std::ops::Range<usize> {
        let i = lit_index(l);
        self.occ_start[i]..self.occ_start[i + 1]
    }

    #[inline]
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn update_bucket(&mut self, ci: usize) {
        let want = if self.true_count[ci] == 0 && self.neg_open[ci] == 0 {
            self.nonfalse[ci]
        } else {
            0
        };
        let have = self.bucket[ci];
        if want != have {
            if have != 0 {
                self.buckets[have as usize].remove(&(ci as u32));
            }
            if want != 0 {
                self.buckets[want as usize].insert(ci as u32);
            }
            self.bucket[ci] = want;
        }
    }

    /// Makes `l` true; returns false if it is already false.
    fn enqueue(&mut self, l: i32) -> bool {
        match self.lit_value(l) {
            0 => {
                self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                self.trail.push(l);
                true
            }
            v => v > 0,
        }
    }

    /// Updates counters for a newly true literal. Returns false on conflict.
    fn process(&mut self, l: i32) -> bool {
        self.stats.propagations += 1;
        for k in self.occurrences(l) {
            let ci = self.occ[k] as usize;
            self.true_count[ci] += 1;
            if l < 0 {
                self.neg_open[ci] -= 1;
            }
            if self.true_count[ci] == 1 {
                self.unsat_count -= 1;
            }
            self.update_bucket(ci);
        }
        let mut ok = true;
        for k in self.occurrences(-l) {
            let ci = self.occ[k] as usize;
            if self.options.unit_subsumption && self.true_count[ci] > 0 {
                continue;
            }
            self.nonfalse[ci] -= 1;
            if l > 0 {
                self.neg_open[ci] -= 1;
            }
            if self.true_count[ci] == 0 {
                match self.nonfalse[ci] {
                    0 => ok = false,
                    1 if ok => {
                        let unit = self
                            .clause(ci)
                            .iter()
                            .copied()
                            .find(|&u| self.lit_value(u) == 0);
                        if let Some(u) = unit {
                            self.enqueue(u);
                        }
                    }
                    _ => {}
                }
                self.update_bucket(ci);
            }
        }
        ok
    }

    fn unprocess(&mut self, l: i32) {
        for k in self.occurrences(-l) {
            let ci = self.occ[k] as usize;
            if self.options.unit_subsumption && self.true_count[ci] > 0 {
                continue;
            }
            self.nonfalse[ci] += 1;
            if l > 0 {
                self.neg_open[ci] += 1;
            }
            if self.true_count[ci] == 0 {
                self.update_bucket(ci);
            }
        }
        for k in self.occurrences(l) {
            let ci = self.occ[k] as usize;
            self.true_count[ci] -= 1;
            if l < 0 {
                self.neg_open[ci] += 1;
            }
            if self.true_count[ci] == 0 {
                self.unsat_count += 1;
            }
            self.update_bucket(ci);
        }
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let l = self.trail[self.qhead];
            self.qhead += 1;
            if !self.process(l) {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            if self.trail.len() < self.qhead {
                self.unprocess(l);
            }
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.qhead = len;
    }

    /// Flips the deepest unflipped decision. Returns false when none is left.
    fn backtrack(&mut self) -> bool {
        while let Some(d) = self.decisions.pop() {
            if d.flipped {
                continue;
            }
            self.undo_to(d.trail_len);
            self.decisions.push(Decision { flipped: true, ..d });
            self.enqueue(-d.lit);
            return true;
        }
        false
    }

    /// The literal to split on, or `None` when the assignment is a model.
    pub(crate) fn choose(&self) -> Option<i32> {
        for set in &self.buckets[1..] {
            if let Some(&ci) = set.iter().next() {
                let c = self.clause(ci as usize);
                return c.iter().copied().find(|&l| self.lit_value(l) == 0);
            }
        }
        if self.unsat_count > 0 {
            let best = (0..self.starts.len() - 1)
                .filter(|&ci| self.true_count[ci] == 0)
                .min_by_key(|&ci| (self.nonfalse[ci], ci));
            if let Some(ci) = best {
                let l = self
                    .clause(ci)
                    .iter()
                    .copied()
                    .find(|&l| self.lit_value(l) == 0)?;
                return Some(l.abs());
            }
        }
        (1..=self.num_vars)
            .find(|&v| self.occurs[v] && self.value[v] == 0)
            .map(|v| v as i32)
    }

    /// The current assignment; unassigned variables read as false.
    fn model(&self) -> Vec<bool> {
        self.value.iter().map(|&v| v > 0).collect()
    }

    /// Runs the search, calling `on_model` with each model (indexed by
    /// variable, slot 0 unused).
    pub fn run(&mut self, mut on_model: impl FnMut(&[bool])) -> SatOutcome {
        let mut count = 0u64;
        if self.trivially_unsat {
            return SatOutcome::Unsatisfiable;
        }
        for ci in 0..self.starts.len() - 1 {
            if let [l] = *self.clause(ci) {
                if !self.enqueue(l) {
                    return SatOutcome::Unsatisfiable;
                }
            }
        }
        let finished = |count: u64| {
            if count == 0 {
                SatOutcome::Unsatisfiable
            } else {
                SatOutcome::ModelsFound {
                    count,
                    exhausted: true,
                }
            }
        };
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return finished(count);
                }
                continue;
            }
            match self.choose() {
                Some(lit) => {
                    if let Err(reason) = self.budget.check() {
                        return SatOutcome::Stopped {
                            reason,
                            models: count,
                        };
                    }
                    self.stats.splits += 1;
                    self.stats.first_split.get_or_insert(lit);
                    self.decisions.push(Decision {
                        trail_len: self.trail.len(),
                        lit,
                        flipped: false,
                    });
                    self.enqueue(lit);
                }
                None => {
                    count += 1;
                    on_model(&self.model());
                    if count >= self.options.max_models {
                        return SatOutcome::ModelsFound {
                            count,
                            exhausted: false,
                        };
                    }
                    if !self.backtrack() {
                        return finished(count);
                    }
                }
            }
        }
    }
}

impl Drop for Solver<'_> {
    fn drop(&mut self) {
        self.budget.release(self.charged);
    }
}

/// Decides `cnf` under self-contained limits.
pub fn solve(cnf: &Cnf, limits: &SatLimits, on_model: impl FnMut(&[bool])) -> SatOutcome {
    let budget = Budget::new(limits.max_seconds, limits.max_kbytes);
    solve_with_budget(
        cnf,
        SearchOptions {
            max_models: limits.max_models,
            unit_subsumption: limits.unit_subsumption,
        },
        &budget,
        on_model,
    )
}

/// Decides `cnf`, charging time and memory to a shared budget.
pub fn solve_with_budget(
    cnf: &Cnf,
    options: SearchOptions,
    budget: &Budget,
    on_model: impl FnMut(&[bool]),
) -> SatOutcome {
    match Solver::new(cnf, options, budget) {
        Ok(mut s) => s.run(on_model),
        Err(reason) => SatOutcome::Stopped { reason, models: 0 },
    }
}
