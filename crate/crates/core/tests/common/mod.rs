//! Shared helpers and independent oracles for the integration tests.
//!
//! The oracles here do not use the crate's parser, flattener, grounder, or
//! solver: theories are written in a small prefix syntax of their own and
//! searched by direct backtracking over function and relation tables.

#![allow(dead_code)]

use std::io::Write;
use std::process::{Command, Stdio};

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use modelforge::cli::{parse_args, run, Command as CliCommand, ExitCode, RunSummary};

pub const GROUP: &str = "\
list(usable).
  e * x = x.                  % left identity
  g(x) * x = e.               % left inverse
  (x * y) * z = x * (y * z).  % associativity
  a * b != b * a.             % denial of commutativity
end_of_list.
";

pub const EVEN: &str = "\
list(usable).
  even(a).
  -even(x) | even(s(s(x))).
  -even(s(a)).
end_of_list.
";

pub const FILTER_EQUATIONS: &str = "\
f(f(x,f(f(z,x),x)),f(z,f(y,x))) = z.
f(f(f(x,f(z,x)),x),f(z,f(y,x))) = z.
f(f(f(f(y,x),z),x),f(f(u,y),x)) = x.
f(f(f(f(y,x),z),x),f(f(y,u),x)) = x.
";

/// Runs the library entry point with command-line style arguments.
pub fn run_lib(args: &[&str], input: &str) -> (RunSummary, String) {
    let mut argv = vec!["modelforge"];
    argv.extend_from_slice(args);
    let config = match parse_args(argv).expect("valid arguments") {
        CliCommand::Search(c) => c,
        other => panic!("not a search: {other:?}"),
    };
    let mut out = Vec::new();
    let summary = run(&config, input, &mut out, &mut std::io::sink(), None);
    (summary, String::from_utf8(out).unwrap())
}

/// Runs a built executable with `input` on stdin; returns exit code and
/// standard output.
pub fn run_exe(exe: &str, args: &[&str], input: &str) -> (i32, String) {
    let mut child = Command::new(exe)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

pub fn modelforge(args: &[&str], input: &str) -> (i32, String) {
    run_exe(env!("CARGO_BIN_EXE_modelforge"), args, input)
}

pub fn anldp(args: &[&str], input: &str) -> (i32, String) {
    run_exe(env!("CARGO_BIN_EXE_anldp"), args, input)
}

pub fn code(c: ExitCode) -> i32 {
    c.code()
}

// ---------------------------------------------------------------------------
// propositional oracle

/// Satisfying total assignments over the variables that occur in the
/// clauses, counted by truth table.
pub fn truth_table_count(clauses: &[Vec<i32>]) -> u64 {
    let mut vars: Vec<u32> = clauses.iter().flatten().map(|l| l.unsigned_abs()).collect();
    vars.sort_unstable();
    vars.dedup();
    let mut count = 0;
    for bits in 0u64..1 << vars.len() {
        let value = |v: u32| {
            let i = vars.binary_search(&v).unwrap();
            bits >> i & 1 == 1
        };
        if clauses
            .iter()
            .all(|c| c.iter().any(|&l| value(l.unsigned_abs()) == (l > 0)))
        {
            count += 1;
        }
    }
    count
}

/// Seeded generator so oracle inputs are fixed from run to run.
pub struct Seeded(StdRng);

impl Seeded {
    pub fn new(seed: u64) -> Self {
        Seeded(StdRng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.random_range(0..n)
    }
}

// ---------------------------------------------------------------------------
// combinatorial oracles

/// Number of permutations among all `n^n` unary tables.
pub fn brute_force_bijections(n: u32) -> u64 {
    let total = (n as u64).pow(n);
    (0..total)
        .filter(|&code| {
            let mut seen = vec![false; n as usize];
            let mut c = code;
            for _ in 0..n {
                let v = (c % n as u64) as usize;
                c /= n as u64;
                if seen[v] {
                    return false;
                }
                seen[v] = true;
            }
            true
        })
        .count() as u64
}

/// Number of Latin squares among all `n^(n*n)` tables (small `n` only).
pub fn brute_force_latin_squares(n: u32) -> u64 {
    let cells = (n * n) as usize;
    let total = (n as u64).pow(cells as u32);
    let mut count = 0;
    let mut table = vec![0u32; cells];
    for code in 0..total {
        let mut c = code;
        for slot in table.iter_mut() {
            *slot = (c % n as u64) as u32;
            c /= n as u64;
        }
        if is_latin(&table, n) {
            count += 1;
        }
    }
    count
}

fn is_latin(t: &[u32], n: u32) -> bool {
    let n = n as usize;
    (0..n).all(|i| {
        let mut row = vec![false; n];
        let mut col = vec![false; n];
        (0..n).all(|j| {
            let r = std::mem::replace(&mut row[t[i * n + j] as usize], true);
            let c = std::mem::replace(&mut col[t[j * n + i] as usize], true);
            !r && !c
        })
    })
}

/// Latin squares counted by row-by-row backtracking.
pub fn backtrack_latin_squares(n: u32) -> u64 {
    fn go(t: &mut Vec<u32>, pos: usize, n: usize) -> u64 {
        if pos == n * n {
            return 1;
        }
        let (r, c) = (pos / n, pos % n);
        let mut total = 0;
        for v in 0..n as u32 {
            let clash = (0..c).any(|j| t[r * n + j] == v) || (0..r).any(|i| t[i * n + c] == v);
            if !clash {
                t[pos] = v;
                total += go(t, pos + 1, n);
            }
        }
        total
    }
    let n = n as usize;
    go(&mut vec![0; n * n], 0, n)
}

// ---------------------------------------------------------------------------
// first-order oracle

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OTerm {
    Var(usize),
    Elem(u32),
    App(usize, Vec<OTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OAtom {
    Eq(OTerm, OTerm),
    Rel(usize, Vec<OTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OLit {
    pub sign: bool,
    pub atom: OAtom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OClause {
    pub lits: Vec<OLit>,
    pub vars: Vec<String>,
}

/// A theory over named functions and relations, with its own syntax:
/// clauses are `|`-separated literals `[-]eq(t,t)` or `[-]R(t,...)`, and
/// terms are in prefix form. Names in `var_names` are variables.
#[derive(Clone, Debug, Default)]
pub struct OTheory {
    pub funcs: Vec<(String, usize)>,
    pub rels: Vec<(String, usize)>,
    pub clauses: Vec<OClause>,
}

struct TermReader<'a> {
    s: &'a [u8],
    i: usize,
}

impl TermReader<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> String {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len()
            && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_')
        {
            self.i += 1;
        }
        assert!(self.i > start, "name expected at {}", self.i);
        String::from_utf8(self.s[start..self.i].to_vec()).unwrap()
    }
}

impl OTheory {
    pub fn func(&mut self, name: &str, arity: usize) -> usize {
        if let Some(i) = self.funcs.iter().position(|(f, _)| f == name) {
            assert_eq!(self.funcs[i].1, arity, "arity of {name}");
            return i;
        }
        self.funcs.push((name.to_string(), arity));
        self.funcs.len() - 1
    }

    pub fn rel(&mut self, name: &str, arity: usize) -> usize {
        if let Some(i) = self.rels.iter().position(|(f, _)| f == name) {
            assert_eq!(self.rels[i].1, arity, "arity of {name}");
            return i;
        }
        self.rels.push((name.to_string(), arity));
        self.rels.len() - 1
    }

    /// Adds a clause in the oracle's own prefix syntax.
    pub fn clause(&mut self, text: &str, var_names: &[&str]) -> &mut Self {
        let mut r = TermReader {
            s: text.as_bytes(),
            i: 0,
        };
        let mut vars: Vec<String> = Vec::new();
        let mut lits = Vec::new();
        loop {
            let sign = !r.eat(b'-');
            let name = r.name();
            let mut args = Vec::new();
            if r.eat(b'(') {
                loop {
                    args.push(self.term(&mut r, var_names, &mut vars));
                    if !r.eat(b',') {
                        break;
                    }
                }
                assert!(r.eat(b')'));
            }
            let atom = if name == "eq" {
                assert_eq!(args.len(), 2);
                let b = args.pop().unwrap();
                let a = args.pop().unwrap();
                OAtom::Eq(a, b)
            } else {
                OAtom::Rel(self.rel(&name, args.len()), args)
            };
            lits.push(OLit { sign, atom });
            if !r.eat(b'|') {
                break;
            }
        }
        assert_eq!(r.peek(), None, "trailing text in {text}");
        self.clauses.push(OClause { lits, vars });
        self
    }

    fn term(&mut self, r: &mut TermReader, var_names: &[&str], vars: &mut Vec<String>) -> OTerm {
        if r.peek().is_some_and(|c| c.is_ascii_digit()) {
            return OTerm::Elem(r.name().parse().unwrap());
        }
        let name = r.name();
        if var_names.contains(&name.as_str()) {
            let i = vars.iter().position(|v| *v == name).unwrap_or_else(|| {
                vars.push(name.clone());
                vars.len() - 1
            });
            return OTerm::Var(i);
        }
        let mut args = Vec::new();
        if r.eat(b'(') {
            loop {
                args.push(self.term(r, var_names, vars));
                if !r.eat(b',') {
                    break;
                }
            }
            assert!(r.eat(b')'));
        }
        OTerm::App(self.func(&name, args.len()), args)
    }

    /// Renders the theory in the model finder's input language.
    pub fn to_input(&self) -> String {
        let mut s = String::from("list(usable).\n");
        for c in &self.clauses {
            let lits: Vec<String> = c.lits.iter().map(|l| self.show_lit(c, l)).collect();
            s.push_str(&format!("  {}.\n", lits.join(" | ")));
        }
        s.push_str("end_of_list.\n");
        s
    }

    fn show_lit(&self, c: &OClause, l: &OLit) -> String {
        match &l.atom {
            OAtom::Eq(a, b) => format!(
                "{} {} {}",
                self.show_term(c, a),
                if l.sign { "=" } else { "!=" },
                self.show_term(c, b)
            ),
            OAtom::Rel(r, args) => {
                let mut s = String::from(if l.sign { "" } else { "-" });
                s.push_str(&self.rels[*r].0);
                if !args.is_empty() {
                    let a: Vec<String> = args.iter().map(|t| self.show_term(c, t)).collect();
                    s.push_str(&format!("({})", a.join(",")));
                }
                s
            }
        }
    }

    fn show_term(&self, c: &OClause, t: &OTerm) -> String {
        match t {
            OTerm::Var(v) => c.vars[*v].clone(),
            OTerm::Elem(e) => e.to_string(),
            OTerm::App(f, args) if args.is_empty() => self.funcs[*f].0.clone(),
            OTerm::App(f, args) => {
                let a: Vec<String> = args.iter().map(|t| self.show_term(c, t)).collect();
                format!("{}({})", self.funcs[*f].0, a.join(","))
            }
        }
    }
}

/// A (possibly partial) interpretation: `None` marks an open cell.
#[derive(Clone, Debug)]
pub struct Interp {
    pub n: u32,
    pub funcs: Vec<Vec<Option<u32>>>,
    pub rels: Vec<Vec<Option<bool>>>,
}

impl Interp {
    fn term(&self, t: &OTerm, vals: &[u32]) -> Option<u32> {
        match t {
            OTerm::Var(v) => Some(vals[*v]),
            OTerm::Elem(e) => Some(*e),
            OTerm::App(f, args) => self.funcs[*f][self.index_of(args, vals)?],
        }
    }

    fn index_of(&self, args: &[OTerm], vals: &[u32]) -> Option<usize> {
        let mut i = 0;
        for a in args {
            i = i * self.n as usize + self.term(a, vals)? as usize;
        }
        Some(i)
    }

    fn lit(&self, l: &OLit, vals: &[u32]) -> Option<bool> {
        let holds = match &l.atom {
            OAtom::Eq(a, b) => self.term(a, vals)? == self.term(b, vals)?,
            OAtom::Rel(r, args) => self.rels[*r][self.index_of(args, vals)?]?,
        };
        Some(holds == l.sign)
    }

    /// False when some clause instance is already false.
    fn consistent(&self, theory: &OTheory) -> bool {
        theory.clauses.iter().all(|c| {
            let k = c.vars.len();
            let total = (self.n as u64).pow(k as u32);
            let mut vals = vec![0u32; k];
            (0..total).all(|code| {
                let mut x = code;
                for v in vals.iter_mut() {
                    *v = (x % self.n as u64) as u32;
                    x /= self.n as u64;
                }
                c.lits.iter().any(|l| self.lit(l, &vals) != Some(false))
            })
        })
    }

    /// An unassigned cell whose value the term needs, with all of that
    /// cell's arguments already known.
    fn blocking_term(&self, t: &OTerm, vals: &[u32]) -> Result<u32, (bool, usize, usize)> {
        match t {
            OTerm::Var(v) => Ok(vals[*v]),
            OTerm::Elem(e) => Ok(*e),
            OTerm::App(f, args) => {
                let mut i = 0;
                for a in args {
                    i = i * self.n as usize + self.blocking_term(a, vals)? as usize;
                }
                self.funcs[*f][i].ok_or((true, *f, i))
            }
        }
    }

    fn blocking(&self, c: &OClause, vals: &[u32]) -> Option<(bool, usize, usize)> {
        for l in &c.lits {
            let cell = match &l.atom {
                OAtom::Eq(a, b) => self
                    .blocking_term(a, vals)
                    .and_then(|_| self.blocking_term(b, vals))
                    .err(),
                OAtom::Rel(r, args) => {
                    let mut i = 0;
                    let mut cell = None;
                    for a in args {
                        match self.blocking_term(a, vals) {
                            Ok(v) => i = i * self.n as usize + v as usize,
                            Err(c) => {
                                cell = Some(c);
                                break;
                            }
                        }
                    }
                    cell.or_else(|| self.rels[*r][i].is_none().then_some((false, *r, i)))
                }
            };
            if cell.is_some() {
                return cell;
            }
        }
        None
    }

    /// `Some(true)` once some literal is true, `Some(false)` once every
    /// literal is false, `None` while undecided.
    fn instance(&self, c: &OClause, vals: &[u32]) -> Option<bool> {
        let mut open = false;
        for l in &c.lits {
            match self.lit(l, vals) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => open = true,
            }
        }
        (!open).then_some(false)
    }
}

/// Exhaustive backtracking search for a model of size `n`.
pub fn oracle_find_model(theory: &OTheory, n: u32) -> Option<Interp> {
    let mut interp = Interp {
        n,
        funcs: theory
            .funcs
            .iter()
            .map(|(_, a)| vec![None; (n as usize).pow(*a as u32)])
            .collect(),
        rels: theory
            .rels
            .iter()
            .map(|(_, a)| vec![None; (n as usize).pow(*a as u32)])
            .collect(),
    };
    // every ground instance, as (clause, variable values)
    let mut instances: Vec<(usize, Vec<u32>)> = Vec::new();
    for (ci, c) in theory.clauses.iter().enumerate() {
        let k = c.vars.len() as u32;
        for code in 0..(n as u64).pow(k) {
            let mut x = code;
            let vals = (0..k)
                .map(|_| {
                    let v = (x % n as u64) as u32;
                    x /= n as u64;
                    v
                })
                .collect();
            instances.push((ci, vals));
        }
    }
    // An instance that is true stays true as the tables fill in, so each
    // node only re-examines the instances its parent left open. Branching
    // is on a cell the first open instance is waiting for; when nothing is
    // open every instance is true, whatever the remaining cells hold.
    fn go(
        interp: &mut Interp,
        theory: &OTheory,
        instances: &[(usize, Vec<u32>)],
        open: &[usize],
    ) -> bool {
        let mut still_open = Vec::with_capacity(open.len());
        for &i in open {
            let (ci, vals) = &instances[i];
            match interp.instance(&theory.clauses[*ci], vals) {
                Some(true) => {}
                Some(false) => return false,
                None => still_open.push(i),
            }
        }
        let Some(&first) = still_open.first() else {
            return true;
        };
        let (ci, vals) = &instances[first];
        let (is_f, s, i) = interp
            .blocking(&theory.clauses[*ci], vals)
            .expect("an undecided instance waits on some cell");
        if is_f {
            for v in 0..interp.n {
                interp.funcs[s][i] = Some(v);
                if go(interp, theory, instances, &still_open) {
                    return true;
                }
            }
            interp.funcs[s][i] = None;
        } else {
            for b in [false, true] {
                interp.rels[s][i] = Some(b);
                if go(interp, theory, instances, &still_open) {
                    return true;
                }
            }
            interp.rels[s][i] = None;
        }
        false
    }
    let open: Vec<usize> = (0..instances.len()).collect();
    if !go(&mut interp, theory, &instances, &open) {
        return None;
    }
    for t in &mut interp.funcs {
        t.iter_mut()
            .filter(|c| c.is_none())
            .for_each(|c| *c = Some(0));
    }
    for t in &mut interp.rels {
        t.iter_mut()
            .filter(|c| c.is_none())
            .for_each(|c| *c = Some(false));
    }
    Some(interp)
}

/// Whether a total interpretation satisfies the theory.
pub fn oracle_satisfies(theory: &OTheory, interp: &Interp) -> bool {
    interp.consistent(theory)
        && interp.funcs.iter().flatten().all(Option::is_some)
        && interp.rels.iter().flatten().all(Option::is_some)
}

/// Builds an oracle interpretation from a printed model (read back through
/// the Prolog-style output format).
pub fn interp_from_model(theory: &OTheory, model: &modelforge::model::FirstOrderModel) -> Interp {
    let n = model.n;
    let funcs = theory
        .funcs
        .iter()
        .map(|(name, arity)| match model.table(name) {
            Some(t) => t.values.iter().map(|&v| Some(v)).collect(),
            // a symbol the theory never mentions; any table will do
            None => vec![Some(0); (n as usize).pow(*arity as u32)],
        })
        .collect();
    let rels = theory
        .rels
        .iter()
        .map(|(name, arity)| match model.table(name) {
            Some(t) => t.values.iter().map(|&v| Some(v == 1)).collect(),
            None => vec![Some(false); (n as usize).pow(*arity as u32)],
        })
        .collect();
    Interp { n, funcs, rels }
}

/// The noncommutative group theory in oracle syntax (`m` for the product).
pub fn group_oracle(extra: &[&str]) -> OTheory {
    let vars = ["x", "y", "z"];
    let mut t = OTheory::default();
    t.clause("eq(m(e,x),x)", &vars)
        .clause("eq(m(g(x),x),e)", &vars)
        .clause("eq(m(m(x,y),z),m(x,m(y,z)))", &vars)
        .clause("-eq(m(a,b),m(b,a))", &vars);
    for c in extra {
        t.clause(c, &vars);
    }
    t
}

/// Random theory over at most two functions (arity <= 2) and one relation.
pub fn random_theory(rng: &mut Seeded) -> OTheory {
    let mut t = OTheory::default();
    let nfuncs = 1 + rng.below(2) as usize;
    let names = ["f", "g"];
    let arities: Vec<usize> = (0..nfuncs).map(|_| rng.below(3) as usize).collect();
    let rel_arity = 1 + rng.below(2) as usize;
    for (i, &a) in arities.iter().enumerate() {
        t.func(names[i], a);
    }
    t.rel("R", rel_arity);
    let var_names = ["x", "y", "z"];
    fn term(rng: &mut Seeded, t: &OTheory, depth: u32, nvars: usize) -> OTerm {
        let roll = rng.below(10);
        if depth == 0 || roll < 4 {
            if roll == 0 {
                return OTerm::Elem(rng.below(2) as u32);
            }
            return OTerm::Var(rng.below(nvars as u64) as usize);
        }
        let f = rng.below(t.funcs.len() as u64) as usize;
        let args = (0..t.funcs[f].1)
            .map(|_| term(rng, t, depth - 1, nvars))
            .collect();
        OTerm::App(f, args)
    }
    let nclauses = 1 + rng.below(3);
    for _ in 0..nclauses {
        let nvars = 1 + rng.below(3) as usize;
        let nlits = 1 + rng.below(3);
        fn size(t: &OTerm) -> usize {
            match t {
                OTerm::App(_, args) => 1 + args.iter().map(size).sum::<usize>(),
                _ => 0,
            }
        }
        // flattening gives each application its own variable; keep the
        // grounding small enough for the default memory limit
        let lits = loop {
            let mut lits = Vec::new();
            let mut apps = 0;
            for _ in 0..nlits {
                let sign = rng.below(2) == 0;
                let atom = if rng.below(2) == 0 {
                    let (a, b) = (term(rng, &t, 2, nvars), term(rng, &t, 2, nvars));
                    apps += size(&a) + size(&b);
                    OAtom::Eq(a, b)
                } else {
                    let args: Vec<OTerm> =
                        (0..rel_arity).map(|_| term(rng, &t, 2, nvars)).collect();
                    apps += args.iter().map(size).sum::<usize>();
                    OAtom::Rel(0, args)
                };
                lits.push(OLit { sign, atom });
            }
            if apps <= 5 {
                break lits;
            }
        };
        // keep only the variables actually used, renumbered densely
        let mut used = Vec::new();
        fn collect(t: &OTerm, used: &mut Vec<usize>) {
            match t {
                OTerm::Var(v) if !used.contains(v) => used.push(*v),
                OTerm::App(_, args) => args.iter().for_each(|a| collect(a, used)),
                _ => {}
            }
        }
        for l in &lits {
            match &l.atom {
                OAtom::Eq(a, b) => {
                    collect(a, &mut used);
                    collect(b, &mut used);
                }
                OAtom::Rel(_, args) => args.iter().for_each(|a| collect(a, &mut used)),
            }
        }
        fn rename(t: &OTerm, used: &[usize]) -> OTerm {
            match t {
                OTerm::Var(v) => OTerm::Var(used.iter().position(|u| u == v).unwrap()),
                OTerm::Elem(e) => OTerm::Elem(*e),
                OTerm::App(f, args) => {
                    OTerm::App(*f, args.iter().map(|a| rename(a, used)).collect())
                }
            }
        }
        let lits = lits
            .into_iter()
            .map(|l| OLit {
                sign: l.sign,
                atom: match l.atom {
                    OAtom::Eq(a, b) => OAtom::Eq(rename(&a, &used), rename(&b, &used)),
                    OAtom::Rel(r, args) => {
                        OAtom::Rel(r, args.iter().map(|a| rename(a, &used)).collect())
                    }
                },
            })
            .collect();
        let vars = (0..used.len()).map(|i| var_names[i].to_string()).collect();
        t.clauses.push(OClause { lits, vars });
    }
    t
}
