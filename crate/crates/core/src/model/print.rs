//! Output formats: human-readable tables, Prolog-style facts, and a Lisp
//! S-expression.

use std::fmt::Write as _;

use thiserror::Error;

use super::{FirstOrderModel, Table};
use crate::flatten::for_each_tuple;
use crate::lang::SymbolKind;

fn digits(mut v: u32) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

fn cell(t: &Table, v: u32) -> String {
    match t.kind {
        SymbolKind::Function => v.to_string(),
        SymbolKind::Relation if v == 1 => "T".into(),
        SymbolKind::Relation => "F".into(),
    }
}

fn write_unary(out: &mut String, label: &str, t: &Table, values: &[u32], n: u32) {
    let w = digits(n.saturating_sub(1));
    let lw = (w + 5).max(label.len() + 1);
    let _ = write!(out, "{label:<lw$}");
    for c in 0..n {
        let _ = write!(out, " {c:>w$}");
    }
    out.push('\n');
    let _ = writeln!(out, "   {}", "-".repeat(lw - 3 + n as usize * (w + 1)));
    let _ = write!(out, "{:lw$}", "");
    for &v in values {
        let _ = write!(out, " {:>w$}", cell(t, v));
    }
    out.push_str("\n\n");
}

fn write_binary(out: &mut String, label: &str, t: &Table, values: &[u32], n: u32) {
    let w = digits(n.saturating_sub(1));
    let lw = (w + 4).max(label.len() + 1);
    let _ = write!(out, "{label:<lw$}|");
    for c in 0..n {
        let _ = write!(out, " {c:>w$}");
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "{}{}+{}",
        " ".repeat(lw - (w + 1)),
        "-".repeat(w + 1),
        "-".repeat(n as usize * (w + 1))
    );
    for r in 0..n as usize {
        let _ = write!(out, "{r:>width$} |", width = lw - 1);
        for c in 0..n as usize {
            let _ = write!(out, " {:>w$}", cell(t, values[r * n as usize + c]));
        }
        out.push('\n');
    }
    out.push('\n');
}

/// Writes one table in the tabular layout. Nullary symbols print as
/// `name: value`; arity three and four print one square slice per
/// leading argument tuple.
pub fn write_table(out: &mut String, t: &Table, n: u32) {
    match t.arity {
        0 => {
            let _ = writeln!(out, "{}: {}", t.name, cell(t, t.values[0]));
        }
        1 => write_unary(out, &format!("{}:", t.name), t, &t.values, n),
        2 => write_binary(out, &format!("{}:", t.name), t, &t.values, n),
        arity => {
            let square = (n * n) as usize;
            let mut slice = 0;
            for_each_tuple(arity - 2, n, |prefix| {
                let mut label = format!("{}(", t.name);
                for p in prefix {
                    let _ = write!(label, "{p},");
                }
                label.push_str("_,_):");
                let values = &t.values[slice * square..(slice + 1) * square];
                write_binary(out, &label, t, values, n);
                slice += 1;
            });
        }
    }
}

/// The human-readable form: banner, nullary symbols, then the tables.
pub fn print_tabular(model: &FirstOrderModel, index: u64, seconds: f64) -> String {
    let mut out = format!("======================= Model #{index} at {seconds:.2} seconds:\n");
    for t in model.tables.iter().filter(|t| t.arity == 0) {
        write_table(&mut out, t, model.n);
    }
    for t in model.tables.iter().filter(|t| t.arity > 0) {
        write_table(&mut out, t, model.n);
    }
    out
}

fn ordered(model: &FirstOrderModel) -> impl Iterator<Item = &Table> {
    let funcs = model
        .tables
        .iter()
        .filter(|t| t.kind == SymbolKind::Function);
    let rels = model
        .tables
        .iter()
        .filter(|t| t.kind == SymbolKind::Relation);
    funcs.chain(rels)
}

fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A Prolog atom for `name`, quoted unless it is a plain identifier.
fn atom(name: &str) -> String {
    if is_plain_atom(name) {
        return name.to_string();
    }
    let mut s = String::from("'");
    for c in name.chars() {
        if c == '\'' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('\'');
    s
}

fn fact(name: &str, args: &[u32]) -> String {
    if args.is_empty() {
        return format!("{name}.");
    }
    let args: Vec<String> = args.iter().map(u32::to_string).collect();
    format!("{name}({}).", args.join(","))
}

/// Prolog-readable facts. Each symbol is introduced by
/// `function(Name, Arity).` or `relation(Name, Arity).` followed by one fact
/// per table entry: `f(Args,Value).` for functions, `r(Args).` or
/// `-r(Args).` for relations.
pub fn print_parsable(model: &FirstOrderModel) -> String {
    let mut out = format!("begin_model({}).\n", model.n);
    for t in ordered(model) {
        let name = atom(&t.name);
        let _ = writeln!(out, "{}({name}, {}).", t.kind.as_str(), t.arity);
        let mut i = 0;
        for_each_tuple(t.arity, model.n, |args| {
            let v = t.values[i];
            i += 1;
            match t.kind {
                SymbolKind::Function => {
                    let mut full = args.to_vec();
                    full.push(v);
                    out.push_str(&fact(&name, &full));
                }
                SymbolKind::Relation => {
                    if v == 0 {
                        out.push('-');
                    }
                    out.push_str(&fact(&name, args));
                }
            }
            out.push('\n');
        });
    }
    out.push_str("end_model.\n");
    out
}

/// One S-expression: `(model (size n) (function f (v ...)) ...)` with values
/// in row-major order; relations use `T` and `F`.
pub fn print_ivy(model: &FirstOrderModel) -> String {
    let mut out = format!("(model (size {})", model.n);
    for t in ordered(model) {
        let values: Vec<String> = t.values.iter().map(|&v| cell(t, v)).collect();
        let _ = write!(
            out,
            " ({} {} ({}))",
            t.kind.as_str(),
            t.name,
            values.join(" ")
        );
    }
    out.push_str(")\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseModelError {
    pub line: usize,
    pub message: String,
}

/// Reads the output of [`print_parsable`] back into a model.
pub fn parse_parsable(text: &str) -> Result<FirstOrderModel, ParseModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: &str| ParseModelError {
        line,
        message: message.to_string(),
    };
    let (line, first) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let n: u32 = first
        .strip_prefix("begin_model(")
        .and_then(|s| s.strip_suffix(")."))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(line, "expected begin_model(N)."))?;
    let mut tables = Vec::new();
    loop {
        let (line, decl) = lines.next().ok_or_else(|| err(0, "missing end_model."))?;
        if decl == "end_model." {
            break;
        }
        let (kind, rest) = if let Some(r) = decl.strip_prefix("function(") {
            (SymbolKind::Function, r)
        } else if let Some(r) = decl.strip_prefix("relation(") {
            (SymbolKind::Relation, r)
        } else {
            return Err(err(
                line,
                "expected a function(...) or relation(...) declaration",
            ));
        };
        let (name, rest) = read_atom(rest).ok_or_else(|| err(line, "bad symbol name"))?;
        let arity: usize = rest
            .strip_prefix(", ")
            .and_then(|s| s.strip_suffix(")."))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(line, "bad arity"))?;
        let written = atom(&name);
        let count = (n as usize).pow(arity as u32);
        let mut values = Vec::with_capacity(count);
        let mut expected = Vec::with_capacity(count);
        for_each_tuple(arity, n, |t| expected.push(t.to_vec()));
        for args in expected {
            let (line, f) = lines.next().ok_or_else(|| err(0, "missing facts"))?;
            let (sign, body) = match (kind, f.strip_prefix('-')) {
                (SymbolKind::Relation, Some(b)) => (false, b),
                _ => (true, f),
            };
            let got = parse_fact(body, &written).ok_or_else(|| err(line, "malformed fact"))?;
            match kind {
                SymbolKind::Function => {
                    if got.len() != arity + 1 || got[..arity] != args[..] || got[arity] >= n {
                        return Err(err(line, "unexpected function entry"));
                    }
                    values.push(got[arity]);
                }
                SymbolKind::Relation => {
                    if got != args {
                        return Err(err(line, "unexpected relation entry"));
                    }
                    values.push(sign as u32);
                }
            }
        }
        tables.push(Table {
            name,
            kind,
            arity,
            values,
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "text after end_model."));
    }
    Ok(FirstOrderModel { n, tables })
}

/// Splits a leading (possibly quoted) atom from `s`.
fn read_atom(s: &str) -> Option<(String, &str)> {
    if let Some(rest) = s.strip_prefix('\'') {
        let mut name = String::new();
        let mut chars = rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => name.push(chars.next()?.1),
                '\'' => return Some((name, &rest[i + 1..])),
                c => name.push(c),
            }
        }
        None
    } else {
        let end = s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))?;
        (end > 0).then(|| (s[..end].to_string(), &s[end..]))
    }
}

fn parse_fact(body: &str, name: &str) -> Option<Vec<u32>> {
    let rest = body.strip_prefix(name)?.strip_suffix('.')?;
    if rest.is_empty() {
        return Some(Vec::new());
    }
    rest.strip_prefix('(')?
        .strip_suffix(')')?
        .split(',')
        .map(|a| a.trim().parse().ok())
        .collect()
}
