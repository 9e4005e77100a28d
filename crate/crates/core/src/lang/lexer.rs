use super::{InputError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(u32),
    Op(String),
    /// `adjacent` is set when no whitespace separates the paren from the
    /// preceding token, which makes the preceding name a functor.
    LParen {
        adjacent: bool,
    },
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const OPERATORS: &[&str] = &[
    "<->", "->", "!=", "<=", ">=", "==", "=", "<", ">", "+", "-", "*", "/", "^", "|", "&", "#",
    "\\", "~", "@", "!", ":", "?",
];

fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~?@&|!#:".contains(c)
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

/// Splits a run of symbol characters into built-in operators, longest
/// match first. A run that does not decompose is kept whole.
fn split_symbols(run: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = run;
    while !rest.is_empty() {
        match OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            Some(op) => {
                out.push(op.to_string());
                rest = &rest[op.len()..];
            }
            None => return vec![run.to_string()],
        }
    }
    out
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, InputError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut prev_adjacent = false;

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            prev_adjacent = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            prev_adjacent = false;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            prev_adjacent = false;
            continue;
        }
        let start = i;
        let tok = if is_name_char(c) {
            while i < chars.len() && is_name_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word.chars().all(|c| c.is_ascii_digit()) {
                let value = word
                    .parse::<u32>()
                    .map_err(|_| InputError::at(pos, format!("number {word} is too large")))?;
                Tok::Number(value)
            } else {
                Tok::Ident(word)
            }
        } else if is_symbol_char(c) {
            while i < chars.len() && is_symbol_char(chars[i]) {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            let mut column = col;
            for op in split_symbols(&run) {
                let width = op.chars().count();
                tokens.push(Token {
                    tok: Tok::Op(op),
                    pos: Pos { line, column },
                });
                column += width;
            }
            col += i - start;
            prev_adjacent = true;
            continue;
        } else {
            i += 1;
            match c {
                '(' => Tok::LParen {
                    adjacent: prev_adjacent,
                },
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                other => {
                    return Err(InputError::at(
                        pos,
                        format!("unexpected character {other:?}"),
                    ))
                }
            }
        };
        col += i - start;
        prev_adjacent = matches!(
            tok,
            Tok::Ident(_) | Tok::Number(_) | Tok::RParen | Tok::RBracket
        );
        tokens.push(Token { tok, pos });
    }
    Ok(tokens)
}
