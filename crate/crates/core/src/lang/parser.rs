//! Operator-precedence reader for Otter-style terms.
//!
//! Everything in the input (clauses, formulas, commands) is first read as a
//! [`Raw`] term; connectives and relations are just operator names at this
//! stage. Interpretation happens in the caller.

use super::lexer::{Tok, Token};
use super::{InputError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Raw {
    App {
        name: String,
        args: Vec<Raw>,
        pos: Pos,
    },
    Num(u32, Pos),
    Quant {
        exists: bool,
        vars: Vec<String>,
        body: Box<Raw>,
        pos: Pos,
    },
}

impl Raw {
    pub fn pos(&self) -> Pos {
        match self {
            Raw::App { pos, .. } | Raw::Num(_, pos) | Raw::Quant { pos, .. } => *pos,
        }
    }

    /// Name and arguments when this is an application with the given name.
    pub fn app(&self, name: &str) -> Option<&[Raw]> {
        match self {
            Raw::App { name: n, args, .. } if n == name => Some(args),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            Raw::App { name, args, .. } if args.is_empty() => Some(name),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

const TOP: u32 = 1200;
const ARG: u32 = 999;
const NEGATION: u32 = 750;

fn infix(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        "#" => (820, Assoc::Xfx),
        "<->" | "->" => (800, Assoc::Xfy),
        "|" => (790, Assoc::Xfy),
        "&" => (780, Assoc::Xfy),
        "=" | "!=" | "<" | ">" | "<=" | ">=" | "==" => (700, Assoc::Xfx),
        "+" => (500, Assoc::Xfy),
        "-" => (500, Assoc::Yfx),
        "*" => (400, Assoc::Xfy),
        "/" => (400, Assoc::Yfx),
        "^" => (200, Assoc::Xfy),
        _ => return None,
    })
}

pub struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: Pos,
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        let end = tokens
            .last()
            .map(|t| Pos {
                line: t.pos.line,
                column: t.pos.column + 1,
            })
            .unwrap_or(Pos { line: 1, column: 1 });
        Parser { tokens, at: 0, end }
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.at + k).map(|t| &t.tok)
    }

    pub fn pos(&self) -> Pos {
        self.tokens.get(self.at).map(|t| t.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), InputError> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t.tok == want => Ok(()),
            Some(t) => Err(InputError::at(
                pos,
                format!("expected {what}, found {}", describe(&t.tok)),
            )),
            None => Err(InputError::at(
                pos,
                format!("expected {what}, found end of input"),
            )),
        }
    }

    /// Reads one `.`-terminated sentence.
    pub fn sentence(&mut self) -> Result<Raw, InputError> {
        let term = self.term(TOP)?;
        self.expect(Tok::Dot, "'.'")?;
        Ok(term)
    }

    fn term(&mut self, max: u32) -> Result<Raw, InputError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        while let Some(Tok::Op(name)) = self.peek() {
            let name = name.clone();
            let Some((prec, assoc)) = infix(&name) else {
                break;
            };
            let left_max = if assoc == Assoc::Yfx { prec } else { prec - 1 };
            if prec > max || left_prec > left_max {
                break;
            }
            let pos = self.pos();
            self.bump();
            let right_max = if assoc == Assoc::Xfy { prec } else { prec - 1 };
            let right = self.term(right_max)?;
            left = Raw::App {
                name,
                args: vec![left, right],
                pos,
            };
            left_prec = prec;
        }
        Ok(left)
    }

    fn starts_term(tok: Option<&Tok>) -> bool {
        matches!(
            tok,
            Some(Tok::Ident(_) | Tok::Number(_) | Tok::LParen { .. } | Tok::Op(_))
        )
    }

    fn args(&mut self) -> Result<Vec<Raw>, InputError> {
        let mut args = vec![self.term(ARG)?];
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            args.push(self.term(ARG)?);
        }
        self.expect(Tok::RParen, "',' or ')'")?;
        Ok(args)
    }

    fn primary(&mut self, max: u32) -> Result<(Raw, u32), InputError> {
        let pos = self.pos();
        let Some(token) = self.bump() else {
            return Err(InputError::at(pos, "unexpected end of input"));
        };
        match token.tok {
            Tok::Number(n) => Ok((Raw::Num(n, pos), 0)),
            Tok::Ident(name) => {
                if let Some(Tok::LParen { adjacent: true }) = self.peek() {
                    self.bump();
                    let args = self.args()?;
                    return Ok((Raw::App { name, args, pos }, 0));
                }
                if (name == "all" || name == "exists") && Self::starts_term(self.peek()) {
                    return self.quantified(name == "exists", pos, max);
                }
                Ok((
                    Raw::App {
                        name,
                        args: Vec::new(),
                        pos,
                    },
                    0,
                ))
            }
            Tok::LParen { .. } => {
                let inner = self.term(TOP)?;
                self.expect(Tok::RParen, "')'")?;
                Ok((inner, 0))
            }
            Tok::Op(name) => {
                if let Some(Tok::LParen { adjacent: true }) = self.peek() {
                    self.bump();
                    let args = self.args()?;
                    return Ok((Raw::App { name, args, pos }, 0));
                }
                if name == "-" && Self::starts_term(self.peek()) {
                    let prec = NEGATION.min(max);
                    let operand = self.term(prec)?;
                    return Ok((
                        Raw::App {
                            name,
                            args: vec![operand],
                            pos,
                        },
                        prec,
                    ));
                }
                // A bare operator used as a name, e.g. inside `property(...)`.
                Ok((
                    Raw::App {
                        name,
                        args: Vec::new(),
                        pos,
                    },
                    0,
                ))
            }
            other => Err(InputError::at(
                pos,
                format!("unexpected {}", describe(&other)),
            )),
        }
    }

    fn quantified(&mut self, exists: bool, pos: Pos, max: u32) -> Result<(Raw, u32), InputError> {
        let mut vars = Vec::new();
        while let Some(Tok::Ident(name)) = self.peek().cloned() {
            let is_keyword = name == "all" || name == "exists";
            if !vars.is_empty() {
                if is_keyword {
                    break;
                }
                let next = self.peek_at(1);
                let is_functor = matches!(next, Some(Tok::LParen { adjacent: true }));
                let continues = matches!(
                    next,
                    Some(Tok::Ident(_) | Tok::Number(_) | Tok::LParen { adjacent: false })
                ) || matches!(next, Some(Tok::Op(op)) if op == "-");
                if is_functor || !continues {
                    break;
                }
            }
            self.bump();
            vars.push(name);
        }
        if vars.is_empty() {
            return Err(InputError::at(pos, "quantifier without variables"));
        }
        let prec = NEGATION.min(max);
        let body = self.term(prec)?;
        Ok((
            Raw::Quant {
                exists,
                vars,
                body: Box::new(body),
                pos,
            },
            prec,
        ))
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Number(n) => format!("'{n}'"),
        Tok::Op(s) => format!("'{s}'"),
        Tok::LParen { .. } => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
    }
}
