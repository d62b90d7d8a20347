//! Concrete syntax.
//!
//! Declarations: `prob a, b(1).` / `prop p, q(2).`
//! Formulas: `&`, `|`, `->` (right associative), `<->`, and the tight
//! unary prefixes `~ ? ! box nabla forall x. exists x.`; constants `bot`
//! and `0` (with `top` and `1` accepted as abbreviations).
//!
//! `~`, `<->`, `top`, `1`, `box` and `nabla` are sugar: elaboration
//! expands them into the nine core constructors, choosing the falsity
//! constant of the operand's sort for `~`.

use std::fmt;

use thiserror::Error;

use crate::formula::{typecheck, Formula, FormulaError, Signature, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Question,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    Num(usize),
    Plus,
    Assign, // :=
    Colon,
    LBracket,
    RBracket,
    Turnstile, // |-
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Ident(s) => s.as_str(),
            Token::LParen => "(",
            Token::RParen => ")",
            Token::Comma => ",",
            Token::Dot => ".",
            Token::Tilde => "~",
            Token::Question => "?",
            Token::Bang => "!",
            Token::Amp => "&",
            Token::Pipe => "|",
            Token::Arrow => "->",
            Token::Iff => "<->",
            Token::Num(n) => return write!(f, "{n}"),
            Token::Plus => "+",
            Token::Assign => ":=",
            Token::Colon => ":",
            Token::LBracket => "[",
            Token::RBracket => "]",
            Token::Turnstile => "|-",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("{0}")]
    Formula(#[from] FormulaError),
    #[error("{0}")]
    Malformed(String),
}

pub fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '#' => {
                // comment to end of line
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            ',' => {
                chars.next();
                out.push(Token::Comma);
            }
            '.' => {
                chars.next();
                out.push(Token::Dot);
            }
            '~' => {
                chars.next();
                out.push(Token::Tilde);
            }
            '?' => {
                chars.next();
                out.push(Token::Question);
            }
            '!' => {
                chars.next();
                out.push(Token::Bang);
            }
            '&' => {
                chars.next();
                out.push(Token::Amp);
            }
            '[' => {
                chars.next();
                out.push(Token::LBracket);
            }
            ']' => {
                chars.next();
                out.push(Token::RBracket);
            }
            '|' => {
                chars.next();
                if chars.peek() == Some(&'-') {
                    chars.next();
                    out.push(Token::Turnstile);
                } else {
                    out.push(Token::Pipe);
                }
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    out.push(Token::Arrow);
                } else {
                    return Err(ParseError::UnexpectedChar('-'));
                }
            }
            '<' => {
                chars.next();
                if chars.peek() == Some(&'-') {
                    chars.next();
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        out.push(Token::Iff);
                    } else {
                        return Err(ParseError::UnexpectedChar('-'));
                    }
                } else {
                    return Err(ParseError::UnexpectedChar('<'));
                }
            }
            ':' => {
                chars.next();
                if chars.peek() == Some(&'=') {
                    chars.next();
                    out.push(Token::Assign);
                } else {
                    out.push(Token::Colon);
                }
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            c if c.is_ascii_digit() => {
                let mut n = 0usize;
                while let Some(&c) = chars.peek() {
                    if let Some(d) = c.to_digit(10) {
                        n = n * 10 + d as usize;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Num(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(s));
            }
            other => return Err(ParseError::UnexpectedChar(other)),
        }
    }
    Ok(out)
}

/// Unelaborated formulas, as written. `Ident` covers atoms; term
/// arguments are bare identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surface {
    Ident(String, Vec<String>),
    Bot,
    Zero,
    Top,
    One,
    Neg(Box<Surface>),
    Wn(Box<Surface>),
    Oc(Box<Surface>),
    Boxed(Box<Surface>),
    Nabla(Box<Surface>),
    And(Box<Surface>, Box<Surface>),
    Or(Box<Surface>, Box<Surface>),
    Imp(Box<Surface>, Box<Surface>),
    Iff(Box<Surface>, Box<Surface>),
    Forall(String, Box<Surface>),
    Exists(String, Box<Surface>),
}

pub struct TokenStream<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> TokenStream<'a> {
    pub fn new(toks: &'a [Token]) -> Self {
        TokenStream { toks, pos: 0 }
    }

    pub fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    pub fn next_tok(&mut self) -> Result<&Token, ParseError> {
        let t = self.toks.get(self.pos).ok_or(ParseError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    pub fn expect(&mut self, t: &Token) -> Result<(), ParseError> {
        let got = self.next_tok()?;
        if got == t {
            Ok(())
        } else {
            Err(ParseError::UnexpectedToken(got.to_string()))
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::UnexpectedToken(t.to_string())),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.next_tok()? {
            Token::Ident(s) => Ok(s.clone()),
            other => Err(ParseError::UnexpectedToken(other.to_string())),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "forall", "exists", "box", "nabla", "bot", "top", "prob", "prop",
];

pub fn parse_surface_stream(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    parse_iff(ts)
}

fn parse_iff(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    let lhs = parse_imp(ts)?;
    if ts.peek() == Some(&Token::Iff) {
        ts.next_tok()?;
        let rhs = parse_imp(ts)?;
        Ok(Surface::Iff(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_imp(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    let lhs = parse_or(ts)?;
    if ts.peek() == Some(&Token::Arrow) {
        ts.next_tok()?;
        let rhs = parse_imp(ts)?; // right associative
        Ok(Surface::Imp(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_or(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    let mut lhs = parse_and(ts)?;
    while ts.peek() == Some(&Token::Pipe) {
        ts.next_tok()?;
        let rhs = parse_and(ts)?;
        lhs = Surface::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_and(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    let mut lhs = parse_unary(ts)?;
    while ts.peek() == Some(&Token::Amp) {
        ts.next_tok()?;
        let rhs = parse_unary(ts)?;
        lhs = Surface::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_unary(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    match ts.peek() {
        Some(Token::Tilde) => {
            ts.next_tok()?;
            Ok(Surface::Neg(Box::new(parse_unary(ts)?)))
        }
        Some(Token::Question) => {
            ts.next_tok()?;
            Ok(Surface::Wn(Box::new(parse_unary(ts)?)))
        }
        Some(Token::Bang) => {
            ts.next_tok()?;
            Ok(Surface::Oc(Box::new(parse_unary(ts)?)))
        }
        Some(Token::Ident(s)) if s == "box" => {
            ts.next_tok()?;
            Ok(Surface::Boxed(Box::new(parse_unary(ts)?)))
        }
        Some(Token::Ident(s)) if s == "nabla" => {
            ts.next_tok()?;
            Ok(Surface::Nabla(Box::new(parse_unary(ts)?)))
        }
        Some(Token::Ident(s)) if s == "forall" || s == "exists" => {
            let kw = s.clone();
            ts.next_tok()?;
            let var = ts.ident()?;
            if KEYWORDS.contains(&var.as_str()) {
                return Err(ParseError::Malformed(format!(
                    "reserved word {var} cannot be a variable"
                )));
            }
            ts.expect(&Token::Dot)?;
            let body = parse_unary(ts)?;
            Ok(if kw == "forall" {
                Surface::Forall(var, Box::new(body))
            } else {
                Surface::Exists(var, Box::new(body))
            })
        }
        _ => parse_primary(ts),
    }
}

fn parse_primary(ts: &mut TokenStream) -> Result<Surface, ParseError> {
    match ts.next_tok()? {
        Token::Num(0) => Ok(Surface::Zero),
        Token::Num(1) => Ok(Surface::One),
        Token::Num(n) => Err(ParseError::UnexpectedToken(n.to_string())),
        Token::LParen => {
            let inner = parse_iff(ts)?;
            ts.expect(&Token::RParen)?;
            Ok(inner)
        }
        Token::Ident(s) if s == "bot" => Ok(Surface::Bot),
        Token::Ident(s) if s == "top" => Ok(Surface::Top),
        Token::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
            Err(ParseError::UnexpectedToken(s.clone()))
        }
        Token::Ident(s) => {
            let name = s.clone();
            let mut args = Vec::new();
            if ts.peek() == Some(&Token::LParen) {
                ts.next_tok()?;
                loop {
                    args.push(ts.ident()?);
                    match ts.next_tok()? {
                        Token::Comma => continue,
                        Token::RParen => break,
                        other => return Err(ParseError::UnexpectedToken(other.to_string())),
                    }
                }
            }
            Ok(Surface::Ident(name, args))
        }
        other => Err(ParseError::UnexpectedToken(other.to_string())),
    }
}

pub fn parse_surface(input: &str) -> Result<Surface, ParseError> {
    let toks = lex(input)?;
    let mut ts = TokenStream::new(&toks);
    let s = parse_surface_stream(&mut ts)?;
    ts.expect_end()?;
    Ok(s)
}

/// Expand abbreviations and check sorts in one pass.
pub fn elaborate(surface: &Surface, sig: &Signature) -> Result<(Formula, Sort), ParseError> {
    let f = elab(surface, sig)?;
    let sort = typecheck(&f, sig)?;
    Ok((f, sort))
}

fn elab(surface: &Surface, sig: &Signature) -> Result<Formula, ParseError> {
    Ok(match surface {
        Surface::Ident(name, args) => {
            Formula::Atom(name.clone(), args.iter().map(Term::var).collect())
        }
        Surface::Bot => Formula::FalseI,
        Surface::Zero => Formula::FalseC,
        Surface::Top => Formula::neg(Formula::FalseI, Sort::Problem),
        Surface::One => Formula::neg(Formula::FalseC, Sort::Proposition),
        Surface::Neg(inner) => {
            let f = elab(inner, sig)?;
            let sort = typecheck(&f, sig)?;
            Formula::neg(f, sort)
        }
        Surface::Wn(inner) => Formula::wn(elab(inner, sig)?),
        Surface::Oc(inner) => Formula::oc(elab(inner, sig)?),
        Surface::Boxed(inner) => Formula::boxed(elab(inner, sig)?),
        Surface::Nabla(inner) => Formula::nabla(elab(inner, sig)?),
        Surface::And(l, r) => Formula::and(elab(l, sig)?, elab(r, sig)?),
        Surface::Or(l, r) => Formula::or(elab(l, sig)?, elab(r, sig)?),
        Surface::Imp(l, r) => Formula::imp(elab(l, sig)?, elab(r, sig)?),
        Surface::Iff(l, r) => Formula::iff(elab(l, sig)?, elab(r, sig)?),
        Surface::Forall(v, b) => Formula::forall(v.clone(), elab(b, sig)?),
        Surface::Exists(v, b) => Formula::exists(v.clone(), elab(b, sig)?),
    })
}

/// Parse and typecheck a formula over `sig`.
pub fn parse_formula(input: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let (f, _) = elaborate(&parse_surface(input)?, sig)?;
    Ok(f)
}

/// Parse a signature: a sequence of `prob ...` / `prop ...` declarations,
/// each terminated by a dot.
pub fn parse_signature(input: &str) -> Result<Signature, ParseError> {
    let toks = lex(input)?;
    let mut ts = TokenStream::new(&toks);
    let mut sig = Signature::new();
    while !ts.at_end() {
        let sort = match ts.next_tok()? {
            Token::Ident(s) if s == "prob" => Sort::Problem,
            Token::Ident(s) if s == "prop" => Sort::Proposition,
            other => return Err(ParseError::UnexpectedToken(other.to_string())),
        };
        loop {
            let name = ts.ident()?;
            if KEYWORDS.contains(&name.as_str()) {
                return Err(ParseError::Malformed(format!(
                    "reserved word {name} cannot be an atom"
                )));
            }
            let mut arity = 0;
            if ts.peek() == Some(&Token::LParen) {
                ts.next_tok()?;
                arity = match ts.next_tok()? {
                    Token::Num(n) => *n,
                    other => return Err(ParseError::UnexpectedToken(other.to_string())),
                };
                ts.expect(&Token::RParen)?;
            }
            sig.declare(name, sort, arity)?;
            match ts.next_tok()? {
                Token::Comma => continue,
                Token::Dot => break,
                other => return Err(ParseError::UnexpectedToken(other.to_string())),
            }
        }
    }
    Ok(sig)
}
