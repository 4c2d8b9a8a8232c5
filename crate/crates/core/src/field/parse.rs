//! Text grammar for polynomials and rational functions.
//!
//! ```text
//! rational := expr [ "/" expr ]
//! expr     := [ "+" | "-" ] term { ("+" | "-") term }
//! term     := factor { "*" factor }
//! factor   := atom [ "^" int ]
//! atom     := int | ident | "(" expr ")"
//! ```

use super::{FieldRef, Polynomial, RationalFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Token,
    line: usize,
    column: usize,
}

fn tokenize(s: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '[' => Some(Token::LBracket),
            ']' => Some(Token::RBracket),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, column: c0 });
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Token::Int(chars[start..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Token::Ident(chars[start..i].iter().collect())
        } else {
            return Err(Error::Parse {
                line: l0,
                column: c0,
                message: format!("unexpected character {c:?}"),
            });
        };
        column += i - start;
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    out.push(Spanned { tok: Token::End, line, column });
    Ok(out)
}

/// Recursive-descent parser over a token stream; shared with the operator grammar.
pub struct Parser {
    field: FieldRef,
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    pub fn new(field: &FieldRef, s: &str) -> Result<Self> {
        Ok(Parser {
            field: field.clone(),
            toks: tokenize(s)?,
            pos: 0,
        })
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Token::End
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Parse {
            line: s.line,
            column: s.column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, t: Token, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn expect_end(&self) -> Result<()> {
        match self.peek() {
            Token::End => Ok(()),
            Token::Slash => Err(self.error("only a single top-level '/' is allowed")),
            _ => Err(self.error("unexpected trailing input")),
        }
    }

    /// A non-negative integer literal.
    pub fn int(&mut self) -> Result<u64> {
        match self.peek().clone() {
            Token::Int(s) => {
                let v = s.parse::<u64>().map_err(|_| self.error("integer too large"))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn int_mod_p(&self, s: &str) -> u64 {
        let p = self.field.p();
        s.bytes().fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % p)
    }

    pub fn expr(&mut self) -> Result<Polynomial> {
        let mut neg = false;
        match self.peek() {
            Token::Minus => {
                neg = true;
                self.bump();
            }
            Token::Plus => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while *self.peek() == Token::Star {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    pub fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let e = self.int()?;
            if e > u32::MAX as u64 {
                return Err(self.error("exponent too large"));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek().clone() {
            Token::Int(s) => {
                self.bump();
                Ok(Polynomial::constant(&self.field, self.int_mod_p(&s)))
            }
            Token::Ident(name) => match self.field.var_index(&name) {
                Some(i) => {
                    self.bump();
                    Ok(Polynomial::var(&self.field, i))
                }
                None => Err(self.error(format!("unknown variable {name}"))),
            },
            Token::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() == Token::Slash {
                    return Err(self.error("division is only allowed at the top level"));
                }
                self.expect(Token::RParen, "')'")?;
                Ok(e)
            }
            Token::End => Err(self.error("unexpected end of input")),
            t => Err(self.error(format!("unexpected token {t:?}"))),
        }
    }

    /// expr [ "/" expr ]
    pub fn rational(&mut self) -> Result<RationalFunction> {
        let num = self.expr()?;
        if *self.peek() == Token::Slash {
            self.bump();
            let den = self.expr()?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            return RationalFunction::normalize(num, den);
        }
        Ok(RationalFunction::from_poly(num))
    }
}

pub fn parse_polynomial(field: &FieldRef, s: &str) -> Result<Polynomial> {
    let mut p = Parser::new(field, s)?;
    let e = p.expr()?;
    if *p.peek() == Token::Slash {
        return Err(p.error("division is not allowed in a polynomial"));
    }
    p.expect_end()?;
    Ok(e)
}

pub fn parse_rational(field: &FieldRef, s: &str) -> Result<RationalFunction> {
    let mut p = Parser::new(field, s)?;
    let r = p.rational()?;
    p.expect_end()?;
    Ok(r)
}
