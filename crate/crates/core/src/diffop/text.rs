//! Operator text format: `coeff * d[v]^[i] * d[w]^[j] + ...`.

use super::DiffOp;
use crate::error::Result;
use crate::field::{FieldRef, Parser, RationalFunction, Token};
use std::fmt;

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.field.vars();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_constant() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})")?;
            }
            for (v, &o) in e.iter().enumerate() {
                if o > 0 {
                    write!(f, " * d[{}]^[{}]", vars[v], o)?;
                }
            }
        }
        Ok(())
    }
}

pub(super) fn parse_diffop(field: &FieldRef, s: &str) -> Result<DiffOp> {
    let mut p = Parser::new(field, s)?;
    let mut acc = DiffOp::zero(field);
    let mut negate = false;
    match p.peek() {
        Token::Minus => {
            negate = true;
            p.bump();
        }
        Token::Plus => {
            p.bump();
        }
        _ => {}
    }
    loop {
        let term = parse_term(&mut p)?;
        acc = if negate { &acc - &term } else { &acc + &term };
        match p.peek() {
            Token::Plus => negate = false,
            Token::Minus => negate = true,
            _ => break,
        }
        p.bump();
    }
    p.expect_end()?;
    Ok(acc)
}

fn is_d(p: &Parser) -> bool {
    matches!(p.peek(), Token::Ident(s) if s == "d") && *p.peek_at(1) == Token::LBracket
}

fn parse_term(p: &mut Parser) -> Result<DiffOp> {
    let field = p.field().clone();
    let mut coeff = RationalFunction::one(&field);
    let mut orders = field.zero_exp();
    let mut seen_d = false;
    loop {
        if is_d(p) {
            p.bump();
            p.bump();
            let name = match p.peek().clone() {
                Token::Ident(n) => n,
                _ => return Err(p.error("expected a variable name")),
            };
            let Some(v) = field.var_index(&name) else {
                return Err(p.error(format!("unknown variable {name}")));
            };
            p.bump();
            p.expect(Token::RBracket, "']'")?;
            let mut order = 1u64;
            if *p.peek() == Token::Caret {
                p.bump();
                p.expect(Token::LBracket, "'['")?;
                order = p.int()?;
                if order == 0 {
                    return Err(p.error("divided-power order must be positive"));
                }
                p.expect(Token::RBracket, "']'")?;
            }
            if orders[v] != 0 {
                // ∂^{[i]}∂^{[j]} = C(i+j, i) ∂^{[i+j]}
                let c = super::binom_mod(orders[v] as u64 + order, order, field.p());
                coeff = coeff.scale(c);
            }
            let total = orders[v] as u64 + order;
            if total > u32::MAX as u64 {
                return Err(p.error("divided-power order too large"));
            }
            orders[v] = total as u32;
            seen_d = true;
        } else {
            if seen_d {
                return Err(p.error("coefficients must precede divided powers"));
            }
            let factor = if *p.peek() == Token::LParen {
                p.bump();
                let r = p.rational()?;
                p.expect(Token::RParen, "')'")?;
                if *p.peek() == Token::Caret {
                    p.bump();
                    r.pow(p.int()?)
                } else {
                    r
                }
            } else {
                RationalFunction::from_poly(p.factor()?)
            };
            coeff = &coeff * &factor;
        }
        if *p.peek() != Token::Star {
            break;
        }
        p.bump();
    }
    if !seen_d {
        if coeff.is_zero() {
            return Ok(DiffOp::zero(&field));
        }
        return Err(p.error("term has no divided power; pure multiplication is not in Diff+"));
    }
    DiffOp::monomial(&field, orders, coeff)
}
