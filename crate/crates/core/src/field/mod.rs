//! Exact arithmetic in K = F_p(x_1, ..., x_n) and its subfields K^{p^r}.

mod gcd;
mod gfq;
mod parse;
mod pbasis;
mod poly;
mod rational;

pub use gcd::poly_gcd;
pub use parse::{parse_polynomial, parse_rational, Parser, Token};
pub use pbasis::{basis_exponents, member_subfield, pbasis_decompose, PBasisCoordinates};
pub use poly::Polynomial;
pub use rational::RationalFunction;

use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::sync::Arc;

/// Exponent vector, one entry per field variable.
pub type Exp = SmallVec<[u32; 6]>;

/// Default cap on divided-power orders: exponents stay below p^H.
pub const DEFAULT_HEIGHT: u32 = 4;

/// The field K = F_p(vars), together with the height budget used by operators over it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
    vars: Vec<String>,
    height: u32,
}

pub type FieldRef = Arc<Field>;

impl Field {
    pub fn new(p: u64, vars: &[&str]) -> Result<FieldRef> {
        Self::with_height(p, vars.iter().map(|s| s.to_string()).collect(), DEFAULT_HEIGHT)
    }

    pub fn with_height(p: u64, vars: Vec<String>, height: u32) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if p > (1 << 31) {
            return Err(Error::Invalid(format!("prime {p} is too large")));
        }
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Invalid(format!("bad variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate variable {v}")));
            }
        }
        Ok(Arc::new(Field { p, vars, height }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// p^H, the largest admissible divided-power order.
    pub fn order_bound(&self) -> u64 {
        self.p.saturating_pow(self.height)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn zero_exp(&self) -> Exp {
        SmallVec::from_elem(0, self.vars.len())
    }

    pub fn unit_exp(&self, i: usize) -> Exp {
        let mut e = self.zero_exp();
        e[i] = 1;
        e
    }

    pub(crate) fn same(a: &FieldRef, b: &FieldRef) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b) % p
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Reduce a signed integer into F_p.
pub fn reduce_i64(c: i64, p: u64) -> u64 {
    c.rem_euclid(p as i64) as u64
}
