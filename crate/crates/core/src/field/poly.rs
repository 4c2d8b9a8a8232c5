use super::{add_mod, inv_mod, mul_mod, sub_mod, Exp, Field, FieldRef};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Sparse polynomial over F_p in the variables of a [`Field`].
///
/// Terms are keyed by exponent vector; the lexicographic order of the map is the
/// monomial order, so the last entry is the leading term.
#[derive(Clone)]
pub struct Polynomial {
    field: FieldRef,
    terms: BTreeMap<Exp, u64>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && Field::same(&self.field, &other.field)
    }
}
impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Polynomial {
    pub fn zero(field: &FieldRef) -> Self {
        Polynomial {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &FieldRef, c: u64) -> Self {
        let mut t = BTreeMap::new();
        let c = c % field.p();
        if c != 0 {
            t.insert(field.zero_exp(), c);
        }
        Polynomial {
            field: field.clone(),
            terms: t,
        }
    }

    pub fn one(field: &FieldRef) -> Self {
        Self::constant(field, 1)
    }

    pub fn var(field: &FieldRef, i: usize) -> Self {
        Self::monomial(field, field.unit_exp(i), 1)
    }

    pub fn monomial(field: &FieldRef, exp: Exp, c: u64) -> Self {
        debug_assert_eq!(exp.len(), field.nvars());
        let mut t = BTreeMap::new();
        let c = c % field.p();
        if c != 0 {
            t.insert(exp, c);
        }
        Polynomial {
            field: field.clone(),
            terms: t,
        }
    }

    /// Build from raw terms, dropping zero coefficients and merging duplicates.
    pub fn from_terms(field: &FieldRef, terms: impl IntoIterator<Item = (Exp, u64)>) -> Self {
        let p = field.p();
        let mut map: BTreeMap<Exp, u64> = BTreeMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), field.nvars());
            let c = c % p;
            if c == 0 {
                continue;
            }
            let slot = map.entry(e).or_insert(0);
            *slot = add_mod(*slot, c, p);
        }
        map.retain(|_, c| *c != 0);
        Polynomial {
            field: field.clone(),
            terms: map,
        }
    }

    pub(crate) fn from_map(field: &FieldRef, terms: BTreeMap<Exp, u64>) -> Self {
        Polynomial {
            field: field.clone(),
            terms,
        }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn terms(&self) -> &BTreeMap<Exp, u64> {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value() == 1
    }

    /// The constant term.
    pub fn constant_value(&self) -> u64 {
        self.terms.get(&self.field.zero_exp()).copied().unwrap_or(0)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Leading term under lex order.
    pub fn leading(&self) -> Option<(&Exp, u64)> {
        self.terms.iter().next_back().map(|(e, c)| (e, *c))
    }

    pub fn leading_coeff(&self) -> u64 {
        self.leading().map(|(_, c)| c).unwrap_or(0)
    }

    pub fn coeff(&self, e: &Exp) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    /// Variables with a positive exponent somewhere.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.field.nvars()).filter(|&v| self.involves(v)).collect()
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.p();
        let c = c % p;
        if c == 0 {
            return Self::zero(&self.field);
        }
        let terms = self.terms.iter().map(|(e, a)| (e.clone(), mul_mod(*a, c, p))).collect();
        Polynomial::from_map(&self.field, terms)
    }

    /// Multiply by the monomial x^e.
    pub fn shift(&self, e: &Exp) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(f, c)| {
                let mut g = f.clone();
                for (a, b) in g.iter_mut().zip(e.iter()) {
                    *a += *b;
                }
                (g, *c)
            })
            .collect();
        Polynomial::from_map(&self.field, terms)
    }

    /// Divide so that the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, 1)) => self.clone(),
            Some((_, c)) => self.scale(inv_mod(c, self.p())),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return Self::one(&self.field);
        }
        let p = self.p();
        // f^e = prod_i (f^{p^i})^{d_i} with base-p digits d_i; p-th powers are free.
        let mut result = Self::one(&self.field);
        let base = self;
        let mut e = e;
        let mut r = 0u32;
        while e > 0 {
            let d = e % p;
            if d > 0 {
                let fb = if r == 0 { base.clone() } else { base.frobenius(r) };
                let mut acc = fb.clone();
                for _ in 1..d {
                    acc = &acc * &fb;
                }
                result = &result * &acc;
            }
            e /= p;
            r += 1;
        }
        result
    }

    /// f^{p^r}: over F_p this only scales exponents.
    pub fn frobenius(&self, r: u32) -> Self {
        let q = self.p().pow(r) as u32;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().map(|x| x * q).collect(), *c))
            .collect();
        Polynomial::from_map(&self.field, terms)
    }

    /// g with g^{p^r} = self, if every exponent is divisible by p^r.
    pub fn pth_root(&self, r: u32) -> Option<Self> {
        let q = self.p().pow(r) as u32;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.iter().any(|x| x % q != 0) {
                return None;
            }
            terms.insert(e.iter().map(|x| x / q).collect(), *c);
        }
        Some(Polynomial::from_map(&self.field, terms))
    }

    /// Lex division: returns (q, r) with self = q*d + r and no term of r divisible by lt(d).
    pub fn divrem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p();
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c)).unwrap();
        let dinv = inv_mod(dc, p);
        let mut rem = self.terms.clone();
        let mut quo: BTreeMap<Exp, u64> = BTreeMap::new();
        let mut out: BTreeMap<Exp, u64> = BTreeMap::new();
        while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (e.clone(), *c)) {
            if e.iter().zip(de.iter()).all(|(a, b)| a >= b) {
                let qe: Exp = e.iter().zip(de.iter()).map(|(a, b)| a - b).collect();
                let qc = mul_mod(c, dinv, p);
                for (te, tc) in &d.terms {
                    let me: Exp = te.iter().zip(qe.iter()).map(|(a, b)| a + b).collect();
                    let sub = mul_mod(*tc, qc, p);
                    let slot = rem.entry(me.clone()).or_insert(0);
                    *slot = sub_mod(*slot, sub, p);
                    if *slot == 0 {
                        rem.remove(&me);
                    }
                }
                let slot = quo.entry(qe).or_insert(0);
                *slot = add_mod(*slot, qc, p);
            } else {
                rem.remove(&e);
                out.insert(e, c);
            }
        }
        quo.retain(|_, c| *c != 0);
        (
            Polynomial::from_map(&self.field, quo),
            Polynomial::from_map(&self.field, out),
        )
    }

    /// Exact quotient, or None if d does not divide self.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_constant() {
            let c = d.constant_value();
            return if c == 0 { None } else { Some(self.scale(inv_mod(c, self.p()))) };
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Substitute for each variable; the images live in `target`.
    pub fn eval_with(&self, images: &[super::RationalFunction]) -> super::RationalFunction {
        let target = images[0].field().clone();
        let mut acc = super::RationalFunction::zero(&target);
        for (e, c) in &self.terms {
            let mut t = super::RationalFunction::constant(&target, *c);
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &images[v].pow(k as u64);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Evaluate at a point of F_p^n.
    pub fn eval_point(&self, point: &[u64]) -> u64 {
        let p = self.p();
        let mut acc = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (v, &k) in e.iter().enumerate() {
                t = mul_mod(t, super::pow_mod(point[v], k as u64, p), p);
            }
            acc = add_mod(acc, t, p);
        }
        acc
    }

    /// Re-home the polynomial in another field with the same prime and variable count.
    pub fn with_field(&self, field: &FieldRef) -> Self {
        assert_eq!(field.p(), self.p());
        assert_eq!(field.nvars(), self.field.nvars());
        Polynomial::from_map(field, self.terms.clone())
    }

    fn combine(&self, other: &Polynomial, negate: bool) -> Polynomial {
        assert!(Field::same(&self.field, &other.field), "polynomials over different fields");
        let p = self.p();
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let c = if negate { (p - c) % p } else { *c };
            match terms.get_mut(e) {
                Some(slot) => {
                    *slot = add_mod(*slot, c, p);
                    if *slot == 0 {
                        terms.remove(e);
                    }
                }
                None => {
                    terms.insert(e.clone(), c);
                }
            }
        }
        Polynomial::from_map(&self.field, terms)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(self.p() - 1)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert!(Field::same(&self.field, &rhs.field), "polynomials over different fields");
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(&self.field);
        }
        let p = self.p();
        let mut terms: BTreeMap<Exp, u64> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exp = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                let c = mul_mod(*c1, *c2, p);
                let slot = terms.entry(e).or_insert(0);
                *slot = add_mod(*slot, c, p);
            }
        }
        terms.retain(|_, c| *c != 0);
        Polynomial::from_map(&self.field, terms)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &[String], e: &Exp) -> fmt::Result {
    let mut first = true;
    for (v, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if k == 1 {
            write!(f, "{}", vars[v])?;
        } else {
            write!(f, "{}^{}", vars[v], k)?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.field.vars();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let is_const = e.iter().all(|&k| k == 0);
            if is_const {
                write!(f, "{c}")?;
            } else {
                if *c != 1 {
                    write!(f, "{c}*")?;
                }
                write_monomial(f, vars, e)?;
            }
        }
        Ok(())
    }
}
