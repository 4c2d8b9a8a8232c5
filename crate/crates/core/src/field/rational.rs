use super::{inv_mod, poly_gcd, FieldRef, Polynomial};
use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element of K in canonical form: coprime numerator and denominator, with the
/// denominator's lex-leading coefficient equal to 1.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

impl RationalFunction {
    /// Reduce num/den to canonical form.
    pub fn normalize(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let field = num.field().clone();
        if num.is_zero() {
            return Ok(Self::zero(&field));
        }
        if den.is_constant() {
            let inv = inv_mod(den.constant_value(), num.p());
            return Ok(RationalFunction {
                num: num.scale(inv),
                den: Polynomial::one(&field),
            });
        }
        let g = poly_gcd(&num, &den);
        let (n, d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Ok(Self::from_coprime(n, d))
    }

    /// Canonical form of h / base^k, cancelling against one copy of base at a time so
    /// that every gcd involves only the small base.
    pub(crate) fn over_power(h: Polynomial, base: &Polynomial, k: u64) -> Self {
        if k == 0 || base.is_constant() {
            return Self::normalize(h, base.pow(k)).expect("nonzero base");
        }
        if h.is_zero() {
            return Self::zero(h.field());
        }
        let mut h = h;
        let mut factors: Vec<Polynomial> = Vec::new();
        for i in 0..k {
            let mut f = base.clone();
            loop {
                let g = poly_gcd(&h, &f);
                if g.is_one() {
                    break;
                }
                h = h.div_exact(&g).expect("gcd divides");
                f = f.div_exact(&g).expect("gcd divides");
            }
            if f.is_one() || f.is_constant() {
                if !f.is_one() {
                    h = h.scale(inv_mod(f.constant_value(), h.p()));
                }
                continue;
            }
            // Once a full copy survives, the remaining copies are coprime to h as well.
            if f == *base {
                let rest = base.pow(k - i - 1);
                factors.push(&f * &rest);
                break;
            }
            factors.push(f);
        }
        let den = factors.iter().fold(Polynomial::one(h.field()), |acc, f| &acc * f);
        Self::from_coprime(h, den)
    }

    /// self / extra, given that extra is coprime to self's numerator.
    pub(crate) fn with_extra_denominator(&self, extra: &Polynomial) -> Self {
        if extra.is_one() {
            return self.clone();
        }
        Self::from_coprime(self.num.clone(), &self.den * extra)
    }

    /// Assumes gcd(num, den) = 1; only fixes the unit.
    fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading_coeff();
        if lc == 1 {
            return RationalFunction { num, den };
        }
        let inv = inv_mod(lc, num.p());
        RationalFunction {
            num: num.scale(inv),
            den: den.scale(inv),
        }
    }

    pub fn zero(field: &FieldRef) -> Self {
        RationalFunction {
            num: Polynomial::zero(field),
            den: Polynomial::one(field),
        }
    }

    pub fn one(field: &FieldRef) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &FieldRef, c: u64) -> Self {
        RationalFunction {
            num: Polynomial::constant(field, c),
            den: Polynomial::one(field),
        }
    }

    pub fn var(field: &FieldRef, i: usize) -> Self {
        Self::from_poly(Polynomial::var(field, i))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.field());
        RationalFunction { num: p, den }
    }

    pub fn field(&self) -> &FieldRef {
        self.num.field()
    }

    pub fn p(&self) -> u64 {
        self.num.p()
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn scale(&self, c: u64) -> Self {
        RationalFunction {
            num: self.num.scale(c),
            den: if c % self.p() == 0 {
                Polynomial::one(self.field())
            } else {
                self.den.clone()
            },
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u64) -> Self {
        RationalFunction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// f^{p^r}.
    pub fn frobenius(&self, r: u32) -> Self {
        RationalFunction {
            num: self.num.frobenius(r),
            den: self.den.frobenius(r),
        }
    }

    /// g with g^{p^r} = f. Canonical forms of p^r-th powers are p^r-th powers, so the
    /// test is exponent divisibility of numerator and denominator.
    pub fn pth_root(&self, r: u32) -> Result<Self> {
        match (self.num.pth_root(r), self.den.pth_root(r)) {
            (Some(num), Some(den)) => Ok(RationalFunction { num, den }),
            _ => Err(Error::NotAPower(r)),
        }
    }

    /// Substitute rational images for the variables.
    pub fn eval_with(&self, images: &[RationalFunction]) -> Result<Self> {
        let n = self.num.eval_with(images);
        let d = self.den.eval_with(images);
        n.checked_div(&d)
    }

    /// Value at a point of F_p^n, or None when the denominator vanishes there.
    pub fn eval_point(&self, point: &[u64]) -> Option<u64> {
        let d = self.den.eval_point(point);
        if d == 0 {
            return None;
        }
        let p = self.p();
        Some(self.num.eval_point(point) * inv_mod(d, p) % p)
    }

    pub fn with_field(&self, field: &FieldRef) -> Self {
        RationalFunction {
            num: self.num.with_field(field),
            den: self.den.with_field(field),
        }
    }

    pub fn parse(field: &FieldRef, s: &str) -> Result<Self> {
        super::parse_rational(field, s)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RationalFunction::from_poly(num);
            }
            return RationalFunction::normalize(num, self.den.clone()).expect("nonzero");
        }
        if self.den.is_one() {
            let num = &(&self.num * &rhs.den) + &rhs.num;
            return RationalFunction::from_coprime(num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            let num = &self.num + &(&rhs.num * &self.den);
            return RationalFunction::from_coprime(num, self.den.clone());
        }
        let g = poly_gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RationalFunction::from_coprime(num, &self.den * &rhs.den);
        }
        let b1 = self.den.div_exact(&g).unwrap();
        let d1 = rhs.den.div_exact(&g).unwrap();
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return RationalFunction::zero(self.field());
        }
        // b1 and d1 are coprime, so any common factor of num and b·d1 divides g.
        let g2 = poly_gcd(&num, &g);
        if g2.is_one() {
            return RationalFunction::from_coprime(num, &self.den * &d1);
        }
        let den = &(&b1 * &d1) * &g.div_exact(&g2).unwrap();
        RationalFunction::from_coprime(num.div_exact(&g2).unwrap(), den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.field());
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), rhs.den.div_exact(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        RationalFunction::from_coprime(&a * &c, &b * &d)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
