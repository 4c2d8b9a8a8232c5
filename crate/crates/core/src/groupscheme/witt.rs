//! Witt vector addition polynomials, computed over Z and reduced mod p.

use crate::error::{Error, Result};
use crate::field::{Exp, Field, FieldRef, Polynomial};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Addition law S_0, ..., S_{n-1} of length-n Witt vectors over F_p, in X_0..X_{n-1}, Y_0..Y_{n-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittSumData {
    pub p: u64,
    pub length: usize,
    pub polys: Vec<Polynomial>,
}

type IntPoly = BTreeMap<Exp, BigInt>;

fn add_into(acc: &mut IntPoly, other: &IntPoly, sign: i32) {
    for (e, c) in other {
        let slot = acc.entry(e.clone()).or_insert_with(BigInt::zero);
        if sign < 0 {
            *slot -= c;
        } else {
            *slot += c;
        }
    }
    acc.retain(|_, c| !c.is_zero());
}

fn mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Exp = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn pow(a: &IntPoly, mut e: u64, nvars: usize) -> IntPoly {
    let mut result: IntPoly = [(Exp::from_elem(0, nvars), BigInt::one())].into_iter().collect();
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

fn var(nvars: usize, i: usize) -> IntPoly {
    let mut e = Exp::from_elem(0, nvars);
    e[i] = 1;
    [(e, BigInt::one())].into_iter().collect()
}

/// Field with the variables X0..X{n-1}, Y0..Y{n-1}.
pub fn witt_field(p: u64, n: usize) -> Result<FieldRef> {
    let mut names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    names.extend((0..n).map(|i| format!("Y{i}")));
    Field::with_height(p, names, 1)
}

/// Solves w_i(S) = w_i(X) + w_i(Y) with w_i(Z) = Σ_j p^j Z_j^{p^{i-j}} over Z.
pub fn witt_sum_polynomials(p: u64, n: usize) -> Result<WittSumData> {
    if n == 0 {
        return Err(Error::Invalid("Witt length must be positive".into()));
    }
    let field = witt_field(p, n)?;
    let nv = 2 * n;
    let bp = BigInt::from(p);
    let mut lifts: Vec<IntPoly> = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = IntPoly::new();
        for j in 0..=i {
            let coef = bp.pow(j as u32);
            let e = p.pow((i - j) as u32);
            for v in [j, n + j] {
                let mut t = pow(&var(nv, v), e, nv);
                for c in t.values_mut() {
                    *c *= &coef;
                }
                add_into(&mut acc, &t, 1);
            }
        }
        for (j, s) in lifts.iter().enumerate() {
            let mut t = pow(s, p.pow((i - j) as u32), nv);
            let coef = bp.pow(j as u32);
            for c in t.values_mut() {
                *c *= &coef;
            }
            add_into(&mut acc, &t, -1);
        }
        let d = bp.pow(i as u32);
        for c in acc.values_mut() {
            assert!((&*c % &d).is_zero(), "Witt lift is not divisible by p^{i}");
            *c /= &d;
        }
        lifts.push(acc);
    }
    let polys = lifts
        .iter()
        .map(|s| {
            Polynomial::from_terms(
                &field,
                s.iter().map(|(e, c)| (e.clone(), residue(c, p))),
            )
        })
        .collect();
    Ok(WittSumData { p, length: n, polys })
}

fn residue(c: &BigInt, p: u64) -> u64 {
    let bp = BigInt::from(p);
    let mut r = c % &bp;
    if r.is_negative() {
        r += &bp;
    }
    r.try_into().expect("residue fits in u64")
}

impl WittSumData {
    pub fn field(&self) -> &FieldRef {
        self.polys[0].field()
    }

    /// S_i − X_i − Y_i as (coefficient, X-exponents, Y-exponents) with both parts nonzero.
    pub fn tail(&self, i: usize) -> Vec<(u64, Vec<u32>, Vec<u32>)> {
        let n = self.length;
        let mut out = Vec::new();
        for (e, c) in self.polys[i].terms() {
            let (a, b) = e.split_at(n);
            if a.iter().all(|&k| k == 0) || b.iter().all(|&k| k == 0) {
                continue;
            }
            out.push((*c, a.to_vec(), b.to_vec()));
        }
        out
    }

    /// Componentwise sum of two Witt vectors with F_p entries.
    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let point: Vec<u64> = x.iter().chain(y).copied().collect();
        self.polys.iter().map(|s| s.eval_point(&point)).collect()
    }
}
