//! Differential operators on K in normal form: K-coefficients to the left of
//! divided-power monomials ∂^{[α]} = ∏_v ∂_v^{[α_v]}.

mod binom;
mod text;

pub use binom::binom_mod;

use crate::error::{Error, Result};
use crate::field::{basis_exponents, pbasis_decompose, Exp, Field, FieldRef, Polynomial, RationalFunction};
use crate::linalg::Matrix;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A finite sum Σ c_α ∂^{[α]} with every α nonzero, so D(1) = 0.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOp {
    field: FieldRef,
    terms: BTreeMap<Exp, RationalFunction>,
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({self})")
    }
}

fn check_orders(field: &FieldRef, orders: &Exp) -> Result<()> {
    let bound = field.order_bound();
    for &o in orders {
        if o as u64 > bound {
            return Err(Error::OrderBudgetExceeded { order: o as u64, bound });
        }
    }
    Ok(())
}

impl DiffOp {
    pub fn zero(field: &FieldRef) -> Self {
        DiffOp {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// c · ∂^{[orders]}.
    pub fn monomial(field: &FieldRef, orders: Exp, coeff: RationalFunction) -> Result<Self> {
        if orders.len() != field.nvars() {
            return Err(Error::Invalid("order vector has the wrong length".into()));
        }
        if orders.iter().all(|&o| o == 0) {
            if coeff.is_zero() {
                return Ok(Self::zero(field));
            }
            return Err(Error::Invalid("pure multiplication term is not in Diff+".into()));
        }
        check_orders(field, &orders)?;
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(orders, coeff);
        }
        Ok(DiffOp {
            field: field.clone(),
            terms,
        })
    }

    /// ∂_v^{[order]}.
    pub fn partial(field: &FieldRef, v: usize, order: u64) -> Result<Self> {
        let mut e = field.zero_exp();
        e[v] = order as u32;
        Self::monomial(field, e, RationalFunction::one(field))
    }

    /// Σ coeffs[i] · ∂_i.
    pub fn derivation(field: &FieldRef, coeffs: &[RationalFunction]) -> Self {
        assert_eq!(coeffs.len(), field.nvars());
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (field.unit_exp(i), c.clone()))
            .collect();
        DiffOp {
            field: field.clone(),
            terms,
        }
    }

    pub fn from_terms(field: &FieldRef, terms: impl IntoIterator<Item = (Exp, RationalFunction)>) -> Result<Self> {
        let mut acc = Self::zero(field);
        for (e, c) in terms {
            acc = &acc + &Self::monomial(field, e, c)?;
        }
        Ok(acc)
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<Exp, RationalFunction> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, orders: &Exp) -> RationalFunction {
        self.terms
            .get(orders)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(&self.field))
    }

    /// Largest single-variable divided-power order.
    pub fn max_order(&self) -> u64 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|&o| o as u64))
            .max()
            .unwrap_or(0)
    }

    /// Smallest r ≥ 1 with every order below p^r; the operator is K^{p^r}-linear.
    pub fn level(&self) -> u32 {
        let p = self.field.p();
        let m = self.max_order();
        let mut r = 1;
        while p.pow(r) <= m {
            r += 1;
        }
        r
    }

    pub fn left_mul(&self, f: &RationalFunction) -> Self {
        if f.is_zero() {
            return Self::zero(&self.field);
        }
        DiffOp {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f * c)).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        self.left_mul(&RationalFunction::constant(&self.field, c))
    }

    pub fn is_derivation(&self) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == 1)
    }

    /// Coefficients in the ∂_i basis, if this is a derivation.
    pub fn derivation_coeffs(&self) -> Option<Vec<RationalFunction>> {
        if !self.is_derivation() {
            return None;
        }
        Some((0..self.field.nvars()).map(|i| self.coeff(&self.field.unit_exp(i))).collect())
    }

    pub fn apply(&self, f: &RationalFunction) -> RationalFunction {
        let zero = RationalFunction::zero(&self.field);
        if f.is_zero() || self.is_zero() {
            return zero;
        }
        let num = f.numer();
        let den = f.denom();
        if den.is_one() {
            let mut acc = zero;
            for (alpha, c) in &self.terms {
                let d = poly_divided_multi(num, alpha);
                if !d.is_zero() {
                    acc = &acc + &(c * &RationalFunction::from_poly(d));
                }
            }
            return acc;
        }
        // ∂^{[α]}(num/den) = Σ_{β≤α} ∂^{[α−β]}(num)·Q_β / den^{|β|+1}, where
        // Q_β = −Σ_{0<γ≤β} ∂^{[γ]}(den)·Q_{β−γ}·den^{|γ|−1} and Q_0 = 1.
        // Everything is kept over den^m and cancelled once at the end.
        let size = |e: &Exp| e.iter().map(|&x| x as usize).sum::<usize>();
        let m = self.terms.keys().map(size).max().unwrap_or(0) + 1;
        let mut den_pows = vec![Polynomial::one(&self.field)];
        for k in 1..=m {
            den_pows.push(&den_pows[k - 1] * den);
        }
        let mut betas: BTreeSet<Exp> = BTreeSet::new();
        for alpha in self.terms.keys() {
            betas.extend(below(alpha));
        }
        let mut betas: Vec<Exp> = betas.into_iter().collect();
        betas.sort_by_key(size);
        let mut q: BTreeMap<Exp, Polynomial> = BTreeMap::new();
        for beta in &betas {
            if size(beta) == 0 {
                q.insert(beta.clone(), Polynomial::one(&self.field));
                continue;
            }
            let mut acc = Polynomial::zero(&self.field);
            for gamma in below(beta) {
                let g = size(&gamma);
                if g == 0 {
                    continue;
                }
                let dg = poly_divided_multi(den, &gamma);
                if dg.is_zero() {
                    continue;
                }
                let rest: Exp = beta.iter().zip(&gamma).map(|(b, c)| b - c).collect();
                acc = &acc - &(&(&dg * &q[&rest]) * &den_pows[g - 1]);
            }
            q.insert(beta.clone(), acc);
        }
        let mut total = zero;
        for (alpha, c) in &self.terms {
            let mut n_alpha = Polynomial::zero(&self.field);
            for beta in below(alpha) {
                let qb = &q[&beta];
                if qb.is_zero() {
                    continue;
                }
                let rest: Exp = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
                let dn = poly_divided_multi(num, &rest);
                if dn.is_zero() {
                    continue;
                }
                n_alpha = &n_alpha + &(&(&dn * qb) * &den_pows[m - size(&beta) - 1]);
            }
            if !n_alpha.is_zero() {
                total = &total + &(c * &RationalFunction::from_poly(n_alpha));
            }
        }
        if total.is_zero() {
            return total;
        }
        let scaled = RationalFunction::over_power(total.numer().clone(), den, m as u64);
        // total's denominator is coprime to its numerator, hence to scaled's.
        scaled.with_extra_denominator(total.denom())
    }

    /// Normal form of self ∘ other, straightening ∂^{[γ]} past coefficients.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        if !Field::same(&self.field, &other.field) {
            return Err(Error::FieldMismatch);
        }
        let p = self.field.p();
        let mut gammas: BTreeSet<Exp> = BTreeSet::new();
        for alpha in self.terms.keys() {
            for g in below(alpha) {
                gammas.insert(g);
            }
        }
        let gammas: Vec<Exp> = gammas.into_iter().collect();
        let mut acc: BTreeMap<Exp, RationalFunction> = BTreeMap::new();
        for (beta, b) in &other.terms {
            let ders = divided_derivatives(b, &gammas);
            for (alpha, a) in &self.terms {
                for gamma in below(alpha) {
                    let g = &ders[&gamma];
                    if g.is_zero() {
                        continue;
                    }
                    let mut c = 1u64;
                    let mut key = Exp::with_capacity(beta.len());
                    for v in 0..beta.len() {
                        let delta = alpha[v] - gamma[v];
                        c = c * binom_mod((delta + beta[v]) as u64, delta as u64, p) % p;
                        key.push(delta + beta[v]);
                    }
                    if c == 0 {
                        continue;
                    }
                    check_orders(&self.field, &key)?;
                    let term = (a * g).scale(c);
                    let slot = acc.entry(key).or_insert_with(|| RationalFunction::zero(&self.field));
                    *slot = &*slot + &term;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(DiffOp {
            field: self.field.clone(),
            terms: acc,
        })
    }

    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        Ok(&self.compose(other)? - &other.compose(self)?)
    }

    /// e-fold composite by binary powering; e ≥ 1.
    pub fn power(&self, e: u64) -> Result<DiffOp> {
        assert!(e >= 1, "power of an operator needs a positive exponent");
        let mut result: Option<DiffOp> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.compose(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.compose(&base)?;
        }
        Ok(result.unwrap())
    }

    /// Nilpotency index of a derivation, always p^t.
    pub fn derivation_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroOperator);
        }
        if !self.is_derivation() {
            return Err(Error::NotADerivation);
        }
        let p = self.field.p();
        let h = self.field.height();
        let mut cur = self.clone();
        for t in 1..=h {
            cur = cur.power(p)?;
            if cur.is_zero() {
                return Ok(p.pow(t));
            }
        }
        Err(Error::NotNilpotentWithinBudget(h))
    }

    /// Matrix of the operator on the basis x^m (m_i < p^r) of K over K^{p^r}. Column m
    /// holds the coordinates of D(x^m).
    pub fn matrix_over_subfield(&self, r: u32) -> Result<Matrix> {
        let p = self.field.p();
        let m = self.max_order();
        if m >= p.pow(r) {
            return Err(Error::OrderTooHighForLevel { order: m, level: r });
        }
        let basis = basis_exponents(self.field.nvars(), p, r);
        let index: BTreeMap<&Exp, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut mat = Matrix::zeros(&self.field, basis.len(), basis.len());
        for (j, e) in basis.iter().enumerate() {
            let xm = RationalFunction::from_poly(Polynomial::monomial(&self.field, e.clone(), 1));
            let image = self.apply(&xm);
            for (m, c) in pbasis_decompose(&image, r).coords {
                mat.set(index[&m], j, c);
            }
        }
        Ok(mat)
    }

    pub fn parse(field: &FieldRef, s: &str) -> Result<Self> {
        text::parse_diffop(field, s)
    }
}

/// All γ with γ ≤ α componentwise.
fn below(alpha: &Exp) -> Vec<Exp> {
    let mut out: Vec<Exp> = vec![Exp::new()];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for e in &out {
            for k in 0..=a {
                let mut f = e.clone();
                f.push(k);
                next.push(f);
            }
        }
        out = next;
    }
    out
}

/// ∂_v^{[i]} of a polynomial, termwise.
fn poly_divided(f: &Polynomial, v: usize, i: u32) -> Polynomial {
    if i == 0 {
        return f.clone();
    }
    let p = f.p();
    Polynomial::from_terms(
        f.field(),
        f.terms().iter().filter(|(e, _)| e[v] >= i).filter_map(|(e, c)| {
            let b = binom_mod(e[v] as u64, i as u64, p);
            if b == 0 {
                return None;
            }
            let mut g = e.clone();
            g[v] -= i;
            Some((g, c * b % p))
        }),
    )
}

fn poly_divided_multi(f: &Polynomial, alpha: &Exp) -> Polynomial {
    let mut out = f.clone();
    for (v, &a) in alpha.iter().enumerate() {
        if a > 0 {
            out = poly_divided(&out, v, a);
            if out.is_zero() {
                break;
            }
        }
    }
    out
}

/// ∂_v^{[i]}(f) for i = 0..=max.
fn single_var_derivatives(f: &RationalFunction, v: usize, max: u32) -> Vec<RationalFunction> {
    let field = f.field();
    let num = f.numer();
    let den = f.denom();
    if !den.involves(v) {
        return (0..=max)
            .map(|i| {
                let n = poly_divided(num, v, i);
                if den.is_one() {
                    RationalFunction::from_poly(n)
                } else {
                    RationalFunction::normalize(n, den.clone()).expect("nonzero denominator")
                }
            })
            .collect();
    }
    // With f·den = num and h_i = ∂^{[i]}(f)·den^{i+1}, Leibniz gives
    // h_i = ∂^{[i]}(num)·den^i − Σ_{j=1..i} ∂^{[j]}(den)·h_{i−j}·den^{j−1}.
    let dden: Vec<Polynomial> = (0..=max).map(|j| poly_divided(den, v, j)).collect();
    let mut den_pows = vec![Polynomial::one(field)];
    for k in 1..=max as usize {
        den_pows.push(&den_pows[k - 1] * den);
    }
    let mut h: Vec<Polynomial> = vec![num.clone()];
    let mut out = vec![f.clone()];
    for i in 1..=max as usize {
        let mut acc = &poly_divided(num, v, i as u32) * &den_pows[i];
        for j in 1..=i {
            if dden[j].is_zero() || h[i - j].is_zero() {
                continue;
            }
            acc = &acc - &(&(&dden[j] * &h[i - j]) * &den_pows[j - 1]);
        }
        out.push(RationalFunction::over_power(acc.clone(), den, i as u64 + 1));
        h.push(acc);
    }
    out
}

/// ∂^{[β]}(f) for each target β, sharing work across variables.
fn divided_derivatives(f: &RationalFunction, targets: &[Exp]) -> BTreeMap<Exp, RationalFunction> {
    let field = f.field();
    let n = field.nvars();
    let mut states: BTreeMap<Exp, RationalFunction> = BTreeMap::new();
    states.insert(field.zero_exp(), f.clone());
    for v in 0..n {
        let mut next = BTreeMap::new();
        for (key, g) in &states {
            let needed: BTreeSet<u32> = targets
                .iter()
                .filter(|t| t[..v] == key[..v])
                .map(|t| t[v])
                .collect();
            let Some(&max) = needed.iter().next_back() else {
                continue;
            };
            let ders = if g.is_zero() {
                vec![g.clone(); max as usize + 1]
            } else {
                single_var_derivatives(g, v, max)
            };
            for o in needed {
                let mut k = key.clone();
                k[v] = o;
                next.insert(k, ders[o as usize].clone());
            }
        }
        states = next;
    }
    states
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        assert!(Field::same(&self.field, &rhs.field), "operators over different fields");
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            let v = match terms.get(e) {
                Some(a) => a + c,
                None => c.clone(),
            };
            if v.is_zero() {
                terms.remove(e);
            } else {
                terms.insert(e.clone(), v);
            }
        }
        DiffOp {
            field: self.field.clone(),
            terms,
        }
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        DiffOp {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self + &(-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_enumerates_the_box() {
        let a: Exp = [1u32, 2].into_iter().collect();
        assert_eq!(below(&a).len(), 6);
    }

    #[test]
    fn binomials_match_pascal_mod_small_primes() {
        for p in [2u64, 3, 5, 7] {
            let mut row = vec![1u64];
            for n in 0..60u64 {
                for (k, c) in row.iter().enumerate() {
                    assert_eq!(binom_mod(n, k as u64, p), c % p, "C({n},{k}) mod {p}");
                }
                let mut next = vec![1u64; row.len() + 1];
                for k in 1..row.len() {
                    next[k] = (row[k - 1] + row[k]) % (p * 1_000_000);
                }
                row = next;
            }
        }
    }
}
