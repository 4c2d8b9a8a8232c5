use super::{Exp, FieldRef, Polynomial, RationalFunction};
use std::collections::BTreeMap;

/// Coordinates of an element of K in the monomial basis x^m (0 <= m_i < p^r) over K^{p^r}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PBasisCoordinates {
    pub level: u32,
    /// Nonzero coordinates only; each value lies in K^{p^r}.
    pub coords: BTreeMap<Exp, RationalFunction>,
}

impl PBasisCoordinates {
    pub fn get(&self, m: &Exp) -> Option<&RationalFunction> {
        self.coords.get(m)
    }

    /// Sum of coords[m] * x^m.
    pub fn reconstruct(&self, field: &FieldRef) -> RationalFunction {
        let mut acc = RationalFunction::zero(field);
        for (m, c) in &self.coords {
            let xm = RationalFunction::from_poly(Polynomial::monomial(field, m.clone(), 1));
            acc = &acc + &(c * &xm);
        }
        acc
    }
}

/// All exponent vectors with entries below p^r, in lex order; there are p^{nr} of them.
pub fn basis_exponents(nvars: usize, p: u64, r: u32) -> Vec<Exp> {
    let q = p.pow(r) as u32;
    let mut out: Vec<Exp> = vec![Exp::new()];
    for _ in 0..nvars {
        let mut next = Vec::with_capacity(out.len() * q as usize);
        for e in &out {
            for k in 0..q {
                let mut f = e.clone();
                f.push(k);
                next.push(f);
            }
        }
        out = next;
    }
    out
}

/// Write f = num * den^{q-1} / den^q with q = p^r and bucket the numerator's terms by
/// exponent residues mod q.
pub fn pbasis_decompose(f: &RationalFunction, r: u32) -> PBasisCoordinates {
    let q = f.p().pow(r);
    let field = f.field();
    let (num, denq) = if f.denom().is_one() {
        (f.numer().clone(), Polynomial::one(field))
    } else {
        (f.numer() * &f.denom().pow(q - 1), f.denom().frobenius(r))
    };
    let q32 = q as u32;
    let mut buckets: BTreeMap<Exp, Vec<(Exp, u64)>> = BTreeMap::new();
    for (e, c) in num.terms() {
        let m: Exp = e.iter().map(|x| x % q32).collect();
        let rest: Exp = e.iter().map(|x| x - x % q32).collect();
        buckets.entry(m).or_default().push((rest, *c));
    }
    let coords = buckets
        .into_iter()
        .map(|(m, terms)| {
            let n = Polynomial::from_terms(field, terms);
            let v = RationalFunction::normalize(n, denq.clone()).expect("nonzero denominator");
            (m, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    PBasisCoordinates { level: r, coords }
}

/// Whether f lies in K^{p^r} (equal to kK^{p^r} since k = F_p).
pub fn member_subfield(f: &RationalFunction, r: u32) -> bool {
    f.pth_root(r).is_ok()
}
