//! Multivariate gcd over F_p by recursive primitive remainder sequences.

use super::gfq::certainly_coprime;
use super::{inv_mod, mul_mod, sub_mod, Exp, Polynomial};

const COPRIME_TRIES: usize = 3;

/// Monic gcd (lex-leading coefficient 1); gcd(0, 0) = 0.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let field = a.field().clone();
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(&field);
    }
    // Pull out the common monomial factor first.
    let ma = min_exp(a);
    let mb = min_exp(b);
    let common: Exp = ma.iter().zip(mb.iter()).map(|(x, y)| *x.min(y)).collect();
    let a1 = unshift(a, &ma);
    let b1 = unshift(b, &mb);
    let mono = Polynomial::monomial(&field, common, 1);
    if a1.is_constant() || b1.is_constant() {
        return mono;
    }
    let g = gcd_nomono(&a1, &b1);
    (&mono * &g).monic()
}

fn min_exp(a: &Polynomial) -> Exp {
    let mut it = a.terms().keys();
    let mut m = it.next().unwrap().clone();
    for e in it {
        for (x, y) in m.iter_mut().zip(e.iter()) {
            *x = (*x).min(*y);
        }
    }
    m
}

fn unshift(a: &Polynomial, e: &Exp) -> Polynomial {
    if e.iter().all(|&x| x == 0) {
        return a.clone();
    }
    Polynomial::from_terms(
        a.field(),
        a.terms()
            .iter()
            .map(|(f, c)| (f.iter().zip(e.iter()).map(|(x, y)| x - y).collect(), *c)),
    )
}

fn gcd_nomono(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let field = a.field().clone();
    let va = a.support_vars();
    let vb = b.support_vars();
    let mut all: Vec<usize> = va.iter().chain(vb.iter()).copied().collect();
    all.sort_unstable();
    all.dedup();
    if all.len() == 1 {
        return univariate_gcd(a, b, all[0]);
    }
    let v = *all
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .expect("nonempty");
    if !a.involves(v) {
        return poly_gcd(a, &content_in(b, v));
    }
    if !b.involves(v) {
        return poly_gcd(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = poly_gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    if certainly_coprime(&pa, &pb, v, COPRIME_TRIES) {
        return c.monic();
    }
    let g = prs_gcd(&pa, &pb, v);
    let _ = field;
    (&c * &g).monic()
}

/// Split into coefficients of powers of x_v (dense by degree).
fn to_dense(a: &Polynomial, v: usize) -> Vec<Polynomial> {
    let field = a.field();
    let d = a.degree_in(v) as usize;
    let mut buckets: Vec<Vec<(Exp, u64)>> = vec![Vec::new(); d + 1];
    for (e, c) in a.terms() {
        let mut f = e.clone();
        let k = f[v] as usize;
        f[v] = 0;
        buckets[k].push((f, *c));
    }
    buckets
        .into_iter()
        .map(|t| Polynomial::from_terms(field, t))
        .collect()
}

fn from_dense(coeffs: &[Polynomial], v: usize) -> Polynomial {
    let field = coeffs[0].field().clone();
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        for (e, a) in c.terms() {
            let mut f = e.clone();
            f[v] = k as u32;
            terms.push((f, *a));
        }
    }
    Polynomial::from_terms(&field, terms)
}

fn content_in(a: &Polynomial, v: usize) -> Polynomial {
    let coeffs = to_dense(a, v);
    content_of(&coeffs)
}

fn content_of(coeffs: &[Polynomial]) -> Polynomial {
    let mut g = Polynomial::zero(coeffs[0].field());
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = poly_gcd(&g, c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn trim(v: &mut Vec<Polynomial>) {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
}

fn is_zero_dense(v: &[Polynomial]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// lc(g)^{deg f − deg g + 1}·f mod g, with coefficients in the other variables.
fn prem(f: &[Polynomial], g: &[Polynomial]) -> Vec<Polynomial> {
    let dg = g.len() - 1;
    let lg = &g[dg];
    let mut r: Vec<Polynomial> = f.to_vec();
    trim(&mut r);
    let mut steps_left = (r.len() - 1 + 1).saturating_sub(dg) as u64;
    while !is_zero_dense(&r) && r.len() - 1 >= dg {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * lg;
        }
        for (i, gc) in g.iter().enumerate() {
            let idx = i + dr - dg;
            r[idx] = &r[idx] - &(&lr * gc);
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        trim(&mut r);
        steps_left -= 1;
        if r.is_empty() {
            break;
        }
    }
    if steps_left > 0 && !is_zero_dense(&r) {
        let m = lg.pow(steps_left);
        for c in r.iter_mut() {
            *c = &*c * &m;
        }
    }
    r
}

fn primpart(v: &[Polynomial]) -> Vec<Polynomial> {
    let c = content_of(v);
    if c.is_constant() {
        return v.to_vec();
    }
    v.iter().map(|x| x.div_exact(&c).expect("content divides")).collect()
}

fn div_dense(v: &[Polynomial], d: &Polynomial) -> Vec<Polynomial> {
    v.iter().map(|x| x.div_exact(d).expect("subresultant division is exact")).collect()
}

/// Gcd of primitive polynomials in x_v by the subresultant sequence, which keeps
/// coefficient growth polynomial without content computations at every step.
fn prs_gcd(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let mut f = to_dense(a, v);
    let mut g = to_dense(b, v);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    // A primitive polynomial of degree one in x_v is irreducible.
    if g.len() == 2 {
        let (small, big) = if a.degree_in(v) == 1 { (a, b) } else { (b, a) };
        return if big.div_exact(small).is_some() {
            small.monic()
        } else {
            Polynomial::one(a.field())
        };
    }
    let one = Polynomial::one(a.field());
    let mut lc = one.clone();
    let mut h = one.clone();
    loop {
        let delta = (f.len() - g.len()) as u64;
        let r = prem(&f, &g);
        if r.is_empty() || is_zero_dense(&r) {
            break;
        }
        if r.len() == 1 {
            return one;
        }
        let scale = &lc * &h.pow(delta);
        f = g;
        g = div_dense(&r, &scale);
        lc = f.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            lc.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
    from_dense(&primpart(&g), v).monic()
}

fn univariate_gcd(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let p = a.p();
    let dense = |x: &Polynomial| {
        let mut d = vec![0u64; x.degree_in(v) as usize + 1];
        for (e, c) in x.terms() {
            d[e[v] as usize] = *c;
        }
        d
    };
    let mut f = dense(a);
    let mut g = dense(b);
    let norm = |x: &mut Vec<u64>| {
        while x.len() > 1 && *x.last().unwrap() == 0 {
            x.pop();
        }
    };
    norm(&mut f);
    norm(&mut g);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    while !(g.len() == 1 && g[0] == 0) {
        // f mod g
        let dg = g.len() - 1;
        let inv = inv_mod(g[dg], p);
        while f.len() > dg && !(f.len() == 1 && f[0] == 0) {
            let df = f.len() - 1;
            let q = mul_mod(f[df], inv, p);
            for i in 0..=dg {
                let idx = i + df - dg;
                f[idx] = sub_mod(f[idx], mul_mod(q, g[i], p), p);
            }
            norm(&mut f);
            if f.len() - 1 < dg || (f.len() == 1 && f[0] == 0) {
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    let field = a.field();
    let terms = f.iter().enumerate().map(|(k, c)| {
        let mut e = field.zero_exp();
        e[v] = k as u32;
        (e, *c)
    });
    Polynomial::from_terms(field, terms).monic()
}
