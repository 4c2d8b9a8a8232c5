#![allow(dead_code)]

use proptest::prelude::*;
use ratact::field::{Exp, FieldRef, Polynomial, RationalFunction};

/// Polynomial with up to `nterms` terms and per-variable degree below `deg`.
pub fn poly(field: &FieldRef, nterms: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    let n = field.nvars();
    let p = field.p();
    let field = field.clone();
    prop::collection::vec((prop::collection::vec(0..deg, n), 0..p), 0..=nterms).prop_map(move |ts| {
        Polynomial::from_terms(
            &field,
            ts.into_iter().map(|(e, c)| (e.into_iter().collect::<Exp>(), c)),
        )
    })
}

pub fn nonzero_poly(field: &FieldRef, nterms: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    let f = field.clone();
    poly(field, nterms, deg).prop_map(move |q| if q.is_zero() { Polynomial::one(&f) } else { q })
}

pub fn rational(field: &FieldRef, nterms: usize, deg: u32) -> impl Strategy<Value = RationalFunction> {
    (poly(field, nterms, deg), nonzero_poly(field, nterms.min(3), deg))
        .prop_map(|(n, d)| RationalFunction::normalize(n, d).unwrap())
}

pub fn rf(field: &FieldRef, s: &str) -> RationalFunction {
    RationalFunction::parse(field, s).unwrap()
}

use rand::Rng;
use ratact::diffop::DiffOp;
use ratact::field::{basis_exponents, pbasis_decompose, Field};
use ratact::linalg::{nullspace, solve, Matrix};
use ratact::solver::{reduction_field, DiffSystem};

pub fn random_poly<R: Rng>(rng: &mut R, field: &FieldRef, nterms: usize, deg: u32) -> Polynomial {
    let n = field.nvars();
    let p = field.p();
    Polynomial::from_terms(
        field,
        (0..nterms).map(|_| ((0..n).map(|_| rng.gen_range(0..deg)).collect::<Exp>(), rng.gen_range(0..p))),
    )
}

pub fn random_rational<R: Rng>(rng: &mut R, field: &FieldRef, nterms: usize, deg: u32) -> RationalFunction {
    let num = random_poly(rng, field, nterms, deg);
    let mut den = random_poly(rng, field, 2, deg);
    if den.is_zero() {
        den = Polynomial::one(field);
    }
    RationalFunction::normalize(num, den).unwrap()
}

/// A nonzero element of K^p.
pub fn random_pth_power<R: Rng>(rng: &mut R, field: &FieldRef) -> RationalFunction {
    loop {
        let c = random_rational(rng, field, 2, 2);
        if !c.is_zero() {
            return c.frobenius(1);
        }
    }
}

/// A commuting derivation family with known reductions D_i^p = F_i(D).
pub fn random_family<R: Rng>(rng: &mut R, p: u64) -> (Vec<DiffOp>, Vec<u32>, Vec<Polynomial>) {
    let kind = rng.gen_range(0..4);
    let names: &[&str] = if kind == 3 { &["x", "y", "z"] } else { &["x", "y"] };
    let k = Field::new(p, names).unwrap();
    let m = names.len();
    let red = reduction_field(p, m);
    let var = |i: usize| Polynomial::var(&red, i);
    let zero = Polynomial::zero(&red);
    let partial = |i: usize| DiffOp::partial(&k, i, 1).unwrap();
    let (ops, reds) = match kind {
        0 | 3 => {
            let ops: Vec<DiffOp> = (0..m).map(|i| partial(i).left_mul(&random_pth_power(rng, &k))).collect();
            (ops, vec![zero; m])
        }
        1 => {
            let c = random_pth_power(rng, &k);
            let xp = RationalFunction::var(&k, 0).pow(p - 1);
            let block = DiffOp::derivation(&k, &[RationalFunction::one(&k), xp]).left_mul(&c);
            let second = partial(1).left_mul(&c.pow(p));
            // (∂x + x^{p-1}∂y)^p = (p-1)!·∂y = -∂y.
            (vec![block, second], vec![var(1).scale(p - 1), zero])
        }
        _ => {
            let euler = partial(0).left_mul(&RationalFunction::var(&k, 0));
            let other = partial(1).left_mul(&random_pth_power(rng, &k));
            (vec![euler, other], vec![var(0), zero])
        }
    };
    (ops, vec![1; m], reds)
}

/// A system D_i(x) = D_i(z) with its seed z.
pub fn seeded_system<R: Rng>(rng: &mut R, p: u64) -> (DiffSystem, RationalFunction) {
    let (ops, ls, reds) = random_family(rng, p);
    let k = ops[0].field().clone();
    let z = random_rational(rng, &k, 3, 2 * p as u32);
    let rhs = ops.iter().map(|d| d.apply(&z)).collect();
    let sys = DiffSystem::new(ops, rhs, ls, reds).unwrap();
    assert!(sys.reductions_hold().unwrap());
    (sys, z)
}

fn compressed(d: &DiffOp, r: u32) -> Matrix {
    d.matrix_over_subfield(r).unwrap().map(|c| c.pth_root(r).unwrap())
}

fn columns(field: &FieldRef, cols: &[Vec<RationalFunction>], rows: usize) -> Matrix {
    let data = (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    if cols.is_empty() {
        return Matrix::zeros(field, rows, 0);
    }
    Matrix::from_rows(field, data)
}

/// Solve the equations one at a time: after step i, corrections are restricted to the joint
/// kernel of D_1..D_i, parametrized by a nullspace basis.
pub fn recursive_solve(sys: &DiffSystem, r: u32) -> Option<RationalFunction> {
    let field = sys.operators[0].field().clone();
    let basis = basis_exponents(field.nvars(), field.p(), r);
    let dim = basis.len();
    let mut x = vec![RationalFunction::zero(&field); dim];
    let mut kernel = Matrix::identity(&field, dim);
    for (d, a) in sys.operators.iter().zip(&sys.rhs) {
        let m = compressed(d, r);
        let coords = pbasis_decompose(a, r).coords;
        let b: Vec<RationalFunction> = basis
            .iter()
            .map(|e| coords.get(e).map(|c| c.pth_root(r).unwrap()).unwrap_or_else(|| RationalFunction::zero(&field)))
            .collect();
        let mx = m.apply(&x);
        let residual: Vec<RationalFunction> = b.iter().zip(&mx).map(|(u, v)| u - v).collect();
        if kernel.cols() == 0 {
            if residual.iter().any(|v| !v.is_zero()) {
                return None;
            }
            continue;
        }
        let restricted = m.mul(&kernel);
        let c = solve(&restricted, &residual).ok()?;
        let step = kernel.apply(&c);
        x = x.iter().zip(&step).map(|(u, v)| u + v).collect();
        let null = nullspace(&restricted);
        kernel = kernel.mul(&columns(&field, &null, kernel.cols()));
    }
    let mut out = RationalFunction::zero(&field);
    for (e, c) in basis.iter().zip(x) {
        let mono = RationalFunction::from_poly(Polynomial::monomial(&field, e.clone(), 1));
        out = &out + &(&c.frobenius(r) * &mono);
    }
    Some(out)
}

/// Witt addition of integer vectors through ghost components, reduced mod p.
pub fn ghost_sum(p: i128, x: &[i128], y: &[i128]) -> Vec<u64> {
    let n = x.len();
    let ghost = |z: &[i128], i: usize| -> i128 { (0..=i).map(|j| p.pow(j as u32) * z[j].pow(p.pow((i - j) as u32) as u32)).sum() };
    let mut s: Vec<i128> = Vec::new();
    for i in 0..n {
        let mut t = ghost(x, i) + ghost(y, i);
        for (j, sj) in s.iter().enumerate() {
            t -= p.pow(j as u32) * sj.pow(p.pow((i - j) as u32) as u32);
        }
        let d = p.pow(i as u32);
        assert_eq!(t % d, 0);
        s.push(t / d);
    }
    s.iter().map(|v| v.rem_euclid(p) as u64).collect()
}

pub fn vectors(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}
