//! Solving D(x) = a and commuting systems D_i(x) = a_i by exact linear algebra over K^{p^r}.

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::{basis_exponents, pbasis_decompose, Exp, Field, FieldRef, Polynomial, RationalFunction};
use crate::linalg::{solve, Matrix};

/// D_i(x) = a_i for commuting D_i with D_i^{p^{l_i}} = F_i(D_1, ..., D_m).
#[derive(Debug, Clone)]
pub struct DiffSystem {
    pub operators: Vec<DiffOp>,
    pub rhs: Vec<RationalFunction>,
    pub order_exponents: Vec<u32>,
    /// Polynomials in X1..Xm without constant term.
    pub reductions: Vec<Polynomial>,
}

/// The ring F_p[X1, ..., Xm] that reductions live in.
pub fn reduction_field(p: u64, m: usize) -> FieldRef {
    let names = (1..=m).map(|i| format!("X{i}")).collect();
    Field::with_height(p, names, 1).expect("valid names")
}

impl DiffSystem {
    pub fn new(
        operators: Vec<DiffOp>,
        rhs: Vec<RationalFunction>,
        order_exponents: Vec<u32>,
        reductions: Vec<Polynomial>,
    ) -> Result<Self> {
        let m = operators.len();
        if rhs.len() != m || order_exponents.len() != m || reductions.len() != m {
            return Err(Error::Invalid("system components have different lengths".into()));
        }
        for f in &reductions {
            if f.field().nvars() != m {
                return Err(Error::Invalid("reduction must be a polynomial in X1..Xm".into()));
            }
            if f.constant_value() != 0 {
                return Err(Error::Invalid("reduction has a constant term".into()));
            }
        }
        if let Some(first) = operators.first() {
            for d in &operators {
                if !Field::same(d.field(), first.field()) {
                    return Err(Error::FieldMismatch);
                }
            }
            for x in &rhs {
                if !Field::same(x.field(), first.field()) {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                if !operators[i].commutator(&operators[j])?.is_zero() {
                    return Err(Error::Invalid(format!("operators {} and {} do not commute", i + 1, j + 1)));
                }
            }
        }
        Ok(DiffSystem {
            operators,
            rhs,
            order_exponents,
            reductions,
        })
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Smallest level at which every operator is K^{p^r}-linear.
    pub fn level(&self) -> u32 {
        self.operators.iter().map(|d| d.level()).max().unwrap_or(1)
    }

    /// Whether D_i^{p^{l_i}} = F_i(D_1, ..., D_m) holds as operators.
    pub fn reductions_hold(&self) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        let p = self.operators[0].field().p();
        for (i, d) in self.operators.iter().enumerate() {
            let lhs = d.power(p.pow(self.order_exponents[i]))?;
            if lhs != operator_polynomial(&self.reductions[i], &self.operators)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// F(D_1, ..., D_m) as an operator, for F without constant term.
pub fn operator_polynomial(f: &Polynomial, ops: &[DiffOp]) -> Result<DiffOp> {
    let field = ops.first().map(|d| d.field().clone());
    let Some(field) = field else {
        return Ok(DiffOp::zero(f.field()));
    };
    let mut acc = DiffOp::zero(&field);
    for (e, c) in f.terms() {
        let mut term: Option<DiffOp> = None;
        for (j, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let pw = ops[j].power(k as u64)?;
            term = Some(match term {
                None => pw,
                Some(t) => t.compose(&pw)?,
            });
        }
        if let Some(t) = term {
            acc = &acc + &t.scale(*c);
        }
    }
    Ok(acc)
}

/// Σ Q_i(D) a_i where F = Σ X_i Q_i assigns each monomial to its smallest-index variable.
pub fn ftilde(f: &Polynomial, rhs: &[RationalFunction], ops: &[DiffOp]) -> RationalFunction {
    let field = match rhs.first() {
        Some(a) => a.field().clone(),
        None => return RationalFunction::zero(f.field()),
    };
    let mut acc = RationalFunction::zero(&field);
    for (e, c) in f.terms() {
        let Some(i) = e.iter().position(|&k| k > 0) else {
            continue;
        };
        let mut v = rhs[i].clone();
        for (j, &k) in e.iter().enumerate() {
            let times = if j == i { k - 1 } else { k };
            for _ in 0..times {
                v = ops[j].apply(&v);
            }
        }
        acc = &acc + &v.scale(*c);
    }
    acc
}

/// D_i^{p^{l_i} − 1}(a_i) = F̃_i(a) for every i, together with the symmetry D_i(a_j) = D_j(a_i).
pub fn check_compatibility(sys: &DiffSystem) -> bool {
    let m = sys.len();
    if m == 0 {
        return true;
    }
    for i in 0..m {
        for j in i + 1..m {
            if sys.operators[i].apply(&sys.rhs[j]) != sys.operators[j].apply(&sys.rhs[i]) {
                return false;
            }
        }
    }
    let p = sys.operators[0].field().p();
    for i in 0..m {
        let mut v = sys.rhs[i].clone();
        for _ in 0..p.pow(sys.order_exponents[i]) - 1 {
            v = sys.operators[i].apply(&v);
        }
        if v != ftilde(&sys.reductions[i], &sys.rhs, &sys.operators) {
            return false;
        }
    }
    true
}

fn check_level(ops: &[&DiffOp], r: u32) -> Result<()> {
    for d in ops {
        let p = d.field().p();
        let m = d.max_order();
        if m >= p.pow(r) {
            return Err(Error::OrderTooHighForLevel { order: m, level: r });
        }
    }
    Ok(())
}

/// Coordinates over K^{p^r}, pulled back to K by the inverse Frobenius.
fn compressed_coords(f: &RationalFunction, basis: &[Exp], r: u32) -> Vec<RationalFunction> {
    let coords = pbasis_decompose(f, r).coords;
    basis
        .iter()
        .map(|m| match coords.get(m) {
            Some(c) => c.pth_root(r).expect("coordinate lies in K^{p^r}"),
            None => RationalFunction::zero(f.field()),
        })
        .collect()
}

fn compressed_matrix(d: &DiffOp, r: u32) -> Result<Matrix> {
    Ok(d.matrix_over_subfield(r)?.map(|c| c.pth_root(r).expect("entry lies in K^{p^r}")))
}

/// Solve the stacked equations ops[i](x) = rhs[i] in the x^m coordinates of x.
fn stacked_solve(field: &FieldRef, ops: &[&DiffOp], rhs: &[RationalFunction], r: u32) -> Result<RationalFunction> {
    let p = field.p();
    let basis = basis_exponents(field.nvars(), p, r);
    let mats: Vec<Matrix> = ops.iter().map(|d| compressed_matrix(d, r)).collect::<Result<_>>()?;
    let refs: Vec<&Matrix> = mats.iter().collect();
    let stacked = Matrix::vstack(&refs);
    let mut b = Vec::with_capacity(stacked.rows());
    for a in rhs {
        b.extend(compressed_coords(a, &basis, r));
    }
    let xi = solve(&stacked, &b)?;
    let mut x = RationalFunction::zero(field);
    for (m, c) in basis.iter().zip(xi) {
        if c.is_zero() {
            continue;
        }
        let xm = RationalFunction::from_poly(Polynomial::monomial(field, m.clone(), 1));
        x = &x + &(&c.frobenius(r) * &xm);
    }
    Ok(x)
}

/// Some x with D(x) = a and C(x) = 0 for every constraint C.
pub fn solve_single(d: &DiffOp, a: &RationalFunction, r: u32, constraints: &[DiffOp]) -> Result<RationalFunction> {
    let mut ops: Vec<&DiffOp> = vec![d];
    ops.extend(constraints.iter());
    check_level(&ops, r)?;
    let field = d.field().clone();
    let mut rhs = vec![a.clone()];
    rhs.extend(constraints.iter().map(|_| RationalFunction::zero(&field)));
    stacked_solve(&field, &ops, &rhs, r)
}

/// A common solution of a compatible system, unique modulo the joint kernel.
pub fn solve_system(sys: &DiffSystem, r: u32) -> Result<RationalFunction> {
    let ops: Vec<&DiffOp> = sys.operators.iter().collect();
    check_level(&ops, r)?;
    let Some(first) = sys.operators.first() else {
        return Err(Error::Invalid("empty system has no field".into()));
    };
    if !check_compatibility(sys) {
        return Err(Error::Incompatible);
    }
    let field = first.field().clone();
    let x = match stacked_solve(&field, &ops, &sys.rhs, r) {
        Ok(x) => x,
        Err(Error::NoSolution) => return Err(Error::Incompatible),
        Err(e) => return Err(e),
    };
    for (d, a) in sys.operators.iter().zip(&sys.rhs) {
        if d.apply(&x) != *a {
            return Err(Error::Incompatible);
        }
    }
    Ok(x)
}

/// Kernel dimension of D over K^{p^r}, from the matrix rank.
pub fn kernel_dimension(d: &DiffOp, r: u32) -> Result<usize> {
    let m = compressed_matrix(d, r)?;
    Ok(m.cols() - crate::linalg::rank(&m))
}
