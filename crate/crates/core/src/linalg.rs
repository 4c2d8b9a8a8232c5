//! Exact linear algebra over K: fraction-free elimination, ranks, kernels and solves.

use crate::error::{Error, Result};
use crate::field::{poly_gcd, Exp, FieldRef, Polynomial, RationalFunction};
use std::collections::BTreeMap;

/// Dense matrix over K, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: FieldRef,
    rows: usize,
    cols: usize,
    data: Vec<RationalFunction>,
}

impl Matrix {
    pub fn zeros(field: &FieldRef, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![RationalFunction::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, RationalFunction::one(field));
        }
        m
    }

    pub fn from_rows(field: &FieldRef, rows: Vec<Vec<RationalFunction>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalFunction) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RationalFunction] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map(&self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut result = Matrix::identity(&self.field, self.rows);
        for _ in 0..e {
            result = result.mul(self);
        }
        result
    }

    /// Stack matrices with equal column counts.
    pub fn vstack(parts: &[&Matrix]) -> Matrix {
        let field = parts[0].field.clone();
        let cols = parts[0].cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "dimension mismatch");
            data.extend(m.data.iter().cloned());
            rows += m.rows;
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn apply(&self, v: &[RationalFunction]) -> Vec<RationalFunction> {
        (0..self.rows)
            .map(|i| {
                let mut acc = RationalFunction::zero(&self.field);
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }
}

/// Row echelon form over the polynomial ring, pivots recorded as (row, column).
struct Echelon {
    rows: Vec<Vec<Polynomial>>,
    pivots: Vec<(usize, usize)>,
}

fn lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let g = poly_gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

/// Multiply a row by the lcm of its denominators.
fn clear_row(field: &FieldRef, row: &[RationalFunction]) -> Vec<Polynomial> {
    let mut l = Polynomial::one(field);
    for x in row {
        if !x.denom().is_one() {
            l = lcm(&l, x.denom());
        }
    }
    row.iter()
        .map(|x| {
            if x.is_zero() {
                Polynomial::zero(field)
            } else {
                x.numer() * &l.div_exact(x.denom()).expect("lcm divides")
            }
        })
        .collect()
}

/// Fraction-free (Bareiss) elimination; only the first `ncoef` columns are pivot candidates.
fn echelon(field: &FieldRef, mut rows: Vec<Vec<Polynomial>>, ncoef: usize) -> Echelon {
    let m = rows.len();
    let mut prev = Polynomial::one(field);
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..ncoef {
        if r == m {
            break;
        }
        let Some(k) = (r..m).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let piv = rows[r][col].clone();
        let width = rows[r].len();
        for i in r + 1..m {
            let lead = rows[i][col].clone();
            for j in col + 1..width {
                let a = &rows[i][j];
                let b = &rows[r][j];
                if a.is_zero() && (lead.is_zero() || b.is_zero()) {
                    continue;
                }
                let t = if lead.is_zero() || b.is_zero() {
                    &piv * a
                } else {
                    &(&piv * a) - &(&lead * b)
                };
                rows[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            rows[i][col] = Polynomial::zero(field);
        }
        pivots.push((r, col));
        prev = piv;
        r += 1;
    }
    Echelon { rows, pivots }
}

pub fn rank(m: &Matrix) -> usize {
    let rows = (0..m.rows).map(|i| clear_row(&m.field, m.row(i))).collect();
    echelon(&m.field, rows, m.cols).pivots.len()
}

/// Back-substitution in K with every non-pivot coordinate set to zero.
fn back_substitute(field: &FieldRef, ech: &Echelon, ncoef: usize, rhs_col: Option<usize>) -> Vec<RationalFunction> {
    let mut x = vec![RationalFunction::zero(field); ncoef];
    for &(r, c) in ech.pivots.iter().rev() {
        let row = &ech.rows[r];
        let mut acc = match rhs_col {
            Some(j) => RationalFunction::from_poly(row[j].clone()),
            None => RationalFunction::zero(field),
        };
        for &(_, c2) in ech.pivots.iter().filter(|&&(_, c2)| c2 > c) {
            if !row[c2].is_zero() && !x[c2].is_zero() {
                acc = &acc - &(&RationalFunction::from_poly(row[c2].clone()) * &x[c2]);
            }
        }
        let piv = RationalFunction::from_poly(row[c].clone());
        x[c] = acc.checked_div(&piv).expect("pivot is nonzero");
    }
    x
}

/// Solve m x = b; free coordinates are zero. NoSolution when inconsistent.
pub fn solve(m: &Matrix, b: &[RationalFunction]) -> Result<Vec<RationalFunction>> {
    assert_eq!(m.rows, b.len(), "dimension mismatch");
    let field = &m.field;
    let rows: Vec<Vec<Polynomial>> = (0..m.rows)
        .map(|i| {
            let mut row: Vec<RationalFunction> = m.row(i).to_vec();
            row.push(b[i].clone());
            clear_row(field, &row)
        })
        .collect();
    let ech = echelon(field, rows, m.cols);
    let rank = ech.pivots.len();
    if ech.rows[rank..].iter().any(|row| !row[m.cols].is_zero()) {
        return Err(Error::NoSolution);
    }
    Ok(back_substitute(field, &ech, m.cols, Some(m.cols)))
}

/// A basis of the right kernel, one vector per non-pivot column.
pub fn nullspace(m: &Matrix) -> Vec<Vec<RationalFunction>> {
    let field = &m.field;
    let rows = (0..m.rows).map(|i| clear_row(field, m.row(i))).collect();
    let ech = echelon(field, rows, m.cols);
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !pivot_cols.contains(c)) {
        // Move the free column to the right-hand side with value 1.
        let mut x = vec![RationalFunction::zero(field); m.cols];
        x[free] = RationalFunction::one(field);
        for &(r, c) in ech.pivots.iter().rev() {
            let row = &ech.rows[r];
            let mut acc = -&RationalFunction::from_poly(row[free].clone());
            for &(_, c2) in ech.pivots.iter().filter(|&&(_, c2)| c2 > c) {
                if !row[c2].is_zero() && !x[c2].is_zero() {
                    acc = &acc - &(&RationalFunction::from_poly(row[c2].clone()) * &x[c2]);
                }
            }
            x[c] = acc
                .checked_div(&RationalFunction::from_poly(row[c].clone()))
                .expect("pivot is nonzero");
        }
        out.push(x);
    }
    out
}

/// Rank over F_p of vectors with entries in K.
pub fn fp_rank(vectors: &[Vec<RationalFunction>]) -> usize {
    let Some(first) = vectors.iter().flatten().next() else {
        return 0;
    };
    let field = first.field().clone();
    let p = field.p();
    let mut l = Polynomial::one(&field);
    for x in vectors.iter().flatten() {
        if !x.denom().is_one() {
            l = lcm(&l, x.denom());
        }
    }
    // Each vector becomes an F_p-vector indexed by (component, monomial).
    let mut index: BTreeMap<(usize, Exp), usize> = BTreeMap::new();
    let mut rows: Vec<BTreeMap<usize, u64>> = Vec::new();
    for v in vectors {
        let mut row = BTreeMap::new();
        for (comp, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let poly = x.numer() * &l.div_exact(x.denom()).expect("lcm divides");
            for (e, c) in poly.terms() {
                let n = index.len();
                let k = *index.entry((comp, e.clone())).or_insert(n);
                row.insert(k, *c);
            }
        }
        rows.push(row);
    }
    fp_rank_sparse(rows, p)
}

/// Gaussian elimination over F_p on sparse rows.
pub fn fp_rank_sparse(rows: Vec<BTreeMap<usize, u64>>, p: u64) -> usize {
    let mut basis: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    for mut row in rows {
        row.retain(|_, v| *v % p != 0);
        while let Some((&lead, &c)) = row.iter().next() {
            let Some(b) = basis.get(&lead) else {
                basis.insert(lead, row);
                break;
            };
            let f = c * crate::field::inv_mod(b[&lead], p) % p;
            for (&k, &v) in b {
                let slot = row.entry(k).or_insert(0);
                *slot = (*slot + p - f * v % p) % p;
            }
            row.retain(|_, v| *v != 0);
        }
    }
    basis.len()
}
