//! Extending a generically free action of ker F^r to the whole group, one generator at a time.

use super::verify::{is_generically_free, verify_action};
use super::{ModuleAlgebraAction, Verified};
use crate::diffop::{binom_mod, DiffOp};
use crate::error::{Error, Result};
use crate::field::{basis_exponents, Exp, FieldRef, Polynomial, RationalFunction};
use crate::groupscheme::{dual_within, GroupSchemeDescriptor};
use crate::linalg::{rank, solve, Matrix};
use crate::solver::{operator_polynomial, reduction_field, solve_single, solve_system, DiffSystem};
use std::collections::BTreeMap;

/// A p-basis t_1..t_n of K adapted to the Frobenius-kernel action.
#[derive(Debug, Clone)]
pub struct AdaptedPBasis {
    pub elements: Vec<RationalFunction>,
    /// E_1..E_s: for each level-one unipotent generator D of exponent m, the powers
    /// D^{p^{m−1}}, ..., D^p, D. E_i(t_i) = 1 and E_j(t_i) = 0 for j < i.
    pub operators: Vec<DiffOp>,
    /// F_h with F_h(t_k) = δ_{hk}.
    pub dual_derivations: Vec<DiffOp>,
}

fn jacobian_row(field: &FieldRef, t: &RationalFunction) -> Result<Vec<RationalFunction>> {
    (0..field.nvars())
        .map(|v| Ok(DiffOp::partial(field, v, 1)?.apply(t)))
        .collect()
}

pub fn adapted_pbasis(action: &ModuleAlgebraAction) -> Result<AdaptedPBasis> {
    let field = &action.field;
    let p = field.p();
    let mut ops = Vec::new();
    for (j, g) in action.dual.generators.iter().enumerate() {
        if g.level != 1 || action.dual.is_multiplicative(j) {
            continue;
        }
        let d = &action.assignment[j].1;
        for k in (0..g.p_exponent).rev() {
            ops.push(d.power(p.pow(k))?);
        }
    }
    let one = RationalFunction::one(field);
    let mut elements = Vec::with_capacity(field.nvars());
    for i in 0..ops.len() {
        let t = solve_single(&ops[i], &one, 1, &ops[..i]).map_err(|e| match e {
            Error::NoSolution => Error::ExtensionObstruction("no adapted p-basis: the action is not generically free".into()),
            e => e,
        })?;
        elements.push(t);
    }
    let mut rows: Vec<Vec<RationalFunction>> = elements
        .iter()
        .map(|t| jacobian_row(field, t))
        .collect::<Result<_>>()?;
    if rank(&Matrix::from_rows(field, rows.clone())) < rows.len() {
        return Err(Error::ExtensionObstruction("adapted elements are p-dependent".into()));
    }
    // Complete with coordinates fixed by the whole Frobenius kernel.
    for v in 0..field.nvars() {
        if elements.len() == field.nvars() {
            break;
        }
        let x = RationalFunction::var(field, v);
        if !ops.iter().all(|e| e.apply(&x).is_zero()) {
            continue;
        }
        let mut trial = rows.clone();
        trial.push(jacobian_row(field, &x)?);
        if rank(&Matrix::from_rows(field, trial.clone())) == trial.len() {
            rows = trial;
            elements.push(x);
        }
    }
    if elements.len() < field.nvars() {
        return Err(Error::NotSupported("could not complete the adapted p-basis from coordinates".into()));
    }
    let jac = Matrix::from_rows(field, rows);
    let mut dual_derivations = Vec::with_capacity(field.nvars());
    for h in 0..field.nvars() {
        let mut e = vec![RationalFunction::zero(field); field.nvars()];
        e[h] = one.clone();
        dual_derivations.push(DiffOp::derivation(field, &solve(&jac, &e)?));
    }
    Ok(AdaptedPBasis {
        elements,
        operators: ops,
        dual_derivations,
    })
}

fn monomial(field: &FieldRef, e: &Exp) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::monomial(field, e.clone(), 1))
}

/// The K^{p^level}-linear operator D with D(x_k) = values[k], D(f^p) = V(f)^p and
/// D(fg) = D(f)g + fD(g) + Σ c·A(f)B(g), written in normal form.
pub(crate) fn twisted_operator(
    field: &FieldRef,
    level: u32,
    vop: &DiffOp,
    tails: &[(u64, DiffOp, DiffOp)],
    values: &[RationalFunction],
) -> Result<DiffOp> {
    let p = field.p();
    let p32 = p as u32;
    let mut alphas = basis_exponents(field.nvars(), p, level);
    alphas.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    let zero = RationalFunction::zero(field);
    let mut image: BTreeMap<Exp, RationalFunction> = BTreeMap::new();
    for alpha in &alphas {
        if alpha.iter().all(|&a| a == 0) {
            image.insert(alpha.clone(), zero.clone());
            continue;
        }
        let q: Exp = alpha.iter().map(|a| a / p32).collect();
        let rho: Exp = alpha.iter().map(|a| a % p32).collect();
        let value = if q.iter().all(|&a| a == 0) {
            // x^ρ = x_k·u with u = x^{ρ − e_k}.
            let k = rho.iter().position(|&a| a > 0).expect("nonzero");
            let mut u = rho.clone();
            u[k] -= 1;
            let xk = RationalFunction::var(field, k);
            let xu = monomial(field, &u);
            let mut acc = &(&values[k] * &xu) + &(&xk * &image[&u]);
            for (c, a, b) in tails {
                acc = &acc + &(&a.apply(&xk) * &b.apply(&xu)).scale(*c);
            }
            acc
        } else {
            let pq: Exp = q.iter().map(|a| a * p32).collect();
            let xpq = monomial(field, &pq);
            let xrho = monomial(field, &rho);
            let mut acc = &(&vop.apply(&monomial(field, &q)).frobenius(1) * &xrho) + &(&xpq * &image[&rho]);
            for (c, a, b) in tails {
                acc = &acc + &(&a.apply(&xpq) * &b.apply(&xrho)).scale(*c);
            }
            acc
        };
        image.insert(alpha.clone(), value);
    }
    // D(x^α) = Σ_{0<β≤α} c_β·C(α,β)·x^{α−β}; peel off the coefficients in degree order.
    let mut coeffs: Vec<(Exp, RationalFunction)> = Vec::new();
    for alpha in alphas.iter().filter(|e| e.iter().any(|&a| a > 0)) {
        let mut c = image[alpha].clone();
        for (beta, cb) in &coeffs {
            if beta.iter().zip(alpha).any(|(b, a)| b > a) {
                continue;
            }
            let binom = beta
                .iter()
                .zip(alpha)
                .fold(1u64, |acc, (&b, &a)| acc * binom_mod(a as u64, b as u64, p) % p);
            if binom == 0 {
                continue;
            }
            let rest: Exp = alpha.iter().zip(beta).map(|(a, b)| a - b).collect();
            c = &c - &(cb * &monomial(field, &rest)).scale(binom);
        }
        if !c.is_zero() {
            coeffs.push((alpha.clone(), c));
        }
    }
    let mut terms = BTreeMap::new();
    for (e, c) in coeffs {
        terms.insert(e, c);
    }
    DiffOp::from_terms(field, terms)
}

/// P0 + δ with δ the derivation making the operator take the value z_h at t_h.
fn with_values(p0: &DiffOp, basis: &AdaptedPBasis, z: &[RationalFunction]) -> Result<DiffOp> {
    let field = p0.field();
    let w: Vec<RationalFunction> = basis
        .elements
        .iter()
        .zip(z)
        .map(|(t, zh)| zh - &p0.apply(t))
        .collect();
    let rows: Vec<Vec<RationalFunction>> = basis
        .elements
        .iter()
        .map(|t| jacobian_row(field, t))
        .collect::<Result<_>>()?;
    let u = solve(&Matrix::from_rows(field, rows), &w)?;
    Ok(p0 + &DiffOp::derivation(field, &u))
}

fn obstruction(what: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Incompatible | Error::NoSolution => Error::ExtensionObstruction(what),
        e => e,
    }
}

pub fn extend_action(base: &ModuleAlgebraAction, target: &GroupSchemeDescriptor) -> Result<ModuleAlgebraAction> {
    let field = &base.field;
    let p = field.p();
    if target.p != p {
        return Err(Error::FieldMismatch);
    }
    if !target.is_commutative() {
        return Err(Error::NotCommutative);
    }
    if !matches!(base.verified, Verified::Passed) && !verify_action(base).passed() {
        return Err(Error::Invalid("the base action does not verify".into()));
    }
    let full = dual_within(target, field.height())?;
    let r = base.dual.height();
    if full.height() <= r {
        if full == base.dual {
            return Ok(base.clone());
        }
        return Err(Error::Invalid("the target does not restrict to the base group".into()));
    }
    if full.truncate(r)? != base.dual {
        return Err(Error::Invalid("the target does not restrict to the base group".into()));
    }
    if !is_generically_free(base)? {
        return Err(Error::ExtensionObstruction("the base action is not generically free".into()));
    }
    let basis = adapted_pbasis(base)?;
    let n = field.nvars();
    let mut ops = base.ops();
    let zero = RationalFunction::zero(field);
    for j in base.dual.len()..full.len() {
        let g = &full.generators[j];
        let name = &g.name;
        let level = g.level;
        let reach = |f: &Polynomial| f.terms().keys().all(|e| e[j..].iter().all(|&k| k == 0));
        let vpoly = full.verschiebung(j)?;
        if !reach(&vpoly) {
            return Err(Error::NotSupported(format!("Verschiebung of {name} is not in earlier generators")));
        }
        let vop = operator_polynomial(&vpoly, &ops)?;
        let monomial_op = |e: &Exp, ops: &[DiffOp]| operator_polynomial(&Polynomial::monomial(full.ring(), e.clone(), 1), ops);
        let tails: Vec<(u64, DiffOp, DiffOp)> = g
            .comul_tail
            .iter()
            .map(|t| Ok((t.coeff, monomial_op(&t.left, &ops)?, monomial_op(&t.right, &ops)?)))
            .collect::<Result<_>>()?;
        let p0 = twisted_operator(field, level, &vop, &tails, &vec![zero.clone(); n])?;
        let exponent = p.pow(g.p_exponent);
        let target_q = operator_polynomial(&g.relation_tail, &ops)?;
        let red_ring = reduction_field(p, j);
        let reductions: Vec<Polynomial> = full.generators[..j]
            .iter()
            .map(|h| {
                Polynomial::from_terms(
                    &red_ring,
                    h.relation_tail.terms().iter().map(|(e, c)| (e[..j].iter().copied().collect(), *c)),
                )
            })
            .collect();
        let order_exponents: Vec<u32> = full.generators[..j].iter().map(|h| h.p_exponent).collect();
        let sys_level = ops.iter().map(|d| d.level()).max().unwrap_or(1);
        let mut z = vec![zero.clone(); n];
        for h in (0..n).rev() {
            let current = with_values(&p0, &basis, &z)?;
            let t = &basis.elements[h];
            let mut rhs = Vec::with_capacity(j);
            for (k, e) in ops.iter().enumerate() {
                let et = e.apply(t);
                if basis.dual_derivations[..=h].iter().any(|f| !f.apply(&et).is_zero()) {
                    return Err(Error::ExtensionObstruction(format!(
                        "{}(t_{}) is not fixed by the earlier coordinate directions",
                        full.generators[k].name,
                        h + 1
                    )));
                }
                if !current.commutator(e)?.is_derivation() {
                    return Err(Error::ExtensionObstruction(format!(
                        "[{name}, {}] is not a derivation",
                        full.generators[k].name
                    )));
                }
                rhs.push(current.apply(&et));
            }
            let power = current.power(exponent - 1)?;
            let sys = DiffSystem::new(ops.clone(), rhs, order_exponents.clone(), reductions.clone())?;
            let x = solve_system(&sys, sys_level).map_err(obstruction(format!(
                "commutation system for {name} at t_{} is incompatible",
                h + 1
            )))?;
            let goal = &target_q.apply(t) - &power.apply(&x);
            let y = solve_single(&power, &goal, level, &ops).map_err(obstruction(format!(
                "relation equation for {name} at t_{} has no solution",
                h + 1
            )))?;
            z[h] = &x + &y;
        }
        let d = with_values(&p0, &basis, &z)?;
        for (k, e) in ops.iter().enumerate() {
            if !d.commutator(e)?.is_zero() {
                return Err(Error::ExtensionObstruction(format!(
                    "{name} does not commute with {}",
                    full.generators[k].name
                )));
            }
        }
        // Once D commutes with the earlier operators, D^{p^m} − v(Q) is a derivation, so it
        // vanishes because it vanishes on the p-basis.
        let defect = &d.power(exponent)? - &target_q;
        if !defect.is_derivation() {
            return Err(Error::ExtensionObstruction(format!("{name}^{exponent} − v(Q) is not a derivation")));
        }
        if !defect.is_zero() {
            return Err(Error::ExtensionObstruction(format!("{name}^{exponent} ≠ v(Q)")));
        }
        ops.push(d);
    }
    let assignment = full.names().into_iter().zip(ops).collect();
    ModuleAlgebraAction::with_dual(field, target.clone(), full, assignment)
}
