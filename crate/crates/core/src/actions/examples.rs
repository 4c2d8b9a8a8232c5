use super::extend::extend_action;
use super::{height_one_action, ModuleAlgebraAction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::{Field, FieldRef, RationalFunction, DEFAULT_HEIGHT};
use crate::groupscheme::{witt_sum_polynomials, Draft, GroupSchemeDescriptor, YoungDiagram};

/// {∂_t} extended step by step through ker(F − V) on W_2, ..., W_n.
pub fn example_ptorsion(p: u64, n: u32, var: &str) -> Result<ModuleAlgebraAction> {
    let field = Field::with_height(p, vec![var.to_string()], DEFAULT_HEIGHT.max(n))?;
    let mut action = height_one_action(&field, &YoungDiagram::new(vec![1])?, 0, &[0])?;
    for k in 2..=n {
        action = extend_action(&action, &GroupSchemeDescriptor::ker_f_minus_v(p, k)?)?;
    }
    if n == 1 {
        action.group = GroupSchemeDescriptor::ker_f_minus_v(p, 1)?;
    }
    Ok(action)
}

fn divided(field: &FieldRef, v: usize, order: u64) -> Result<DiffOp> {
    DiffOp::partial(field, v, order)
}

/// D_i = ∂^{[p^i]} for i < n and D_n = ∂^{[p^n]} − t^{p^{n−1}}∂ on F_p(t), with
/// [D_n, D_{n−1}] = D_0.
pub fn example_noncommutative(p: u64, n: u32, var: &str) -> Result<ModuleAlgebraAction> {
    if n < 2 {
        return Err(Error::Invalid("the non-commutative family needs n ≥ 2".into()));
    }
    let field = Field::with_height(p, vec![var.to_string()], DEFAULT_HEIGHT.max(n + 1))?;
    let witt = witt_sum_polynomials(p, n as usize + 1)?;
    let coords: Vec<usize> = (0..=n as usize).collect();
    let mut d = Draft::new(p);
    for i in 0..=n as usize {
        let j = d.push(format!("U{i}"), i as u32 + 1, 1);
        d.witt_tail(j, &witt, i, &coords);
    }
    let n = n as usize;
    let dual = d.build(false, vec![(n, n - 1, 0)])?;
    let group = GroupSchemeDescriptor::explicit(dual.clone(), None)?;
    let mut assignment = Vec::with_capacity(n + 1);
    for i in 0..n {
        assignment.push((format!("U{i}"), divided(&field, 0, p.pow(i as u32))?));
    }
    let t = RationalFunction::var(&field, 0).pow(p.pow(n as u32 - 1));
    let last = &divided(&field, 0, p.pow(n as u32))? - &divided(&field, 0, 1)?.left_mul(&t);
    assignment.push((format!("U{n}"), last));
    ModuleAlgebraAction::with_dual(&field, group, dual, assignment)
}

/// The self-dual group with k[G] = k[T_0,T_1,U_0,U_1]/(T_0^p, U_0^p, T_1^p − U_0, U_1^p − T_0),
/// acting on F_p(x, y).
pub fn example_counterexample_surface(p: u64, x: &str, y: &str) -> Result<ModuleAlgebraAction> {
    let field = Field::with_height(p, vec![x.to_string(), y.to_string()], DEFAULT_HEIGHT)?;
    let witt = witt_sum_polynomials(p, 2)?;
    let mut d = Draft::new(p);
    let t0 = d.push("T0".into(), 1, 1);
    let u0 = d.push("U0".into(), 1, 1);
    let t1 = d.push("T1".into(), 2, 1);
    let u1 = d.push("U1".into(), 2, 1);
    d.relations[t1].push((1, vec![(u0, 1)]));
    d.relations[u1].push((1, vec![(t0, 1)]));
    d.witt_tail(t1, &witt, 1, &[t0, t1]);
    d.witt_tail(u1, &witt, 1, &[u0, u1]);
    let dual = d.build(true, Vec::new())?;
    let group = GroupSchemeDescriptor::explicit(dual.clone(), Some(dual.clone()))?;
    let xp = RationalFunction::var(&field, 0).pow(p * (p - 1));
    let yp = RationalFunction::var(&field, 1).pow(p * (p - 1));
    let assignment = vec![
        ("T0".to_string(), divided(&field, 0, 1)?),
        ("U0".to_string(), divided(&field, 1, 1)?),
        ("T1".to_string(), &divided(&field, 0, p)? - &divided(&field, 1, 1)?.left_mul(&xp)),
        ("U1".to_string(), &divided(&field, 1, p)? - &divided(&field, 0, 1)?.left_mul(&yp)),
    ];
    ModuleAlgebraAction::with_dual(&field, group, dual, assignment)
}
