use super::extend::extend_action;
use super::{canonical_block_derivation, ModuleAlgebraAction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::{member_subfield, Field, FieldRef, RationalFunction};
use crate::groupscheme::{
    dual_within, invariants, recognize, young_join, GroupFamily, GroupSchemeDescriptor, YoungDiagram,
};
use crate::linalg::{fp_rank, rank, Matrix};

fn height_one_rows(action: &ModuleAlgebraAction) -> Result<Vec<u32>> {
    match &action.group.family {
        GroupFamily::HeightOne { mu: 0, .. } => Ok(action.dual.generators.iter().map(|g| g.p_exponent).collect()),
        GroupFamily::HeightOne { .. } => Err(Error::NotSupported("joining actions with μ_p factors".into())),
        _ => Err(Error::Invalid("join needs height-one unipotent actions".into())),
    }
}

fn spans(field: &FieldRef, ops: &[DiffOp]) -> Result<usize> {
    let rows = ops
        .iter()
        .map(|d| d.derivation_coeffs().ok_or(Error::NotADerivation))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(&Matrix::from_rows(field, rows)))
}

/// Greedy choice of derivations realizing the join of the input diagrams.
pub fn join_greedy(actions: &[ModuleAlgebraAction]) -> Result<ModuleAlgebraAction> {
    let Some(first) = actions.first() else {
        return Err(Error::Invalid("nothing to join".into()));
    };
    let field = first.field.clone();
    let p = field.p();
    if actions.iter().any(|a| !Field::same(&a.field, &field)) {
        return Err(Error::FieldMismatch);
    }
    let rows: Vec<Vec<u32>> = actions.iter().map(height_one_rows).collect::<Result<_>>()?;
    let diagrams: Vec<YoungDiagram> = rows.iter().map(|r| YoungDiagram::new(r.clone())).collect::<Result<_>>()?;
    let join = young_join(&diagrams);
    let needed = join.boxes() as usize;
    if needed > field.nvars() {
        return Err(Error::DimensionTooSmall {
            needed,
            available: field.nvars(),
        });
    }
    let all: Vec<(&str, &DiffOp)> = actions
        .iter()
        .flat_map(|a| a.assignment.iter().map(|(n, d)| (n.as_str(), d)))
        .collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if !all[i].1.commutator(all[j].1)?.is_zero() {
                return Err(Error::Invalid(format!(
                    "operators {} and {} of the inputs do not commute",
                    all[i].0, all[j].0
                )));
            }
        }
    }
    let mut chosen: Vec<DiffOp> = Vec::new();
    let mut tops: Vec<DiffOp> = Vec::new();
    for (r, &n_r) in join.rows().iter().enumerate() {
        let f = rows
            .iter()
            .position(|rs| rs.get(r) == Some(&n_r))
            .expect("some factor attains each row of the join");
        let mut pick = None;
        for k in 0..=r {
            let n_k = rows[f][k];
            let d = &actions[f].assignment[k].1;
            let top = d.power(p.pow(n_k - 1))?;
            let mut trial = tops.clone();
            trial.push(top.clone());
            if spans(&field, &trial)? == trial.len() {
                pick = Some((d.power(p.pow(n_k - n_r))?, top));
                break;
            }
        }
        let Some((e, top)) = pick else {
            return Err(Error::JoinInfeasible(r + 1));
        };
        let order = e.derivation_order()?;
        if order != p.pow(n_r) {
            return Err(Error::OrderAssertionFailed { expected: n_r, got: order });
        }
        chosen.push(e);
        tops.push(top);
    }
    let group = GroupSchemeDescriptor::height_one(p, join.rows().to_vec(), 0)?;
    let dual = dual_within(&group, field.height())?;
    let assignment = dual.names().into_iter().zip(chosen).collect();
    ModuleAlgebraAction::with_dual(&field, group, dual, assignment)
}

/// A faithful action of G^ell: copy i of the Frobenius-kernel action has its j-th block
/// derivation scaled by multipliers[i][j], then each copy is extended to G.
pub fn power_faithful_action(
    group: &GroupSchemeDescriptor,
    ell: usize,
    field: &FieldRef,
    vars: &[usize],
    multipliers: &[Vec<RationalFunction>],
) -> Result<ModuleAlgebraAction> {
    let p = field.p();
    if group.p != p {
        return Err(Error::FieldMismatch);
    }
    if !group.is_commutative() {
        return Err(Error::NotCommutative);
    }
    if ell == 0 || multipliers.len() != ell {
        return Err(Error::Invalid("need one multiplier row per copy".into()));
    }
    let lie = invariants(group)?.lie_dim as usize;
    if lie > vars.len() {
        return Err(Error::DimensionTooSmall {
            needed: lie,
            available: vars.len(),
        });
    }
    let full = dual_within(group, field.height())?;
    let kernel = full.truncate(1)?;
    if (0..kernel.len()).any(|j| kernel.is_multiplicative(j)) {
        return Err(Error::NotSupported("scaling μ_p factors".into()));
    }
    let h = kernel.len();
    if multipliers.iter().any(|row| row.len() != h) {
        return Err(Error::Invalid(format!("each multiplier row needs {h} entries")));
    }
    for f in multipliers.iter().flatten() {
        if !Field::same(f.field(), field) {
            return Err(Error::FieldMismatch);
        }
        if !member_subfield(f, 1) {
            return Err(Error::Invalid(format!("multiplier {f} is not a p-th power")));
        }
    }
    for j in 0..h {
        let column: Vec<Vec<RationalFunction>> = multipliers.iter().map(|row| vec![row[j].clone()]).collect();
        if fp_rank(&column) != ell {
            return Err(Error::DependentMultipliers);
        }
    }
    let mut blocks = Vec::with_capacity(h);
    let mut next = 0;
    for g in &kernel.generators {
        let m = g.p_exponent as usize;
        blocks.push(canonical_block_derivation(field, &vars[next..next + m])?);
        next += m;
    }
    let kernel_group = recognize(p, kernel.clone())?;
    let power = full.power(ell)?;
    let mut assignment = Vec::with_capacity(power.len());
    for (i, row) in multipliers.iter().enumerate() {
        let scaled = kernel
            .names()
            .into_iter()
            .zip(blocks.iter().zip(row))
            .map(|(n, (d, f))| (n, d.left_mul(f)))
            .collect();
        let base = ModuleAlgebraAction::with_dual(field, kernel_group.clone(), kernel.clone(), scaled)?;
        let copy = extend_action(&base, group)?;
        for (n, d) in copy.assignment {
            assignment.push((format!("{n}_{}", i + 1), d));
        }
    }
    let desc = recognize(p, power.clone())?;
    ModuleAlgebraAction::with_dual(field, desc, power, assignment)
}
