//! Rational actions as module-algebra structures: each generator of the acting algebra
//! k[G]^∨ is sent to a differential operator on K.

mod examples;
mod extend;
mod file;
mod products;
mod verify;

pub use examples::{example_counterexample_surface, example_noncommutative, example_ptorsion};
pub use extend::{adapted_pbasis, extend_action, AdaptedPBasis};
pub use file::{action_from_json, action_to_json, parse_action};
pub use products::{join_greedy, power_faithful_action};
pub use verify::{
    is_faithful, is_generically_free, verify_action, verify_action_with, Check, VerificationReport, VerifyOptions,
};

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::{Exp, Field, FieldRef, Polynomial, RationalFunction};
use crate::groupscheme::{dual_within, recognize, GroupSchemeDescriptor, HopfPresentation, YoungDiagram};
use crate::solver::operator_polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verified {
    Unchecked,
    Passed,
    Failed(Box<VerificationReport>),
}

#[derive(Debug, Clone)]
pub struct ModuleAlgebraAction {
    pub field: FieldRef,
    pub group: GroupSchemeDescriptor,
    pub dual: HopfPresentation,
    /// One operator per dual generator, in presentation order.
    pub assignment: Vec<(String, DiffOp)>,
    pub verified: Verified,
}

impl ModuleAlgebraAction {
    /// Pair each dual generator with its operator; names may be given in any order.
    pub fn new(field: &FieldRef, group: GroupSchemeDescriptor, assignment: Vec<(String, DiffOp)>) -> Result<Self> {
        let dual = dual_within(&group, field.height())?;
        Self::with_dual(field, group, dual, assignment)
    }

    pub(crate) fn with_dual(
        field: &FieldRef,
        group: GroupSchemeDescriptor,
        dual: HopfPresentation,
        assignment: Vec<(String, DiffOp)>,
    ) -> Result<Self> {
        if group.p != field.p() || dual.p != field.p() {
            return Err(Error::FieldMismatch);
        }
        let mut ordered = Vec::with_capacity(dual.len());
        for name in dual.names() {
            let mut hits = assignment.iter().filter(|(n, _)| *n == name);
            let Some((_, op)) = hits.next() else {
                return Err(Error::Invalid(format!("generator {name} has no operator")));
            };
            if hits.next().is_some() {
                return Err(Error::Invalid(format!("generator {name} is assigned twice")));
            }
            if !Field::same(op.field(), field) {
                return Err(Error::FieldMismatch);
            }
            ordered.push((name, op.clone()));
        }
        if let Some((extra, _)) = assignment.iter().find(|(n, _)| dual.index_of(n).is_none()) {
            return Err(Error::Invalid(format!("{extra} is not a generator of the acting algebra")));
        }
        Ok(ModuleAlgebraAction {
            field: field.clone(),
            group,
            dual,
            assignment: ordered,
            verified: Verified::Unchecked,
        })
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn op(&self, name: &str) -> Option<&DiffOp> {
        self.assignment.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn ops(&self) -> Vec<DiffOp> {
        self.assignment.iter().map(|(_, d)| d.clone()).collect()
    }

    /// v(M) for a monomial M in the generators, composed in presentation order.
    pub fn monomial_op(&self, e: &Exp) -> Result<DiffOp> {
        self.poly_op(&Polynomial::monomial(self.dual.ring(), e.clone(), 1))
    }

    /// v(f) for f without constant term.
    pub fn poly_op(&self, f: &Polynomial) -> Result<DiffOp> {
        if self.assignment.is_empty() {
            return Ok(DiffOp::zero(&self.field));
        }
        operator_polynomial(f, &self.ops())
    }

    /// Run every check and record the verdict.
    pub fn check(&mut self) -> VerificationReport {
        let report = verify_action(self);
        self.verified = if report.passed() {
            Verified::Passed
        } else {
            Verified::Failed(Box::new(report.clone()))
        };
        report
    }

    /// The action of the subgroup whose acting algebra is spanned by the named generators.
    pub fn restrict(&self, names: &[&str]) -> Result<ModuleAlgebraAction> {
        let mut keep = Vec::with_capacity(names.len());
        for n in names {
            keep.push(
                self.dual
                    .index_of(n)
                    .ok_or_else(|| Error::Invalid(format!("{n} is not a generator")))?,
            );
        }
        let sub = self.dual.sub_presentation(&keep)?;
        let assignment = sub
            .names()
            .into_iter()
            .map(|n| {
                let d = self.op(&n).expect("assigned").clone();
                (n, d)
            })
            .collect();
        let group = recognize(self.p(), sub.clone())?;
        Self::with_dual(&self.field, group, sub, assignment)
    }
}

/// Σ_{i=1}^{s} (x_1⋯x_{i−1})^{p−1} ∂_i on the given variables, of order exactly p^s.
pub fn canonical_block_derivation(field: &FieldRef, vars: &[usize]) -> Result<DiffOp> {
    let s = vars.len();
    if s == 0 {
        return Err(Error::Invalid("a block needs at least one variable".into()));
    }
    if s as u32 > field.height() {
        return Err(Error::HeightBudgetExceeded {
            height: s as u32,
            budget: field.height(),
        });
    }
    let p = field.p();
    let mut coeffs = vec![RationalFunction::zero(field); field.nvars()];
    let mut prefix = RationalFunction::one(field);
    for &v in vars {
        coeffs[v] = prefix.clone();
        prefix = &prefix * &RationalFunction::var(field, v).pow(p - 1);
    }
    let d = DiffOp::derivation(field, &coeffs);
    let order = d.derivation_order()?;
    if order != p.pow(s as u32) {
        return Err(Error::OrderAssertionFailed {
            expected: s as u32,
            got: order,
        });
    }
    Ok(d)
}

/// Resolve variable names to indices, rejecting unknown and repeated names.
pub fn variable_indices(field: &FieldRef, names: &[&str]) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::with_capacity(names.len());
    for n in names {
        let i = field
            .var_index(n)
            .ok_or_else(|| Error::Invalid(format!("unknown variable {n}")))?;
        if out.contains(&i) {
            return Err(Error::Invalid(format!("variable {n} is listed twice")));
        }
        out.push(i);
    }
    Ok(out)
}

/// Canonical blocks on consecutive variables for the rows, then x∂_x for each μ_p factor.
pub fn height_one_action(field: &FieldRef, diagram: &YoungDiagram, mu: usize, vars: &[usize]) -> Result<ModuleAlgebraAction> {
    let needed = diagram.boxes() as usize + mu;
    if needed > vars.len() {
        return Err(Error::DimensionTooSmall {
            needed,
            available: vars.len(),
        });
    }
    let group = GroupSchemeDescriptor::height_one(field.p(), diagram.rows().to_vec(), mu)?;
    let dual = dual_within(&group, field.height())?;
    let names = dual.names();
    let mut assignment = Vec::with_capacity(names.len());
    let mut next = 0;
    for (i, &n) in diagram.rows().iter().enumerate() {
        let block = &vars[next..next + n as usize];
        next += n as usize;
        assignment.push((names[i].clone(), canonical_block_derivation(field, block)?));
    }
    for k in 0..mu {
        let v = vars[next];
        next += 1;
        let mut coeffs = vec![RationalFunction::zero(field); field.nvars()];
        coeffs[v] = RationalFunction::var(field, v);
        assignment.push((names[diagram.len() + k].clone(), DiffOp::derivation(field, &coeffs)));
    }
    ModuleAlgebraAction::with_dual(field, group, dual, assignment)
}

/// A generically free action of a commutative group on the given variables: canonical
/// blocks (and x∂_x for μ_p factors) for ker F, extended level by level.
pub fn build_action(field: &FieldRef, group: &GroupSchemeDescriptor, vars: &[usize]) -> Result<ModuleAlgebraAction> {
    if group.p != field.p() {
        return Err(Error::FieldMismatch);
    }
    if !group.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let full = dual_within(group, field.height())?;
    let base_dual = full.truncate(1)?;
    let needed: usize = (0..base_dual.len())
        .map(|j| {
            if base_dual.is_multiplicative(j) {
                1
            } else {
                base_dual.generators[j].p_exponent as usize
            }
        })
        .sum();
    if needed > vars.len() {
        return Err(Error::DimensionTooSmall {
            needed,
            available: vars.len(),
        });
    }
    let mut assignment = Vec::with_capacity(base_dual.len());
    let mut next = 0;
    for (j, g) in base_dual.generators.iter().enumerate() {
        let d = if base_dual.is_multiplicative(j) {
            let v = vars[next];
            next += 1;
            let mut coeffs = vec![RationalFunction::zero(field); field.nvars()];
            coeffs[v] = RationalFunction::var(field, v);
            DiffOp::derivation(field, &coeffs)
        } else {
            let s = g.p_exponent as usize;
            let block = &vars[next..next + s];
            next += s;
            canonical_block_derivation(field, block)?
        };
        assignment.push((g.name.clone(), d));
    }
    if full.height() <= 1 {
        return ModuleAlgebraAction::with_dual(field, group.clone(), full, assignment);
    }
    let base_group = recognize(field.p(), base_dual.clone())?;
    let base = ModuleAlgebraAction::with_dual(field, base_group, base_dual, assignment)?;
    extend_action(&base, group)
}
