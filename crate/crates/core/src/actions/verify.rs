use super::ModuleAlgebraAction;
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::{basis_exponents, Exp, Polynomial, RationalFunction};
use crate::linalg::{fp_rank, rank, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub witness: Option<String>,
}

impl Check {
    fn pass(label: String) -> Self {
        Check {
            label,
            passed: true,
            witness: None,
        }
    }

    fn fail(label: String, witness: String) -> Self {
        Check {
            label,
            passed: false,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub relation_checks: Vec<Check>,
    pub commutation_checks: Vec<Check>,
    pub compatibility_checks: Vec<Check>,
    pub unit_checks: Vec<Check>,
    pub faithful: Option<bool>,
    pub generically_free: Option<bool>,
    /// How faithfulness and generic freeness were decided.
    pub criterion: String,
    /// Monomial test pairs have every exponent below p^N.
    pub test_exponent: u32,
    pub random_pairs: usize,
}

impl VerificationReport {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.relation_checks
            .iter()
            .chain(&self.commutation_checks)
            .chain(&self.compatibility_checks)
            .chain(&self.unit_checks)
    }

    pub fn passed(&self) -> bool {
        self.checks().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks().filter(|c| !c.passed).collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let sections = [
            ("relations", &self.relation_checks),
            ("commutation", &self.commutation_checks),
            ("compatibility", &self.compatibility_checks),
            ("annihilates 1", &self.unit_checks),
        ];
        for (title, checks) in sections {
            out.push_str(&format!("{title}:\n"));
            for c in checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                out.push_str(&format!("  {mark} {}\n", c.label));
                if let Some(w) = &c.witness {
                    out.push_str(&format!("       witness: {w}\n"));
                }
            }
        }
        let tri = |b: Option<bool>| match b {
            Some(true) => "yes",
            Some(false) => "no",
            None => "n/a",
        };
        out.push_str(&format!("faithful: {}\n", tri(self.faithful)));
        out.push_str(&format!("generically free: {}\n", tri(self.generically_free)));
        out.push_str(&format!("criterion: {}\n", self.criterion));
        out.push_str(&format!(
            "test set: monomials below p^{}, {} random pairs per generator\n",
            self.test_exponent, self.random_pairs
        ));
        out.push_str(if self.passed() { "verdict: pass\n" } else { "verdict: FAIL\n" });
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub random_pairs: usize,
    pub seed: u64,
    /// Above this many test monomials, a seeded sample of pairs replaces the full grid.
    pub max_monomials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            random_pairs: 100,
            seed: 0x5eed,
            max_monomials: 128,
        }
    }
}

pub fn verify_action(action: &ModuleAlgebraAction) -> VerificationReport {
    verify_action_with(action, VerifyOptions::default())
}

fn monomial_rf(action: &ModuleAlgebraAction, e: &Exp) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::monomial(&action.field, e.clone(), 1))
}

fn show_monomial(action: &ModuleAlgebraAction, e: &Exp) -> String {
    Polynomial::monomial(&action.field, e.clone(), 1).to_string()
}

/// Compare two operators; on mismatch name a monomial on which they differ.
fn compare_ops(action: &ModuleAlgebraAction, label: String, lhs: Result<DiffOp>, rhs: Result<DiffOp>) -> Check {
    let (lhs, rhs) = match (lhs, rhs) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Check::fail(label, format!("could not evaluate: {e}")),
    };
    let diff = &lhs - &rhs;
    if diff.is_zero() {
        return Check::pass(label);
    }
    // A support term of least total order is hit with its own coefficient.
    let alpha = diff
        .terms()
        .keys()
        .min_by_key(|e| (e.iter().sum::<u32>(), (*e).clone()))
        .expect("nonzero")
        .clone();
    let x = monomial_rf(action, &alpha);
    Check::fail(
        label,
        format!(
            "on {}: left side gives {}, right side gives {}",
            show_monomial(action, &alpha),
            lhs.apply(&x),
            rhs.apply(&x)
        ),
    )
}

fn relation_checks(action: &ModuleAlgebraAction) -> Vec<Check> {
    let p = action.p();
    let mut out = Vec::new();
    for (j, g) in action.dual.generators.iter().enumerate() {
        let e = p.pow(g.p_exponent);
        let label = format!("{}^{} = {}", g.name, e, g.relation_tail);
        let lhs = action.assignment[j].1.power(e);
        let rhs = action.poly_op(&g.relation_tail);
        out.push(compare_ops(action, label, lhs, rhs));
    }
    for c in &action.dual.extra_commutators {
        let label = format!("[{}, {}] = {}", c.left, c.right, c.value);
        let a = action.op(&c.left).expect("assigned");
        let b = action.op(&c.right).expect("assigned");
        out.push(compare_ops(action, label, a.commutator(b), action.poly_op(&c.value)));
    }
    out
}

fn commutation_checks(action: &ModuleAlgebraAction) -> Vec<Check> {
    let names = action.dual.names();
    let declared = |a: &str, b: &str| {
        action
            .dual
            .extra_commutators
            .iter()
            .any(|c| (c.left == a && c.right == b) || (c.left == b && c.right == a))
    };
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            if declared(&names[i], &names[j]) {
                continue;
            }
            let label = format!("[{}, {}] = 0", names[i], names[j]);
            let (a, b) = (&action.assignment[i].1, &action.assignment[j].1);
            out.push(compare_ops(action, label, a.commutator(b), Ok(DiffOp::zero(&action.field))));
        }
    }
    out
}

/// The tail of generator j as operator triples (c, v(A), v(B)).
pub(crate) fn tail_ops(action: &ModuleAlgebraAction, j: usize) -> Result<Vec<(u64, DiffOp, DiffOp)>> {
    action.dual.generators[j]
        .comul_tail
        .iter()
        .map(|t| Ok((t.coeff, action.monomial_op(&t.left)?, action.monomial_op(&t.right)?)))
        .collect()
}

type BiOp = BTreeMap<(Exp, Exp), RationalFunction>;

fn bi_add(m: &mut BiOp, key: (Exp, Exp), c: RationalFunction) {
    let v = match m.remove(&key) {
        Some(old) => &old + &c,
        None => c,
    };
    if !v.is_zero() {
        m.insert(key, v);
    }
}

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

/// Both sides of the product rule as bi-operators Σ c·∂^{[β]}⊗∂^{[γ]}.
fn symbolic_product_rule(d: &DiffOp, tails: &[(u64, DiffOp, DiffOp)]) -> Option<(Exp, Exp)> {
    let zero: Exp = d.field().zero_exp();
    let mut lhs = BiOp::new();
    for (alpha, c) in d.terms() {
        for beta in below(alpha) {
            let gamma: Exp = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
            bi_add(&mut lhs, (beta, gamma), c.clone());
        }
    }
    let mut rhs = BiOp::new();
    for (alpha, c) in d.terms() {
        bi_add(&mut rhs, (alpha.clone(), zero.clone()), c.clone());
        bi_add(&mut rhs, (zero.clone(), alpha.clone()), c.clone());
    }
    for (k, a, b) in tails {
        for (beta, ca) in a.terms() {
            for (gamma, cb) in b.terms() {
                bi_add(&mut rhs, (beta.clone(), gamma.clone()), (ca * cb).scale(*k));
            }
        }
    }
    let keys: std::collections::BTreeSet<(Exp, Exp)> = lhs.keys().chain(rhs.keys()).cloned().collect();
    keys.into_iter().find(|k| lhs.get(k) != rhs.get(k))
}

fn rule_defect(
    d: &DiffOp,
    tails: &[(u64, DiffOp, DiffOp)],
    f: &RationalFunction,
    g: &RationalFunction,
) -> Option<(RationalFunction, RationalFunction)> {
    let lhs = d.apply(&(f * g));
    let mut rhs = &(&d.apply(f) * g) + &(f * &d.apply(g));
    for (k, a, b) in tails {
        rhs = &rhs + &(&a.apply(f) * &b.apply(g)).scale(*k);
    }
    (lhs != rhs).then_some((lhs, rhs))
}

fn random_rational(rng: &mut ChaCha8Rng, action: &ModuleAlgebraAction, deg: u32) -> RationalFunction {
    let field = &action.field;
    let p = field.p();
    let poly = |rng: &mut ChaCha8Rng, nterms: usize| {
        let terms: Vec<(Exp, u64)> = (0..nterms)
            .map(|_| {
                let e: Exp = (0..field.nvars()).map(|_| rng.gen_range(0..=deg)).collect();
                (e, rng.gen_range(1..p))
            })
            .collect();
        Polynomial::from_terms(field, terms)
    };
    loop {
        let num = poly(rng, 3);
        let mut den = poly(rng, 2);
        if rng.gen_bool(0.3) {
            den = Polynomial::one(field);
        }
        if den.is_zero() {
            continue;
        }
        if let Ok(f) = RationalFunction::normalize(num, den) {
            return f;
        }
    }
}

fn compatibility_checks(action: &ModuleAlgebraAction, opts: VerifyOptions, n_exp: u32) -> Vec<Check> {
    let field = &action.field;
    let p = field.p();
    let monomials = basis_exponents(field.nvars(), p, n_exp);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let full = monomials.len() <= opts.max_monomials;
    if full {
        for a in 0..monomials.len() {
            for b in 0..monomials.len() {
                pairs.push((a, b));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9a17);
        let count = opts.max_monomials * opts.max_monomials;
        for _ in 0..count {
            pairs.push((rng.gen_range(0..monomials.len()), rng.gen_range(0..monomials.len())));
        }
    }
    let xs: Vec<RationalFunction> = monomials.iter().map(|e| monomial_rf(action, e)).collect();
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (j, (name, d)) in action.assignment.iter().enumerate() {
        let tails = match tail_ops(action, j) {
            Ok(t) => t,
            Err(e) => {
                out.push(Check::fail(format!("{name}: product rule"), format!("could not evaluate tail: {e}")));
                continue;
            }
        };
        let label = format!("{name}: product rule, symbolic");
        out.push(match symbolic_product_rule(d, &tails) {
            None => Check::pass(label),
            Some((b, g)) => Check::fail(
                label,
                format!(
                    "coefficient of d^[{}] (x) d^[{}] differs",
                    show_monomial(action, &b),
                    show_monomial(action, &g)
                ),
            ),
        });

        let images = |op: &DiffOp| -> Vec<RationalFunction> { xs.iter().map(|x| op.apply(x)).collect() };
        let d_img = images(d);
        let tail_img: Vec<(u64, Vec<RationalFunction>, Vec<RationalFunction>)> =
            tails.iter().map(|(k, a, b)| (*k, images(a), images(b))).collect();
        let mut product_cache: BTreeMap<Exp, RationalFunction> = BTreeMap::new();
        let mut failure = None;
        for &(a, b) in &pairs {
            let sum: Exp = monomials[a].iter().zip(&monomials[b]).map(|(x, y)| x + y).collect();
            let lhs = product_cache
                .entry(sum.clone())
                .or_insert_with(|| d.apply(&monomial_rf(action, &sum)))
                .clone();
            let mut rhs = &(&d_img[a] * &xs[b]) + &(&xs[a] * &d_img[b]);
            for (k, ai, bi) in &tail_img {
                rhs = &rhs + &(&ai[a] * &bi[b]).scale(*k);
            }
            if lhs != rhs {
                failure = Some(format!(
                    "f = {}, g = {}: D(fg) = {}, expansion gives {}",
                    show_monomial(action, &monomials[a]),
                    show_monomial(action, &monomials[b]),
                    lhs,
                    rhs
                ));
                break;
            }
        }
        let label = if full {
            format!("{name}: product rule on all monomial pairs below p^{n_exp}")
        } else {
            format!("{name}: product rule on {} sampled monomial pairs below p^{n_exp}", pairs.len())
        };
        out.push(match failure {
            None => Check::pass(label),
            Some(w) => Check::fail(label, w),
        });

        let mut failure = None;
        let deg = p as u32;
        for _ in 0..opts.random_pairs {
            let f = random_rational(&mut rng, action, deg);
            let g = random_rational(&mut rng, action, deg);
            if let Some((lhs, rhs)) = rule_defect(d, &tails, &f, &g) {
                failure = Some(format!("f = {f}, g = {g}: D(fg) = {lhs}, expansion gives {rhs}"));
                break;
            }
        }
        let label = format!("{name}: product rule on {} random rational pairs", opts.random_pairs);
        out.push(match failure {
            None => Check::pass(label),
            Some(w) => Check::fail(label, w),
        });
    }
    out
}

fn unit_checks(action: &ModuleAlgebraAction) -> Vec<Check> {
    let one = RationalFunction::one(&action.field);
    action
        .assignment
        .iter()
        .map(|(name, d)| {
            let label = format!("{name}(1) = 0");
            let v = d.apply(&one);
            if v.is_zero() {
                Check::pass(label)
            } else {
                Check::fail(label, format!("{name}(1) = {v}"))
            }
        })
        .collect()
}

pub fn verify_action_with(action: &ModuleAlgebraAction, opts: VerifyOptions) -> VerificationReport {
    let n_exp = action.assignment.iter().map(|(_, d)| d.level()).max().unwrap_or(1);
    let (faithful, generically_free, criterion) = if action.dual.commutative {
        (
            is_faithful(action).ok(),
            is_generically_free(action).ok(),
            "socle operators: F_p-independence for faithfulness, K-independence for generic freeness".to_string(),
        )
    } else {
        (
            None,
            kernel_of_frobenius_free(action).ok(),
            "not commutative: generic freeness decided on the Frobenius kernel, from K-independence of all p-powers of the level-one operators; faithfulness not decided".to_string(),
        )
    };
    VerificationReport {
        relation_checks: relation_checks(action),
        commutation_checks: commutation_checks(action),
        compatibility_checks: compatibility_checks(action, opts, n_exp),
        unit_checks: unit_checks(action),
        faithful,
        generically_free,
        criterion,
        test_exponent: n_exp,
        random_pairs: opts.random_pairs,
    }
}

/// Socle operators: D^{p^{m−1}} for each level-one unipotent generator, and the μ_p operators.
pub(crate) fn socle_ops(action: &ModuleAlgebraAction) -> Result<(Vec<DiffOp>, Vec<DiffOp>)> {
    let p = action.p();
    let mut unipotent = Vec::new();
    let mut mult = Vec::new();
    for (j, g) in action.dual.generators.iter().enumerate() {
        if g.level != 1 {
            continue;
        }
        let d = &action.assignment[j].1;
        if action.dual.is_multiplicative(j) {
            mult.push(d.clone());
        } else {
            unipotent.push(d.power(p.pow(g.p_exponent - 1))?);
        }
    }
    Ok((unipotent, mult))
}

fn coefficient_rows(ops: &[DiffOp]) -> Result<Vec<Vec<RationalFunction>>> {
    ops.iter()
        .map(|d| {
            d.derivation_coeffs()
                .ok_or_else(|| Error::NotSupported("socle operator is not a derivation".into()))
        })
        .collect()
}

fn k_independent(action: &ModuleAlgebraAction, ops: &[DiffOp]) -> Result<bool> {
    if ops.is_empty() {
        return Ok(true);
    }
    let rows = coefficient_rows(ops)?;
    Ok(rank(&Matrix::from_rows(&action.field, rows)) == ops.len())
}

/// No nonzero F_p-combination of the socle operators vanishes.
pub fn is_faithful(action: &ModuleAlgebraAction) -> Result<bool> {
    if !action.dual.commutative {
        return Err(Error::NotSupported("faithfulness of a non-commutative group".into()));
    }
    let (unipotent, mult) = socle_ops(action)?;
    for part in [unipotent, mult] {
        let rows = coefficient_rows(&part)?;
        if fp_rank(&rows) != part.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The socle operators are K-linearly independent.
pub fn is_generically_free(action: &ModuleAlgebraAction) -> Result<bool> {
    if !action.dual.commutative {
        return Err(Error::NotSupported("generic freeness of a non-commutative group".into()));
    }
    let (mut ops, mult) = socle_ops(action)?;
    ops.extend(mult);
    k_independent(action, &ops)
}

/// Generic freeness of the Frobenius kernel: every p-power D^{p^k}, k < m, of the level-one
/// operators, taken together, is K-linearly independent.
pub(crate) fn kernel_of_frobenius_free(action: &ModuleAlgebraAction) -> Result<bool> {
    let p = action.p();
    let mut ops = Vec::new();
    for (j, g) in action.dual.generators.iter().enumerate() {
        if g.level != 1 {
            continue;
        }
        let d = &action.assignment[j].1;
        if action.dual.is_multiplicative(j) {
            ops.push(d.clone());
            continue;
        }
        for k in 0..g.p_exponent {
            ops.push(d.power(p.pow(k))?);
        }
    }
    k_independent(action, &ops)
}
