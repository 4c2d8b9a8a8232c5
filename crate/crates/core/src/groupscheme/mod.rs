//! Infinitesimal group schemes: descriptors, Hopf presentations of k[G] and of the
//! acting algebra k[G]^∨, Witt addition laws, and numerical invariants.

mod hopf;
mod json;
mod witt;
mod young;

pub use hopf::{generator_ring, Commutator, HopfGenerator, HopfPresentation, TailTerm};
pub use json::{descriptor_from_json, descriptor_to_json, parse_descriptor};
pub use witt::{witt_field, witt_sum_polynomials, WittSumData};
pub use young::{necessary_condition, young_join, YoungDiagram};

use crate::error::{Error, Result};
use crate::field::{Exp, Polynomial, DEFAULT_HEIGHT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupFamily {
    /// ∏ W_{n_i}^1 × μ_p^mu.
    HeightOne { diagram: YoungDiagram, mu: usize },
    /// ker(F − V) on length-n Witt vectors.
    KerFMinusV(u32),
    /// k[T_0, T_1]/(T_0^p, T_1^{p²} − T_0).
    KerF2MinusV,
    /// A group given by the presentation of its acting algebra, optionally with its own.
    Explicit {
        dual: HopfPresentation,
        group: Option<HopfPresentation>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSchemeDescriptor {
    pub p: u64,
    pub family: GroupFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Invariants {
    pub lie_dim: u32,
    pub frobenius_height: u32,
    /// None when V is not nilpotent (μ_p factors) or the group is not commutative.
    pub verschiebung_index: Option<u32>,
    /// The order is p^order_exponent.
    pub order_exponent: u32,
}

impl Invariants {
    pub fn order(&self, p: u64) -> Option<u64> {
        p.checked_pow(self.order_exponent)
    }
}

impl GroupSchemeDescriptor {
    pub fn height_one(p: u64, rows: Vec<u32>, mu: usize) -> Result<Self> {
        check_prime(p)?;
        Ok(GroupSchemeDescriptor {
            p,
            family: GroupFamily::HeightOne {
                diagram: YoungDiagram::new(rows)?,
                mu,
            },
        })
    }

    pub fn ker_f_minus_v(p: u64, n: u32) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::Invalid("Witt length must be positive".into()));
        }
        Ok(GroupSchemeDescriptor {
            p,
            family: GroupFamily::KerFMinusV(n),
        })
    }

    pub fn ker_f2_minus_v(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(GroupSchemeDescriptor {
            p,
            family: GroupFamily::KerF2MinusV,
        })
    }

    pub fn explicit(dual: HopfPresentation, group: Option<HopfPresentation>) -> Result<Self> {
        if let Some(g) = &group {
            if g.p != dual.p {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(GroupSchemeDescriptor {
            p: dual.p,
            family: GroupFamily::Explicit { dual, group },
        })
    }

    /// Witt length or height the family needs; compared against the height budget.
    pub fn required_height(&self) -> u32 {
        match &self.family {
            GroupFamily::HeightOne { diagram, .. } => diagram.first_row().max(1),
            GroupFamily::KerFMinusV(n) => *n,
            GroupFamily::KerF2MinusV => 3,
            GroupFamily::Explicit { dual, .. } => dual.height(),
        }
    }

    pub fn is_commutative(&self) -> bool {
        match &self.family {
            GroupFamily::Explicit { dual, .. } => dual.commutative,
            _ => true,
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if crate::field::is_prime(p) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{p} is not prime")))
    }
}

fn check_budget(desc: &GroupSchemeDescriptor, budget: u32) -> Result<()> {
    let h = desc.required_height();
    if h > budget {
        return Err(Error::HeightBudgetExceeded { height: h, budget });
    }
    Ok(())
}

/// Builder for presentations whose relations and tails are written by generator index.
pub(crate) struct Draft {
    pub(crate) p: u64,
    pub(crate) names: Vec<String>,
    pub(crate) levels: Vec<u32>,
    pub(crate) exps: Vec<u32>,
    pub(crate) relations: Vec<Vec<(u64, Vec<(usize, u32)>)>>,
    pub(crate) tails: Vec<Vec<(u64, Vec<(usize, u32)>, Vec<(usize, u32)>)>>,
}

impl Draft {
    pub(crate) fn new(p: u64) -> Self {
        Draft {
            p,
            names: Vec::new(),
            levels: Vec::new(),
            exps: Vec::new(),
            relations: Vec::new(),
            tails: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, name: String, level: u32, p_exponent: u32) -> usize {
        self.names.push(name);
        self.levels.push(level);
        self.exps.push(p_exponent);
        self.relations.push(Vec::new());
        self.tails.push(Vec::new());
        self.names.len() - 1
    }

    /// Tail of generator `j` from S_i − X_i − Y_i, with X_k, Y_k ↦ generator `coords[k]`.
    pub(crate) fn witt_tail(&mut self, j: usize, witt: &WittSumData, i: usize, coords: &[usize]) {
        for (c, a, b) in witt.tail(i) {
            let map = |e: &[u32]| -> Vec<(usize, u32)> {
                e.iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(k, &v)| (coords[k], v))
                    .collect()
            };
            self.tails[j].push((c, map(&a), map(&b)));
        }
    }

    pub(crate) fn build(self, commutative: bool, commutators: Vec<(usize, usize, usize)>) -> Result<HopfPresentation> {
        let ring = generator_ring(self.p, &self.names)?;
        let exp = |parts: &[(usize, u32)]| -> Exp {
            let mut e = ring.zero_exp();
            for &(k, v) in parts {
                e[k] += v;
            }
            e
        };
        let mut generators = Vec::with_capacity(self.names.len());
        for j in 0..self.names.len() {
            let relation_tail = Polynomial::from_terms(&ring, self.relations[j].iter().map(|(c, m)| (exp(m), *c)));
            let comul_tail = self.tails[j]
                .iter()
                .map(|(c, a, b)| TailTerm {
                    coeff: *c,
                    left: exp(a),
                    right: exp(b),
                })
                .collect();
            generators.push(HopfGenerator {
                name: self.names[j].clone(),
                level: self.levels[j],
                p_exponent: self.exps[j],
                relation_tail,
                comul_tail,
            });
        }
        let commutators = commutators
            .into_iter()
            .map(|(a, b, v)| Commutator {
                left: self.names[a].clone(),
                right: self.names[b].clone(),
                value: Polynomial::var(&ring, v),
            })
            .collect();
        HopfPresentation::new(self.p, ring, generators, commutative, commutators)
    }
}

/// Witt-chain presentation: g_1^p = 0, g_i^p = g_{i-1}, tails from the length-n addition law.
fn witt_chain(p: u64, prefix: &str, n: u32) -> Result<HopfPresentation> {
    let witt = witt_sum_polynomials(p, n as usize)?;
    let mut d = Draft::new(p);
    let coords: Vec<usize> = (0..n as usize).collect();
    for i in 0..n as usize {
        let j = d.push(format!("{prefix}{}", i + 1), i as u32 + 1, 1);
        if i > 0 {
            d.relations[j].push((1, vec![(j - 1, 1)]));
        }
        d.witt_tail(j, &witt, i, &coords);
    }
    d.build(true, Vec::new())
}

/// Presentation of the algebra k[G]^∨ that acts on function fields.
pub fn dual(desc: &GroupSchemeDescriptor) -> Result<HopfPresentation> {
    dual_within(desc, DEFAULT_HEIGHT)
}

pub fn dual_within(desc: &GroupSchemeDescriptor, budget: u32) -> Result<HopfPresentation> {
    check_budget(desc, budget)?;
    let p = desc.p;
    match &desc.family {
        GroupFamily::HeightOne { diagram, mu } => {
            let mut d = Draft::new(p);
            for (i, &n) in diagram.rows().iter().enumerate() {
                d.push(format!("U{}", i + 1), 1, n);
            }
            for k in 0..*mu {
                let j = d.push(format!("E{}", k + 1), 1, 1);
                d.relations[j].push((1, vec![(j, 1)]));
            }
            d.build(true, Vec::new())
        }
        GroupFamily::KerFMinusV(n) => witt_chain(p, "U", *n),
        GroupFamily::KerF2MinusV => {
            // ker(F − V²) on length-3 Witt vectors: U1^p = 0, U2^p = 0, U3^p = U1.
            let witt = witt_sum_polynomials(p, 3)?;
            let mut d = Draft::new(p);
            for i in 0..3 {
                let j = d.push(format!("U{}", i + 1), i as u32 + 1, 1);
                d.witt_tail(j, &witt, i, &[0, 1, 2]);
            }
            d.relations[2].push((1, vec![(0, 1)]));
            d.build(true, Vec::new())
        }
        GroupFamily::Explicit { dual, .. } => Ok(dual.clone()),
    }
}

/// Presentation of the coordinate algebra k[G].
pub fn expand(desc: &GroupSchemeDescriptor) -> Result<HopfPresentation> {
    expand_within(desc, DEFAULT_HEIGHT)
}

pub fn expand_within(desc: &GroupSchemeDescriptor, budget: u32) -> Result<HopfPresentation> {
    check_budget(desc, budget)?;
    let p = desc.p;
    match &desc.family {
        GroupFamily::HeightOne { diagram, mu } => {
            let mut d = Draft::new(p);
            let single = diagram.len() == 1;
            let rows = diagram.rows();
            // Generators are listed level by level; within a level, in row order.
            let mut index = vec![Vec::new(); rows.len()];
            for k in 0..diagram.first_row().max(1) as usize {
                for (i, &n) in rows.iter().enumerate() {
                    if k < n as usize {
                        let name = if single {
                            format!("T{}", k + 1)
                        } else {
                            format!("T{}_{}", i + 1, k + 1)
                        };
                        index[i].push(d.push(name, k as u32 + 1, 1));
                    }
                }
                if k == 0 {
                    for m in 0..*mu {
                        let j = d.push(format!("M{}", m + 1), 1, 1);
                        d.tails[j].push((1, vec![(j, 1)], vec![(j, 1)]));
                    }
                }
            }
            for (i, &n) in rows.iter().enumerate() {
                let witt = witt_sum_polynomials(p, n as usize)?;
                for k in 0..n as usize {
                    d.witt_tail(index[i][k], &witt, k, &index[i]);
                }
            }
            d.build(true, Vec::new())
        }
        GroupFamily::KerFMinusV(n) => witt_chain(p, "T", *n),
        GroupFamily::KerF2MinusV => {
            let witt = witt_sum_polynomials(p, 2)?;
            let mut d = Draft::new(p);
            d.push("T0".into(), 1, 1);
            let j = d.push("T1".into(), 2, 2);
            d.relations[j].push((1, vec![(0, 1)]));
            d.witt_tail(j, &witt, 1, &[0, 1]);
            d.build(true, Vec::new())
        }
        GroupFamily::Explicit { group, .. } => group.clone().ok_or(Error::UnsupportedDual),
    }
}

/// The Cartier dual as a descriptor; an involution up to the expanded presentation.
pub fn dual_descriptor(desc: &GroupSchemeDescriptor) -> Result<GroupSchemeDescriptor> {
    if !desc.is_commutative() {
        return Err(Error::NotCommutative);
    }
    GroupSchemeDescriptor::explicit(expand(desc)?, Some(dual(desc)?))
}

fn unipotent_level_one(pres: &HopfPresentation) -> impl Iterator<Item = &HopfGenerator> {
    pres.generators
        .iter()
        .enumerate()
        .filter(move |(j, g)| g.level == 1 && !pres.is_multiplicative(*j))
        .map(|(_, g)| g)
}

fn mu_count(pres: &HopfPresentation) -> usize {
    (0..pres.len()).filter(|&j| pres.is_multiplicative(j)).count()
}

pub fn invariants(desc: &GroupSchemeDescriptor) -> Result<Invariants> {
    let pres = dual(desc)?;
    let lie_dim = unipotent_level_one(&pres).map(|g| g.p_exponent).sum::<u32>() + mu_count(&pres) as u32;
    let verschiebung_index = if pres.commutative && mu_count(&pres) == 0 {
        Some(verschiebung_index(&pres))
    } else {
        None
    };
    Ok(Invariants {
        lie_dim,
        frobenius_height: pres.height(),
        verschiebung_index,
        order_exponent: pres.order_exponent(),
    })
}

/// Smallest v with g^{p^v} = 0 for every generator of the acting algebra; V_G is dual to
/// Frobenius there.
fn verschiebung_index(pres: &HopfPresentation) -> u32 {
    let ring = pres.ring();
    let bound = pres.order_exponent() + 1;
    let mut powers: Vec<Polynomial> = (0..pres.len()).map(|j| Polynomial::var(ring, j)).collect();
    for v in 0..=bound {
        if powers.iter().all(|g| g.is_zero()) {
            return v;
        }
        powers = powers.iter().map(|g| pres.reduce(&g.frobenius(1))).collect();
    }
    unreachable!("unipotent generators are nilpotent")
}

/// α_p^r × μ_p^s with r the number of rows of τ(ker F_G).
pub fn socle(desc: &GroupSchemeDescriptor) -> Result<GroupSchemeDescriptor> {
    if !desc.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let pres = dual(desc)?;
    let r = unipotent_level_one(&pres).count();
    GroupSchemeDescriptor::height_one(desc.p, vec![1; r], mu_count(&pres))
}

/// ker F^i, reported in a named family whenever its acting algebra matches one.
pub fn ker_frobenius_power(desc: &GroupSchemeDescriptor, i: u32) -> Result<GroupSchemeDescriptor> {
    if i == 0 {
        return Err(Error::Invalid("Frobenius power must be positive".into()));
    }
    let pres = dual(desc)?;
    if i >= pres.height() {
        return Ok(desc.clone());
    }
    let cut = pres.truncate(i)?;
    recognize(desc.p, cut)
}

/// A named descriptor with exactly this acting algebra, else an explicit one.
pub fn recognize(p: u64, pres: HopfPresentation) -> Result<GroupSchemeDescriptor> {
    let mut candidates = Vec::new();
    if pres.generators.iter().all(|g| g.level == 1) {
        let rows: Vec<u32> = unipotent_level_one(&pres).map(|g| g.p_exponent).collect();
        if let Ok(d) = GroupSchemeDescriptor::height_one(p, rows, mu_count(&pres)) {
            candidates.push(d);
        }
    }
    if !pres.is_empty() {
        candidates.push(GroupSchemeDescriptor::ker_f_minus_v(p, pres.len() as u32)?);
    }
    candidates.push(GroupSchemeDescriptor::ker_f2_minus_v(p)?);
    for c in candidates {
        if dual(&c).map(|d| d == pres).unwrap_or(false) {
            return Ok(c);
        }
    }
    GroupSchemeDescriptor::explicit(pres, None)
}

/// Whether two descriptors have the same acting algebra.
pub fn same_group(a: &GroupSchemeDescriptor, b: &GroupSchemeDescriptor) -> bool {
    a.p == b.p
        && match (dual(a), dual(b)) {
            (Ok(x), Ok(y)) => x == y,
            _ => false,
        }
}

/// τ(ker F_G) together with the μ_p count, for commutative groups.
pub fn ker_f_diagram(desc: &GroupSchemeDescriptor) -> Result<(YoungDiagram, usize)> {
    if !desc.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let pres = dual(desc)?;
    let rows = unipotent_level_one(&pres).map(|g| g.p_exponent).collect();
    Ok((YoungDiagram::from_unsorted(rows)?, mu_count(&pres)))
}
