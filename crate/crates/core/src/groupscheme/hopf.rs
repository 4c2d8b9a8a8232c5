//! Hopf algebra presentations k[T_1..T_r]/(T_j^{p^{m_j}} − Q_j) with Δ(T) = T⊗1 + 1⊗T + Σ A⊗B.

use crate::error::{Error, Result};
use crate::field::{Exp, Field, FieldRef, Polynomial};

/// One summand c·A⊗B of a comultiplication tail; A and B are monomials in earlier
/// generators, or both the generator itself (the law of μ_p, Δ(M) = M⊗1 + 1⊗M + M⊗M).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailTerm {
    pub coeff: u64,
    pub left: Exp,
    pub right: Exp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopfGenerator {
    pub name: String,
    pub level: u32,
    pub p_exponent: u32,
    /// Q in T^{p^m} = Q. Equal to T itself for the multiplicative generator e^p = e.
    pub relation_tail: Polynomial,
    pub comul_tail: Vec<TailTerm>,
}

/// [left, right] = value, for presentations that are not commutative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commutator {
    pub left: String,
    pub right: String,
    pub value: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopfPresentation {
    pub p: u64,
    ring: FieldRef,
    pub generators: Vec<HopfGenerator>,
    pub commutative: bool,
    pub extra_commutators: Vec<Commutator>,
}

/// Polynomial ring in the given generator names.
pub fn generator_ring(p: u64, names: &[String]) -> Result<FieldRef> {
    Field::with_height(p, names.to_vec(), 1)
}

fn only_before(e: &Exp, j: usize) -> bool {
    e[j..].iter().all(|&k| k == 0)
}

impl HopfGenerator {
    pub fn is_multiplicative(&self, index: usize) -> bool {
        let ring = self.relation_tail.field();
        self.relation_tail == Polynomial::var(ring, index)
    }
}

impl HopfPresentation {
    pub fn new(
        p: u64,
        ring: FieldRef,
        generators: Vec<HopfGenerator>,
        commutative: bool,
        extra_commutators: Vec<Commutator>,
    ) -> Result<Self> {
        if ring.p() != p {
            return Err(Error::FieldMismatch);
        }
        if ring.nvars() != generators.len() {
            return Err(Error::Invalid("generator ring does not match the generators".into()));
        }
        let mut prev_level = 1;
        for (j, g) in generators.iter().enumerate() {
            if ring.vars()[j] != g.name {
                return Err(Error::Invalid(format!("generator {} is out of place", g.name)));
            }
            if g.level == 0 || g.p_exponent == 0 {
                return Err(Error::Invalid(format!("generator {} needs positive level and exponent", g.name)));
            }
            if g.level < prev_level {
                return Err(Error::Invalid(format!("generator {} breaks the level order", g.name)));
            }
            prev_level = g.level;
            if !Field::same(g.relation_tail.field(), &ring) {
                return Err(Error::FieldMismatch);
            }
            if g.relation_tail.constant_value() != 0 {
                return Err(Error::Invalid(format!("relation of {} has a constant term", g.name)));
            }
            if g.is_multiplicative(j) {
                if g.p_exponent != 1 || !g.comul_tail.is_empty() {
                    return Err(Error::Invalid(format!("{} must satisfy e^p = e and be primitive", g.name)));
                }
            } else if !g.relation_tail.terms().keys().all(|e| only_before(e, j)) {
                return Err(Error::Invalid(format!("relation of {} uses later generators", g.name)));
            }
            for t in &g.comul_tail {
                if t.left.len() != generators.len() || t.right.len() != generators.len() {
                    return Err(Error::Invalid(format!("tail of {} has the wrong arity", g.name)));
                }
                let unit = ring.unit_exp(j);
                let group_law = t.left == unit && t.right == unit;
                if !group_law && (!only_before(&t.left, j) || !only_before(&t.right, j)) {
                    return Err(Error::Invalid(format!("tail of {} uses later generators", g.name)));
                }
                if t.left.iter().all(|&k| k == 0) || t.right.iter().all(|&k| k == 0) {
                    return Err(Error::Invalid(format!("tail of {} has a unit factor", g.name)));
                }
                if t.coeff % p == 0 {
                    return Err(Error::Invalid(format!("tail of {} has a zero coefficient", g.name)));
                }
            }
        }
        for c in &extra_commutators {
            if ring.var_index(&c.left).is_none() || ring.var_index(&c.right).is_none() {
                return Err(Error::Invalid("commutator names an unknown generator".into()));
            }
            if !Field::same(c.value.field(), &ring) {
                return Err(Error::FieldMismatch);
            }
        }
        if commutative && !extra_commutators.is_empty() {
            return Err(Error::Invalid("a commutative presentation has no commutators".into()));
        }
        Ok(HopfPresentation {
            p,
            ring,
            generators,
            commutative,
            extra_commutators,
        })
    }

    pub fn empty(p: u64) -> Result<Self> {
        Self::new(p, generator_ring(p, &[])?, Vec::new(), true, Vec::new())
    }

    pub fn ring(&self) -> &FieldRef {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ring.var_index(name)
    }

    pub fn is_multiplicative(&self, j: usize) -> bool {
        self.generators[j].is_multiplicative(j)
    }

    pub fn height(&self) -> u32 {
        self.generators.iter().map(|g| g.level).max().unwrap_or(0)
    }

    /// log_p of the dimension of the algebra.
    pub fn order_exponent(&self) -> u32 {
        self.generators.iter().map(|g| g.p_exponent).sum()
    }

    /// [T_i, T_j] for i ≠ j: zero unless declared.
    pub fn commutator(&self, i: usize, j: usize) -> Polynomial {
        let (a, b) = (&self.generators[i].name, &self.generators[j].name);
        for c in &self.extra_commutators {
            if &c.left == a && &c.right == b {
                return c.value.clone();
            }
            if &c.left == b && &c.right == a {
                return -&c.value;
            }
        }
        Polynomial::zero(&self.ring)
    }

    /// The generators of level ≤ i; a prefix, since tails and relations only look back.
    pub fn truncate(&self, i: u32) -> Result<HopfPresentation> {
        let keep = self.generators.iter().take_while(|g| g.level <= i).count();
        let names: Vec<String> = self.names()[..keep].to_vec();
        let ring = generator_ring(self.p, &names)?;
        let cut = |e: &Exp| -> Exp { e[..keep].iter().copied().collect() };
        let rehome = |f: &Polynomial| Polynomial::from_terms(&ring, f.terms().iter().map(|(e, c)| (cut(e), *c)));
        let generators = self.generators[..keep]
            .iter()
            .map(|g| HopfGenerator {
                name: g.name.clone(),
                level: g.level,
                p_exponent: g.p_exponent,
                relation_tail: rehome(&g.relation_tail),
                comul_tail: g
                    .comul_tail
                    .iter()
                    .map(|t| TailTerm {
                        coeff: t.coeff,
                        left: cut(&t.left),
                        right: cut(&t.right),
                    })
                    .collect(),
            })
            .collect();
        let commutators: Vec<Commutator> = self
            .extra_commutators
            .iter()
            .filter(|c| names.contains(&c.left) && names.contains(&c.right))
            .map(|c| Commutator {
                left: c.left.clone(),
                right: c.right.clone(),
                value: rehome(&c.value),
            })
            .collect();
        let commutative = self.commutative || commutators.is_empty();
        HopfPresentation::new(self.p, ring, generators, commutative, commutators)
    }

    /// The generators at the given indices, which must be closed under relations and tails.
    pub fn sub_presentation(&self, keep: &[usize]) -> Result<HopfPresentation> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let names: Vec<String> = keep.iter().map(|&j| self.generators[j].name.clone()).collect();
        let ring = generator_ring(self.p, &names)?;
        let cut = |e: &Exp| -> Result<Exp> {
            if e.iter().enumerate().any(|(j, &k)| k > 0 && !keep.contains(&j)) {
                return Err(Error::Invalid("sub-presentation is not closed".into()));
            }
            Ok(keep.iter().map(|&j| e[j]).collect())
        };
        let rehome = |f: &Polynomial| -> Result<Polynomial> {
            let terms = f.terms().iter().map(|(e, c)| Ok((cut(e)?, *c))).collect::<Result<Vec<_>>>()?;
            Ok(Polynomial::from_terms(&ring, terms))
        };
        let mut generators = Vec::with_capacity(keep.len());
        for &j in &keep {
            let g = &self.generators[j];
            let mut comul_tail = Vec::with_capacity(g.comul_tail.len());
            for t in &g.comul_tail {
                comul_tail.push(TailTerm {
                    coeff: t.coeff,
                    left: cut(&t.left)?,
                    right: cut(&t.right)?,
                });
            }
            generators.push(HopfGenerator {
                name: g.name.clone(),
                level: g.level,
                p_exponent: g.p_exponent,
                relation_tail: rehome(&g.relation_tail)?,
                comul_tail,
            });
        }
        let mut commutators = Vec::new();
        for c in &self.extra_commutators {
            if names.contains(&c.left) && names.contains(&c.right) {
                commutators.push(Commutator {
                    left: c.left.clone(),
                    right: c.right.clone(),
                    value: rehome(&c.value)?,
                });
            }
        }
        let commutative = self.commutative || commutators.is_empty();
        HopfPresentation::new(self.p, ring, generators, commutative, commutators)
    }

    /// The acting algebra of G^ell: copy c of generator g is named g_c, listed level by level.
    pub fn power(&self, ell: usize) -> Result<HopfPresentation> {
        let r = self.len();
        let mut order = Vec::with_capacity(r * ell);
        for level in 1..=self.height() {
            for c in 0..ell {
                for (j, g) in self.generators.iter().enumerate() {
                    if g.level == level {
                        order.push((c, j));
                    }
                }
            }
        }
        let names: Vec<String> = order
            .iter()
            .map(|&(c, j)| format!("{}_{}", self.generators[j].name, c + 1))
            .collect();
        let ring = generator_ring(self.p, &names)?;
        let slot = |c: usize, j: usize| order.iter().position(|&o| o == (c, j)).expect("listed");
        let lift = |c: usize, e: &Exp| -> Exp {
            let mut f = ring.zero_exp();
            for (j, &k) in e.iter().enumerate() {
                f[slot(c, j)] = k;
            }
            f
        };
        let generators = order
            .iter()
            .zip(&names)
            .map(|(&(c, j), name)| {
                let g = &self.generators[j];
                HopfGenerator {
                    name: name.clone(),
                    level: g.level,
                    p_exponent: g.p_exponent,
                    relation_tail: Polynomial::from_terms(
                        &ring,
                        g.relation_tail.terms().iter().map(|(e, k)| (lift(c, e), *k)),
                    ),
                    comul_tail: g
                        .comul_tail
                        .iter()
                        .map(|t| TailTerm {
                            coeff: t.coeff,
                            left: lift(c, &t.left),
                            right: lift(c, &t.right),
                        })
                        .collect(),
                }
            })
            .collect();
        let mut commutators = Vec::new();
        for c in 0..ell {
            for k in &self.extra_commutators {
                let value = Polynomial::from_terms(&ring, k.value.terms().iter().map(|(e, v)| (lift(c, e), *v)));
                commutators.push(Commutator {
                    left: format!("{}_{}", k.left, c + 1),
                    right: format!("{}_{}", k.right, c + 1),
                    value,
                });
            }
        }
        HopfPresentation::new(self.p, ring, generators, self.commutative, commutators)
    }

    /// Normal form modulo T_j^{p^{m_j}} = Q_j in a commutative algebra.
    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        let rules: Vec<(usize, u32, Polynomial)> = self
            .generators
            .iter()
            .enumerate()
            .map(|(j, g)| (j, self.p.pow(g.p_exponent) as u32, g.relation_tail.clone()))
            .collect();
        reduce_with(f, &rules)
    }

    /// Doubled ring with generators g_1 (for g⊗1) and g_2 (for 1⊗g).
    fn doubled(&self) -> Result<FieldRef> {
        let mut names: Vec<String> = self.names().iter().map(|n| format!("{n}_1")).collect();
        names.extend(self.names().iter().map(|n| format!("{n}_2")));
        generator_ring(self.p, &names)
    }

    /// Δ(T_j) in the doubled ring.
    fn delta(&self, ring2: &FieldRef, j: usize) -> Polynomial {
        let r = self.len();
        let mut acc = &Polynomial::var(ring2, j) + &Polynomial::var(ring2, r + j);
        for t in &self.generators[j].comul_tail {
            let e: Exp = t.left.iter().chain(&t.right).copied().collect();
            acc = &acc + &Polynomial::monomial(ring2, e, t.coeff);
        }
        acc
    }

    /// Whether each P_j = T_j^{p^{m_j}} − Q_j satisfies Δ(P_j) ≡ P_j⊗1 + 1⊗P_j.
    pub fn primitivity(&self) -> Result<Vec<(String, bool)>> {
        if !self.commutative {
            return Err(Error::NotCommutative);
        }
        let r = self.len();
        let ring2 = self.doubled()?;
        let deltas: Vec<Polynomial> = (0..r).map(|j| self.delta(&ring2, j)).collect();
        let mut rules = Vec::with_capacity(2 * r);
        for copy in 0..2 {
            for (j, g) in self.generators.iter().enumerate() {
                let shifted = Polynomial::from_terms(
                    &ring2,
                    g.relation_tail.terms().iter().map(|(e, c)| {
                        let mut f = ring2.zero_exp();
                        f[copy * r..copy * r + r].copy_from_slice(e);
                        (f, *c)
                    }),
                );
                rules.push((copy * r + j, self.p.pow(g.p_exponent) as u32, shifted));
            }
        }
        let mut out = Vec::with_capacity(r);
        for (j, g) in self.generators.iter().enumerate() {
            let lhs = deltas[j].frobenius(g.p_exponent);
            let mut dq = Polynomial::zero(&ring2);
            for (e, c) in g.relation_tail.terms() {
                let mut term = Polynomial::constant(&ring2, *c);
                for (k, &ek) in e.iter().enumerate() {
                    if ek > 0 {
                        term = &term * &deltas[k].pow(ek as u64);
                    }
                }
                dq = &dq + &term;
            }
            let defect = reduce_with(&(&lhs - &dq), &rules);
            out.push((g.name.clone(), defect.is_zero()));
        }
        Ok(out)
    }

    /// V(T_j) = Σ c·M over the diagonal terms c·M⊗…⊗M of the p-fold coproduct of T_j.
    /// An action then satisfies T_j(f^p) = (V(T_j)(f))^p.
    pub fn verschiebung(&self, j: usize) -> Result<Polynomial> {
        let p = self.p as usize;
        let r = self.len();
        let mut names = Vec::with_capacity(p * r);
        for c in 1..=p {
            names.extend(self.names().iter().map(|n| format!("{n}_{c}")));
        }
        let ring = generator_ring(self.p, &names)?;
        let rules: Vec<(usize, u32, Polynomial)> = (0..p)
            .flat_map(|copy| {
                let ring = &ring;
                self.generators.iter().enumerate().map(move |(i, g)| {
                    let q = Polynomial::from_terms(
                        ring,
                        g.relation_tail.terms().iter().map(|(e, c)| {
                            let mut f = ring.zero_exp();
                            f[copy * r..copy * r + r].copy_from_slice(e);
                            (f, *c)
                        }),
                    );
                    (copy * r + i, self.p.pow(g.p_exponent) as u32, q)
                })
            })
            .collect();
        let in_copy = |e: &Exp, copy: usize| -> Exp {
            let mut f = ring.zero_exp();
            f[copy * r..copy * r + r].copy_from_slice(e);
            f
        };
        let product = |deltas: &[Polynomial], e: &Exp| -> Polynomial {
            let mut acc = Polynomial::one(&ring);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    acc = reduce_with(&(&acc * &deltas[i].pow(k as u64)), &rules);
                }
            }
            acc
        };
        // Δ_{k+1}(T) = Δ_k(T) + T^{(k+1)} + Σ c·Δ_k(A)·B^{(k+1)}.
        let mut deltas: Vec<Polynomial> = (0..r).map(|i| Polynomial::var(&ring, i)).collect();
        for k in 1..p {
            let mut next = Vec::with_capacity(r);
            for (i, g) in self.generators.iter().enumerate() {
                let mut acc = &deltas[i] + &Polynomial::var(&ring, k * r + i);
                for t in &g.comul_tail {
                    let right = Polynomial::monomial(&ring, in_copy(&t.right, k), t.coeff);
                    acc = &acc + &(&product(&deltas, &t.left) * &right);
                }
                next.push(reduce_with(&acc, &rules));
            }
            deltas = next;
        }
        let diagonal = deltas[j].terms().iter().filter_map(|(e, c)| {
            let first = &e[..r];
            (0..p)
                .all(|copy| &e[copy * r..copy * r + r] == first)
                .then(|| (first.iter().copied().collect::<Exp>(), *c))
        });
        Ok(Polynomial::from_terms(&self.ring, diagonal))
    }
}

/// Repeatedly rewrite x_j^{bound} as its replacement until no term is reducible.
pub(crate) fn reduce_with(f: &Polynomial, rules: &[(usize, u32, Polynomial)]) -> Polynomial {
    let field = f.field().clone();
    let mut done = Polynomial::zero(&field);
    let mut pending = f.clone();
    while !pending.is_zero() {
        let mut next = Polynomial::zero(&field);
        let mut normal = Vec::new();
        for (e, c) in pending.terms() {
            let hit = rules.iter().find(|(j, b, _)| e[*j] >= *b);
            match hit {
                None => normal.push((e.clone(), *c)),
                Some((j, b, q)) => {
                    let mut rest = e.clone();
                    rest[*j] -= b;
                    next = &next + &q.shift(&rest).scale(*c);
                }
            }
        }
        done = &done + &Polynomial::from_terms(&field, normal);
        pending = next;
    }
    done
}
