//! Small extension fields GF(p^k) with log tables, used to certify coprimality by evaluation.

use super::Polynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const MIN_SIZE: u64 = 64;
const MAX_SIZE: u64 = 1 << 16;

/// Elements are base-p digit strings of coefficients in t, where t generates the unit group.
pub(crate) struct Gfq {
    p: u64,
    k: usize,
    q: usize,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn cache() -> &'static Mutex<HashMap<u64, Option<Arc<Gfq>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Option<Arc<Gfq>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Gfq {
    /// Smallest GF(p^k) with at least 64 elements, or None when it would be too large.
    pub(crate) fn for_prime(p: u64) -> Option<Arc<Gfq>> {
        let mut guard = cache().lock().expect("gfq cache");
        guard.entry(p).or_insert_with(|| Gfq::build(p).map(Arc::new)).clone()
    }

    fn build(p: u64) -> Option<Gfq> {
        let mut k = 1;
        let mut q = p;
        while q < MIN_SIZE {
            k += 1;
            q *= p;
        }
        if q > MAX_SIZE {
            return None;
        }
        let q = q as usize;
        // Try monic moduli t^k + c_{k-1}t^{k-1} + … + c_0 until t has order q − 1.
        for code in 0..(q as u64) {
            let mut low = Vec::with_capacity(k);
            let mut c = code;
            for _ in 0..k {
                low.push(c % p);
                c /= p;
            }
            if low[0] == 0 {
                continue;
            }
            if let Some(f) = Gfq::with_modulus(p, k, q, &low) {
                return Some(f);
            }
        }
        None
    }

    fn with_modulus(p: u64, k: usize, q: usize, low: &[u64]) -> Option<Gfq> {
        let encode = |v: &[u64]| -> u32 { v.iter().rev().fold(0u64, |acc, &d| acc * p + d) as u32 };
        let mut exp = vec![0u32; q - 1];
        let mut log = vec![u32::MAX; q];
        // t mod f; for k = 1 this is −c_0.
        let mut cur = vec![0u64; k];
        cur[0] = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            let e = encode(&cur);
            if log[e as usize] != u32::MAX {
                return None;
            }
            log[e as usize] = i as u32;
            *slot = e;
            // Multiply by t and reduce with t^k = −Σ c_j t^j.
            let top = cur[k - 1];
            for j in (1..k).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..k {
                cur[j] = (cur[j] + (p - low[j]) * top) % p;
            }
        }
        Some(Gfq { p, k, q, exp, log })
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    fn neg(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out as u32
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as usize + self.log[b as usize] as usize) % (self.q - 1);
        self.exp[s]
    }

    fn inv(&self, a: u32) -> u32 {
        let l = self.log[a as usize] as usize;
        self.exp[(self.q - 1 - l) % (self.q - 1)]
    }

    /// The polynomial as a dense univariate in x_v after substituting `point` for the others.
    fn eval_except(&self, a: &Polynomial, v: usize, point: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; a.degree_in(v) as usize + 1];
        let order = self.q - 1;
        'terms: for (e, &c) in a.terms() {
            let mut l = self.log[c as usize] as usize;
            for (j, &k) in e.iter().enumerate() {
                if j == v || k == 0 {
                    continue;
                }
                if point[j] == 0 {
                    continue 'terms;
                }
                l = (l + self.log[point[j] as usize] as usize * k as usize) % order;
            }
            let slot = &mut out[e[v] as usize];
            *slot = self.add(*slot, self.exp[l]);
        }
        out
    }

    fn rem(&self, mut f: Vec<u32>, g: &[u32]) -> Vec<u32> {
        let dg = g.len() - 1;
        let inv = self.inv(g[dg]);
        while f.len() > dg {
            let lead = *f.last().unwrap();
            if lead != 0 {
                let c = self.neg(self.mul(lead, inv));
                let shift = f.len() - 1 - dg;
                for (i, &gc) in g.iter().enumerate() {
                    f[i + shift] = self.add(f[i + shift], self.mul(c, gc));
                }
            }
            f.pop();
        }
        trim(&mut f);
        f
    }

    fn gcd_degree(&self, mut a: Vec<u32>, mut b: Vec<u32>) -> usize {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = self.rem(a, &b);
            a = b;
            b = r;
        }
        a.len().saturating_sub(1)
    }
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// True only if a and b, both primitive in x_v, are certainly coprime: at a point where the
/// leading coefficient of `a` survives, any common factor keeps its x_v-degree, so coprime
/// images rule out a common factor of positive degree in x_v, and primitivity does the rest.
pub(crate) fn certainly_coprime(a: &Polynomial, b: &Polynomial, v: usize, tries: usize) -> bool {
    let Some(f) = Gfq::for_prime(a.p()) else {
        return false;
    };
    let n = a.field().nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6766_7121);
    let da = a.degree_in(v) as usize;
    for _ in 0..tries {
        let point: Vec<u32> = (0..n).map(|_| rng.gen_range(1..f.q as u32)).collect();
        let ia = f.eval_except(a, v, &point);
        if ia[da] == 0 {
            continue;
        }
        let ib = f.eval_except(b, v, &point);
        if f.gcd_degree(ia, ib) == 0 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_form_a_field() {
        for p in [2u64, 3, 5, 7] {
            let f = Gfq::for_prime(p).unwrap();
            assert!(f.q as u64 >= MIN_SIZE);
            for a in 1..f.q as u32 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
            for a in 0..f.q as u32 {
                for b in (0..f.q as u32).step_by(7) {
                    for c in (0..f.q as u32).step_by(11) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }
}
