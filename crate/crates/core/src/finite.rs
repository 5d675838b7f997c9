//! Finite-field mirror of the rational polynomial layer.
//!
//! `ModPoly` carries the same canonical sparse representation with residue
//! coefficients modulo a word-sized prime; the reduction map is a ring
//! morphism whenever no coefficient denominator is divisible by the prime.
//! On top of it sit Schwartz-Zippel identity testing and modular forms used
//! by the probabilistic verification mode.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use thiserror::Error;

use crate::exterior::{key_indices, Key, PForm};
use crate::poly::{Mono, Poly};

/// 2^61 - 1, the default word prime for probabilistic checks.
pub const DEFAULT_PRIME: u64 = 2_305_843_009_213_693_951;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiniteError {
    #[error("coefficient denominator divisible by the prime {0}")]
    DenominatorDivisible(u64),
    #[error("modulus must be an odd prime greater than 1, got {0}")]
    BadModulus(u64),
}

#[inline]
pub fn mod_add(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn mod_sub(a: u64, b: u64, p: u64) -> u64 {
    (((a as u128 + p as u128) - b as u128) % p as u128) as u64
}

#[inline]
pub fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat.
pub fn mod_inv(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    Some(mod_pow(a, p - 2, p))
}

fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let mut r = v % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_u64().expect("residue fits in u64")
}

/// Sparse polynomial over F_p in the same canonical term order as `Poly`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModPoly {
    nvars: usize,
    prime: u64,
    terms: BTreeMap<Mono, u64>,
}

impl ModPoly {
    pub fn zero(nvars: usize, prime: u64) -> Self {
        ModPoly {
            nvars,
            prime,
            terms: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Mono, c: u64) {
        let c = c % self.prime;
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = mod_add(*o.get(), c, self.prime);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &ModPoly) -> ModPoly {
        assert_eq!(self.prime, other.prime);
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        out
    }

    pub fn sub(&self, other: &ModPoly) -> ModPoly {
        assert_eq!(self.prime, other.prime);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, self.prime - (*c % self.prime));
        }
        out
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        assert_eq!(self.prime, other.prime);
        assert_eq!(self.nvars, other.nvars);
        let mut out = ModPoly::zero(self.nvars, self.prime);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), mod_mul(*c1, *c2, self.prime));
            }
        }
        out
    }

    pub fn partial(&self, i: usize) -> ModPoly {
        let mut out = ModPoly::zero(self.nvars, self.prime);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                let exps: Vec<u32> = (0..self.nvars)
                    .map(|j| if j == i { e - 1 } else { m.exp(j) })
                    .collect();
                out.add_term(
                    Mono::from_exps(&exps),
                    mod_mul(*c, e as u64 % self.prime, self.prime),
                );
            }
        }
        out
    }

    pub fn eval(&self, pt: &[u64]) -> u64 {
        assert_eq!(pt.len(), self.nvars);
        let p = self.prime;
        let mut pows: Vec<Vec<u64>> = vec![vec![1u64]; self.nvars];
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = *c;
            for i in 0..self.nvars {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                while pows[i].len() <= e {
                    let next = mod_mul(*pows[i].last().unwrap(), pt[i] % p, p);
                    pows[i].push(next);
                }
                t = mod_mul(t, pows[i][e], p);
            }
            acc = mod_add(acc, t, p);
        }
        acc
    }

    /// Specialize all variables except `keep` at the given values; returns
    /// dense univariate coefficients (index = power of `keep`).
    pub fn specialize_univariate(&self, keep: usize, vals: &[u64]) -> Vec<u64> {
        let p = self.prime;
        let d = self.terms.keys().map(|m| m.exp(keep)).max().unwrap_or(0) as usize;
        let mut out = vec![0u64; d + 1];
        for (m, c) in &self.terms {
            let mut t = *c;
            for i in 0..self.nvars {
                if i == keep {
                    continue;
                }
                let e = m.exp(i);
                if e > 0 {
                    t = mod_mul(t, mod_pow(vals[i] % p, e as u64, p), p);
                }
            }
            let e = m.exp(keep) as usize;
            out[e] = mod_add(out[e], t, p);
        }
        out
    }
}

/// Reduce a rational polynomial modulo a prime. Fails when a denominator is
/// divisible by the prime.
pub fn reduce_mod(p: &Poly, prime: u64) -> Result<ModPoly, FiniteError> {
    if prime < 2 {
        return Err(FiniteError::BadModulus(prime));
    }
    let mut out = ModPoly::zero(p.nvars(), prime);
    for (m, c) in p.terms() {
        let den = bigint_mod(c.denom(), prime);
        let inv = mod_inv(den, prime).ok_or(FiniteError::DenominatorDivisible(prime))?;
        let num = bigint_mod(c.numer(), prime);
        out.add_term(*m, mod_mul(num, inv, prime));
    }
    Ok(out)
}

/// One-sided probabilistic equality: `false` only when the inputs differ;
/// `true` is wrong with probability at most `(max degree / prime)^trials`
/// on distinct inputs.
pub fn identity_test_prob<R: Rng>(
    a: &Poly,
    b: &Poly,
    prime: u64,
    trials: u32,
    rng: &mut R,
) -> Result<bool, FiniteError> {
    assert_eq!(a.nvars(), b.nvars(), "variable count mismatch");
    let ra = reduce_mod(a, prime)?;
    let rb = reduce_mod(b, prime)?;
    let diff = ra.sub(&rb);
    if diff.is_zero() {
        return Ok(true);
    }
    for _ in 0..trials {
        let pt: Vec<u64> = (0..a.nvars()).map(|_| rng.gen_range(0..prime)).collect();
        if diff.eval(&pt) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Seeded convenience wrapper around [`identity_test_prob`].
pub fn identity_test_prob_seeded(
    a: &Poly,
    b: &Poly,
    prime: u64,
    trials: u32,
    seed: u64,
) -> Result<bool, FiniteError> {
    let mut rng = crate::sample::rng(seed);
    identity_test_prob(a, b, prime, trials, &mut rng)
}

// ---- dense univariate helpers over F_p ------------------------------------

/// Degree of a dense univariate poly, `None` for zero.
pub fn univ_degree(c: &[u64]) -> Option<usize> {
    c.iter().rposition(|&x| x != 0)
}

fn univ_trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

/// Euclidean gcd of dense univariate polynomials over F_p (monic output).
pub fn univ_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut f = a.to_vec();
    let mut g = b.to_vec();
    univ_trim(&mut f);
    univ_trim(&mut g);
    while !g.is_empty() {
        let r = univ_rem(&f, &g, p);
        f = g;
        g = r;
    }
    if let Some(&lc) = f.last() {
        let inv = mod_inv(lc, p).expect("leading coefficient invertible");
        for c in &mut f {
            *c = mod_mul(*c, inv, p);
        }
    }
    f
}

fn univ_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lcb_inv = mod_inv(b[db], p).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    while r.len() > db {
        let dr = r.len() - 1;
        let q = mod_mul(r[dr], lcb_inv, p);
        if q != 0 {
            for i in 0..=db {
                let idx = dr - db + i;
                r[idx] = mod_sub(r[idx], mod_mul(q, b[i], p), p);
            }
        }
        r.pop();
        univ_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

// ---- modular differential forms --------------------------------------------

/// Differential form with ModPoly coefficients; backbone of the
/// probabilistic identity suite.
#[derive(Clone, Debug)]
pub struct ModForm {
    nvars: usize,
    formdeg: usize,
    prime: u64,
    comps: BTreeMap<Key, ModPoly>,
}

impl ModForm {
    pub fn reduce(a: &PForm, prime: u64) -> Result<ModForm, FiniteError> {
        let mut comps = BTreeMap::new();
        for (k, p) in a.comps() {
            let mp = reduce_mod(p, prime)?;
            if !mp.is_zero() {
                comps.insert(k, mp);
            }
        }
        Ok(ModForm {
            nvars: a.nvars(),
            formdeg: a.formdeg(),
            prime,
            comps,
        })
    }

    pub fn exterior_derivative(&self) -> ModForm {
        let mut out = ModForm {
            nvars: self.nvars,
            formdeg: self.formdeg + 1,
            prime: self.prime,
            comps: BTreeMap::new(),
        };
        for (k, p) in &self.comps {
            for j in 0..self.nvars {
                let bit = 1u16 << j;
                if k & bit != 0 {
                    continue;
                }
                let dp = p.partial(j);
                if dp.is_zero() {
                    continue;
                }
                let below = (k & (bit - 1)).count_ones();
                let signed = if below % 2 == 0 {
                    dp
                } else {
                    ModPoly::zero(self.nvars, self.prime).sub(&dp)
                };
                out.insert(*k | bit, signed);
            }
        }
        out
    }

    fn insert(&mut self, k: Key, p: ModPoly) {
        if p.is_zero() {
            return;
        }
        match self.comps.entry(k) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&p);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Evaluate all coefficients at a point, yielding a scalar alternating
    /// form.
    pub fn eval(&self, pt: &[u64]) -> AltScalar {
        let mut comps = BTreeMap::new();
        for (k, p) in &self.comps {
            let v = p.eval(pt);
            if v != 0 {
                comps.insert(*k, v);
            }
        }
        AltScalar {
            nvars: self.nvars,
            formdeg: self.formdeg,
            prime: self.prime,
            comps,
        }
    }
}

/// Alternating form with scalar F_p components: the value of a `ModForm`
/// at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltScalar {
    nvars: usize,
    formdeg: usize,
    prime: u64,
    comps: BTreeMap<Key, u64>,
}

impl AltScalar {
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn formdeg(&self) -> usize {
        self.formdeg
    }

    fn insert(&mut self, k: Key, v: u64) {
        let v = v % self.prime;
        if v == 0 {
            return;
        }
        match self.comps.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = mod_add(*o.get(), v, self.prime);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn wedge(&self, other: &AltScalar) -> AltScalar {
        assert_eq!(self.prime, other.prime);
        assert_eq!(self.nvars, other.nvars);
        let mut out = AltScalar {
            nvars: self.nvars,
            formdeg: self.formdeg + other.formdeg,
            prime: self.prime,
            comps: BTreeMap::new(),
        };
        for (ka, ca) in &self.comps {
            for (kb, cb) in &other.comps {
                if ka & kb != 0 {
                    continue;
                }
                let mut inv = 0u32;
                let mut bits = *kb;
                while bits != 0 {
                    let j = bits.trailing_zeros();
                    inv += (ka >> (j + 1)).count_ones();
                    bits &= bits - 1;
                }
                let prod = mod_mul(*ca, *cb, self.prime);
                let signed = if inv % 2 == 0 {
                    prod
                } else {
                    self.prime - prod
                };
                out.insert(ka | kb, signed);
            }
        }
        out
    }

    /// Contraction in the first slot with a scalar vector.
    pub fn interior(&self, v: &[u64]) -> AltScalar {
        assert_eq!(v.len(), self.nvars);
        assert!(self.formdeg >= 1);
        let mut out = AltScalar {
            nvars: self.nvars,
            formdeg: self.formdeg - 1,
            prime: self.prime,
            comps: BTreeMap::new(),
        };
        for (k, c) in &self.comps {
            for j in key_indices(*k) {
                if v[j] % self.prime == 0 {
                    continue;
                }
                let rest = k & !(1u16 << j);
                let below = (rest & ((1u16 << j) - 1)).count_ones();
                let prod = mod_mul(v[j] % self.prime, *c, self.prime);
                let signed = if below % 2 == 0 {
                    prod
                } else {
                    self.prime - prod
                };
                out.insert(rest, signed);
            }
        }
        out
    }

    pub fn scale(&self, s: u64) -> AltScalar {
        let mut out = self.clone();
        if s % self.prime == 0 {
            out.comps.clear();
            return out;
        }
        for v in out.comps.values_mut() {
            *v = mod_mul(*v, s, self.prime);
        }
        out
    }

    pub fn sub(&self, other: &AltScalar) -> AltScalar {
        assert_eq!(self.prime, other.prime);
        let mut out = self.clone();
        for (k, v) in &other.comps {
            out.insert(*k, self.prime - (*v % self.prime));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn reduction_is_ring_morphism() {
        let mut rng = crate::sample::rng(137);
        let p = 1_000_003u64;
        for _ in 0..10 {
            let a = crate::sample::poly(&mut rng, 3, 3, 5);
            let b = crate::sample::poly(&mut rng, 3, 3, 5);
            let ra = reduce_mod(&a, p).unwrap();
            let rb = reduce_mod(&b, p).unwrap();
            assert_eq!(reduce_mod(&(&a * &b), p).unwrap(), ra.mul(&rb));
            assert_eq!(reduce_mod(&(&a + &b), p).unwrap(), ra.add(&rb));
        }
    }

    #[test]
    fn reflexive_identity_always_true() {
        let mut rng = crate::sample::rng(139);
        let p = crate::sample::poly(&mut rng, 3, 4, 5);
        assert!(identity_test_prob_seeded(&p, &p, 101, 1, 0).unwrap());
    }

    #[test]
    fn designed_collision_mod_small_prime() {
        // b = x0 + prime*x1 reduces to x0, yet differs exactly.
        let n = 2;
        let prime = 101u64;
        let a = Poly::var(n, 0);
        let b = &a + &Poly::var(n, 1).scale(&int(prime as i64));
        assert_ne!(a, b, "exact comparison must distinguish them");
        assert!(
            identity_test_prob_seeded(&a, &b, prime, 4, 0).unwrap(),
            "mod-p images coincide, so the probabilistic test accepts"
        );
        assert!(
            !identity_test_prob_seeded(&a, &b, DEFAULT_PRIME, 2, 0).unwrap(),
            "a larger prime separates them"
        );
    }

    #[test]
    fn denominator_divisible_by_prime_errors() {
        let p = Poly::constant(2, rat(1, 101));
        assert_eq!(
            reduce_mod(&p, 101),
            Err(FiniteError::DenominatorDivisible(101))
        );
    }

    #[test]
    fn agreement_with_exact_equality_on_random_pairs() {
        // 100 random pairs at a 62-bit prime, 2 trials: no false accepts.
        let mut rng = crate::sample::rng(149);
        let mut false_accepts = 0;
        for i in 0..100 {
            let a = crate::sample::poly(&mut rng, 3, 4, 5);
            let b = if i % 3 == 0 {
                a.clone()
            } else {
                crate::sample::poly(&mut rng, 3, 4, 5)
            };
            let exact = a == b;
            let prob = identity_test_prob_seeded(&a, &b, DEFAULT_PRIME, 2, i).unwrap();
            if prob && !exact {
                false_accepts += 1;
            }
            if !prob {
                assert!(!exact, "probabilistic rejection must be sound");
            }
        }
        assert_eq!(false_accepts, 0, "zero observed false accepts expected");
    }

    #[test]
    fn univariate_gcd_mod_p() {
        let p = 101;
        // (x^2 - 1) and (x - 1): gcd x - 1 -> monic [p-1? no: [-1, 1] = [100, 1]]
        let a = vec![p - 1, 0, 1];
        let b = vec![p - 1, 1];
        let g = univ_gcd(&a, &b, p);
        assert_eq!(g, vec![p - 1, 1]);
    }

    #[test]
    fn modform_eval_commutes_with_wedge() {
        let mut rng = crate::sample::rng(151);
        let p = DEFAULT_PRIME;
        for _ in 0..5 {
            let a = crate::sample::form(&mut rng, 4, 1, 3, 3);
            let b = crate::sample::form(&mut rng, 4, 2, 3, 3);
            let w = a.wedge(&b);
            let ra = ModForm::reduce(&a, p).unwrap();
            let rb = ModForm::reduce(&b, p).unwrap();
            let rw = ModForm::reduce(&w, p).unwrap();
            let pt: Vec<u64> = (0..4).map(|_| rng.gen_range(0..p)).collect();
            assert_eq!(ra.eval(&pt).wedge(&rb.eval(&pt)), rw.eval(&pt));
        }
    }
}
