//! Seeded random generators for polynomials, forms and vector fields.
//!
//! Every consumer (property tests, probabilistic identity checks, the CLI
//! verification batteries) draws from an explicitly seeded ChaCha stream so
//! runs are reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exterior::{PForm, PVec};
use crate::poly::{Mono, Poly};

/// Default seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x0f01_1a9e;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational with numerator in [-9, 9] and denominator in [1, 4].
pub fn rational<R: Rng>(rng: &mut R) -> BigRational {
    let n = rng.gen_range(-9i64..=9);
    let d = rng.gen_range(1i64..=4);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> BigRational {
    loop {
        let r = rational(rng);
        if !num_traits::Zero::is_zero(&r) {
            return r;
        }
    }
}

fn mono<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32) -> Mono {
    let deg = rng.gen_range(0..=max_deg);
    let mut exps = vec![0u32; nvars];
    for _ in 0..deg {
        exps[rng.gen_range(0..nvars)] += 1;
    }
    Mono::from_exps(&exps)
}

/// Random polynomial; may be zero when coefficients cancel.
pub fn poly<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, max_terms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let m = mono(rng, nvars, max_deg);
        p = &p + &Poly::from_terms(nvars, &[(&exps_of(&m, nvars), rational(rng))]);
    }
    p
}

pub fn poly_nonzero<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, max_terms: usize) -> Poly {
    loop {
        let p = poly(rng, nvars, max_deg, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random homogeneous polynomial of exact total degree `deg` (nonzero).
pub fn homogeneous_poly<R: Rng>(rng: &mut R, nvars: usize, deg: u32, max_terms: usize) -> Poly {
    loop {
        let mut p = Poly::zero(nvars);
        let terms = rng.gen_range(1..=max_terms);
        for _ in 0..terms {
            let mut exps = vec![0u32; nvars];
            for _ in 0..deg {
                exps[rng.gen_range(0..nvars)] += 1;
            }
            p = &p + &Poly::from_terms(nvars, &[(&exps, nonzero_rational(rng))]);
        }
        if !p.is_zero() {
            return p;
        }
    }
}

fn exps_of(m: &Mono, nvars: usize) -> Vec<u32> {
    (0..nvars).map(|i| m.exp(i)).collect()
}

/// Random q-form with polynomial coefficients.
pub fn form<R: Rng>(
    rng: &mut R,
    nvars: usize,
    formdeg: usize,
    max_deg: u32,
    max_terms: usize,
) -> PForm {
    let mut comps = Vec::new();
    let keys = all_tuples(nvars, formdeg);
    for k in keys {
        if rng.gen_bool(0.6) {
            comps.push((k, poly(rng, nvars, max_deg, max_terms)));
        }
    }
    PForm::from_comps(nvars, formdeg, comps)
}

pub fn form_nonzero<R: Rng>(
    rng: &mut R,
    nvars: usize,
    formdeg: usize,
    max_deg: u32,
    max_terms: usize,
) -> PForm {
    loop {
        let f = form(rng, nvars, formdeg, max_deg, max_terms);
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random polynomial vector field.
pub fn pvec<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, max_terms: usize) -> PVec {
    PVec::new(
        (0..nvars)
            .map(|_| poly(rng, nvars, max_deg, max_terms))
            .collect(),
    )
}

/// Random vector field with homogeneous components of exact degree `deg`.
pub fn homogeneous_pvec<R: Rng>(rng: &mut R, nvars: usize, deg: u32, max_terms: usize) -> PVec {
    PVec::new(
        (0..nvars)
            .map(|_| homogeneous_poly(rng, nvars, deg, max_terms))
            .collect(),
    )
}

/// Random linear vector field (degree-1 homogeneous components).
pub fn linear_pvec<R: Rng>(rng: &mut R, nvars: usize) -> PVec {
    PVec::new(
        (0..nvars)
            .map(|_| {
                let mut p = Poly::zero(nvars);
                for j in 0..nvars {
                    p = &p + &Poly::var(nvars, j).scale(&rational(rng));
                }
                p
            })
            .collect(),
    )
}

/// All strictly increasing index tuples of the given length.
pub fn all_tuples(nvars: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        start: usize,
        nvars: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..nvars {
            cur.push(i);
            rec(i + 1, nvars, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, nvars, len, &mut cur, &mut out);
    out
}

/// Random rational point.
pub fn point<R: Rng>(rng: &mut R, nvars: usize) -> Vec<BigRational> {
    (0..nvars).map(|_| rational(rng)).collect()
}
