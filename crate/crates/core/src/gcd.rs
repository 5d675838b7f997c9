//! Multivariate gcd over the rationals.
//!
//! Recursive content/primitive-part reduction with subresultant remainder
//! sequences in the top occurring variable. Results are normalized to have
//! leading coefficient 1 in the graded-lex term order. A certified modular
//! fast path short-circuits the common "no common factor" case before the
//! exact machinery runs.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::finite::{self, reduce_mod};
use crate::poly::Poly;

/// Greatest common divisor, monic in graded-lex order. `gcd(0,0) = 0`.
pub fn gcd_multivar(a: &Poly, b: &Poly) -> Poly {
    assert_eq!(a.nvars(), b.nvars(), "variable count mismatch in gcd");
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    gcd_inner(a, b).monic()
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    // Top variable occurring in either operand.
    let top = (0..n)
        .rev()
        .find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0);
    let v = match top {
        None => return Poly::one(n), // both constants, both nonzero
        Some(v) => v,
    };
    let (da, db) = (a.degree_in(v), b.degree_in(v));
    if da == 0 || db == 0 {
        // One operand is free of v: gcd divides the other's content in v.
        let free = if da == 0 { a } else { b };
        let other = if da == 0 { b } else { a };
        let cont = content_in(other, v);
        return gcd_inner(free, &cont);
    }

    let (mut f, mut g) = if da >= db {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let cont_f = content_in(&f, v);
    let cont_g = content_in(&g, v);
    f = f.try_div_exact(&cont_f).expect("content divides");
    g = g.try_div_exact(&cont_g).expect("content divides");
    let cont_gcd = gcd_inner(&cont_f, &cont_g);

    // Subresultant PRS on the primitive parts.
    let mut h = Poly::one(n);
    let mut s = Poly::one(n);
    loop {
        let df = f.degree_in(v);
        let dg = g.degree_in(v);
        let delta = df - dg;
        let r = pseudo_rem(&f, &g, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            // Nontrivial remainder of degree zero in v: primitive parts are
            // coprime in v.
            g = r;
            break;
        }
        let divisor = {
            let mut d = s.clone();
            for _ in 0..delta {
                d = &d * &h;
            }
            d
        };
        let next = r
            .try_div_exact(&divisor)
            .expect("subresultant division is exact");
        f = g;
        g = next;
        s = lead_coeff_in(&f, v);
        h = if delta == 0 {
            h
        } else {
            // h <- s^delta / h^(delta-1)
            let mut num = Poly::one(n);
            for _ in 0..delta {
                num = &num * &s;
            }
            let mut den = Poly::one(n);
            for _ in 0..delta.saturating_sub(1) {
                den = &den * &h;
            }
            num.try_div_exact(&den)
                .expect("subresultant h-update is exact")
        };
    }
    if g.degree_in(v) == 0 {
        return cont_gcd;
    }
    let prim = {
        let c = content_in(&g, v);
        g.try_div_exact(&c).expect("content divides")
    };
    &cont_gcd * &prim
}

/// Coefficients of `p` viewed as univariate in `v` (index = power of v).
fn coeffs_in(p: &Poly, v: usize) -> Vec<Poly> {
    let n = p.nvars();
    let d = p.degree_in(v) as usize;
    let mut out = vec![Poly::zero(n); d + 1];
    for (m, c) in p.terms() {
        let e = m.exp(v) as usize;
        let mut exps: Vec<u32> = (0..n).map(|i| m.exp(i)).collect();
        exps[v] = 0;
        out[e] = &out[e] + &Poly::from_terms(n, &[(&exps, c.clone())]);
    }
    out
}

fn from_coeffs(coeffs: &[Poly], v: usize, n: usize) -> Poly {
    let mut acc = Poly::zero(n);
    let mut vpow = Poly::one(n);
    let xv = Poly::var(n, v);
    for (e, c) in coeffs.iter().enumerate() {
        if e > 0 {
            vpow = &vpow * &xv;
        }
        acc = &acc + &(c * &vpow);
    }
    acc
}

fn lead_coeff_in(p: &Poly, v: usize) -> Poly {
    let coeffs = coeffs_in(p, v);
    coeffs
        .last()
        .cloned()
        .unwrap_or_else(|| Poly::zero(p.nvars()))
}

/// Gcd of the univariate-in-v coefficients.
fn content_in(p: &Poly, v: usize) -> Poly {
    let n = p.nvars();
    let mut acc = Poly::zero(n);
    for c in coeffs_in(p, v) {
        if c.is_zero() {
            continue;
        }
        acc = if acc.is_zero() {
            c.monic()
        } else {
            gcd_inner(&acc, &c).monic()
        };
        if acc.is_constant() && !acc.is_zero() {
            return Poly::one(n);
        }
    }
    acc
}

/// Pseudo-remainder `lc(g)^(deg f - deg g + 1) * f mod g` in variable `v`.
fn pseudo_rem(f: &Poly, g: &Poly, v: usize) -> Poly {
    let n = f.nvars();
    let dg = g.degree_in(v);
    let lcg = lead_coeff_in(g, v);
    let mut r = f.clone();
    let mut e: i64 = (f.degree_in(v) as i64) - (dg as i64) + 1;
    while !r.is_zero() && r.degree_in(v) >= dg {
        let dr = r.degree_in(v);
        let lcr = lead_coeff_in(&r, v);
        // r <- lcg*r - lcr * v^(dr-dg) * g
        let shift = {
            let mut coeffs = vec![Poly::zero(n); (dr - dg) as usize + 1];
            let last = coeffs.len() - 1;
            coeffs[last] = lcr;
            from_coeffs(&coeffs, v, n)
        };
        r = &(&lcg * &r) - &(&shift * g);
        e -= 1;
    }
    let mut scale = Poly::one(n);
    for _ in 0..e.max(0) {
        scale = &scale * &lcg;
    }
    &scale * &r
}

/// Gcd of a whole family, monic; constant families normalize to 1.
pub fn polys_gcd<'a>(polys: impl IntoIterator<Item = &'a Poly>) -> Poly {
    let mut acc: Option<Poly> = None;
    for p in polys {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.monic(),
            Some(g) => gcd_multivar(&g, p),
        });
        if let Some(g) = &acc {
            if g.is_constant() {
                return Poly::one(p.nvars());
            }
        }
    }
    acc.unwrap_or_else(|| Poly::zero(1))
}

/// Certified check that a family of polynomials has constant gcd.
///
/// For each variable the family is specialized, modulo a word prime, to
/// univariate polynomials in that variable at random values of the others;
/// when the specialized leading coefficient survives, a constant univariate
/// gcd proves the true gcd has degree zero in that variable (specialization
/// can only grow the gcd). Certifying every variable proves the gcd is
/// constant. Returns `false` (inconclusive) on any failure to certify.
pub fn gcd_is_constant_certified(polys: &[&Poly], seed: u64) -> bool {
    let pr = finite::DEFAULT_PRIME;
    let nonzero: Vec<&Poly> = polys.iter().copied().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return false;
    }
    if nonzero.iter().any(|p| p.is_constant()) {
        return true;
    }
    let n = nonzero[0].nvars();
    let reduced: Vec<_> = match nonzero
        .iter()
        .map(|p| reduce_mod(p, pr))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) => v,
        Err(_) => return false,
    };
    let mut rng = crate::sample::rng(seed);
    'vars: for v in 0..n {
        if nonzero.iter().any(|p| p.degree_in(v) == 0) {
            continue; // gcd is free of v since one member is
        }
        // Reference member with minimal degree in v.
        let refi = (0..nonzero.len())
            .min_by_key(|&i| nonzero[i].degree_in(v))
            .unwrap();
        'attempts: for _ in 0..6 {
            let vals: Vec<u64> = (0..n).map(|_| rng.gen_range(1..pr)).collect();
            let imgs: Vec<Vec<u64>> = reduced
                .iter()
                .map(|mp| mp.specialize_univariate(v, &vals))
                .collect();
            // The reference image must keep its full degree in v.
            let want = nonzero[refi].degree_in(v) as usize;
            if finite::univ_degree(&imgs[refi]) != Some(want) {
                continue 'attempts;
            }
            let mut g = imgs[refi].clone();
            for (i, im) in imgs.iter().enumerate() {
                if i == refi {
                    continue;
                }
                g = finite::univ_gcd(&g, im, pr);
                if finite::univ_degree(&g) == Some(0) {
                    break;
                }
            }
            match finite::univ_degree(&g) {
                Some(0) => continue 'vars, // certified: gcd free of v
                _ => return false,         // plausible common factor; go exact
            }
        }
        return false;
    }
    true
}

/// Gcd of many polynomials with the certified fast path in front.
pub fn polys_gcd_fast<'a>(polys: impl IntoIterator<Item = &'a Poly>, seed: u64) -> Poly {
    let all: Vec<&Poly> = polys.into_iter().collect();
    let nonzero: Vec<&Poly> = all.iter().copied().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Poly::zero(all.first().map(|p| p.nvars()).unwrap_or(1));
    }
    if gcd_is_constant_certified(&nonzero, seed) {
        return Poly::one(nonzero[0].nvars());
    }
    polys_gcd(nonzero)
}

/// Rational gcd content of the coefficient list (used for normalization).
pub fn rational_content(p: &Poly) -> BigRational {
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::one();
    for (_, c) in p.terms() {
        num = num_integer::Integer::gcd(&num, c.numer());
        den = num_integer::Integer::lcm(&den, c.denom());
    }
    if num.is_zero() {
        BigRational::zero()
    } else {
        BigRational::new(num, den)
    }
}
