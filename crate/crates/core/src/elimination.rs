//! Resultants and local intersection numbers.
//!
//! Resultants are Sylvester determinants computed fraction-free (Bareiss)
//! over the polynomial ring, so they stay exact for coefficients in any
//! number of variables. Local intersection multiplicities of plane-curve
//! pairs at the origin follow the classical axiomatic reduction.

use num_traits::Zero;
use thiserror::Error;

use crate::poly::Poly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EliminationError {
    #[error("curves share a component through the point; intersection number is infinite")]
    NotIsolated,
}

/// Coefficients of `p` as univariate in `v` (index = power of `v`);
/// entries have the `v`-exponent cleared.
pub fn coeffs_in(p: &Poly, v: usize) -> Vec<Poly> {
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

/// Resultant of `a` and `b` with respect to `v`, as a polynomial in the
/// remaining variables. Conventions: `Res = 0` if either input is zero;
/// `Res = 1` when both are free of `v`; `Res = a^(deg_v b)` when only `a`
/// is free of `v`.
pub fn resultant(a: &Poly, b: &Poly, v: usize) -> Poly {
    let n = a.nvars();
    assert_eq!(b.nvars(), n);
    if a.is_zero() || b.is_zero() {
        return Poly::zero(n);
    }
    let da = a.degree_in(v) as usize;
    let db = b.degree_in(v) as usize;
    if da == 0 && db == 0 {
        return Poly::one(n);
    }
    if da == 0 {
        return pow(a, db);
    }
    if db == 0 {
        return pow(b, da);
    }
    let ca = coeffs_in(a, v);
    let cb = coeffs_in(b, v);
    let size = da + db;
    let mut m = vec![vec![Poly::zero(n); size]; size];
    // db rows of a-coefficients, then da rows of b-coefficients,
    // highest-degree coefficient first.
    for r in 0..db {
        for (i, c) in ca.iter().rev().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..da {
        for (i, c) in cb.iter().rev().enumerate() {
            m[db + r][r + i] = c.clone();
        }
    }
    det_bareiss(m)
}

fn pow(p: &Poly, e: usize) -> Poly {
    let mut acc = Poly::one(p.nvars());
    for _ in 0..e {
        acc = &acc * p;
    }
    acc
}

/// Fraction-free determinant of a polynomial matrix.
fn det_bareiss(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    let nv = a[0][0].nvars();
    if n == 0 {
        return Poly::one(nv);
    }
    let mut sign = 1i32;
    let mut prev = Poly::one(nv);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !a[r][k].is_zero());
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Poly::zero(nv),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.try_div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Poly::zero(nv);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -&d
    } else {
        d
    }
}

/// Order of vanishing of a nonzero univariate restriction at 0:
/// the smallest exponent of `v` present.
fn ord_in(p: &Poly, v: usize) -> u32 {
    p.terms()
        .map(|(m, _)| m.exp(v))
        .min()
        .expect("nonzero polynomial")
}

/// Substitute 0 for variable `v`.
fn set_zero(p: &Poly, v: usize) -> Poly {
    let n = p.nvars();
    let mut out = Poly::zero(n);
    for (m, c) in p.terms() {
        if m.exp(v) == 0 {
            let exps: Vec<u32> = (0..n).map(|i| m.exp(i)).collect();
            out = &out + &Poly::from_terms(n, &[(&exps, c.clone())]);
        }
    }
    out
}

/// Exact division by `v` (every term must contain it).
fn div_var(p: &Poly, v: usize) -> Poly {
    p.try_div_exact(&Poly::var(p.nvars(), v))
        .expect("divisible by the variable")
}

/// Local intersection multiplicity of two plane curves at the origin
/// (variables 0 and 1). Errors when the curves share a component through
/// the origin.
pub fn local_intersection_multiplicity(a: &Poly, b: &Poly) -> Result<u32, EliminationError> {
    assert_eq!(a.nvars(), b.nvars());
    let mut a = a.clone();
    let mut b = b.clone();
    let mut total = 0u32;
    loop {
        if a.is_zero() || b.is_zero() {
            return Err(EliminationError::NotIsolated);
        }
        let zero_pt: Vec<_> = (0..a.nvars()).map(|_| crate::poly::int(0)).collect();
        if !a.eval(&zero_pt).is_zero() || !b.eval(&zero_pt).is_zero() {
            return Ok(total);
        }
        let ra = set_zero(&a, 1); // restriction to the x-axis
        let rb = set_zero(&b, 1);
        if ra.is_zero() && rb.is_zero() {
            return Err(EliminationError::NotIsolated); // y divides both
        }
        if ra.is_zero() {
            // a = y * a1: I(a,b) = I(y,b) + I(a1,b) = ord_x b(x,0) + ...
            total += ord_in(&rb, 0);
            a = div_var(&a, 1);
            continue;
        }
        if rb.is_zero() {
            total += ord_in(&ra, 0);
            b = div_var(&b, 1);
            continue;
        }
        // Both restrictions nonzero: cancel leading x-terms until one dies.
        let (da, db) = (ra.degree_in(0), rb.degree_in(0));
        let (hi, lo, dh, dl) = if da >= db {
            (a, b.clone(), da, db)
        } else {
            (b.clone(), a, db, da)
        };
        let lc_h = coeff_of_x_power(&hi, dh);
        let lc_l = coeff_of_x_power(&lo, dl);
        let factor = lc_h / lc_l;
        let shift = Poly::var(hi.nvars(), 0);
        let mut xpow = Poly::one(hi.nvars());
        for _ in 0..(dh - dl) {
            xpow = &xpow * &shift;
        }
        let hi_new = &hi - &(&lo * &xpow).scale(&factor);
        if da >= db {
            a = hi_new;
            b = lo;
        } else {
            b = hi_new;
            a = lo;
        }
    }
}

/// Coefficient of `x^k y^0` (used on axis restrictions).
fn coeff_of_x_power(p: &Poly, k: u32) -> num_rational::BigRational {
    let mut exps = vec![0u32; p.nvars()];
    exps[0] = k;
    p.coeff(&crate::poly::Mono::from_exps(&exps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn sylvester_resultant_univariate() {
        // Res_x(x^2 - 1, x - 2) = 3 (evaluate x^2-1 at 2)
        let n = 1;
        let a = &(&x(n, 0) * &x(n, 0)) - &Poly::one(n);
        let b = &x(n, 0) - &Poly::from_int(n, 2);
        assert_eq!(resultant(&a, &b, 0), Poly::from_int(n, 3));
    }

    #[test]
    fn resultant_vanishes_iff_common_root() {
        let n = 1;
        let a = &(&x(n, 0) * &x(n, 0)) - &Poly::one(n);
        let b = &x(n, 0) - &Poly::one(n);
        assert!(resultant(&a, &b, 0).is_zero());
    }

    #[test]
    fn bivariate_resultant_eliminates() {
        // Res_y(x^2 + y^2 - 1, y - x): 2x^2 - 1 up to sign
        let n = 2;
        let a = &(&(&x(n, 0) * &x(n, 0)) + &(&x(n, 1) * &x(n, 1))) - &Poly::one(n);
        let b = &x(n, 1) - &x(n, 0);
        let r = resultant(&a, &b, 1);
        let expect = &(&x(n, 0) * &x(n, 0)).scale(&int(2)) - &Poly::one(n);
        assert!(r == expect || r == -&expect, "got {r}");
    }

    #[test]
    fn resultant_multiplicativity() {
        let mut rng = crate::sample::rng(157);
        for _ in 0..5 {
            let a = crate::sample::poly_nonzero(&mut rng, 2, 2, 3);
            let b = crate::sample::poly_nonzero(&mut rng, 2, 2, 3);
            let c = crate::sample::poly_nonzero(&mut rng, 2, 2, 3);
            let lhs = resultant(&(&a * &b), &c, 1);
            let rhs = &resultant(&a, &c, 1) * &resultant(&b, &c, 1);
            assert!(
                lhs == rhs || lhs == -&rhs,
                "resultant is multiplicative up to the sign convention"
            );
        }
    }

    #[test]
    fn transversal_intersection_multiplicity_one() {
        let n = 2;
        assert_eq!(local_intersection_multiplicity(&x(n, 0), &x(n, 1)), Ok(1));
    }

    #[test]
    fn tangency_counts_double() {
        // parabola y - x^2 and the x-axis y: multiplicity 2 at origin
        let n = 2;
        let a = &x(n, 1) - &(&x(n, 0) * &x(n, 0));
        assert_eq!(local_intersection_multiplicity(&a, &x(n, 1)), Ok(2));
    }

    #[test]
    fn node_intersection() {
        // I(x, y^2 - x^3) = 2
        let n = 2;
        let cusp = &(&x(n, 1) * &x(n, 1)) - &(&(&x(n, 0) * &x(n, 0)) * &x(n, 0));
        assert_eq!(local_intersection_multiplicity(&x(n, 0), &cusp), Ok(2));
        // I(y, y^2 - x^3) = 3
        assert_eq!(local_intersection_multiplicity(&x(n, 1), &cusp), Ok(3));
    }

    #[test]
    fn nonsingular_point_counts_zero() {
        let n = 2;
        let a = &x(n, 0) + &Poly::one(n);
        assert_eq!(local_intersection_multiplicity(&a, &x(n, 1)), Ok(0));
    }

    #[test]
    fn shared_component_is_an_error() {
        let n = 2;
        let a = &x(n, 0) * &x(n, 1);
        let b = &x(n, 0) * &(&x(n, 1) + &x(n, 0));
        assert_eq!(
            local_intersection_multiplicity(&a, &b),
            Err(EliminationError::NotIsolated)
        );
    }
}
