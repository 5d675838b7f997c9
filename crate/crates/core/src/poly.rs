//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms live in a canonical graded-lexicographic order: higher total degree
//! first, ties broken lexicographically with `x0` heaviest. Coefficients are
//! arbitrary-precision rationals kept in lowest terms, and zero coefficients
//! are never stored, so two polynomials are equal exactly when their term
//! maps coincide.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Maximum number of variables; exponents are stored inline.
pub const MAX_VARS: usize = 12;

/// Largest exponent a single variable may carry.
pub const MAX_EXP: u8 = u8::MAX;

/// Exponent vector with a cached total degree.
///
/// The derived ordering (total degree, then the exponent array) is exactly
/// graded lex with `x0 > x1 > ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mono {
    deg: u16,
    exps: [u8; MAX_VARS],
}

impl Mono {
    pub fn one() -> Self {
        Mono {
            deg: 0,
            exps: [0; MAX_VARS],
        }
    }

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} exceeds MAX_VARS");
        let mut exps = [0; MAX_VARS];
        exps[i] = 1;
        Mono { deg: 1, exps }
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut out = [0u8; MAX_VARS];
        let mut deg = 0u16;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= MAX_EXP as u32, "exponent overflow");
            out[i] = e as u8;
            deg += e as u16;
        }
        Mono { deg, exps: out }
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn total_degree(&self) -> u32 {
        self.deg as u32
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    /// Index of the highest variable with a positive exponent, if any.
    pub fn top_var(&self) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&i| self.exps[i] > 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut exps = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow in monomial product");
        }
        Mono {
            deg: self.deg + other.deg,
            exps,
        }
    }

    pub fn divides(&self, other: &Mono) -> bool {
        (0..MAX_VARS).all(|i| self.exps[i] <= other.exps[i])
    }

    /// Quotient `other / self`; caller must ensure divisibility.
    pub fn div_into(&self, other: &Mono) -> Mono {
        let mut exps = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = other.exps[i] - self.exps[i];
        }
        Mono {
            deg: other.deg - self.deg,
            exps,
        }
    }

    fn with_exp(&self, i: usize, e: u8) -> Mono {
        let mut exps = self.exps;
        let deg = self.deg - exps[i] as u16 + e as u16;
        exps[i] = e;
        Mono { deg, exps }
    }
}

/// How a polynomial sits with respect to total-degree homogeneity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HomDegree {
    /// Every term has this total degree.
    Degree(u32),
    /// The zero polynomial, homogeneous of any degree.
    Any,
}

impl HomDegree {
    /// The concrete degree, or `fallback` for the zero polynomial.
    pub fn or(self, fallback: u32) -> u32 {
        match self {
            HomDegree::Degree(d) => d,
            HomDegree::Any => fallback,
        }
    }
}

/// Sparse multivariate polynomial over the rationals, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(
            nvars >= 1 && nvars <= MAX_VARS,
            "nvars must be in 1..={MAX_VARS}"
        );
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigRational::one())
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Poly::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// The variable `x_i` as a polynomial.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(
            i < nvars,
            "variable index {i} out of range for {nvars} variables"
        );
        let mut p = Poly::zero(nvars);
        p.terms.insert(Mono::var(i), BigRational::one());
        p
    }

    /// Build from (exponent vector, coefficient) pairs; duplicates are summed.
    pub fn from_terms(nvars: usize, terms: &[(&[u32], BigRational)]) -> Self {
        let mut p = Poly::zero(nvars);
        for (exps, c) in terms {
            assert!(exps.len() <= nvars, "exponent vector longer than nvars");
            p.add_term(Mono::from_exps(exps), c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Mono::one())
    }

    /// Leading (graded-lex greatest) term.
    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(i)).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Formal partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(
            i < self.nvars,
            "variable index {i} out of range for {} variables",
            self.nvars
        );
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                let factor = BigRational::from_integer(BigInt::from(e));
                out.add_term(m.with_exp(i, (e - 1) as u8), c * factor);
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, pt: &[BigRational]) -> BigRational {
        assert_eq!(
            pt.len(),
            self.nvars,
            "point length does not match variable count"
        );
        // Per-variable power cache.
        let mut pows: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]; self.nvars];
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for i in 0..self.nvars {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                while pows[i].len() <= e {
                    let next = pows[i].last().unwrap() * &pt[i];
                    pows[i].push(next);
                }
                term *= &pows[i][e];
            }
            acc += term;
        }
        acc
    }

    /// Total-degree homogeneity: `None` when terms of different degrees mix.
    pub fn homogeneous_degree(&self) -> Option<HomDegree> {
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Some(HomDegree::Any),
            Some(m) => m.total_degree(),
        };
        if it.all(|m| m.total_degree() == first) {
            Some(HomDegree::Degree(first))
        } else {
            None
        }
    }

    /// The slice of terms with total degree exactly `r`.
    pub fn homogeneous_slice(&self, r: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() == r)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Drop all terms of total degree greater than `k`.
    pub fn truncate_above(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() <= k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Substitute `x_i -> subs[i]`; all substituted polynomials must share a
    /// variable count.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars, "substitution arity mismatch");
        let out_vars = subs.first().map(|p| p.nvars).unwrap_or(1);
        assert!(
            subs.iter().all(|p| p.nvars == out_vars),
            "substitution variable counts differ"
        );
        // Cache powers of each substituted polynomial.
        let mut pows: Vec<Vec<Poly>> = (0..subs.len()).map(|_| Vec::new()).collect();
        let mut acc = Poly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(out_vars, c.clone());
            for i in 0..self.nvars {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                if pows[i].is_empty() {
                    pows[i].push(subs[i].clone());
                }
                while pows[i].len() < e {
                    let next = pows[i].last().unwrap() * &subs[i];
                    pows[i].push(next);
                }
                term = &term * &pows[i][e - 1];
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Rewrite in coordinates centered at `center` (substitute
    /// `x_i -> center_i + y_i`), optionally truncating above total degree
    /// `max_deg` in the shifted variables.
    pub fn taylor_shift(&self, center: &[BigRational], max_deg: Option<u32>) -> Poly {
        assert_eq!(
            center.len(),
            self.nvars,
            "center length does not match variable count"
        );
        let cap = max_deg.unwrap_or(u32::MAX);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            // Expand prod_i (c_i + y_i)^{e_i}, pruning above the cap.
            let mut acc: Vec<(Mono, BigRational)> = vec![(Mono::one(), c.clone())];
            for i in 0..self.nvars {
                let e = m.exp(i);
                if e == 0 {
                    continue;
                }
                if center[i].is_zero() {
                    // Only the pure y_i^e term survives.
                    let step = Mono::one().with_exp(i, e as u8);
                    acc = acc
                        .into_iter()
                        .filter_map(|(mm, cc)| {
                            let nm = mm.mul(&step);
                            (nm.total_degree() <= cap).then_some((nm, cc))
                        })
                        .collect();
                    continue;
                }
                let mut cpows: Vec<BigRational> = vec![BigRational::one()];
                for _ in 0..e {
                    let next = cpows.last().unwrap() * &center[i];
                    cpows.push(next);
                }
                let mut next_acc: Vec<(Mono, BigRational)> = Vec::new();
                for (mm, cc) in &acc {
                    let mut binom = BigInt::one();
                    for k in 0..=e {
                        if k > 0 {
                            binom = binom * BigInt::from(e - k + 1) / BigInt::from(k);
                        }
                        let nm = mm.with_exp(i, (mm.exp(i) + k) as u8);
                        if nm.total_degree() > cap {
                            continue;
                        }
                        let coef = cc
                            * &cpows[(e - k) as usize]
                            * BigRational::from_integer(binom.clone());
                        next_acc.push((nm, coef));
                    }
                }
                acc = next_acc;
            }
            for (mm, cc) in acc {
                out.add_term(mm, cc);
            }
        }
        out
    }

    /// Exact division: `Some(q)` with `self == q * d`, or `None` when `d`
    /// does not divide `self`.
    pub fn try_div_exact(&self, d: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, d.nvars, "variable count mismatch");
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (*m, c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            if !dm.divides(&rm) {
                return None;
            }
            let qm = dm.div_into(&rm);
            let qc = &rc / &dc;
            quot.add_term(qm, qc.clone());
            rem = &rem - &d.mul_mono(&qm, &qc);
        }
        Some(quot)
    }

    /// Divide by the leading coefficient so the graded-lex leading
    /// coefficient becomes 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Map to `new_nvars` variables via `var_map[i] = new index of x_i`.
    pub fn remap_vars(&self, var_map: &[usize], new_nvars: usize) -> Poly {
        assert_eq!(var_map.len(), self.nvars);
        let mut out = Poly::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut exps = [0u8; MAX_VARS];
            for i in 0..self.nvars {
                let e = m.exp(i) as u8;
                if e > 0 {
                    assert!(var_map[i] < new_nvars, "remap target out of range");
                    exps[var_map[i]] += e;
                }
            }
            out.add_term(Mono { deg: m.deg, exps }, c.clone());
        }
        out
    }

    /// Reinterpret in a larger variable set (indices unchanged).
    pub fn extend_vars(&self, new_nvars: usize) -> Poly {
        assert!(new_nvars >= self.nvars && new_nvars <= MAX_VARS);
        Poly {
            nvars: new_nvars,
            terms: self.terms.clone(),
        }
    }

    /// Euler pairing `sum_i x_i * d/dx_i(self)`.
    pub fn euler_operator(&self) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for i in 0..self.nvars {
            acc = &acc + &(&Poly::var(self.nvars, i) * &self.partial(i));
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch in +");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch in -");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch in *");
        let mut out = Poly::zero(self.nvars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        // Iterate the smaller operand outside.
        let (small, large) = if self.terms.len() <= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        for (m1, c1) in &small.terms {
            for (m2, c2) in &large.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

/// Canonical text form: graded-lex descending, `p/q` or integer
/// coefficients, unit coefficients suppressed, ` + ` / ` - ` separators.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = format_mono(m, self.nvars);
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn format_mono(m: &Mono, nvars: usize) -> String {
    let mut parts = Vec::new();
    for i in 0..nvars {
        let e = m.exp(i);
        if e == 1 {
            parts.push(format!("x{i}"));
        } else if e > 1 {
            parts.push(format!("x{i}^{e}"));
        }
    }
    parts.join("*")
}

/// Convenience constructor used across the crate: rational from `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience constructor: integer rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
