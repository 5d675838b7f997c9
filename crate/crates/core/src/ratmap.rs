//! Rational maps between projective spaces: validation, indeterminacy
//! witnesses, transversality, critical points and fiber membership.
//!
//! No polynomial-system solving happens here. Indeterminacy points are
//! supplied as witnesses and verified exactly; only structured binomial
//! families generate their own witnesses in closed form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::gcd::polys_gcd_fast;
use crate::linalg::{self, Mat};
use crate::poly::{HomDegree, Poly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("expected {expected} components, found {found}")]
    WrongComponentCount { expected: usize, found: usize },
    #[error("component {index} is not homogeneous of degree {degree}")]
    InhomogeneousComponent { index: usize, degree: u32 },
    #[error("components share the common factor {factor}")]
    CommonFactor { factor: String },
    #[error("all components are zero")]
    AllZero,
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error("point is not in the indeterminacy locus")]
    NotIndeterminate,
    #[error("point lies in the indeterminacy locus")]
    Indeterminate,
    #[error("point has wrong length: expected {expected}, found {found}")]
    WrongPointLength { expected: usize, found: usize },
    #[error("chart index {0} out of range")]
    BadChart(usize),
    #[error("map component {0} vanishes at the point; that chart is unusable there")]
    ChartVanishes(usize),
    #[error("witness list contains a duplicate of point {0}")]
    DuplicateWitness(usize),
}

/// Rational map `P^n --> P^m` of degree `nu`: m+1 homogeneous polynomials
/// in n+1 variables without common factor.
#[derive(Clone, Debug)]
pub struct RationalMap {
    source: usize,
    target: usize,
    degree: u32,
    comps: Vec<Poly>,
}

impl RationalMap {
    pub fn new(
        source: usize,
        target: usize,
        degree: u32,
        comps: Vec<Poly>,
    ) -> Result<Self, MapError> {
        let map = RationalMap {
            source,
            target,
            degree,
            comps,
        };
        map.validate()?;
        Ok(map)
    }

    /// Re-checks every structural invariant, reporting the first failure.
    pub fn validate(&self) -> Result<(), MapError> {
        let n = self.source + 1;
        if self.comps.len() != self.target + 1 {
            return Err(MapError::WrongComponentCount {
                expected: self.target + 1,
                found: self.comps.len(),
            });
        }
        if self.comps.iter().all(|p| p.is_zero()) {
            return Err(MapError::AllZero);
        }
        for (i, p) in self.comps.iter().enumerate() {
            if p.nvars() != n {
                return Err(MapError::WrongComponentCount {
                    expected: n,
                    found: p.nvars(),
                });
            }
            match p.homogeneous_degree() {
                Some(HomDegree::Any) => {}
                Some(HomDegree::Degree(d)) if d == self.degree => {}
                _ => {
                    return Err(MapError::InhomogeneousComponent {
                        index: i,
                        degree: self.degree,
                    })
                }
            }
        }
        let g = polys_gcd_fast(self.comps.iter(), crate::sample::DEFAULT_SEED);
        if !g.is_constant() {
            return Err(MapError::CommonFactor {
                factor: g.to_string(),
            });
        }
        Ok(())
    }

    pub fn source_dim(&self) -> usize {
        self.source
    }

    pub fn target_dim(&self) -> usize {
        self.target
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn eval(&self, p: &[BigRational]) -> Vec<BigRational> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    fn check_point(&self, p: &[BigRational]) -> Result<(), MapError> {
        if p.len() != self.source + 1 {
            return Err(MapError::WrongPointLength {
                expected: self.source + 1,
                found: p.len(),
            });
        }
        if p.iter().all(|v| v.is_zero()) {
            return Err(MapError::ZeroPoint);
        }
        Ok(())
    }

    /// Does every component vanish at the (nonzero) point?
    pub fn is_indeterminacy_point(&self, p: &[BigRational]) -> Result<bool, MapError> {
        self.check_point(p)?;
        Ok(self.eval(p).iter().all(|v| v.is_zero()))
    }

    /// Jacobian of the homogeneous lift at a point: (m+1) x (n+1).
    pub fn jacobian_at(&self, p: &[BigRational]) -> Mat {
        self.comps
            .iter()
            .map(|c| (0..self.source + 1).map(|j| c.partial(j).eval(p)).collect())
            .collect()
    }

    /// Transversality at an indeterminacy point: the differentials of all
    /// components are independent there (Jacobian rank m+1, exact).
    pub fn is_generic_at(&self, p: &[BigRational]) -> Result<bool, MapError> {
        if !self.is_indeterminacy_point(p)? {
            return Err(MapError::NotIndeterminate);
        }
        Ok(linalg::rank_gauss(&self.jacobian_at(p)) == self.target + 1)
    }

    /// Is `p` (outside the indeterminacy locus) critical in the given
    /// target chart: affine differential rank <= m-1?
    pub fn is_critical_point(&self, p: &[BigRational], chart: usize) -> Result<bool, MapError> {
        self.check_point(p)?;
        if chart > self.target {
            return Err(MapError::BadChart(chart));
        }
        let vals = self.eval(p);
        if vals.iter().all(|v| v.is_zero()) {
            return Err(MapError::Indeterminate);
        }
        if vals[chart].is_zero() {
            return Err(MapError::ChartVanishes(chart));
        }
        // Source chart: first nonzero coordinate of p.
        let s = p.iter().position(|v| !v.is_zero()).expect("nonzero point");
        // Affine differential of F_i/F_chart in source chart s at p:
        // rows i != chart, columns j != s of
        // (dF_i * F_c - F_i * dF_c) / F_c^2 evaluated at p.
        let fc = &vals[chart];
        let mut rows = Vec::new();
        for (i, fi) in vals.iter().enumerate() {
            if i == chart {
                continue;
            }
            let mut row = Vec::new();
            for j in 0..=self.source {
                if j == s {
                    continue;
                }
                let dfi = self.comps[i].partial(j).eval(p);
                let dfc = self.comps[chart].partial(j).eval(p);
                row.push(&dfi * fc - fi * &dfc);
            }
            rows.push(row);
        }
        Ok(linalg::rank_gauss(&rows) <= self.target - 1)
    }

    /// Are `f(p)` and `q` the same projective point?
    pub fn fiber_membership(&self, p: &[BigRational], q: &[BigRational]) -> Result<bool, MapError> {
        self.check_point(p)?;
        if q.len() != self.target + 1 {
            return Err(MapError::WrongPointLength {
                expected: self.target + 1,
                found: q.len(),
            });
        }
        if q.iter().all(|v| v.is_zero()) {
            return Err(MapError::ZeroPoint);
        }
        let vals = self.eval(p);
        if vals.iter().all(|v| v.is_zero()) {
            return Err(MapError::Indeterminate);
        }
        Ok(linalg::proportional(&vals, q))
    }

    /// For components of the shape `a*x_{j}^nu + b*x_0^nu` (j distinct,
    /// covering x_1..x_n once each): all rational indeterminacy witnesses in
    /// the chart x_0 = 1, plus whether that closed form exhausts the Bezout
    /// count.
    pub fn binomial_witnesses(&self) -> Option<(Vec<Vec<BigRational>>, bool)> {
        if self.source != self.target + 1 {
            return None;
        }
        let n = self.source;
        let nu = self.degree;
        let mut per_var: Vec<Option<Vec<BigRational>>> = vec![None; n + 1];
        for comp in &self.comps {
            // expect exactly two terms: a*x_j^nu and b*x_0^nu
            if comp.num_terms() != 2 {
                return None;
            }
            let mut var_j = None;
            let mut a = BigRational::zero();
            let mut b = BigRational::zero();
            for (m, c) in comp.terms() {
                if m.exp(0) == nu && m.total_degree() == nu {
                    b = c.clone();
                } else {
                    let j = (1..=n).find(|&j| m.exp(j) == nu && m.total_degree() == nu)?;
                    var_j = Some(j);
                    a = c.clone();
                }
            }
            let j = var_j?;
            if per_var[j].is_some() || a.is_zero() {
                return None;
            }
            // roots of a t^nu + b = 0 -> t^nu = -b/a
            let c = -(b / a);
            per_var[j] = Some(rational_nth_roots(&c, nu));
        }
        let covered: Vec<usize> = (1..=n).collect();
        if covered.iter().any(|&j| per_var[j].is_none()) {
            return None;
        }
        // Cartesian product of per-variable roots.
        let mut points: Vec<Vec<BigRational>> = vec![vec![BigRational::from_integer(1.into())]];
        let mut complete = true;
        for j in 1..=n {
            let roots = per_var[j].as_ref().unwrap();
            let expect = if nu % 2 == 0 { 2 } else { 1 };
            // Over the rationals each binomial contributes at most `expect`
            // roots of the nu of them.
            if roots.len() < expect || (roots.len() as u32) < nu {
                complete = complete && (roots.len() as u32) == nu;
            }
            let mut next = Vec::new();
            for p in &points {
                for r in roots {
                    let mut v = p.clone();
                    v.push(r.clone());
                    next.push(v);
                }
            }
            points = next;
        }
        let bound = (self.degree as u64).pow(n as u32);
        complete = points.len() as u64 == bound;
        Some((points, complete))
    }
}

/// All rational solutions of `t^n = c`.
fn rational_nth_roots(c: &BigRational, n: u32) -> Vec<BigRational> {
    if c.is_zero() {
        return vec![BigRational::zero()];
    }
    let neg = c.is_negative();
    if neg && n % 2 == 0 {
        return Vec::new();
    }
    let mag = c.abs();
    let num_root = integer_nth_root(mag.numer(), n);
    let den_root = integer_nth_root(mag.denom(), n);
    match (num_root, den_root) {
        (Some(a), Some(b)) => {
            let base = BigRational::new(a, b);
            let root = if neg { -base } else { base };
            if n % 2 == 0 {
                vec![root.clone(), -root]
            } else {
                vec![root]
            }
        }
        _ => Vec::new(),
    }
}

fn integer_nth_root(v: &BigInt, n: u32) -> Option<BigInt> {
    if v.is_zero() {
        return Some(BigInt::zero());
    }
    assert!(v.is_positive());
    let r = v.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == *v {
        Some(r)
    } else {
        None
    }
}

/// Outcome of verifying a witness list against the Bezout bound.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    /// Number of points verified indeterminate, generic, pairwise distinct.
    pub verified: usize,
    /// The Bezout bound nu^(m+1) that applies when n == m+1.
    pub bound: u64,
    /// True when the verified count meets the bound with all points simple.
    pub complete: bool,
    /// Human-readable per-point failures (index, reason).
    pub failures: Vec<(usize, String)>,
}

impl WitnessReport {
    pub fn all_verified(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verify a list of claimed indeterminacy witnesses: each must be an
/// indeterminacy point and generic; the list must be projectively
/// duplicate-free. Requires n == m+1 so the Bezout count applies.
pub fn indeterminacy_witness_check(
    f: &RationalMap,
    pts: &[Vec<BigRational>],
) -> Result<WitnessReport, MapError> {
    assert_eq!(
        f.source_dim(),
        f.target_dim() + 1,
        "witness counting needs n == m+1"
    );
    for (i, p) in pts.iter().enumerate() {
        for q in pts.iter().skip(i + 1) {
            if p.len() == q.len() && linalg::proportional(p, q) {
                return Err(MapError::DuplicateWitness(i));
            }
        }
    }
    let mut failures = Vec::new();
    let mut verified = 0usize;
    for (i, p) in pts.iter().enumerate() {
        match f.is_indeterminacy_point(p) {
            Err(e) => failures.push((i, e.to_string())),
            Ok(false) => failures.push((i, "not an indeterminacy point".into())),
            Ok(true) => match f.is_generic_at(p) {
                Err(e) => failures.push((i, e.to_string())),
                Ok(false) => failures.push((i, "differentials not independent".into())),
                Ok(true) => verified += 1,
            },
        }
    }
    let bound = (f.degree() as u64).pow(f.source_dim() as u32);
    Ok(WitnessReport {
        verified,
        bound,
        complete: failures.is_empty() && verified as u64 == bound,
        failures,
    })
}
