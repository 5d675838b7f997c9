//! Point-level singularity analysis: Kupka tests, rotational linear parts,
//! conic nilpotent singularities and their normal types, quasi-homogeneity,
//! transversal-type classification, and the tangency count on the
//! projective plane.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::elimination::{self, local_intersection_multiplicity, resultant};
use crate::exterior::{
    interior_product, jet_at, lie_bracket, lie_derivative, pullback, rotational,
    volume_contraction_preimage, PForm, PVec,
};
use crate::finite;
use crate::gcd::{gcd_multivar, polys_gcd};
use crate::linalg::{self, Mat};
use crate::poly::{HomDegree, Poly};
use crate::ratmap::{MapError, RationalMap};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SingularError {
    #[error("form degree must be N-2 for rotational analysis (N={nvars}, q={formdeg})")]
    WrongFormDegree { nvars: usize, formdeg: usize },
    #[error("conic degree must be at least 2, got {0}")]
    ConicDegreeTooSmall(u32),
    #[error("point has wrong length: expected {expected}, found {found}")]
    WrongPointLength { expected: usize, found: usize },
    #[error("the singular scheme is positive-dimensional")]
    PositiveDimensional,
    #[error("chart projections are degenerate for every coordinate ordering; count inconclusive")]
    ChartDegeneracy,
    #[error("the point is not a singular point of the field")]
    NotSingular,
    #[error("the plane does not contain the base point")]
    PlaneMissesPoint,
    #[error("plane spec has wrong dimension: expected {expected} directions, found {found}")]
    PlaneDimension { expected: usize, found: usize },
    #[error("plane directions are linearly dependent")]
    PlaneDegenerate,
    #[error("exact isolation certificate unresolved for this input")]
    IsolationUnresolved,
    #[error("map error: {0}")]
    Map(#[from] MapError),
    #[error("the form is not conic at the point: {0}")]
    NotConic(String),
}

/// Does every coefficient of the form vanish at the point?
pub fn singular_at(a: &PForm, p: &[BigRational]) -> bool {
    a.vanishes_at(p)
}

/// Kupka test: the form vanishes at p but its differential does not.
pub fn kupka_at(a: &PForm, p: &[BigRational]) -> bool {
    singular_at(a, p) && !a.exterior_derivative().vanishes_at(p)
}

/// Exact linear-part data of a vector field germ.
#[derive(Clone, Debug)]
pub struct LinearPartInfo {
    pub matrix: Mat,
    pub trace: BigRational,
    pub determinant: BigRational,
    /// `charpoly[k]` is the coefficient of t^k in det(tI - M).
    pub charpoly: Vec<BigRational>,
    pub eigenvalues: Eigenvalues,
}

/// Eigenvalues, exact when the characteristic polynomial splits into
/// rational and quadratic factors, floating otherwise.
#[derive(Clone, Debug)]
pub enum Eigenvalues {
    /// Each value `s + t*sqrt(disc)`; `disc < 0` encodes a complex pair
    /// member (its conjugate is listed too).
    Exact(Vec<QuadraticNumber>),
    /// (re, im) approximations with the tolerance used downstream.
    Numerical {
        values: Vec<(f64, f64)>,
        tolerance: f64,
    },
}

/// `s + t * sqrt(disc)` with rational s, t, disc (t = 0 for rational
/// eigenvalues; disc is not a perfect square when t != 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticNumber {
    pub s: BigRational,
    pub t: BigRational,
    pub disc: BigRational,
}

impl QuadraticNumber {
    pub fn rational(v: BigRational) -> Self {
        QuadraticNumber {
            s: v,
            t: BigRational::zero(),
            disc: BigRational::zero(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.t.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.t.is_zero() || !self.disc.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_zero() && self.s.is_zero()
    }

    fn approx(&self) -> (f64, f64) {
        let s = ratio_to_f64(&self.s);
        let t = ratio_to_f64(&self.t);
        let d = ratio_to_f64(&self.disc);
        if d >= 0.0 {
            (s + t * d.sqrt(), 0.0)
        } else {
            (s, t * (-d).sqrt())
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

impl LinearPartInfo {
    pub fn from_matrix(matrix: Mat) -> Self {
        let n = matrix.len();
        let charpoly = linalg::charpoly(&matrix);
        let trace = linalg::trace(&matrix);
        let determinant = linalg::det(&matrix);
        let eigenvalues = eigenvalues_from_charpoly(&charpoly, n);
        LinearPartInfo {
            matrix,
            trace,
            determinant,
            charpoly,
            eigenvalues,
        }
    }

    /// Nilpotency is exact: all characteristic coefficients below the
    /// leading one vanish.
    pub fn is_nilpotent(&self) -> bool {
        let n = self.matrix.len();
        self.charpoly[..n].iter().all(|c| c.is_zero())
    }
}

/// Jacobian linear part of a vector field at a singular point.
pub fn field_linear_part(x: &PVec, p: &[BigRational]) -> Result<LinearPartInfo, SingularError> {
    if p.len() != x.nvars() {
        return Err(SingularError::WrongPointLength {
            expected: x.nvars(),
            found: p.len(),
        });
    }
    if !x.vanishes_at(p) {
        return Err(SingularError::NotSingular);
    }
    Ok(LinearPartInfo::from_matrix(x.jacobian_at(p)))
}

/// Factor the characteristic polynomial into rational roots plus (if the
/// remainder is quadratic) one quadratic factor; fall back to numerics
/// beyond that.
fn eigenvalues_from_charpoly(cp: &[BigRational], n: usize) -> Eigenvalues {
    let mut coeffs: Vec<BigRational> = cp.to_vec();
    let mut exact: Vec<QuadraticNumber> = Vec::new();
    // Strip rational roots by candidate search on the integer-cleared poly.
    loop {
        let deg = coeffs.len() - 1;
        if deg == 0 {
            break;
        }
        if deg <= 2 {
            if deg == 1 {
                // c1 t + c0
                let root = -(&coeffs[0] / &coeffs[1]);
                exact.push(QuadraticNumber::rational(root));
                coeffs = vec![BigRational::one()];
                continue;
            }
            // quadratic: t^2 + b t + c (monic by construction)
            let b = &coeffs[1] / &coeffs[2];
            let c = &coeffs[0] / &coeffs[2];
            let disc = &b * &b - BigRational::from_integer(4.into()) * &c;
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            if let Some(sq) = rational_sqrt(&disc) {
                exact.push(QuadraticNumber::rational((&(-&b) + &sq) * &half));
                exact.push(QuadraticNumber::rational((&(-&b) - &sq) * &half));
            } else {
                let s = -&b * &half;
                let t = half.clone();
                exact.push(QuadraticNumber {
                    s: s.clone(),
                    t: t.clone(),
                    disc: disc.clone(),
                });
                exact.push(QuadraticNumber { s, t: -t, disc });
            }
            coeffs = vec![BigRational::one()];
            continue;
        }
        match find_rational_root(&coeffs) {
            Some(r) => {
                exact.push(QuadraticNumber::rational(r.clone()));
                coeffs = deflate(&coeffs, &r);
            }
            None => {
                // Degree >= 3 with no rational root: numerical fallback for
                // the remaining factor, keeping the exact ones found so far.
                let mut values: Vec<(f64, f64)> = exact.iter().map(|q| q.approx()).collect();
                values.extend(durand_kerner(&coeffs));
                return Eigenvalues::Numerical {
                    values,
                    tolerance: 1e-9,
                };
            }
        }
    }
    debug_assert_eq!(exact.len(), n);
    Eigenvalues::Exact(exact)
}

fn rational_sqrt(v: &BigRational) -> Option<BigRational> {
    if v.is_negative() {
        return None;
    }
    if v.is_zero() {
        return Some(BigRational::zero());
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn find_rational_root(coeffs: &[BigRational]) -> Option<BigRational> {
    // Clear denominators; candidates p/q with p | a0, q | an.
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| {
        num_integer::Integer::lcm(&acc, c.denom())
    });
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let a0 = ints.first().cloned().unwrap_or_else(BigInt::zero);
    let an = ints.last().cloned().unwrap();
    if a0.is_zero() {
        return Some(BigRational::zero());
    }
    let pdivs = small_divisors(&a0);
    let qdivs = small_divisors(&an);
    for p in &pdivs {
        for q in &qdivs {
            for sign in [1i64, -1] {
                let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                if eval_poly(coeffs, &cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn small_divisors(v: &BigInt) -> Vec<BigInt> {
    let a = v.magnitude().to_u64().unwrap_or(u64::MAX);
    let mut out = Vec::new();
    if a == u64::MAX {
        out.push(BigInt::one());
        out.push(v.abs());
        return out;
    }
    let mut d = 1u64;
    while d * d <= a && d < 100_000 {
        if a % d == 0 {
            out.push(BigInt::from(d));
            out.push(BigInt::from(a / d));
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

fn eval_poly(coeffs: &[BigRational], at: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * at + c;
    }
    acc
}

fn deflate(coeffs: &[BigRational], root: &BigRational) -> Vec<BigRational> {
    // synthetic division by (t - root)
    let n = coeffs.len() - 1;
    let mut out = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for k in (0..n).rev() {
        let v = &coeffs[k + 1] + &(&carry * root);
        out[k] = v.clone();
        carry = v;
    }
    out
}

fn durand_kerner(coeffs: &[BigRational]) -> Vec<(f64, f64)> {
    let n = coeffs.len() - 1;
    let c: Vec<(f64, f64)> = coeffs.iter().map(|r| (ratio_to_f64(r), 0.0)).collect();
    let lead = c[n];
    let cm: Vec<(f64, f64)> = c.iter().map(|v| cdiv(*v, lead)).collect();
    let mut roots: Vec<(f64, f64)> = (0..n).map(|k| cpowk((0.4, 0.9), k)).collect();
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = cmul(denom, csub(roots[i], roots[j]));
                }
            }
            let val = ceval(&cm, roots[i]);
            let delta = cdiv(val, denom);
            roots[i] = csub(roots[i], delta);
            moved = moved.max(delta.0.hypot(delta.1));
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}
fn cpowk(a: (f64, f64), k: usize) -> (f64, f64) {
    let mut acc = (1.0, 0.0);
    for _ in 0..k {
        acc = cmul(acc, a);
    }
    acc
}
fn ceval(coeffs: &[(f64, f64)], at: (f64, f64)) -> (f64, f64) {
    let mut acc = (0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = cmul(acc, at);
        acc = (acc.0 + c.0, acc.1 + c.1);
    }
    acc
}

/// Three-valued outcome for open conditions that may need numerics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Analysis modes recorded in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertMode {
    Exact,
    Probabilistic,
    Numerical,
}

/// Classification of a singular point of a one-dimensional
/// foliation germ by its linear part.
#[derive(Clone, Debug)]
pub struct Classification {
    pub nondegenerate: bool,
    pub kupka_type: bool,
    pub hyperbolic: Verdict,
    pub mode: CertMode,
}

/// Classify by linear part: nondegenerate iff det != 0, Kupka type iff
/// trace != 0, hyperbolic iff every eigenvalue ratio is non-real (exact up
/// to quadratic factors, numerics with tolerance beyond).
pub fn classify_singularity_1d(info: &LinearPartInfo) -> Classification {
    let nondegenerate = !info.determinant.is_zero();
    let kupka_type = !info.trace.is_zero();
    let (hyperbolic, mode) = if !nondegenerate {
        (Verdict::No, CertMode::Exact)
    } else {
        match &info.eigenvalues {
            Eigenvalues::Exact(vals) => (hyperbolic_exact(vals), CertMode::Exact),
            Eigenvalues::Numerical { values, tolerance } => {
                (hyperbolic_numeric(values, *tolerance), CertMode::Numerical)
            }
        }
    };
    Classification {
        nondegenerate,
        kupka_type,
        hyperbolic,
        mode,
    }
}

fn hyperbolic_exact(vals: &[QuadraticNumber]) -> Verdict {
    // Any pair with a real ratio defeats hyperbolicity. All values are
    // nonzero here (nondegenerate case).
    for i in 0..vals.len() {
        for j in 0..vals.len() {
            if i == j {
                continue;
            }
            if ratio_is_real(&vals[i], &vals[j]) {
                return Verdict::No;
            }
        }
    }
    Verdict::Yes
}

/// Is a/b real for quadratic numbers a = s1 + t1 sqrt(d1), b = s2 + t2 sqrt(d2)?
fn ratio_is_real(a: &QuadraticNumber, b: &QuadraticNumber) -> bool {
    let a_real = a.is_real();
    let b_real = b.is_real();
    if a_real && b_real {
        return true;
    }
    if a_real != b_real {
        return false;
    }
    // Both complex: a = s1 + i u1, b = s2 + i u2 with u = t*sqrt(-d) != 0.
    // a/b real <=> Im(a * conj(b)) = 0 <=> u1 s2 - s1 u2 = 0,
    // u1 = t1 sqrt(-d1), u2 = t2 sqrt(-d2).
    // Compare t1 sqrt(-d1) s2 == s1 t2 sqrt(-d2): square both sides and
    // match signs.
    let lhs_sq = &a.t * &a.t * (-&a.disc) * &b.s * &b.s;
    let rhs_sq = &a.s * &a.s * &b.t * &b.t * (-&b.disc);
    if lhs_sq != rhs_sq {
        return false;
    }
    // Magnitudes agree; compare signs of t1*s2 and s1*t2 (sqrt factors > 0).
    let lhs_sign = (&a.t * &b.s).is_negative();
    let rhs_sign = (&a.s * &b.t).is_negative();
    let lhs_zero = (&a.t * &b.s).is_zero();
    let rhs_zero = (&a.s * &b.t).is_zero();
    if lhs_zero && rhs_zero {
        return true;
    }
    lhs_sign == rhs_sign && lhs_zero == rhs_zero
}

fn hyperbolic_numeric(values: &[(f64, f64)], tol: f64) -> Verdict {
    for i in 0..values.len() {
        for j in 0..values.len() {
            if i == j {
                continue;
            }
            let (a, b) = values[i];
            let (c, d) = values[j];
            let denom = c * c + d * d;
            if denom < tol {
                return Verdict::Inconclusive;
            }
            let im = (b * c - a * d) / denom;
            let re = (a * c + b * d) / denom;
            let scale = re.abs().max(im.abs()).max(1.0);
            if im.abs() < tol * scale * 10.0 {
                // Real within tolerance: fails hyperbolicity, but flag
                // borderline magnitudes as inconclusive.
                if im.abs() > tol * scale {
                    return Verdict::Inconclusive;
                }
                return Verdict::No;
            }
        }
    }
    Verdict::Yes
}

/// Linear part of the rotational of the order-2 jet at a point (the order
/// suffices: the rotational of a quadratic jet has linear coefficients).
pub fn rotational_linear_part(
    a: &PForm,
    p: &[BigRational],
) -> Result<LinearPartInfo, SingularError> {
    let n = a.nvars();
    if a.formdeg() + 2 != n {
        return Err(SingularError::WrongFormDegree {
            nvars: n,
            formdeg: a.formdeg(),
        });
    }
    if p.len() != n {
        return Err(SingularError::WrongPointLength {
            expected: n,
            found: p.len(),
        });
    }
    let jet = jet_at(a, p, 2);
    let z = rotational(jet.body());
    let origin: Vec<BigRational> = vec![BigRational::zero(); n];
    Ok(LinearPartInfo::from_matrix(z.jacobian_at(&origin)))
}

/// Conic analysis record: degree, normal type (in shifted coordinates),
/// and the certification mode of the isolated-rotational check.
#[derive(Clone, Debug)]
pub struct ConicRecord {
    pub degree: u32,
    pub normal_type: PForm,
    pub mode: CertMode,
}

/// Options for the probabilistic isolated-singularity fallback.
#[derive(Clone, Copy, Debug)]
pub struct IsolationOptions {
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
}

impl Default for IsolationOptions {
    fn default() -> Self {
        IsolationOptions {
            prime: finite::DEFAULT_PRIME,
            trials: 8,
            seed: crate::sample::DEFAULT_SEED,
        }
    }
}

/// Test for a conic nilpotent singularity of degree d at p:
/// the order-d jet vanishes, the (d+1)-slice h is nonzero and radial-closed
/// at p, and the rotational of h has an isolated singularity (exact via
/// resultants for N == 3, probabilistic lines otherwise).
pub fn is_conic_ngk_at(
    a: &PForm,
    p: &[BigRational],
    d: u32,
    opts: IsolationOptions,
) -> Result<Option<ConicRecord>, SingularError> {
    let n = a.nvars();
    if a.formdeg() + 2 != n {
        return Err(SingularError::WrongFormDegree {
            nvars: n,
            formdeg: a.formdeg(),
        });
    }
    if d < 2 {
        return Err(SingularError::ConicDegreeTooSmall(d));
    }
    if p.len() != n {
        return Err(SingularError::WrongPointLength {
            expected: n,
            found: p.len(),
        });
    }
    // (i) the order-d jet vanishes
    let jet_low = jet_at(a, p, d);
    if !jet_low.is_zero() {
        return Ok(None);
    }
    // (ii) the degree-(d+1) slice is nonzero
    let jet_high = jet_at(a, p, d + 1);
    let h = crate::exterior::homogeneous_part(&jet_high, d + 1);
    if h.is_zero() {
        return Ok(None);
    }
    // (iii) radial annihilation in shifted coordinates
    if !interior_product(&PVec::radial(n), &h).is_zero() {
        return Ok(None);
    }
    // (iv) isolated rotational singularity
    let x = rotational(&h);
    let mode = match isolated_at_origin(&x, opts) {
        Ok(IsolationOutcome::Isolated(mode)) => mode,
        Ok(IsolationOutcome::NotIsolated) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some(ConicRecord {
        degree: d,
        normal_type: h,
        mode,
    }))
}

/// Normal type at a conic point: the homogeneous (d+1)-slice, which passes
/// the radial and Euler-relation checks in shifted coordinates.
pub fn normal_type_at(
    a: &PForm,
    p: &[BigRational],
    d: u32,
    opts: IsolationOptions,
) -> Result<PForm, SingularError> {
    match is_conic_ngk_at(a, p, d, opts)? {
        Some(rec) => Ok(rec.normal_type),
        None => Err(SingularError::NotConic(format!(
            "no conic record of degree {d} at the point"
        ))),
    }
}

enum IsolationOutcome {
    Isolated(CertMode),
    NotIsolated,
}

/// Is the origin an isolated zero of the homogeneous field X? Equivalent to
/// the projectivized components having no common zero.
fn isolated_at_origin(x: &PVec, opts: IsolationOptions) -> Result<IsolationOutcome, SingularError> {
    let n = x.nvars();
    if x.is_zero() {
        return Ok(IsolationOutcome::NotIsolated);
    }
    // A common polynomial factor is an exact witness of failure (degree >= 1
    // components always share zeros with any curve by Bezout when n == 3;
    // for general n a common factor gives a whole hypersurface of zeros).
    let g = polys_gcd(x.comps().iter());
    if !g.is_constant() {
        return Ok(IsolationOutcome::NotIsolated);
    }
    if n == 3 {
        return isolated_exact_p2(x).map(|ok| {
            if ok {
                IsolationOutcome::Isolated(CertMode::Exact)
            } else {
                IsolationOutcome::NotIsolated
            }
        });
    }
    // Probabilistic: random projective points over F_p; a surviving common
    // zero on a sampled line refutes isolation, silence supports it.
    let mut rng = crate::sample::rng(opts.seed);
    let reduced: Vec<_> = x
        .comps()
        .iter()
        .map(|c| finite::reduce_mod(c, opts.prime))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| SingularError::IsolationUnresolved)?;
    for _ in 0..opts.trials {
        let pt: Vec<u64> = (0..n)
            .map(|_| rand::Rng::gen_range(&mut rng, 0..opts.prime))
            .collect();
        if pt.iter().all(|&v| v == 0) {
            continue;
        }
        if reduced.iter().all(|c| c.eval(&pt) == 0) {
            return Ok(IsolationOutcome::NotIsolated);
        }
    }
    Ok(IsolationOutcome::Isolated(CertMode::Probabilistic))
}

/// Exact emptiness of the common projective zero set of three homogeneous
/// polynomials in three variables, by resultant elimination.
fn isolated_exact_p2(x: &PVec) -> Result<bool, SingularError> {
    let comps = x.comps();
    // Components identically zero leave a pencil of two curves, which always
    // meet in P^2.
    let nonzero: Vec<&Poly> = comps.iter().filter(|c| !c.is_zero()).collect();
    if nonzero.len() < 3 {
        return Ok(false);
    }
    // Try each elimination direction; any one that certifies emptiness is
    // enough, since a genuine common zero survives all of them.
    'directions: for elim in [2usize, 1, 0] {
        let (u, v) = match elim {
            2 => (0, 1),
            1 => (0, 2),
            _ => (1, 2),
        };
        // The point with only the eliminated coordinate nonzero projects
        // nowhere; test it directly.
        let mut axis = vec![BigRational::zero(); 3];
        axis[elim] = BigRational::one();
        if comps.iter().all(|c| c.eval(&axis).is_zero()) {
            return Ok(false);
        }
        let r01 = resultant(&comps[0], &comps[1], elim);
        let r02 = resultant(&comps[0], &comps[2], elim);
        let r12 = resultant(&comps[1], &comps[2], elim);
        if r01.is_zero() || r02.is_zero() || r12.is_zero() {
            // A vanishing pairwise resultant means that pair shares a factor
            // involving the eliminated variable; try another direction.
            continue 'directions;
        }
        let g = gcd_multivar(&gcd_multivar(&r01, &r02), &r12);
        if g.is_constant() {
            return Ok(true);
        }
        // Rational roots of the binary form g can be checked directly: a
        // confirmed common zero refutes isolation. When every root of g is
        // rational and all are spurious, emptiness is certified.
        match binary_form_rational_roots(&g, u, v) {
            Some(roots) => {
                for (a, b) in roots {
                    let mut base = vec![BigRational::zero(); 3];
                    base[u] = a;
                    base[v] = b;
                    if common_zero_above(comps, &base, elim) {
                        return Ok(false);
                    }
                }
                return Ok(true);
            }
            None => continue 'directions, // irrational candidates unresolved
        }
    }
    Err(SingularError::IsolationUnresolved)
}

/// Rational projective roots of a binary form in variables (u, v); `None`
/// when an irrational factor remains (roots not fully enumerable here).
fn binary_form_rational_roots(
    g: &Poly,
    u: usize,
    v: usize,
) -> Option<Vec<(BigRational, BigRational)>> {
    let mut roots = Vec::new();
    let mut rem = g.clone();
    // Factor out powers of u and v first.
    let xu = Poly::var(g.nvars(), u);
    let xv = Poly::var(g.nvars(), v);
    while let Some(q) = rem.try_div_exact(&xu) {
        if roots
            .iter()
            .all(|(a, _): &(BigRational, BigRational)| !a.is_zero())
        {
            roots.push((BigRational::zero(), BigRational::one()));
        }
        rem = q;
    }
    while let Some(q) = rem.try_div_exact(&xv) {
        if roots
            .iter()
            .all(|(_, b): &(BigRational, BigRational)| !b.is_zero())
        {
            roots.push((BigRational::one(), BigRational::zero()));
        }
        rem = q;
    }
    if rem.is_constant() {
        return Some(roots);
    }
    // Dehomogenize at v = 1: univariate in u.
    let du = rem.degree_in(u);
    let coeffs: Vec<BigRational> = (0..=du)
        .map(|k| {
            let mut exps = vec![0u32; g.nvars()];
            exps[u] = k;
            exps[v] = du - k;
            rem.coeff(&crate::poly::Mono::from_exps(&exps))
        })
        .collect();
    let mut cur = coeffs;
    loop {
        let deg = cur.len() - 1;
        if deg == 0 {
            return Some(roots);
        }
        let r = find_rational_root(&cur)?;
        if roots.iter().all(|(a, b)| !(a == &r && b.is_one())) {
            roots.push((r.clone(), BigRational::one()));
        }
        cur = deflate(&cur, &r);
    }
}

/// Do the three components share a zero on the line `base + t * e_elim`
/// (including t -> infinity is excluded; the axis point is checked by the
/// caller)?
fn common_zero_above(comps: &[Poly], base: &[BigRational], elim: usize) -> bool {
    // Substitute the two base coordinates, leaving univariate polys in the
    // eliminated variable; then a common zero is a common root.
    let n = 3usize;
    let subs: Vec<Poly> = (0..n)
        .map(|i| {
            if i == elim {
                Poly::var(1, 0)
            } else {
                Poly::constant(1, base[i].clone())
            }
        })
        .collect();
    let univ: Vec<Poly> = comps.iter().map(|c| c.compose(&subs)).collect();
    if univ.iter().all(|p| p.is_zero()) {
        return true;
    }
    let mut g: Option<Poly> = None;
    for p in &univ {
        if p.is_zero() {
            continue;
        }
        g = Some(match g {
            None => p.monic(),
            Some(acc) => gcd_multivar(&acc, p),
        });
    }
    !g.unwrap().is_constant()
}

/// Tangent-symmetry report for a candidate symmetry field Y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TangentSymmetry {
    /// i_Y a == 0
    pub contracts_form: bool,
    /// i_Y da == 0
    pub contracts_differential: bool,
    /// L_Y a == a
    pub lie_fixes_form: bool,
}

impl TangentSymmetry {
    /// Both contractions vanish (the full tangency condition).
    pub fn tangent(&self) -> bool {
        self.contracts_form && self.contracts_differential
    }
}

/// Exact contraction and Lie-derivative identities for a candidate
/// symmetry field.
pub fn verify_tangent_symmetry(a: &PForm, y: &PVec) -> TangentSymmetry {
    assert_eq!(a.nvars(), y.nvars(), "variable count mismatch");
    let ia = interior_product(y, a);
    let ida = interior_product(y, &a.exterior_derivative());
    let lie = lie_derivative(y, a);
    TangentSymmetry {
        contracts_form: ia.is_zero(),
        contracts_differential: ida.is_zero(),
        lie_fixes_form: lie == *a,
    }
}

/// Result of the quasi-homogeneity probe `[S, X] == lambda X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiHomogeneity {
    /// The scalar, when the bracket is exactly proportional to X.
    pub lambda: Option<BigRational>,
    /// `1 - tr(S)` when S is linear, for comparison with lambda.
    pub one_minus_trace: Option<BigRational>,
}

/// Solve `[S, X] == lambda X` for a rational lambda and verify globally.
pub fn quasi_homogeneity_check(s: &PVec, x: &PVec) -> QuasiHomogeneity {
    assert_eq!(s.nvars(), x.nvars(), "variable count mismatch");
    assert!(!x.is_zero(), "X must be nonzero");
    let bracket = lie_bracket(s, x);
    let lambda = proportionality_scalar(&bracket, x);
    let linear = s.comps().iter().all(|c| {
        matches!(
            c.homogeneous_degree(),
            Some(HomDegree::Degree(1)) | Some(HomDegree::Any)
        )
    });
    let one_minus_trace = linear.then(|| {
        let origin: Vec<BigRational> = vec![BigRational::zero(); s.nvars()];
        let m = s.jacobian_at(&origin);
        BigRational::one() - linalg::trace(&m)
    });
    QuasiHomogeneity {
        lambda,
        one_minus_trace,
    }
}

/// The scalar c with `b == c * x`, if one exists (x nonzero).
fn proportionality_scalar(b: &PVec, x: &PVec) -> Option<BigRational> {
    if b.is_zero() {
        return Some(BigRational::zero());
    }
    // take the leading term of the first nonzero component of x
    for i in 0..x.nvars() {
        let xi = x.comp(i);
        if xi.is_zero() {
            continue;
        }
        let (m, c) = xi.leading().unwrap();
        let bc = b.comp(i).coeff(m);
        let cand = bc / c;
        let scaled = x.scale(&cand);
        if scaled == *b {
            return Some(cand);
        }
        return None;
    }
    None
}

/// Are two normal types equal up to a hyperplane-reflection change of
/// coordinates? Literal equality of forms is impossible across witnesses
/// related by coordinate sign symmetries, and those transforms are
/// exactly the ambiguity a Taylor shift leaves behind; everything else
/// must match on the nose.
pub fn normal_types_equivalent(a: &PForm, b: &PForm) -> bool {
    if a.nvars() != b.nvars() || a.formdeg() != b.formdeg() {
        return false;
    }
    if a == b {
        return true;
    }
    let n = a.nvars();
    for pattern in 0u32..(1 << n) {
        if pattern == 0 {
            continue;
        }
        let comps: Vec<Poly> = (0..n)
            .map(|i| {
                let v = Poly::var(n, i);
                if pattern & (1 << i) != 0 {
                    -&v
                } else {
                    v
                }
            })
            .collect();
        if pullback(&comps, a) == *b {
            return true;
        }
    }
    false
}

/// Report from checking Kupka membership along a fiber.
#[derive(Clone, Debug)]
pub struct FiberKupkaReport {
    /// Points confirmed on the fiber and of Kupka type.
    pub kupka_points: usize,
    /// (index, reason) for rejected points.
    pub rejections: Vec<(usize, String)>,
    /// True when no points were supplied.
    pub vacuous: bool,
}

impl FiberKupkaReport {
    pub fn all_kupka(&self) -> bool {
        !self.vacuous && self.rejections.is_empty()
    }
}

/// Check that supplied fiber points are Kupka points of the form. Points on
/// the indeterminacy locus are rejected (the fiber statement excludes
/// them); fiber membership over `target` is verified first.
pub fn kupka_on_fiber_check(
    eta: &PForm,
    f: &RationalMap,
    target: &[BigRational],
    pts: &[Vec<BigRational>],
) -> FiberKupkaReport {
    let mut rejections = Vec::new();
    let mut kupka_points = 0usize;
    let deta = eta.exterior_derivative();
    for (i, p) in pts.iter().enumerate() {
        match f.is_indeterminacy_point(p) {
            Err(e) => {
                rejections.push((i, e.to_string()));
                continue;
            }
            Ok(true) => {
                rejections.push((i, "lies in the indeterminacy locus".into()));
                continue;
            }
            Ok(false) => {}
        }
        match f.fiber_membership(p, target) {
            Err(e) => {
                rejections.push((i, e.to_string()));
                continue;
            }
            Ok(false) => {
                rejections.push((i, "not on the fiber over the target point".into()));
                continue;
            }
            Ok(true) => {}
        }
        if !eta.vanishes_at(p) {
            rejections.push((i, "form does not vanish at the point".into()));
            continue;
        }
        if deta.vanishes_at(p) {
            rejections.push((i, "differential vanishes too (not Kupka)".into()));
            continue;
        }
        kupka_points += 1;
    }
    FiberKupkaReport {
        kupka_points,
        rejections,
        vacuous: pts.is_empty(),
    }
}

/// Affine plane `base + span(dirs)` given by a rational parametrization.
#[derive(Clone, Debug)]
pub struct PlaneSpec {
    pub base: Vec<BigRational>,
    pub dirs: Vec<Vec<BigRational>>,
}

/// Restrict the form to the plane (pull back along the affine
/// parametrization) and run the conic test there. The plane must have
/// dimension q+2 and contain p.
pub fn conic_plane_restriction(
    a: &PForm,
    plane: &PlaneSpec,
    p: &[BigRational],
    d: u32,
    opts: IsolationOptions,
) -> Result<Option<ConicRecord>, SingularError> {
    let n = a.nvars();
    let q = a.formdeg();
    let expected = q + 2;
    if plane.dirs.len() != expected {
        return Err(SingularError::PlaneDimension {
            expected,
            found: plane.dirs.len(),
        });
    }
    if plane.base.len() != n || plane.dirs.iter().any(|v| v.len() != n) {
        return Err(SingularError::WrongPointLength {
            expected: n,
            found: plane.base.len(),
        });
    }
    // Independence of directions.
    let dir_mat: Mat = (0..n)
        .map(|r| plane.dirs.iter().map(|v| v[r].clone()).collect())
        .collect();
    if linalg::rank_gauss(&dir_mat) != expected {
        return Err(SingularError::PlaneDegenerate);
    }
    // Solve base + dirs * s = p for the parameter point of p.
    let rhs: Vec<BigRational> = (0..n).map(|r| &p[r] - &plane.base[r]).collect();
    let s0 = linalg::solve(&dir_mat, &rhs).ok_or(SingularError::PlaneMissesPoint)?;
    // Parametrization components as degree-1 polynomials in s.
    let comps: Vec<Poly> = (0..n)
        .map(|r| {
            let mut acc = Poly::constant(expected, plane.base[r].clone());
            for (j, dir) in plane.dirs.iter().enumerate() {
                acc = &acc + &Poly::var(expected, j).scale(&dir[r]);
            }
            acc
        })
        .collect();
    let restricted = pullback(&comps, a);
    is_conic_ngk_at(&restricted, &s0, d, opts)
}

/// Extract the transversal-type linear part of a pull-back foliation form
/// at a regular fiber point: restrict the chart form to a hyperplane
/// transverse to the fiber, take the field dual to the restriction under
/// the plane volume, and return its linear part.
pub fn transversal_linear_part(
    eta: &PForm,
    f: &RationalMap,
    p: &[BigRational],
) -> Result<LinearPartInfo, SingularError> {
    let n1 = eta.nvars(); // n + 1 homogeneous variables
    if p.len() != n1 {
        return Err(SingularError::WrongPointLength {
            expected: n1,
            found: p.len(),
        });
    }
    // Chart with nonzero coordinate; normalize p there.
    let s = p
        .iter()
        .position(|v| !v.is_zero())
        .ok_or(SingularError::WrongPointLength {
            expected: n1,
            found: 0,
        })?;
    let scale = p[s].recip();
    let p_norm: Vec<BigRational> = p.iter().map(|v| v * &scale).collect();
    let chart_form = eta.chart_restrict(s);
    let p_aff: Vec<BigRational> = (0..n1)
        .filter(|&i| i != s)
        .map(|i| p_norm[i].clone())
        .collect();
    let n = n1 - 1;
    // Fiber tangent direction: v with df(p) v in span f(p), restricted to
    // the affine chart (v_s = 0).
    let jac = f.jacobian_at(&p_norm);
    let vals = f.eval(&p_norm);
    if vals.iter().all(|v| v.is_zero()) {
        return Err(SingularError::Map(MapError::Indeterminate));
    }
    // Solve [J | -f(p)] (v, t) = 0 with v_s = 0: build the matrix with
    // column s dropped.
    let rows = jac.len();
    let mut m: Mat = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<BigRational> = (0..n1)
            .filter(|&c| c != s)
            .map(|c| jac[r][c].clone())
            .collect();
        row.push(-vals[r].clone());
        m.push(row);
    }
    let kern = linalg::kernel_basis(&m);
    // Affine fiber tangent space at p: its dimension is n - m at a regular
    // point.
    let tangents: Vec<Vec<BigRational>> = kern
        .iter()
        .map(|v| v[..n].to_vec())
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect();
    let fiber_dim = f.source_dim() - f.target_dim();
    if tangents.len() != fiber_dim {
        return Err(SingularError::NotConic(format!(
            "expected a {fiber_dim}-dimensional fiber direction, found {}",
            tangents.len()
        )));
    }
    // Coordinate directions completing the tangent space to all of C^n:
    // the non-pivot columns of the tangent row space.
    let pivots = linalg::row_space_pivots(&tangents);
    let dirs: Vec<Vec<BigRational>> = (0..n)
        .filter(|j| !pivots.contains(j))
        .map(|j| {
            let mut e = vec![BigRational::zero(); n];
            e[j] = BigRational::one();
            e
        })
        .collect();
    let expected = n - fiber_dim;
    if dirs.len() != expected {
        return Err(SingularError::NotConic(
            "fiber tangents are degenerate".into(),
        ));
    }
    // Parametrize and restrict.
    let comps: Vec<Poly> = (0..n)
        .map(|r| {
            let mut acc = Poly::constant(expected, p_aff[r].clone());
            for (j, dir) in dirs.iter().enumerate() {
                acc = &acc + &Poly::var(expected, j).scale(&dir[r]);
            }
            acc
        })
        .collect();
    let restricted = pullback(&comps, &chart_form);
    // The restriction is a top-minus-one form on the plane; its dual field
    // cuts out the transversal foliation.
    let y = volume_contraction_preimage(&restricted);
    let origin: Vec<BigRational> = vec![BigRational::zero(); expected];
    if !y.vanishes_at(&origin) {
        return Err(SingularError::NotSingular);
    }
    Ok(LinearPartInfo::from_matrix(y.jacobian_at(&origin)))
}

// ---- singularity counting on the projective plane ---------------------------

/// Count, with multiplicity, the tangency points of a degree-d foliation on
/// the projective plane: the common zeros of the 2x2 minors of (X, R).
/// Equals d^2 + d + 1 whenever the scheme is zero-dimensional.
pub fn sing_count_p2(g: &crate::foliation::Foliation1D) -> Result<u64, SingularError> {
    assert_eq!(
        g.ambient_dim(),
        2,
        "counting requires a foliation on the projective plane"
    );
    for order in [
        [0usize, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 2, 1],
        [1, 0, 2],
        [2, 1, 0],
    ] {
        match sing_count_p2_with_order(g, order) {
            Ok(v) => return Ok(v),
            Err(SingularError::ChartDegeneracy) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SingularError::ChartDegeneracy)
}

/// Chart-ordered variant: counts all points in the chart of `order[0]`,
/// the fiber packet on the line at infinity in the chart of `order[1]`,
/// and the local multiplicity at the remaining coordinate point.
pub fn sing_count_p2_with_order(
    g: &crate::foliation::Foliation1D,
    order: [usize; 3],
) -> Result<u64, SingularError> {
    let n = 3usize;
    let x = g.field();
    let var = |i: usize| Poly::var(n, i);
    let minor = |i: usize, j: usize| &(&var(i) * x.comp(j)) - &(&var(j) * x.comp(i));
    // minors m_ij = x_i X_j - x_j X_i for i < j
    let m01 = minor(0, 1);
    let m02 = minor(0, 2);
    let m12 = minor(1, 2);
    if m01.is_zero() && m02.is_zero() && m12.is_zero() {
        return Err(SingularError::PositiveDimensional);
    }
    let g3 = gcd_multivar(&gcd_multivar(&m01, &m02), &m12);
    if !g3.is_constant() {
        return Err(SingularError::PositiveDimensional);
    }
    let minor_of = |i: usize, j: usize| -> Poly {
        if i < j {
            minor(i, j)
        } else {
            -&minor(j, i)
        }
    };
    let [c0, c1, c2] = order;
    // In the chart x_{c} = 1, the pair of minors involving x_c generates
    // the singular scheme there.
    let chart_pair = |c: usize| -> (Poly, Poly) {
        let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        (minor_of(c, others[0]), minor_of(c, others[1]))
    };

    // Full count in chart c0.
    let (a0, b0) = chart_pair(c0);
    let count0 = chart_total_count(&a0, &b0, c0)?;

    // Packet over the line x_{c0} = 0 inside chart c1.
    let (a1, b1) = chart_pair(c1);
    let count1 = chart_fiber_packet(&a1, &b1, c1, c0)?;

    // Local multiplicity at the coordinate point e_{c2}.
    let (a2, b2) = chart_pair(c2);
    let count2 = coordinate_point_multiplicity(&a2, &b2, c2)?;

    Ok(count0 + count1 + count2)
}

/// Dehomogenize at `chart` = 1, renumbering remaining variables to (0, 1).
fn dehomogenize(p: &Poly, chart: usize) -> Poly {
    let n = 3usize;
    let mut k = 0usize;
    let subs: Vec<Poly> = (0..n)
        .map(|i| {
            if i == chart {
                Poly::one(2)
            } else {
                let v = Poly::var(2, k);
                k += 1;
                v
            }
        })
        .collect();
    p.compose(&subs)
}

/// Total affine intersection count (with multiplicity) of a coprime curve
/// pair in a chart, via a sheared resultant degree.
fn chart_total_count(a: &Poly, b: &Poly, chart: usize) -> Result<u64, SingularError> {
    let aa = dehomogenize(a, chart);
    let bb = dehomogenize(b, chart);
    if aa.is_zero() || bb.is_zero() {
        return Err(SingularError::ChartDegeneracy);
    }
    if !gcd_multivar(&aa, &bb).is_constant() {
        return Err(SingularError::ChartDegeneracy);
    }
    if aa.is_constant() || bb.is_constant() {
        return Ok(0);
    }
    // Shear u -> u + lambda v until both top forms have nonzero pure-v
    // coefficient; then deg_u Res_v equals the affine count.
    let da = aa.max_total_degree().unwrap();
    let db = bb.max_total_degree().unwrap();
    'shear: for lambda in 0..=((da + db + 2) as i64) {
        let l = BigRational::from_integer(lambda.into());
        let subs = vec![
            &Poly::var(2, 0) + &Poly::var(2, 1).scale(&l),
            Poly::var(2, 1),
        ];
        let sa = aa.compose(&subs);
        let sb = bb.compose(&subs);
        let top_ok = |p: &Poly, d: u32| -> bool {
            let mut exps = vec![0u32; 2];
            exps[1] = d;
            !p.coeff(&crate::poly::Mono::from_exps(&exps)).is_zero()
        };
        if !top_ok(&sa, da) || !top_ok(&sb, db) {
            continue 'shear;
        }
        let r = resultant(&sa, &sb, 1);
        if r.is_zero() {
            continue 'shear;
        }
        return Ok(r.max_total_degree().unwrap_or(0) as u64);
    }
    Err(SingularError::ChartDegeneracy)
}

/// Multiplicity packet over the line `x_{line} = 0` inside the chart
/// `x_chart = 1`: the order of vanishing of the projection resultant at the
/// line coordinate 0.
fn chart_fiber_packet(a: &Poly, b: &Poly, chart: usize, line: usize) -> Result<u64, SingularError> {
    let aa = dehomogenize(a, chart);
    let bb = dehomogenize(b, chart);
    if aa.is_zero() || bb.is_zero() {
        return Err(SingularError::ChartDegeneracy);
    }
    if !gcd_multivar(&aa, &bb).is_constant() {
        return Err(SingularError::ChartDegeneracy);
    }
    // Which renumbered variable is the line coordinate?
    let others: Vec<usize> = (0..3).filter(|&i| i != chart).collect();
    let fiber_var = others
        .iter()
        .position(|&i| i == line)
        .expect("line in chart");
    let other_var = 1 - fiber_var;
    // The multiplicity formula needs the leading v-coefficient of one of
    // the generators not to vanish at the fiber: order the pair so it
    // holds.
    let candidates = [(&aa, &bb), (&bb, &aa)];
    for (first, second) in candidates {
        let df = first.degree_in(other_var);
        if df == 0 {
            // first is univariate in the fiber variable; the packet
            // formula needs a genuine projection, so try the other role.
            continue;
        }
        let lead = elimination::coeffs_in(first, other_var)
            .last()
            .cloned()
            .unwrap();
        // Evaluate the leading coefficient at fiber coordinate 0.
        let mut pt = vec![BigRational::zero(); 2];
        pt[other_var] = BigRational::zero(); // unused by lead (free of other_var)
        pt[fiber_var] = BigRational::zero();
        if lead.eval(&pt).is_zero() {
            continue;
        }
        let r = resultant(first, second, other_var);
        if r.is_zero() {
            return Err(SingularError::ChartDegeneracy);
        }
        // Order of vanishing of r in the fiber variable at 0.
        let ord = r.terms().map(|(m, _)| m.exp(fiber_var)).min().unwrap_or(0);
        return Ok(ord as u64);
    }
    Err(SingularError::ChartDegeneracy)
}

/// Local multiplicity of the scheme at the coordinate point of the chart.
fn coordinate_point_multiplicity(a: &Poly, b: &Poly, chart: usize) -> Result<u64, SingularError> {
    let aa = dehomogenize(a, chart);
    let bb = dehomogenize(b, chart);
    if aa.is_zero() || bb.is_zero() {
        return Err(SingularError::ChartDegeneracy);
    }
    match local_intersection_multiplicity(&aa, &bb) {
        Ok(v) => Ok(v as u64),
        Err(elimination::EliminationError::NotIsolated) => Err(SingularError::PositiveDimensional),
    }
}

// ---- point reports -----------------------------------------------------------

/// Full point-level analysis record.
#[derive(Clone, Debug)]
pub struct PointReport {
    pub point: Vec<BigRational>,
    pub is_singular: bool,
    pub is_kupka: bool,
    pub rot_linear_part: Option<LinearPartInfo>,
    pub is_nilpotent_rot: Option<bool>,
    pub conic_ngk: Option<ConicRecord>,
    pub notes: Vec<String>,
}

/// Options accepted by `analyze_point`.
#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    /// Expected conic degree to test for.
    pub conic_degree: Option<u32>,
    /// Optional plane for the restricted conic test.
    pub plane: Option<PlaneSpec>,
    pub isolation: Option<IsolationOptions>,
}

/// Run the point battery: singular/Kupka flags, rotational linear part and
/// nilpotency (for forms of degree N-2), and the conic test when a degree
/// is supplied.
pub fn analyze_point(
    a: &PForm,
    p: &[BigRational],
    opts: &AnalyzeOptions,
) -> Result<PointReport, SingularError> {
    if p.len() != a.nvars() {
        return Err(SingularError::WrongPointLength {
            expected: a.nvars(),
            found: p.len(),
        });
    }
    let mut notes = Vec::new();
    let is_singular = singular_at(a, p);
    let is_kupka = is_singular && kupka_at(a, p);
    let rotational_applies = a.formdeg() + 2 == a.nvars();
    let rot_linear_part = if rotational_applies {
        Some(rotational_linear_part(a, p)?)
    } else {
        notes.push("rotational analysis skipped: form degree is not N-2".into());
        None
    };
    let is_nilpotent_rot = rot_linear_part.as_ref().map(|info| info.is_nilpotent());
    let isolation = opts.isolation.unwrap_or_default();
    let conic_ngk = match opts.conic_degree {
        None => None,
        Some(d) => {
            if let Some(plane) = &opts.plane {
                let rec = conic_plane_restriction(a, plane, p, d, isolation)?;
                if rec.is_some() {
                    notes.push("conic record from plane restriction".into());
                }
                rec
            } else if rotational_applies {
                is_conic_ngk_at(a, p, d, isolation)?
            } else {
                notes.push("conic test needs form degree N-2 or a plane spec".into());
                None
            }
        }
    };
    if conic_ngk.is_some() && !is_singular {
        notes.push("inconsistent flags: conic record at a nonsingular point".into());
    }
    Ok(PointReport {
        point: p.to_vec(),
        is_singular,
        is_kupka,
        rot_linear_part,
        is_nilpotent_rot,
        conic_ngk,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::Foliation1D;
    use crate::poly::{int, rat};

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn pt(vals: &[i64]) -> Vec<BigRational> {
        vals.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn kupka_model_point() {
        // eta = y1 dy2 - y2 dy1 in N=3: singular at 0, d eta = 2 dy1^dy2 != 0
        let n = 3;
        let eta = PForm::from_comps(n, 1, vec![(vec![2], x(n, 1)), (vec![1], -&x(n, 2))]);
        assert!(singular_at(&eta, &pt(&[0, 0, 0])));
        assert!(kupka_at(&eta, &pt(&[0, 0, 0])));
    }

    #[test]
    fn quadratic_coefficients_are_not_kupka_at_origin() {
        let n = 3;
        let eta = PForm::from_comps(
            n,
            1,
            vec![
                (vec![0], &x(n, 1) * &x(n, 2)),
                (vec![1], -&(&x(n, 0) * &x(n, 2))),
            ],
        );
        assert!(singular_at(&eta, &pt(&[0, 0, 0])));
        assert!(
            !kupka_at(&eta, &pt(&[0, 0, 0])),
            "differential has linear coefficients, vanishes at 0"
        );
    }

    #[test]
    fn nonsingular_point_flags_false() {
        let n = 3;
        let eta = PForm::from_comps(n, 1, vec![(vec![2], x(n, 1)), (vec![1], -&x(n, 2))]);
        let p = pt(&[0, 1, 2]);
        assert!(!singular_at(&eta, &p));
        assert!(!kupka_at(&eta, &p));
    }

    #[test]
    fn rotational_linear_part_of_homogeneous_form_is_zero_at_origin() {
        // coefficients of degree d+1 >= 2: rotational has degree >= 2,
        // so the linear part at 0 vanishes (hence nilpotent)
        let mut rng = crate::sample::rng(181);
        for _ in 0..5 {
            let field = crate::sample::homogeneous_pvec(&mut rng, 3, 2, 2);
            let Ok(g) = Foliation1D::new(2, 2, field) else {
                continue;
            };
            let info = rotational_linear_part(&g.omega(), &pt(&[0, 0, 0])).unwrap();
            assert!(info.matrix.iter().flatten().all(|v| v.is_zero()));
            assert!(info.is_nilpotent());
        }
    }

    #[test]
    fn rotational_linear_part_matches_hand_contraction() {
        // eta = (x^2+yz) dx + (xy+z^2) dy + (z^2+x^2) dz. By hand:
        // d eta = (y-z) dx^dy + (2x-y) dx^dz - 2z dy^dz, so
        // Z = (-2z, y-2x, y-z) and the Jacobian is constant:
        let n = 3;
        let eta = PForm::from_comps(
            n,
            1,
            vec![
                (vec![0], &(&x(n, 0) * &x(n, 0)) + &(&x(n, 1) * &x(n, 2))),
                (vec![1], &(&x(n, 0) * &x(n, 1)) + &(&x(n, 2) * &x(n, 2))),
                (vec![2], &(&x(n, 2) * &x(n, 2)) + &(&x(n, 0) * &x(n, 0))),
            ],
        );
        let info = rotational_linear_part(&eta, &pt(&[1, 1, 1])).unwrap();
        let expect: Mat = vec![
            vec![int(0), int(0), int(-2)],
            vec![int(-2), int(1), int(0)],
            vec![int(0), int(1), int(-1)],
        ];
        assert_eq!(info.matrix, expect);
        assert!(info.trace.is_zero(), "rotationals are divergence-free");
    }

    #[test]
    fn rotational_linear_part_of_radial_pair_form() {
        // a = x dy - y dx in N=3 at 0: Z = 2 d/dz, linear part zero
        let n = 3;
        let a = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        let info = rotational_linear_part(&a, &pt(&[0, 0, 0])).unwrap();
        assert!(info.matrix.iter().flatten().all(|v| v.is_zero()));
    }

    #[test]
    fn classify_diagonal_and_rotation_blocks() {
        // [[1,0],[0,2]]: nondegenerate, Kupka type, not hyperbolic
        let a = LinearPartInfo::from_matrix(vec![vec![int(1), int(0)], vec![int(0), int(2)]]);
        let ca = classify_singularity_1d(&a);
        assert!(ca.nondegenerate && ca.kupka_type);
        assert_eq!(ca.hyperbolic, Verdict::No);
        assert_eq!(ca.mode, CertMode::Exact);

        // [[1,-1],[1,1]]: eigenvalues 1 +- i, hyperbolic and Kupka
        let b = LinearPartInfo::from_matrix(vec![vec![int(1), int(-1)], vec![int(1), int(1)]]);
        let cb = classify_singularity_1d(&b);
        assert!(cb.nondegenerate && cb.kupka_type);
        assert_eq!(cb.hyperbolic, Verdict::Yes);
        assert_eq!(cb.mode, CertMode::Exact);

        // [[1,0],[0,-1]]: trace 0, not Kupka type; ratio -1 real
        let c = LinearPartInfo::from_matrix(vec![vec![int(1), int(0)], vec![int(0), int(-1)]]);
        let cc = classify_singularity_1d(&c);
        assert!(cc.nondegenerate && !cc.kupka_type);
        assert_eq!(cc.hyperbolic, Verdict::No);
    }

    #[test]
    fn pure_rotation_block_is_not_hyperbolic() {
        // eigenvalues +-i: ratio -1 is real
        let m = LinearPartInfo::from_matrix(vec![vec![int(0), int(-1)], vec![int(1), int(0)]]);
        assert_eq!(classify_singularity_1d(&m).hyperbolic, Verdict::No);
    }

    #[test]
    fn linear_part_trace_and_det_match_charpoly() {
        let mut rng = crate::sample::rng(211);
        for _ in 0..10 {
            let m: Mat = (0..3)
                .map(|_| (0..3).map(|_| crate::sample::rational(&mut rng)).collect())
                .collect();
            let info = LinearPartInfo::from_matrix(m);
            let n = info.matrix.len();
            assert_eq!(
                info.charpoly[n - 1],
                -info.trace.clone(),
                "t^(n-1) coefficient is -trace"
            );
            let sign_det = if n % 2 == 0 {
                info.determinant.clone()
            } else {
                -info.determinant.clone()
            };
            assert_eq!(
                info.charpoly[0], sign_det,
                "constant coefficient is (-1)^n det"
            );
        }
    }

    #[test]
    fn tangency_counts_match_the_scheme_length_on_random_fields() {
        // Whenever the tangency scheme is zero-dimensional its length is
        // d^2 + d + 1, independent of the field; any successful count must
        // hit that value.
        let mut rng = crate::sample::rng(227);
        let mut counted = 0;
        for _ in 0..24 {
            let d = [1u32, 2, 3][rand::Rng::gen_range(&mut rng, 0..3)];
            let field = crate::sample::homogeneous_pvec(&mut rng, 3, d, 2);
            let Ok(g) = Foliation1D::new(2, d, field) else {
                continue;
            };
            match sing_count_p2(&g) {
                Ok(v) => {
                    assert_eq!(
                        v,
                        (d * d + d + 1) as u64,
                        "degree {d} field {:?}",
                        g.field()
                    );
                    counted += 1;
                }
                Err(SingularError::PositiveDimensional) | Err(SingularError::ChartDegeneracy) => {}
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
        assert!(
            counted >= 10,
            "only {counted} random fields produced a count"
        );
    }

    #[test]
    fn tangency_count_handles_fat_points_at_coordinate_points() {
        // X = (x0 + x1, x1, 2 x2): the scheme is a double point at [1:0:0]
        // plus a simple point at [0:0:1]; total 3 = 1^2 + 1 + 1.
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 0) + &x(n, 1),
            x(n, 1).clone(),
            x(n, 2).scale(&int(2)),
        ]);
        let g = Foliation1D::new(2, 1, field).unwrap();
        assert_eq!(sing_count_p2(&g), Ok(3));
        for order in [[0usize, 1, 2], [2, 1, 0], [1, 0, 2]] {
            if let Ok(v) = sing_count_p2_with_order(&g, order) {
                assert_eq!(v, 3, "order {order:?}");
            }
        }
    }

    #[test]
    fn positive_dimensional_scheme_is_reported() {
        // X = (x0^2, x0 x1, 0): not a radial multiple, yet the minors share
        // the factor x0 x2, so the tangency scheme contains a curve.
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 0) * &x(n, 0),
            &x(n, 0) * &x(n, 1),
            Poly::zero(n),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        assert_eq!(sing_count_p2(&g), Err(SingularError::PositiveDimensional));
    }

    #[test]
    fn conic_detection_on_homogeneous_representative() {
        // A degree-2 foliation representative on 3 variables with isolated
        // rotational: conic of degree 2 at the origin, normal type itself.
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega = g.omega();
        let rec = is_conic_ngk_at(&omega, &pt(&[0, 0, 0]), 2, IsolationOptions::default())
            .unwrap()
            .expect("conic record expected");
        assert_eq!(rec.degree, 2);
        assert_eq!(rec.mode, CertMode::Exact);
        assert_eq!(
            rec.normal_type, omega,
            "homogeneous input is its own normal type"
        );
    }

    #[test]
    fn conic_detection_is_shift_equivariant() {
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega = g.omega();
        let center = pt(&[1, 1, 1]);
        let minus: Vec<BigRational> = center.iter().map(|v| -v.clone()).collect();
        let translated = omega.taylor_shift(&minus, None);
        let rec = is_conic_ngk_at(&translated, &center, 2, IsolationOptions::default())
            .unwrap()
            .expect("translated conic detected at the translated point");
        assert_eq!(
            rec.normal_type, omega,
            "shift back recovers the original normal type"
        );
    }

    #[test]
    fn nonzero_low_jet_rejects_conic() {
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        // add a degree-2-coefficient radial-closed piece: spoils the d-jet
        let low = Foliation1D::new(
            2,
            1,
            PVec::new(vec![x(n, 1).clone(), x(n, 2).clone(), x(n, 0).clone()]),
        )
        .unwrap();
        let spoiled = g.omega().add(&low.omega());
        assert!(
            is_conic_ngk_at(&spoiled, &pt(&[0, 0, 0]), 2, IsolationOptions::default())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn higher_order_terms_do_not_change_normal_type() {
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega = g.omega();
        let high = Foliation1D::new(
            2,
            4,
            PVec::new(vec![
                &(&x(n, 1) * &x(n, 1)) * &(&x(n, 1) * &x(n, 1)),
                &(&x(n, 2) * &x(n, 2)) * &(&x(n, 2) * &x(n, 2)),
                &(&x(n, 0) * &x(n, 0)) * &(&x(n, 0) * &x(n, 0)),
            ]),
        )
        .unwrap();
        let fat = omega.add(&high.omega());
        let rec = is_conic_ngk_at(&fat, &pt(&[0, 0, 0]), 2, IsolationOptions::default())
            .unwrap()
            .expect("jet conditions ignore higher order");
        assert_eq!(rec.normal_type, omega);
    }

    #[test]
    fn tangent_symmetry_for_scaled_radial() {
        // a homogeneous with i_R a = 0, coefficients degree k, form degree q:
        // L_{R/(k+q)} a == a
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega = g.omega(); // k = 3, q = 1
        let rho = rat(1, 4);
        let sym = verify_tangent_symmetry(&omega, &PVec::radial(n).scale(&rho));
        assert!(sym.contracts_form, "i_R omega = 0");
        assert!(
            !sym.contracts_differential,
            "i_R d omega = (k+q) omega != 0"
        );
        assert!(
            sym.lie_fixes_form,
            "scaled radial Lie derivative fixes omega"
        );
    }

    #[test]
    fn tangent_symmetry_for_product_direction() {
        // form independent of y_2 with no dy_2 component: d/dy_2 contracts
        // to zero on both the form and its differential
        let n = 3;
        let a = PForm::from_comps(n, 1, vec![(vec![0], x(n, 1)), (vec![1], x(n, 0))]);
        let sym = verify_tangent_symmetry(&a, &PVec::basis(n, 2));
        assert!(sym.tangent());
    }

    #[test]
    fn tangent_symmetry_for_the_rotational_itself() {
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega = g.omega();
        let sym = verify_tangent_symmetry(&omega, g.field());
        assert!(sym.contracts_form, "i_X i_R i_X dV = 0");
    }

    #[test]
    fn quasi_homogeneity_radial_euler() {
        let mut rng = crate::sample::rng(191);
        for &d in &[1u32, 2, 3] {
            let xf = crate::sample::homogeneous_pvec(&mut rng, 3, d, 2);
            let q = quasi_homogeneity_check(&PVec::radial(3), &xf);
            assert_eq!(q.lambda, Some(int(d as i64 - 1)), "[R, X] = (d-1) X");
            assert_eq!(q.one_minus_trace, Some(int(1 - 3)));
        }
    }

    #[test]
    fn quasi_homogeneity_weighted_example() {
        // S = diag(1,2)/4, X = x0^2 d/dx1: [S,X] = 0 (weighted degree 0)
        let n = 2;
        let s = PVec::new(vec![x(n, 0).scale(&rat(1, 4)), x(n, 1).scale(&rat(2, 4))]);
        let xf = PVec::new(vec![Poly::zero(n), &x(n, 0) * &x(n, 0)]);
        let q = quasi_homogeneity_check(&s, &xf);
        assert_eq!(q.lambda, Some(int(0)));
        assert_eq!(q.one_minus_trace, Some(rat(1, 4)));

        // X = x1 d/dx0: weighted degree 1/4
        let xg = PVec::new(vec![x(n, 1).clone(), Poly::zero(n)]);
        let qg = quasi_homogeneity_check(&s, &xg);
        assert_eq!(qg.lambda, Some(rat(1, 4)));
    }

    #[test]
    fn quasi_homogeneity_absent_when_not_proportional() {
        let n = 2;
        let s = PVec::new(vec![x(n, 1).clone(), Poly::zero(n)]);
        let xf = PVec::new(vec![x(n, 0).clone(), &x(n, 1) * &x(n, 1)]);
        let q = quasi_homogeneity_check(&s, &xf);
        assert_eq!(q.lambda, None);
    }

    #[test]
    fn sing_count_diagonal_linear_field() {
        // d=1, X = (1x0, 2x1, 3x2): three simple singular points
        let n = 3;
        let field = PVec::new(vec![
            x(n, 0).clone(),
            x(n, 1).scale(&int(2)),
            x(n, 2).scale(&int(3)),
        ]);
        let g = Foliation1D::new(2, 1, field).unwrap();
        assert_eq!(sing_count_p2(&g), Ok(3));
    }

    #[test]
    fn sing_count_is_chart_order_independent() {
        let n = 3;
        let field = PVec::new(vec![
            x(n, 0).clone(),
            x(n, 1).scale(&int(2)),
            x(n, 2).scale(&int(3)),
        ]);
        let diag = Foliation1D::new(2, 1, field).unwrap();
        for g in [diag, crate::gallery::plane_foliation_d2()] {
            let mut results = Vec::new();
            for order in [[0usize, 1, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                if let Ok(v) = sing_count_p2_with_order(&g, order) {
                    results.push(v);
                }
            }
            assert!(!results.is_empty());
            assert!(
                results.iter().all(|&v| v == results[0]),
                "orders gave {results:?}"
            );
        }
    }

    #[test]
    fn sing_count_rejects_radial_multiple_upstream() {
        // X = R is rejected at construction; a positive-dimensional scheme
        // via a shared minor factor is reported by the counter.
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 0) * &x(n, 0),
            &(&x(n, 0) * &x(n, 1)) + &(&x(n, 1) * &x(n, 1)),
            Poly::zero(n),
        ]);
        // The counter must terminate with a count or the
        // positive-dimensional error, never panic.
        if let Ok(g) = Foliation1D::new(2, 2, field) {
            let _ = sing_count_p2(&g);
        }
    }

    #[test]
    fn analyze_point_report_consistency() {
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega = g.omega();
        let rep = analyze_point(
            &omega,
            &pt(&[0, 0, 0]),
            &AnalyzeOptions {
                conic_degree: Some(2),
                plane: None,
                isolation: None,
            },
        )
        .unwrap();
        assert!(rep.is_singular);
        assert!(
            !rep.is_kupka,
            "conic points are not Kupka: the differential vanishes too"
        );
        assert_eq!(rep.is_nilpotent_rot, Some(true));
        assert!(rep.conic_ngk.is_some());
        // kupka implies singular on every report
        assert!(!rep.is_kupka || rep.is_singular);
    }

    #[test]
    fn conic_plane_restriction_product_case() {
        // Form depending only on the first 3 coordinates of C^4, with a
        // conic singularity there; restriction to the coordinate 3-plane
        // y3 = 0 detects it.
        let n3 = 3;
        let field = PVec::new(vec![
            &x(n3, 1) * &x(n3, 1),
            &x(n3, 2) * &x(n3, 2),
            &x(n3, 0) * &x(n3, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        let omega3 = g.omega();
        // Lift to 4 variables (no dy3 usage, coefficients free of y3).
        let n4 = 4;
        let lifted = PForm::from_comps(
            n4,
            1,
            omega3
                .components()
                .into_iter()
                .map(|(idx, p)| (idx, p.extend_vars(n4)))
                .collect(),
        );
        let plane = PlaneSpec {
            base: pt(&[0, 0, 0, 0]),
            dirs: vec![pt(&[1, 0, 0, 0]), pt(&[0, 1, 0, 0]), pt(&[0, 0, 1, 0])],
        };
        let rec = conic_plane_restriction(
            &lifted,
            &plane,
            &pt(&[0, 0, 0, 0]),
            2,
            IsolationOptions::default(),
        )
        .unwrap()
        .expect("product case detected");
        assert_eq!(rec.degree, 2);

        // Sheared plane: directions mixed with the trivial factor.
        let sheared = PlaneSpec {
            base: pt(&[0, 0, 0, 0]),
            dirs: vec![pt(&[1, 0, 0, 1]), pt(&[0, 1, 0, 0]), pt(&[0, 0, 1, 0])],
        };
        let rec2 = conic_plane_restriction(
            &lifted,
            &sheared,
            &pt(&[0, 0, 0, 0]),
            2,
            IsolationOptions::default(),
        )
        .unwrap();
        assert!(
            rec2.is_some(),
            "tilted transversal still sees the conic restriction"
        );

        // Plane missing the point errors.
        let missing = PlaneSpec {
            base: pt(&[0, 0, 0, 1]),
            dirs: vec![pt(&[1, 0, 0, 0]), pt(&[0, 1, 0, 0]), pt(&[0, 0, 1, 0])],
        };
        assert_eq!(
            conic_plane_restriction(
                &lifted,
                &missing,
                &pt(&[0, 0, 0, 0]),
                2,
                IsolationOptions::default()
            )
            .unwrap_err(),
            SingularError::PlaneMissesPoint
        );
    }
}
