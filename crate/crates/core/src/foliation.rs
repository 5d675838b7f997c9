//! Foliation objects in homogeneous coordinates.
//!
//! A one-dimensional foliation on P^m is carried by a homogeneous vector
//! field X of degree d on m+1 variables; its q-form representative is
//! `Omega = i_R i_X dV`. Codimension-q foliations on P^n are carried by
//! q-forms with homogeneous coefficients annihilated by the radial field.
//! Pull-backs divide out any common coefficient factor and record its
//! degree.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{interior_multi, interior_product, pullback, volume, PForm, PVec};
use crate::gcd::polys_gcd_fast;
use crate::linalg;
use crate::poly::{HomDegree, Poly};
use crate::ratmap::RationalMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FoliationError {
    #[error("vector field must live on {expected} variables, found {found}")]
    WrongVariableCount { expected: usize, found: usize },
    #[error("component {index} is not homogeneous of degree {degree}")]
    InhomogeneousComponent { index: usize, degree: u32 },
    #[error("the field is a polynomial multiple of the radial field and defines no foliation")]
    RadialMultiple,
    #[error("the form has inhomogeneous coefficients")]
    InhomogeneousCoefficients,
    #[error("the form is not annihilated by the radial field")]
    NotRadial,
    #[error("the form fails the integrability identities")]
    NotIntegrable,
    #[error("the pull-back form vanishes identically; the pair is degenerate")]
    DegeneratePair,
    #[error("map target dimension {map_m} does not match the foliation ambient dimension {fol_m}")]
    ArityMismatch { map_m: usize, fol_m: usize },
    #[error("the form vanishes at the point; kernel is undefined there")]
    SingularPoint,
}

/// One-dimensional foliation of degree d on P^m, in homogeneous form.
#[derive(Clone, Debug)]
pub struct Foliation1D {
    ambient: usize,
    degree: u32,
    field: PVec,
}

impl Foliation1D {
    /// Validates homogeneity of degree `degree` and that the field is not a
    /// polynomial multiple of the radial field.
    pub fn new(ambient: usize, degree: u32, field: PVec) -> Result<Self, FoliationError> {
        let n = ambient + 1;
        if field.nvars() != n {
            return Err(FoliationError::WrongVariableCount {
                expected: n,
                found: field.nvars(),
            });
        }
        for (i, comp) in field.comps().iter().enumerate() {
            match comp.homogeneous_degree() {
                Some(HomDegree::Any) => {}
                Some(HomDegree::Degree(d)) if d == degree => {}
                _ => return Err(FoliationError::InhomogeneousComponent { index: i, degree }),
            }
        }
        // X is a polynomial multiple of R exactly when all minors
        // x_i X_j - x_j X_i vanish.
        let radial_multiple = (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let m = &(&Poly::var(n, i) * field.comp(j)) - &(&Poly::var(n, j) * field.comp(i));
                m.is_zero()
            })
        });
        if radial_multiple {
            return Err(FoliationError::RadialMultiple);
        }
        Ok(Foliation1D {
            ambient,
            degree,
            field,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn field(&self) -> &PVec {
        &self.field
    }

    /// The homogeneous representative `Omega = i_R i_X dV`; coefficients are
    /// homogeneous of degree d+1 and both contractions vanish on it.
    pub fn omega(&self) -> PForm {
        let n = self.ambient + 1;
        let dv = volume(n);
        interior_product(&PVec::radial(n), &interior_product(&self.field, &dv))
    }

    /// Two foliations agree projectively exactly when their homogeneous
    /// representatives agree (X and X + h R give the same form).
    pub fn same_foliation(&self, other: &Foliation1D) -> bool {
        self.ambient == other.ambient && self.omega() == other.omega()
    }

    /// The affine vector field cutting out the foliation in the chart
    /// `x_c = 1` (variables renumbered in order, chart coordinate dropped):
    /// `Y_j = X_j|chart - y_j * X_c|chart`.
    pub fn chart_field(&self, c: usize) -> PVec {
        let n1 = self.ambient + 1;
        assert!(c < n1, "chart index out of range");
        let n = self.ambient;
        let mut k = 0usize;
        let subs: Vec<Poly> = (0..n1)
            .map(|i| {
                if i == c {
                    Poly::one(n)
                } else {
                    let v = Poly::var(n, k);
                    k += 1;
                    v
                }
            })
            .collect();
        let xc = self.field.comp(c).compose(&subs);
        let mut comps = Vec::with_capacity(n);
        let mut j = 0usize;
        for i in 0..n1 {
            if i == c {
                continue;
            }
            let xi = self.field.comp(i).compose(&subs);
            comps.push(&xi - &(&Poly::var(n, j) * &xc));
            j += 1;
        }
        PVec::new(comps)
    }
}

/// Codimension-q foliation of degree theta on P^n, in homogeneous form.
#[derive(Clone, Debug)]
pub struct FoliationQ {
    ambient: usize,
    codim: usize,
    degree: u32,
    eta: PForm,
}

impl FoliationQ {
    /// Validates the radial and homogeneity structure. Integrability is a
    /// separate polynomial-identity battery (`is_integrable`), run by
    /// callers that need the certificate.
    pub fn new(ambient: usize, codim: usize, eta: PForm) -> Result<Self, FoliationError> {
        let n = ambient + 1;
        if eta.nvars() != n || eta.formdeg() != codim {
            return Err(FoliationError::WrongVariableCount {
                expected: n,
                found: eta.nvars(),
            });
        }
        let degree = match eta.coefficient_degree() {
            None => return Err(FoliationError::InhomogeneousCoefficients),
            Some(HomDegree::Any) => return Err(FoliationError::DegeneratePair),
            Some(HomDegree::Degree(d)) if d >= 1 => d - 1,
            Some(HomDegree::Degree(_)) => return Err(FoliationError::InhomogeneousCoefficients),
        };
        if !radial_check(&eta) {
            return Err(FoliationError::NotRadial);
        }
        Ok(FoliationQ {
            ambient,
            codim,
            degree,
            eta,
        })
    }

    /// Full validation including the integrability battery.
    pub fn new_validated(ambient: usize, codim: usize, eta: PForm) -> Result<Self, FoliationError> {
        let f = FoliationQ::new(ambient, codim, eta)?;
        if !is_integrable(&f.eta) {
            return Err(FoliationError::NotIntegrable);
        }
        Ok(f)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// The foliation degree: common coefficient degree minus one.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eta(&self) -> &PForm {
        &self.eta
    }
}

/// Common coefficient degree minus one; errors on inhomogeneous input.
pub fn degree_of(eta: &PForm) -> Result<u32, FoliationError> {
    match eta.coefficient_degree() {
        None => Err(FoliationError::InhomogeneousCoefficients),
        Some(HomDegree::Any) => Err(FoliationError::DegeneratePair),
        Some(HomDegree::Degree(0)) => Err(FoliationError::InhomogeneousCoefficients),
        Some(HomDegree::Degree(d)) => Ok(d - 1),
    }
}

/// Does the radial contraction vanish identically?
pub fn radial_check(a: &PForm) -> bool {
    if a.formdeg() == 0 {
        return true;
    }
    interior_product(&PVec::radial(a.nvars()), a).is_zero()
}

/// For homogeneous coefficients of degree k and form degree q:
/// `i_R(da) == (k+q) a` exactly.
pub fn euler_relation_check(a: &PForm) -> Result<bool, FoliationError> {
    let k = match a.coefficient_degree() {
        None => return Err(FoliationError::InhomogeneousCoefficients),
        Some(HomDegree::Any) => return Ok(true),
        Some(HomDegree::Degree(k)) => k,
    };
    let factor = BigRational::from_integer((k as i64 + a.formdeg() as i64).into());
    let lhs = interior_product(&PVec::radial(a.nvars()), &a.exterior_derivative());
    Ok(lhs == a.scale(&factor))
}

/// The polynomial identities whose joint vanishing is the decomposability
/// (Pluecker) half of the integrability test.
pub fn decomposability_identities(a: &PForm) -> Vec<PForm> {
    if a.formdeg() == 0 {
        return Vec::new();
    }
    let tuples = crate::sample::all_tuples(a.nvars(), a.formdeg() - 1);
    tuples
        .iter()
        .map(|j| interior_multi(j, a).wedge(a))
        .collect()
}

/// The additional Frobenius identities `(i_J a) ^ da`.
pub fn frobenius_identities(a: &PForm) -> Vec<PForm> {
    if a.formdeg() == 0 {
        return Vec::new();
    }
    let da = a.exterior_derivative();
    let tuples = crate::sample::all_tuples(a.nvars(), a.formdeg() - 1);
    tuples
        .iter()
        .map(|j| interior_multi(j, a).wedge(&da))
        .collect()
}

/// Pointwise-decomposability as an exact polynomial identity battery:
/// `(i_J a) ^ a == 0` for every constant basis (q-1)-multivector J.
pub fn is_decomposable_everywhere(a: &PForm) -> bool {
    decomposability_identities(a).iter().all(|f| f.is_zero())
}

/// Decomposability plus the Frobenius identities `(i_J a) ^ da == 0`.
pub fn is_integrable(a: &PForm) -> bool {
    is_decomposable_everywhere(a) && frobenius_identities(a).iter().all(|f| f.is_zero())
}

/// Exact basis of `{v : i_v a(p) == 0}` at a point where the form does not
/// vanish. At decomposable nonzero points the dimension is N - q.
pub fn kernel_at(a: &PForm, p: &[BigRational]) -> Result<Vec<Vec<BigRational>>, FoliationError> {
    if a.vanishes_at(p) {
        return Err(FoliationError::SingularPoint);
    }
    let n = a.nvars();
    let q = a.formdeg();
    // Rows: (q-1)-tuples K; columns: contraction direction j.
    // (i_v a)(p)_K = sum_j v_j * sign * a(p)_{sort(j,K)}.
    let vals: std::collections::BTreeMap<Vec<usize>, BigRational> = a.eval(p).into_iter().collect();
    let tuples = crate::sample::all_tuples(n, q - 1);
    let mut rows = Vec::new();
    for k in &tuples {
        let mut row = vec![BigRational::zero(); n];
        for (j, slot) in row.iter_mut().enumerate() {
            if k.contains(&j) {
                continue;
            }
            let mut full: Vec<usize> = k.clone();
            full.push(j);
            full.sort_unstable();
            let below = k.iter().filter(|&&t| t < j).count();
            if let Some(v) = vals.get(&full) {
                *slot = if below % 2 == 0 {
                    v.clone()
                } else {
                    -v.clone()
                };
            }
        }
        rows.push(row);
    }
    Ok(linalg::kernel_basis(&rows))
}

/// Result of a pull-back construction.
#[derive(Clone, Debug)]
pub struct PullbackOutcome {
    pub foliation: FoliationQ,
    /// Degree of the common coefficient factor divided out (0 for generic
    /// pairs).
    pub removed_factor_degree: u32,
    /// The generic-pair degree prediction `(d+m) nu - m`.
    pub predicted_degree: u32,
}

/// Pull back a one-dimensional foliation along a rational map
/// `P^n -> P^m`. Any common polynomial factor of the resulting
/// coefficients is divided out and its degree recorded.
pub fn pullback_foliation(
    f: &RationalMap,
    g: &Foliation1D,
) -> Result<PullbackOutcome, FoliationError> {
    if f.target_dim() != g.ambient_dim() {
        return Err(FoliationError::ArityMismatch {
            map_m: f.target_dim(),
            fol_m: g.ambient_dim(),
        });
    }
    let omega = g.omega();
    let eta_raw = pullback(f.comps(), &omega);
    if eta_raw.is_zero() {
        return Err(FoliationError::DegeneratePair);
    }
    let common = polys_gcd_fast(eta_raw.coeffs(), crate::sample::DEFAULT_SEED);
    let (eta, removed) = if common.is_constant() {
        (eta_raw, 0u32)
    } else {
        let deg = common.max_total_degree().unwrap_or(0);
        (
            eta_raw.map_coeffs(|p| p.try_div_exact(&common).expect("gcd divides")),
            deg,
        )
    };
    let codim = eta.formdeg();
    let foliation = FoliationQ::new(f.source_dim(), codim, eta)?;
    let m = f.target_dim() as u32;
    let predicted = (g.degree() + m) * f.degree() - m;
    Ok(PullbackOutcome {
        foliation,
        removed_factor_degree: removed,
        predicted_degree: predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    /// Brute-force `i_R i_X dV` straight from the alternating-sum
    /// definition of contraction, as an independent oracle.
    fn omega_brute(field: &PVec) -> PForm {
        let n = field.nvars();
        let dv = volume(n);
        // i_X dV first, slot convention: first slot.
        let ix = brute_contract(field, &dv);
        brute_contract(&PVec::radial(n), &ix)
    }

    fn brute_contract(v: &PVec, a: &PForm) -> PForm {
        let n = a.nvars();
        let q = a.formdeg();
        let mut out = PForm::zero(n, q - 1);
        for k in crate::sample::all_tuples(n, q - 1) {
            // (i_v a)(e_K) = sum_j v_j a(e_j, e_K), expanding a by full
            // antisymmetry from its sorted components.
            let mut c = Poly::zero(n);
            for j in 0..n {
                let mut idx = vec![j];
                idx.extend_from_slice(&k);
                if let Some((sign, sorted)) = sort_signed(&idx) {
                    let comp = a.comp(&sorted);
                    let term = v.comp(j) * &comp;
                    c = if sign < 0 { &c - &term } else { &c + &term };
                }
            }
            out = out.add(&PForm::term(n, &k, c));
        }
        out
    }

    fn sort_signed(idx: &[usize]) -> Option<(i32, Vec<usize>)> {
        let mut v = idx.to_vec();
        let mut sign = 1i32;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, v))
    }

    #[test]
    fn omega_for_constant_field_on_p2() {
        // m=2, X = d/dx2 (degree 0): Omega = x0 dx1 - x1 dx0 up to sign
        let n = 3;
        let g = Foliation1D::new(2, 0, PVec::basis(n, 2)).unwrap();
        let omega = g.omega();
        let expect = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        assert!(omega == expect || omega == expect.neg(), "got {omega}");
    }

    #[test]
    fn omega_kills_both_contractions() {
        let mut rng = crate::sample::rng(163);
        for &(m, d) in &[(2usize, 1u32), (2, 2), (3, 1), (3, 2)] {
            let n = m + 1;
            let field = crate::sample::homogeneous_pvec(&mut rng, n, d, 3);
            let Ok(g) = Foliation1D::new(m, d, field) else {
                continue;
            };
            let omega = g.omega();
            let r = PVec::radial(n);
            assert!(interior_product(&r, &omega).is_zero(), "i_R Omega == 0");
            assert!(
                interior_product(g.field(), &omega).is_zero(),
                "i_X Omega == 0"
            );
        }
    }

    #[test]
    fn omega_matches_brute_force_expansion() {
        let mut rng = crate::sample::rng(167);
        for _ in 0..5 {
            let field = crate::sample::homogeneous_pvec(&mut rng, 4, 2, 3);
            let Ok(g) = Foliation1D::new(3, 2, field) else {
                continue;
            };
            assert_eq!(g.omega(), omega_brute(g.field()));
        }
    }

    #[test]
    fn omega_coefficient_degree() {
        // m=2, d=2: coefficients degree 3, foliation degree 2
        let n = 3;
        let field = PVec::new(vec![
            &x(n, 1) * &x(n, 1),
            &x(n, 2) * &x(n, 2),
            &x(n, 0) * &x(n, 0),
        ]);
        let g = Foliation1D::new(2, 2, field).unwrap();
        assert_eq!(degree_of(&g.omega()), Ok(2));
    }

    #[test]
    fn degree_zero_foliation() {
        let n = 3;
        let g = Foliation1D::new(2, 0, PVec::basis(n, 2)).unwrap();
        assert_eq!(degree_of(&g.omega()), Ok(0));
    }

    #[test]
    fn radial_multiple_is_rejected() {
        let n = 3;
        let r = PVec::radial(n);
        assert_eq!(
            Foliation1D::new(2, 1, r).unwrap_err(),
            FoliationError::RadialMultiple
        );
        // h * R for h = x0 also rejected
        let hr = PVec::radial(n).scale_poly(&x(n, 0));
        assert_eq!(
            Foliation1D::new(2, 2, hr).unwrap_err(),
            FoliationError::RadialMultiple
        );
    }

    #[test]
    fn euler_relation_on_small_example() {
        // eta = x0 dx1 - x1 dx0 (N=2, k=1, q=1): i_R d eta = 2 eta
        let n = 2;
        let eta = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        assert!(radial_check(&eta));
        assert_eq!(euler_relation_check(&eta), Ok(true));
    }

    #[test]
    fn radial_check_designed_failure() {
        let n = 2;
        let a = PForm::term(n, &[0], x(n, 0));
        assert!(!radial_check(&a), "i_R(x0 dx0) = x0^2 != 0");
    }

    #[test]
    fn standard_nondecomposable_two_form() {
        // dx0^dx1 + dx2^dx3 in N=4: a ^ a != 0
        let n = 4;
        let a = PForm::from_comps(
            n,
            2,
            vec![(vec![0, 1], Poly::one(n)), (vec![2, 3], Poly::one(n))],
        );
        assert!(!is_decomposable_everywhere(&a));
        assert!(!is_integrable(&a));
    }

    #[test]
    fn constant_decomposable_form_is_integrable() {
        let n = 4;
        let a = PForm::term(n, &[0, 1], Poly::one(n));
        assert!(is_decomposable_everywhere(&a));
        assert!(is_integrable(&a));
    }

    #[test]
    fn omega_is_integrable() {
        let mut rng = crate::sample::rng(173);
        for _ in 0..3 {
            let field = crate::sample::homogeneous_pvec(&mut rng, 3, 2, 2);
            let Ok(g) = Foliation1D::new(2, 2, field) else {
                continue;
            };
            assert!(is_integrable(&g.omega()), "span(R, X) is involutive");
        }
        // and on P^3 (2-forms)
        for _ in 0..2 {
            let field = crate::sample::homogeneous_pvec(&mut rng, 4, 1, 2);
            let Ok(g) = Foliation1D::new(3, 1, field) else {
                continue;
            };
            assert!(is_integrable(&g.omega()));
        }
    }

    #[test]
    fn kernel_of_constant_two_form() {
        let n = 4;
        let a = PForm::term(n, &[0, 1], Poly::one(n));
        let pt = vec![int(1), int(2), int(3), int(4)];
        let basis = kernel_at(&a, &pt).unwrap();
        assert_eq!(basis.len(), 2, "kernel of dx0^dx1 is span(e2, e3)");
        assert!(linalg::in_span(&basis, &[int(0), int(0), int(1), int(0)]));
        assert!(linalg::in_span(&basis, &[int(0), int(0), int(0), int(1)]));
    }

    #[test]
    fn kernel_of_radial_omega_contains_radial_direction() {
        let n = 2;
        let a = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        let pt = vec![int(1), int(0)];
        let basis = kernel_at(&a, &pt).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(
            linalg::in_span(&basis, &[int(1), int(0)]),
            "kernel is the radial direction e0"
        );
    }

    #[test]
    fn kernel_errors_at_singular_point() {
        let n = 2;
        let a = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        assert_eq!(
            kernel_at(&a, &[int(0), int(0)]).unwrap_err(),
            FoliationError::SingularPoint
        );
    }

    #[test]
    fn pullback_along_identity_recovers_omega() {
        let f = crate::gallery::identity_map_p3();
        let n = 4;
        let cube = |i: usize| {
            let p = x(n, i);
            &(&p * &p) * &p
        };
        let g =
            Foliation1D::new(3, 3, PVec::new(vec![cube(1), cube(2), cube(3), cube(0)])).unwrap();
        let out = pullback_foliation(&f, &g).unwrap();
        assert_eq!(out.foliation.eta(), &g.omega());
        assert_eq!(
            out.foliation.degree(),
            3,
            "identity pull-back keeps the degree"
        );
        assert_eq!(out.removed_factor_degree, 0);
    }

    #[test]
    fn pullback_arity_mismatch_is_an_error() {
        let f = crate::gallery::binomial_map(2); // target P^2
        let n = 4;
        let g = Foliation1D::new(
            3,
            1,
            PVec::new(vec![
                x(n, 1).clone(),
                x(n, 2).clone(),
                x(n, 3).clone(),
                x(n, 0).clone(),
            ]),
        )
        .unwrap(); // lives on P^3, not the map target
        assert!(matches!(
            pullback_foliation(&f, &g).unwrap_err(),
            FoliationError::ArityMismatch { .. }
        ));
    }

    /// Independent route to the pull-back: expand `i_R i_X dV` from first
    /// principles into its coefficient sum and substitute. For the term
    /// pairing `x_k P_i` against the increasing wedge that omits indices
    /// i and k, contracting X first and R second gives the sign
    /// (-1)^(i+k) for k < i and (-1)^(i+k+1) for k > i.
    fn displayed_sum(f: &crate::ratmap::RationalMap, g: &Foliation1D) -> PForm {
        let m = g.ambient_dim();
        let src = f.source_dim() + 1;
        let dfs: Vec<PForm> = f
            .comps()
            .iter()
            .map(|p| PForm::scalar(p.clone()).exterior_derivative())
            .collect();
        let mut acc = PForm::zero(src, m - 1);
        for i in 0..=m {
            for k in 0..=m {
                if i == k {
                    continue;
                }
                let pi_sub = g.field().comp(i).compose(f.comps());
                let coeff = &f.comps()[k] * &pi_sub;
                let mut wedge = PForm::scalar(coeff);
                for j in 0..=m {
                    if j != i && j != k {
                        wedge = wedge.wedge(&dfs[j]);
                    }
                }
                let exponent = if k < i { i + k } else { i + k + 1 };
                acc = if exponent % 2 == 1 {
                    acc.sub(&wedge)
                } else {
                    acc.add(&wedge)
                };
            }
        }
        acc
    }

    #[test]
    fn pullback_matches_displayed_sum_expansion() {
        let f = crate::gallery::binomial_map(2);
        let g = crate::gallery::plane_foliation_d2();
        let direct = pullback(f.comps(), &g.omega());
        let expansion = displayed_sum(&f, &g);
        assert_eq!(
            expansion, direct,
            "independent coefficient expansion agrees termwise"
        );
        // Coefficients of the raw pull-back are homogeneous of degree
        // (d+m) nu - m + 1 = 7 here.
        assert_eq!(
            direct.coefficient_degree(),
            Some(crate::poly::HomDegree::Degree(7))
        );
    }

    #[test]
    fn pullback_kernel_contains_radial_direction() {
        let f = crate::gallery::binomial_map(2);
        let g = crate::gallery::plane_foliation_d2();
        let eta = pullback_foliation(&f, &g).unwrap().foliation.eta().clone();
        let p = vec![int(1), int(2), int(3), int(5)];
        assert!(!eta.vanishes_at(&p), "generic point is regular");
        let basis = kernel_at(&eta, &p).unwrap();
        assert!(
            linalg::in_span(&basis, &p),
            "radial direction R(p) = p lies in the kernel"
        );
    }
}
