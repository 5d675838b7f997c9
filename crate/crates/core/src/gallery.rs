//! Fixed worked objects shared by the verification suites and the
//! integration tests: the binomial maps P^3 --> P^2 and a small family of
//! plane foliations with prescribed behavior at coordinate points.

use num_rational::BigRational;

use crate::foliation::Foliation1D;
use crate::poly::{int, Poly};
use crate::ratmap::RationalMap;
use crate::PVec;

/// The degree-nu binomial map
/// `(x1^nu - x0^nu, x2^nu - x0^nu, x3^nu - x0^nu): P^3 --> P^2`.
pub fn binomial_map(nu: u32) -> RationalMap {
    let n = 4;
    let p = |i: usize| {
        let mut e = vec![0u32; n];
        e[i] = nu;
        Poly::from_terms(n, &[(&e, int(1))])
    };
    let comps = vec![&p(1) - &p(0), &p(2) - &p(0), &p(3) - &p(0)];
    RationalMap::new(3, 2, nu, comps).expect("binomial map is valid")
}

/// The identity map on P^3 (degree 1).
pub fn identity_map_p3() -> RationalMap {
    let n = 4;
    RationalMap::new(3, 3, 1, (0..n).map(|i| Poly::var(n, i)).collect()).expect("identity is valid")
}

/// Diagonal linear foliation on P^2 with pairwise distinct eigenvalues:
/// three simple singular points at the coordinate points.
pub fn diagonal_foliation() -> Foliation1D {
    let n = 3;
    let field = PVec::new(vec![
        Poly::var(n, 0),
        Poly::var(n, 1).scale(&int(2)),
        Poly::var(n, 2).scale(&int(3)),
    ]);
    Foliation1D::new(2, 1, field).expect("diagonal field is valid")
}

/// Degree-2 plane foliation used throughout the verification batteries.
///
/// Built so that [0:0:1] is a singular point whose chart linear part is
/// exactly [[1,-1],[1,1]] (hyperbolic, nonzero trace), the tangency count
/// is the expected 7, and the rotational of its homogeneous representative
/// has an isolated singularity at the origin.
pub fn plane_foliation_d2() -> Foliation1D {
    let n = 3;
    let z = |i: usize| Poly::var(n, i);
    let x0 = &(&z(0) * &z(2)) - &(&z(1) * &z(2));
    let x0 = &x0 + &(&z(1) * &z(1));
    let x1 = &(&z(0) * &z(2)) + &(&z(1) * &z(2));
    let x1 = &x1 + &(&z(0) * &z(0));
    let x2 = &(&z(0) * &z(0)) + &(&z(1) * &z(1));
    Foliation1D::new(2, 2, PVec::new(vec![x0, x1, x2])).expect("degree-2 field is valid")
}

/// Degree-3 plane foliation (cyclic cubes) for the degree-formula battery.
pub fn plane_foliation_d3() -> Foliation1D {
    let n = 3;
    let cube = |i: usize| {
        let mut e = vec![0u32; n];
        e[i] = 3;
        Poly::from_terms(n, &[(&e, int(1))])
    };
    Foliation1D::new(2, 3, PVec::new(vec![cube(1), cube(2), cube(0)]))
        .expect("degree-3 field is valid")
}

/// Plane foliation of the given degree (1, 2 or 3).
pub fn plane_foliation(d: u32) -> Foliation1D {
    match d {
        1 => diagonal_foliation(),
        2 => plane_foliation_d2(),
        3 => plane_foliation_d3(),
        _ => panic!("no fixed plane foliation of degree {d}"),
    }
}

/// The singular point of `plane_foliation_d2` with hyperbolic transversal
/// data, as a projective point.
pub fn hyperbolic_singularity() -> Vec<BigRational> {
    vec![int(0), int(0), int(1)]
}

/// Kupka fiber witnesses over `hyperbolic_singularity` for the quadric
/// binomial map: [1:1:1:t].
pub fn kupka_fiber_points() -> Vec<Vec<BigRational>> {
    [int(2), int(3), crate::poly::rat(1, 2)]
        .into_iter()
        .map(|t| vec![int(1), int(1), int(1), t])
        .collect()
}
