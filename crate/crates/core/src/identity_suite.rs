//! The structural identity battery for foliation forms, in exact and
//! probabilistic flavors.
//!
//! Exact mode expands every polynomial identity and compares with zero.
//! Probabilistic mode reduces the form modulo a word prime once, then
//! evaluates each identity at random points, exploiting that evaluation
//! commutes with the alternating algebra; it is one-sided (a reported
//! failure is certain, a reported pass has error probability bounded by
//! Schwartz-Zippel).

use num_rational::BigRational;
use rand::Rng;

use crate::exterior::{interior_multi, PForm, PVec};
use crate::finite::{AltScalar, FiniteError, ModForm};
use crate::foliation;
use crate::poly::HomDegree;

/// One named identity outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

/// Exact battery: radial annihilation, the Euler contraction relation, and
/// the full decomposability/integrability identity set.
pub fn run_exact(a: &PForm) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    out.push(IdentityCheck {
        name: "radial".into(),
        holds: foliation::radial_check(a),
    });
    out.push(IdentityCheck {
        name: "euler".into(),
        holds: foliation::euler_relation_check(a).unwrap_or(false),
    });
    let tuples = crate::sample::all_tuples(a.nvars(), a.formdeg().saturating_sub(1));
    let da = a.exterior_derivative();
    for j in &tuples {
        let contracted = interior_multi(j, a);
        out.push(IdentityCheck {
            name: format!("pluecker{j:?}"),
            holds: contracted.wedge(a).is_zero(),
        });
        out.push(IdentityCheck {
            name: format!("frobenius{j:?}"),
            holds: contracted.wedge(&da).is_zero(),
        });
    }
    out
}

/// Probabilistic battery at the given prime and trial count; same identity
/// names and order as `run_exact`.
pub fn run_probabilistic<R: Rng>(
    a: &PForm,
    prime: u64,
    trials: u32,
    rng: &mut R,
) -> Result<Vec<IdentityCheck>, FiniteError> {
    let n = a.nvars();
    let q = a.formdeg();
    let ma = ModForm::reduce(a, prime)?;
    let mda = ma.exterior_derivative();
    // Euler factor k + q (exact integer data, not sampled).
    let euler_factor = match a.coefficient_degree() {
        Some(HomDegree::Degree(k)) => Some((k as u64 + q as u64) % prime),
        Some(HomDegree::Any) => Some(0),
        None => None,
    };
    let tuples = crate::sample::all_tuples(n, q.saturating_sub(1));
    let mut radial_ok = true;
    let mut euler_ok = euler_factor.is_some();
    let mut pluecker_ok = vec![true; tuples.len()];
    let mut frobenius_ok = vec![true; tuples.len()];
    for _ in 0..trials {
        let pt: Vec<u64> = (0..n).map(|_| rng.gen_range(0..prime)).collect();
        let va = ma.eval(&pt);
        let vda = mda.eval(&pt);
        // radial: i_R a at the point; the radial field evaluates to the
        // point itself
        if radial_ok && !va.interior(&pt).is_zero() {
            radial_ok = false;
        }
        if let Some(factor) = euler_factor {
            if euler_ok && !vda.interior(&pt).sub(&va.scale(factor)).is_zero() {
                euler_ok = false;
            }
        }
        for (t, j) in tuples.iter().enumerate() {
            let contracted = interior_multi_scalar(j, &va, prime);
            if pluecker_ok[t] && !contracted.wedge(&va).is_zero() {
                pluecker_ok[t] = false;
            }
            if frobenius_ok[t] && !contracted.wedge(&vda).is_zero() {
                frobenius_ok[t] = false;
            }
        }
    }
    let mut out = Vec::new();
    out.push(IdentityCheck {
        name: "radial".into(),
        holds: radial_ok,
    });
    out.push(IdentityCheck {
        name: "euler".into(),
        holds: euler_ok,
    });
    for (t, j) in tuples.iter().enumerate() {
        out.push(IdentityCheck {
            name: format!("pluecker{j:?}"),
            holds: pluecker_ok[t],
        });
        out.push(IdentityCheck {
            name: format!("frobenius{j:?}"),
            holds: frobenius_ok[t],
        });
    }
    Ok(out)
}

fn interior_multi_scalar(idx: &[usize], a: &AltScalar, prime: u64) -> AltScalar {
    let mut acc = a.clone();
    let n = a.nvars();
    for &j in idx.iter().rev() {
        let mut e = vec![0u64; n];
        e[j] = 1 % prime;
        acc = acc.interior(&e);
    }
    acc
}

/// The scaled radial symmetry identity `L_{R/(k+q)} a == a` checked
/// exactly; vacuous (true) for zero forms.
pub fn scaled_radial_identity(a: &PForm) -> bool {
    let factor = match a.coefficient_degree() {
        Some(HomDegree::Degree(k)) => k as i64 + a.formdeg() as i64,
        Some(HomDegree::Any) => return true,
        None => return false,
    };
    if factor == 0 {
        return false;
    }
    let rho = BigRational::new(1.into(), factor.into());
    let y = PVec::radial(a.nvars()).scale(&rho);
    crate::singular::verify_tangent_symmetry(a, &y).lie_fixes_form
}

/// Convenience: do all checks in a battery hold?
pub fn all_hold(checks: &[IdentityCheck]) -> bool {
    checks.iter().all(|c| c.holds)
}

/// Exact/probabilistic agreement: same names, same outcomes.
pub fn outcomes_agree(a: &[IdentityCheck], b: &[IdentityCheck]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.name == y.name && x.holds == y.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::poly::Poly;

    #[test]
    fn exact_battery_passes_on_worked_pullback() {
        let f = gallery::binomial_map(2);
        let g = gallery::plane_foliation_d2();
        let out = foliation::pullback_foliation(&f, &g).unwrap();
        let checks = run_exact(out.foliation.eta());
        assert!(
            all_hold(&checks),
            "failures: {:?}",
            checks.iter().filter(|c| !c.holds).collect::<Vec<_>>()
        );
    }

    #[test]
    fn probabilistic_agrees_with_exact_on_pass_and_fail() {
        let f = gallery::binomial_map(2);
        let g = gallery::plane_foliation_d2();
        let eta = foliation::pullback_foliation(&f, &g)
            .unwrap()
            .foliation
            .eta()
            .clone();
        let exact = run_exact(&eta);
        let mut rng = crate::sample::rng(7);
        let prob = run_probabilistic(&eta, crate::finite::DEFAULT_PRIME, 2, &mut rng).unwrap();
        assert!(outcomes_agree(&exact, &prob));

        // designed non-example: dx0^dx1 + dx2^dx3 fails the Pluecker set
        let n = 4;
        let bad = PForm::from_comps(
            n,
            2,
            vec![(vec![0, 1], Poly::one(n)), (vec![2, 3], Poly::one(n))],
        );
        let exact_bad = run_exact(&bad);
        assert!(!all_hold(&exact_bad));
        let mut rng = crate::sample::rng(8);
        let prob_bad = run_probabilistic(&bad, crate::finite::DEFAULT_PRIME, 2, &mut rng).unwrap();
        assert!(outcomes_agree(&exact_bad, &prob_bad));
    }

    #[test]
    fn scaled_radial_identity_on_omegas() {
        for d in [1, 2, 3] {
            let omega = gallery::plane_foliation(d).omega();
            assert!(scaled_radial_identity(&omega), "degree {d}");
        }
    }
}
