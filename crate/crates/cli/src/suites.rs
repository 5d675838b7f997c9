//! Built-in verification batteries over the fixed worked objects.

use foliage_core::exterior::PForm;
use foliage_core::foliation::{degree_of, pullback_foliation};
use foliage_core::identity_suite;
use foliage_core::poly::Poly;
use foliage_core::ratmap::indeterminacy_witness_check;
use foliage_core::singular::{
    classify_singularity_1d, kupka_on_fiber_check, sing_count_p2, transversal_linear_part, Verdict,
};
use foliage_core::{gallery, sample};

use crate::report::{timed, Assertion, Mode, Outcome, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteMode {
    Exact,
    Probabilistic { prime: u64, trials: u32 },
}

pub const SUITE_NAMES: &[&str] = &["identities", "degrees", "kupka", "counts", "all"];

pub fn run_suite(name: &str, mode: SuiteMode, seed: u64) -> Result<Report, String> {
    let mut report = Report::new(seed);
    match name {
        "identities" => identities(&mut report, mode, seed),
        "degrees" => degrees(&mut report),
        "kupka" => kupka(&mut report),
        "counts" => counts(&mut report),
        "all" => {
            identities(&mut report, mode, seed);
            degrees(&mut report);
            kupka(&mut report);
            counts(&mut report);
        }
        other => {
            return Err(format!(
                "unknown suite '{other}' (expected one of {SUITE_NAMES:?})"
            ))
        }
    }
    report.finalize();
    Ok(report)
}

fn battery_assertion(name: String, a: &PForm, mode: SuiteMode, seed: u64) -> Assertion {
    timed(|| match mode {
        SuiteMode::Exact => {
            let checks = identity_suite::run_exact(a);
            let failed: Vec<&str> = checks
                .iter()
                .filter(|c| !c.holds)
                .map(|c| c.name.as_str())
                .collect();
            if failed.is_empty() {
                Assertion::new(name, Outcome::Pass, Mode::Exact)
            } else {
                Assertion::new(name, Outcome::Fail, Mode::Exact)
                    .with_detail(format!("failing identities: {failed:?}"))
            }
        }
        SuiteMode::Probabilistic { prime, trials } => {
            let mut rng = sample::rng(seed);
            match identity_suite::run_probabilistic(a, prime, trials, &mut rng) {
                Err(e) => Assertion::new(name, Outcome::Inconclusive, Mode::Probabilistic)
                    .with_detail(e.to_string()),
                Ok(checks) => {
                    let failed: Vec<&str> = checks
                        .iter()
                        .filter(|c| !c.holds)
                        .map(|c| c.name.as_str())
                        .collect();
                    if failed.is_empty() {
                        Assertion::new(name, Outcome::Pass, Mode::Probabilistic)
                    } else {
                        Assertion::new(name, Outcome::Fail, Mode::Probabilistic)
                            .with_detail(format!("failing identities: {failed:?}"))
                    }
                }
            }
        }
    })
}

fn identities(report: &mut Report, mode: SuiteMode, seed: u64) {
    for d in [1u32, 2, 3] {
        let omega = gallery::plane_foliation(d).omega();
        report.push(battery_assertion(
            format!("identities/omega-d{d}"),
            &omega,
            mode,
            seed,
        ));
        report.push(timed(|| {
            if identity_suite::scaled_radial_identity(&omega) {
                Assertion::new(
                    format!("identities/unit-lie-omega-d{d}"),
                    Outcome::Pass,
                    Mode::Exact,
                )
            } else {
                Assertion::new(
                    format!("identities/unit-lie-omega-d{d}"),
                    Outcome::Fail,
                    Mode::Exact,
                )
            }
        }));
    }
    for (nu, d) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3)] {
        let f = gallery::binomial_map(nu);
        let g = gallery::plane_foliation(d);
        let eta = match pullback_foliation(&f, &g) {
            Ok(out) => out.foliation.eta().clone(),
            Err(e) => {
                report.push(
                    Assertion::new(
                        format!("identities/pullback-nu{nu}-d{d}"),
                        Outcome::Fail,
                        Mode::Exact,
                    )
                    .with_detail(e.to_string()),
                );
                continue;
            }
        };
        report.push(battery_assertion(
            format!("identities/pullback-nu{nu}-d{d}"),
            &eta,
            mode,
            seed,
        ));
        report.push(timed(|| {
            if identity_suite::scaled_radial_identity(&eta) {
                Assertion::new(
                    format!("identities/unit-lie-pullback-nu{nu}-d{d}"),
                    Outcome::Pass,
                    Mode::Exact,
                )
            } else {
                Assertion::new(
                    format!("identities/unit-lie-pullback-nu{nu}-d{d}"),
                    Outcome::Fail,
                    Mode::Exact,
                )
            }
        }));
    }
    // Designed non-example must fail the Pluecker half.
    report.push(timed(|| {
        let n = 4;
        let bad = PForm::from_comps(
            n,
            2,
            vec![(vec![0, 1], Poly::one(n)), (vec![2, 3], Poly::one(n))],
        );
        if foliage_core::foliation::is_decomposable_everywhere(&bad) {
            Assertion::new(
                "identities/non-example-rejected",
                Outcome::Fail,
                Mode::Exact,
            )
            .with_detail("dx0^dx1 + dx2^dx3 wrongly passed decomposability")
        } else {
            Assertion::new(
                "identities/non-example-rejected",
                Outcome::Pass,
                Mode::Exact,
            )
        }
    }));
}

fn degrees(report: &mut Report) {
    for (nu, d) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3)] {
        report.push(timed(|| {
            let name = format!("degrees/nu{nu}-d{d}");
            let f = gallery::binomial_map(nu);
            let g = gallery::plane_foliation(d);
            match pullback_foliation(&f, &g) {
                Err(e) => {
                    Assertion::new(name, Outcome::Fail, Mode::Exact).with_detail(e.to_string())
                }
                Ok(out) => {
                    let want = (d + 2) * nu - 2;
                    let got = out.foliation.degree();
                    if got == want && out.removed_factor_degree == 0 {
                        Assertion::new(name, Outcome::Pass, Mode::Exact)
                    } else {
                        Assertion::new(name, Outcome::Fail, Mode::Exact).with_detail(format!(
                            "theta {got} vs predicted {want}, removed factor degree {}",
                            out.removed_factor_degree
                        ))
                    }
                }
            }
        }));
    }
    report.push(timed(|| {
        // identity map: theta == d
        let name = "degrees/identity-map";
        let f = gallery::identity_map_p3();
        let g = {
            let n = 4;
            let cube = |i: usize| {
                let p = Poly::var(n, i);
                &(&p * &p) * &p
            };
            foliage_core::foliation::Foliation1D::new(
                3,
                3,
                foliage_core::PVec::new(vec![cube(1), cube(2), cube(3), cube(0)]),
            )
            .expect("valid")
        };
        match pullback_foliation(&f, &g) {
            Err(e) => Assertion::new(name, Outcome::Fail, Mode::Exact).with_detail(e.to_string()),
            Ok(out) => {
                let omega = g.omega();
                if out.foliation.eta() == &omega && out.foliation.degree() == 3 {
                    Assertion::new(name, Outcome::Pass, Mode::Exact)
                } else {
                    Assertion::new(name, Outcome::Fail, Mode::Exact)
                        .with_detail(format!("degree {}", out.foliation.degree()))
                }
            }
        }
    }));
    report.push(timed(|| {
        let name = "degrees/omega-degree-bookkeeping";
        let omega = gallery::plane_foliation_d2().omega();
        match degree_of(&omega) {
            Ok(2) => Assertion::new(name, Outcome::Pass, Mode::Exact),
            other => {
                Assertion::new(name, Outcome::Fail, Mode::Exact).with_detail(format!("{other:?}"))
            }
        }
    }));
}

fn kupka(report: &mut Report) {
    let f = gallery::binomial_map(2);
    let g = gallery::plane_foliation_d2();
    let target = gallery::hyperbolic_singularity();
    let out = match pullback_foliation(&f, &g) {
        Ok(out) => out,
        Err(e) => {
            report.push(
                Assertion::new("kupka/pullback", Outcome::Fail, Mode::Exact)
                    .with_detail(e.to_string()),
            );
            return;
        }
    };
    let eta = out.foliation.eta();
    report.push(timed(|| {
        let rep = kupka_on_fiber_check(eta, &f, &target, &gallery::kupka_fiber_points());
        if rep.all_kupka() && rep.kupka_points == 3 {
            Assertion::new("kupka/fiber-points", Outcome::Pass, Mode::Exact)
        } else {
            Assertion::new("kupka/fiber-points", Outcome::Fail, Mode::Exact)
                .with_detail(format!("{:?}", rep.rejections))
        }
    }));
    report.push(timed(|| {
        // t = 1 lies on the indeterminacy locus and must be rejected
        let bad = vec![vec![
            foliage_core::poly::int(1),
            foliage_core::poly::int(1),
            foliage_core::poly::int(1),
            foliage_core::poly::int(1),
        ]];
        let rep = kupka_on_fiber_check(eta, &f, &target, &bad);
        if rep.kupka_points == 0 && rep.rejections.len() == 1 {
            Assertion::new("kupka/indeterminate-rejected", Outcome::Pass, Mode::Exact)
        } else {
            Assertion::new("kupka/indeterminate-rejected", Outcome::Fail, Mode::Exact)
                .with_detail(format!("{:?}", rep.rejections))
        }
    }));
    report.push(timed(|| {
        // hyperbolic transversal type at a fiber point
        let p = &gallery::kupka_fiber_points()[0];
        match transversal_linear_part(eta, &f, p) {
            Err(e) => Assertion::new("kupka/transversal-type", Outcome::Fail, Mode::Exact)
                .with_detail(e.to_string()),
            Ok(info) => {
                let class = classify_singularity_1d(&info);
                let mode = match class.mode {
                    foliage_core::singular::CertMode::Exact => Mode::Exact,
                    foliage_core::singular::CertMode::Probabilistic => Mode::Probabilistic,
                    foliage_core::singular::CertMode::Numerical => Mode::Numerical,
                };
                match (class.kupka_type, class.hyperbolic) {
                    (true, Verdict::Yes) => {
                        Assertion::new("kupka/transversal-type", Outcome::Pass, mode)
                    }
                    (_, Verdict::Inconclusive) => {
                        Assertion::new("kupka/transversal-type", Outcome::Inconclusive, mode)
                    }
                    _ => Assertion::new("kupka/transversal-type", Outcome::Fail, mode).with_detail(
                        format!(
                            "kupka_type={} hyperbolic={:?}",
                            class.kupka_type, class.hyperbolic
                        ),
                    ),
                }
            }
        }
    }));
}

fn counts(report: &mut Report) {
    report.push(timed(|| {
        match sing_count_p2(&gallery::plane_foliation_d2()) {
            Ok(7) => Assertion::new("counts/tangency-d2", Outcome::Pass, Mode::Exact)
                .with_detail("7 singular points"),
            other => Assertion::new("counts/tangency-d2", Outcome::Fail, Mode::Exact)
                .with_detail(format!("{other:?}")),
        }
    }));
    report.push(timed(|| {
        match sing_count_p2(&gallery::diagonal_foliation()) {
            Ok(3) => Assertion::new("counts/tangency-diagonal", Outcome::Pass, Mode::Exact)
                .with_detail("3 singular points"),
            other => Assertion::new("counts/tangency-diagonal", Outcome::Fail, Mode::Exact)
                .with_detail(format!("{other:?}")),
        }
    }));
    report.push(timed(|| {
        let f = gallery::binomial_map(2);
        let (pts, complete) = f.binomial_witnesses().expect("binomial family");
        match indeterminacy_witness_check(&f, &pts) {
            Err(e) => Assertion::new("counts/bezout-quadric", Outcome::Fail, Mode::Exact)
                .with_detail(e.to_string()),
            Ok(rep) => {
                if rep.complete && complete && rep.verified == 8 {
                    Assertion::new("counts/bezout-quadric", Outcome::Pass, Mode::Exact)
                        .with_detail("8 of 8 witnessed")
                } else {
                    Assertion::new("counts/bezout-quadric", Outcome::Fail, Mode::Exact)
                        .with_detail(format!("verified {} of {}", rep.verified, rep.bound))
                }
            }
        }
    }));
    report.push(timed(|| {
        let f = gallery::binomial_map(3);
        let (pts, complete) = f.binomial_witnesses().expect("binomial family");
        match indeterminacy_witness_check(&f, &pts) {
            Err(e) => Assertion::new("counts/bezout-cubic-partial", Outcome::Fail, Mode::Exact)
                .with_detail(e.to_string()),
            Ok(rep) => {
                // Rational witnesses cannot exhaust the 27 cubic points: the
                // correct outcome is a verified partial list.
                if !complete && !rep.complete && rep.verified == 1 && rep.failures.is_empty() {
                    Assertion::new("counts/bezout-cubic-partial", Outcome::Pass, Mode::Exact)
                        .with_detail(format!(
                            "partial witnesses: {} of {}",
                            rep.verified, rep.bound
                        ))
                } else {
                    Assertion::new("counts/bezout-cubic-partial", Outcome::Fail, Mode::Exact)
                        .with_detail(format!("verified {} of {}", rep.verified, rep.bound))
                }
            }
        }
    }));
}
