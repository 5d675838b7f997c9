//! Scenario files: named inputs plus a list of hypothesis assertions.
//!
//! A scenario bundles maps, one-dimensional foliations, forms (given
//! directly or as pull-backs of named pairs), witness lists, fiber point
//! lists and plane specs. Assertions reference those names and run
//! concurrently; the report is assembled in name order.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use foliage_core::exterior::PForm;
use foliage_core::foliation::pullback_foliation;
use foliage_core::json::{point_from_strings, FoliationDoc, FormDoc, JsonError, MapDoc};
use foliage_core::ratmap::RationalMap;
use foliage_core::singular::{
    classify_singularity_1d, conic_plane_restriction, is_conic_ngk_at, kupka_on_fiber_check,
    normal_types_equivalent, transversal_linear_part, CertMode, IsolationOptions, PlaneSpec,
    Verdict,
};

use crate::report::{timed, Assertion, Mode, Outcome, Report};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioDoc {
    #[serde(default = "default_format")]
    pub format: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub maps: BTreeMap<String, MapDoc>,
    #[serde(default)]
    pub foliations: BTreeMap<String, FoliationDoc>,
    #[serde(default)]
    pub forms: BTreeMap<String, FormDoc>,
    /// Forms computed as pull-backs of named (map, foliation) pairs.
    #[serde(default)]
    pub pullbacks: BTreeMap<String, PullbackRef>,
    /// Witness lists: bare arrays of homogeneous rational coordinates.
    #[serde(default)]
    pub witnesses: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub fibers: BTreeMap<String, FiberDoc>,
    #[serde(default)]
    pub planes: BTreeMap<String, PlaneDoc>,
    pub assertions: Vec<AssertionDoc>,
}

fn default_format() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PullbackRef {
    pub map: String,
    pub foliation: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberDoc {
    pub target: Vec<String>,
    pub points: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaneDoc {
    /// Optional base point; assertions that run per-witness rebase the
    /// directions at each witness.
    #[serde(default)]
    pub base: Option<Vec<String>>,
    pub dirs: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssertionDoc {
    pub name: String,
    pub check: String,
    #[serde(default)]
    pub form: Option<String>,
    #[serde(default)]
    pub map: Option<String>,
    #[serde(default)]
    pub witnesses: Option<String>,
    #[serde(default)]
    pub fiber: Option<String>,
    #[serde(default)]
    pub plane: Option<String>,
    #[serde(default)]
    pub d: Option<u32>,
}

/// Fully resolved scenario, ready to run.
pub struct Scenario {
    pub maps: BTreeMap<String, RationalMap>,
    pub forms: BTreeMap<String, PForm>,
    pub witnesses: BTreeMap<String, Vec<Vec<BigRational>>>,
    pub fibers: BTreeMap<String, (Vec<BigRational>, Vec<Vec<BigRational>>)>,
    pub planes: BTreeMap<String, PlaneDoc>,
    pub assertions: Vec<AssertionDoc>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario: {0}")]
    Json(#[from] JsonError),
    #[error("unresolved reference '{0}' in assertion '{1}'")]
    Unresolved(String, String),
    #[error("unknown check '{0}' in assertion '{1}'")]
    UnknownCheck(String, String),
    #[error("pull-back '{0}' failed: {1}")]
    Pullback(String, String),
}

const KNOWN_CHECKS: &[&str] = &["p1", "p2", "p3", "pt1", "pt2", "pt3", "pt4"];

impl Scenario {
    pub fn resolve(doc: &ScenarioDoc) -> Result<Self, ScenarioError> {
        let mut maps = BTreeMap::new();
        for (k, v) in &doc.maps {
            maps.insert(k.clone(), v.to_map()?);
        }
        let mut foliations = BTreeMap::new();
        for (k, v) in &doc.foliations {
            foliations.insert(k.clone(), v.to_1d()?);
        }
        let mut forms = BTreeMap::new();
        for (k, v) in &doc.forms {
            forms.insert(k.clone(), v.to_form()?);
        }
        for (k, pb) in &doc.pullbacks {
            let f = maps
                .get(&pb.map)
                .ok_or_else(|| ScenarioError::Unresolved(pb.map.clone(), k.clone()))?;
            let g = foliations
                .get(&pb.foliation)
                .ok_or_else(|| ScenarioError::Unresolved(pb.foliation.clone(), k.clone()))?;
            let out = pullback_foliation(f, g)
                .map_err(|e| ScenarioError::Pullback(k.clone(), e.to_string()))?;
            forms.insert(k.clone(), out.foliation.eta().clone());
        }
        let mut witnesses = BTreeMap::new();
        for (k, v) in &doc.witnesses {
            let pts = v
                .iter()
                .map(|p| point_from_strings(p))
                .collect::<Result<Vec<_>, _>>()?;
            witnesses.insert(k.clone(), pts);
        }
        let mut fibers = BTreeMap::new();
        for (k, v) in &doc.fibers {
            let target = point_from_strings(&v.target)?;
            let points = v
                .points
                .iter()
                .map(|p| point_from_strings(p))
                .collect::<Result<Vec<_>, _>>()?;
            fibers.insert(k.clone(), (target, points));
        }
        // Validate assertion references and check names up front.
        for a in &doc.assertions {
            if !KNOWN_CHECKS.contains(&a.check.as_str()) {
                return Err(ScenarioError::UnknownCheck(a.check.clone(), a.name.clone()));
            }
            let refs: [(&Option<String>, &str, bool); 5] = [
                (&a.form, "form", true),
                (&a.map, "map", true),
                (&a.witnesses, "witnesses", true),
                (&a.fiber, "fiber", true),
                (&a.plane, "plane", true),
            ];
            for (r, kind, _) in refs {
                if let Some(name) = r {
                    let found = match kind {
                        "form" => forms.contains_key(name),
                        "map" => maps.contains_key(name),
                        "witnesses" => witnesses.contains_key(name),
                        "fiber" => fibers.contains_key(name),
                        "plane" => doc.planes.contains_key(name),
                        _ => false,
                    };
                    if !found {
                        return Err(ScenarioError::Unresolved(name.clone(), a.name.clone()));
                    }
                }
            }
        }
        Ok(Scenario {
            maps,
            forms,
            witnesses,
            fibers,
            planes: doc.planes.clone(),
            assertions: doc.assertions.clone(),
        })
    }

    /// Run all assertions concurrently; the report is assembled sorted by
    /// assertion name.
    pub fn run(&self, seed: u64) -> Report {
        let mut report = Report::new(seed);
        let results: Vec<Assertion> = std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .assertions
                .iter()
                .map(|a| scope.spawn(move || self.run_assertion(a, seed)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("assertion thread"))
                .collect()
        });
        for r in results {
            report.push(r);
        }
        report.finalize();
        report
    }

    fn get_form<'a>(&'a self, a: &AssertionDoc) -> Result<&'a PForm, Assertion> {
        let name = a.form.as_ref().ok_or_else(|| {
            Assertion::new(a.name.clone(), Outcome::Inconclusive, Mode::Exact)
                .with_detail("no form named in the assertion")
        })?;
        Ok(&self.forms[name])
    }

    fn run_assertion(&self, a: &AssertionDoc, seed: u64) -> Assertion {
        timed(|| match a.check.as_str() {
            "p1" => self.check_conic_witnesses(a, seed, false),
            "pt1" => self.check_conic_witnesses(a, seed, true),
            "p2" | "pt3" => self.check_kupka_fiber(a),
            "p3" | "pt4" => self.check_transversal(a),
            "pt2" => Assertion::new(a.name.clone(), Outcome::Inconclusive, Mode::Exact)
                .with_detail(
                    "membership in the generic foliation class is not certifiable point-wise; \
                         reported not-certifiable by design",
                ),
            other => Assertion::new(a.name.clone(), Outcome::Fail, Mode::Exact)
                .with_detail(format!("unknown check {other}")),
        })
    }

    /// Conic nilpotent singularities of the named degree at every witness,
    /// with normal types pairwise equivalent (exact comparison after shift,
    /// up to coordinate reflections). `restricted` switches to the plane
    /// restriction of the named plane rebased at each witness.
    fn check_conic_witnesses(&self, a: &AssertionDoc, seed: u64, restricted: bool) -> Assertion {
        let name = a.name.clone();
        let form = match self.get_form(a) {
            Ok(f) => f,
            Err(e) => return e,
        };
        let Some(d) = a.d else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("no conic degree supplied");
        };
        let Some(wname) = a.witnesses.as_ref() else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("no witness list supplied");
        };
        let pts = &self.witnesses[wname];
        if pts.is_empty() {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("empty witness list");
        }
        let opts = IsolationOptions {
            seed,
            ..IsolationOptions::default()
        };
        let mut normal_types: Vec<PForm> = Vec::new();
        let mut mode = Mode::Exact;
        for (i, p) in pts.iter().enumerate() {
            let outcome = if restricted {
                let Some(pl) = a.plane.as_ref() else {
                    return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                        .with_detail("restricted conic check needs a plane");
                };
                let plane_doc = &self.planes[pl];
                let dirs = match plane_doc
                    .dirs
                    .iter()
                    .map(|v| point_from_strings(v))
                    .collect::<Result<Vec<_>, _>>()
                {
                    Ok(d) => d,
                    Err(e) => {
                        return Assertion::new(name, Outcome::Fail, Mode::Exact)
                            .with_detail(e.to_string())
                    }
                };
                // Rebase the plane at the witness so it passes through it.
                let plane = PlaneSpec {
                    base: p.clone(),
                    dirs,
                };
                conic_plane_restriction(form, &plane, p, d, opts)
            } else {
                // Work in the affine chart of the first nonzero coordinate.
                let Some(s) = p.iter().position(|v| !v.is_zero()) else {
                    return Assertion::new(name, Outcome::Fail, Mode::Exact)
                        .with_detail(format!("witness {i} is the zero vector"));
                };
                let scale = p[s].recip();
                let chart_form = form.chart_restrict(s);
                let p_aff: Vec<BigRational> = p
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != s)
                    .map(|(_, v)| v * &scale)
                    .collect();
                is_conic_ngk_at(&chart_form, &p_aff, d, opts)
            };
            match outcome {
                Err(e) => {
                    return Assertion::new(name, Outcome::Fail, Mode::Exact)
                        .with_detail(format!("witness {i}: {e}"))
                }
                Ok(None) => {
                    return Assertion::new(name, Outcome::Fail, Mode::Exact)
                        .with_detail(format!("witness {i} is not conic of degree {d}"))
                }
                Ok(Some(rec)) => {
                    if rec.mode == CertMode::Probabilistic {
                        mode = Mode::Probabilistic;
                    }
                    normal_types.push(rec.normal_type);
                }
            }
        }
        for (i, h) in normal_types.iter().enumerate().skip(1) {
            if !normal_types_equivalent(&normal_types[0], h) {
                return Assertion::new(name, Outcome::Fail, mode)
                    .with_detail(format!("normal type at witness {i} differs from witness 0"));
            }
        }
        Assertion::new(name, Outcome::Pass, mode).with_detail(format!(
            "{} witnesses conic of degree {d}, normal types agree",
            pts.len()
        ))
    }

    fn check_kupka_fiber(&self, a: &AssertionDoc) -> Assertion {
        let name = a.name.clone();
        let form = match self.get_form(a) {
            Ok(f) => f,
            Err(e) => return e,
        };
        let Some(mname) = a.map.as_ref() else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("no map supplied");
        };
        let Some(fname) = a.fiber.as_ref() else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("no fiber witnesses supplied; cannot certify the Kupka fiber");
        };
        let (target, points) = &self.fibers[fname];
        if points.is_empty() {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("fiber witness list is empty (vacuous)");
        }
        let rep = kupka_on_fiber_check(form, &self.maps[mname], target, points);
        if rep.all_kupka() {
            Assertion::new(name, Outcome::Pass, Mode::Exact)
                .with_detail(format!("{} fiber points of Kupka type", rep.kupka_points))
        } else {
            Assertion::new(name, Outcome::Fail, Mode::Exact)
                .with_detail(format!("{:?}", rep.rejections))
        }
    }

    fn check_transversal(&self, a: &AssertionDoc) -> Assertion {
        let name = a.name.clone();
        let form = match self.get_form(a) {
            Ok(f) => f,
            Err(e) => return e,
        };
        let Some(mname) = a.map.as_ref() else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("no map supplied");
        };
        let Some(fname) = a.fiber.as_ref() else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("no fiber point supplied for the transversal type");
        };
        let (_, points) = &self.fibers[fname];
        let Some(p) = points.first() else {
            return Assertion::new(name, Outcome::Inconclusive, Mode::Exact)
                .with_detail("fiber witness list is empty");
        };
        match transversal_linear_part(form, &self.maps[mname], p) {
            Err(e) => Assertion::new(name, Outcome::Fail, Mode::Exact).with_detail(e.to_string()),
            Ok(info) => {
                let class = classify_singularity_1d(&info);
                let mode = match class.mode {
                    CertMode::Exact => Mode::Exact,
                    CertMode::Probabilistic => Mode::Probabilistic,
                    CertMode::Numerical => Mode::Numerical,
                };
                match class.hyperbolic {
                    Verdict::Yes if class.kupka_type => Assertion::new(name, Outcome::Pass, mode)
                        .with_detail("hyperbolic transversal type of Kupka kind"),
                    Verdict::Inconclusive => Assertion::new(name, Outcome::Inconclusive, mode)
                        .with_detail("hyperbolicity borderline at the working tolerance"),
                    _ => Assertion::new(name, Outcome::Fail, mode).with_detail(format!(
                        "kupka_type={} hyperbolic={:?}",
                        class.kupka_type, class.hyperbolic
                    )),
                }
            }
        }
    }
}
