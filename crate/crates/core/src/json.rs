//! Versioned JSON documents for maps, foliations, forms, witness lists and
//! point reports. Coefficients and coordinates travel as exact rational
//! text (`p/q` or integers), never floating point.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::PForm;
use crate::foliation::{Foliation1D, FoliationQ};
use crate::parse;
use crate::poly::Poly;
use crate::ratmap::RationalMap;
use crate::singular::{CertMode, ConicRecord, LinearPartInfo, PointReport};
use crate::PVec;

pub const FORMAT_VERSION: u32 = 1;

fn default_format() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("unsupported format version {0}")]
    BadVersion(u32),
    #[error("bad rational literal '{0}'")]
    BadRational(String),
    #[error("polynomial syntax: {0}")]
    Parse(#[from] parse::ParseError),
    #[error("foliation: {0}")]
    Foliation(#[from] crate::foliation::FoliationError),
    #[error("map: {0}")]
    Map(#[from] crate::ratmap::MapError),
    #[error("json: {0}")]
    Serde(#[from] serde_json::Error),
}

fn check_version(v: u32) -> Result<(), JsonError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(JsonError::BadVersion(v))
    }
}

pub fn rational_to_string(v: &BigRational) -> String {
    v.to_string()
}

pub fn rational_from_string(s: &str) -> Result<BigRational, JsonError> {
    s.trim()
        .parse()
        .map_err(|_| JsonError::BadRational(s.to_string()))
}

pub fn point_to_strings(p: &[BigRational]) -> Vec<String> {
    p.iter().map(rational_to_string).collect()
}

pub fn point_from_strings(p: &[String]) -> Result<Vec<BigRational>, JsonError> {
    p.iter().map(|s| rational_from_string(s)).collect()
}

/// `{ "nvars": N, "formdeg": q, "comps": [ { "idx": [...], "poly": "<text>" } ] }`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormDoc {
    #[serde(default = "default_format")]
    pub format: u32,
    pub nvars: usize,
    pub formdeg: usize,
    pub comps: Vec<FormCompDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormCompDoc {
    pub idx: Vec<usize>,
    pub poly: String,
}

impl FormDoc {
    pub fn from_form(a: &PForm) -> Self {
        FormDoc {
            format: FORMAT_VERSION,
            nvars: a.nvars(),
            formdeg: a.formdeg(),
            comps: a
                .components()
                .into_iter()
                .map(|(idx, p)| FormCompDoc {
                    idx,
                    poly: p.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_form(&self) -> Result<PForm, JsonError> {
        check_version(self.format)?;
        let mut comps = Vec::new();
        for c in &self.comps {
            let p = parse::parse_poly(&c.poly, Some(self.nvars))?;
            comps.push((c.idx.clone(), p));
        }
        Ok(PForm::from_comps(self.nvars, self.formdeg, comps))
    }
}

/// `{ "n": 3, "m": 2, "nu": 2, "F": ["<poly>", ...] }`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapDoc {
    #[serde(default = "default_format")]
    pub format: u32,
    pub n: usize,
    pub m: usize,
    pub nu: u32,
    #[serde(rename = "F")]
    pub comps: Vec<String>,
}

impl MapDoc {
    pub fn from_map(f: &RationalMap) -> Self {
        MapDoc {
            format: FORMAT_VERSION,
            n: f.source_dim(),
            m: f.target_dim(),
            nu: f.degree(),
            comps: f.comps().iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn to_map(&self) -> Result<RationalMap, JsonError> {
        check_version(self.format)?;
        let comps = self
            .comps
            .iter()
            .map(|s| parse::parse_poly(s, Some(self.n + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalMap::new(self.n, self.m, self.nu, comps)?)
    }
}

/// `{ "kind": "1d", ... }` or `{ "kind": "q", ... }`
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FoliationDoc {
    #[serde(rename = "1d")]
    OneDim {
        #[serde(default = "default_format")]
        format: u32,
        m: usize,
        d: u32,
        #[serde(rename = "X")]
        field: Vec<String>,
    },
    #[serde(rename = "q")]
    Codim {
        #[serde(default = "default_format")]
        format: u32,
        n: usize,
        q: usize,
        eta: FormDoc,
    },
}

impl FoliationDoc {
    pub fn from_1d(g: &Foliation1D) -> Self {
        FoliationDoc::OneDim {
            format: FORMAT_VERSION,
            m: g.ambient_dim(),
            d: g.degree(),
            field: g.field().comps().iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn from_q(f: &FoliationQ) -> Self {
        FoliationDoc::Codim {
            format: FORMAT_VERSION,
            n: f.ambient_dim(),
            q: f.codim(),
            eta: FormDoc::from_form(f.eta()),
        }
    }

    pub fn to_1d(&self) -> Result<Foliation1D, JsonError> {
        match self {
            FoliationDoc::OneDim {
                format,
                m,
                d,
                field,
            } => {
                check_version(*format)?;
                let comps = field
                    .iter()
                    .map(|s| parse::parse_poly(s, Some(m + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Foliation1D::new(*m, *d, PVec::new(comps))?)
            }
            FoliationDoc::Codim { .. } => Err(JsonError::Foliation(
                crate::foliation::FoliationError::WrongVariableCount {
                    expected: 0,
                    found: 0,
                },
            )),
        }
    }

    pub fn to_q(&self) -> Result<FoliationQ, JsonError> {
        match self {
            FoliationDoc::Codim { format, n, q, eta } => {
                check_version(*format)?;
                Ok(FoliationQ::new(*n, *q, eta.to_form()?)?)
            }
            FoliationDoc::OneDim { .. } => Err(JsonError::Foliation(
                crate::foliation::FoliationError::WrongVariableCount {
                    expected: 0,
                    found: 0,
                },
            )),
        }
    }
}

/// `{ "points": [ ["1","1","1","1"], ... ] }`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessDoc {
    #[serde(default = "default_format")]
    pub format: u32,
    pub points: Vec<Vec<String>>,
}

impl WitnessDoc {
    pub fn from_points(pts: &[Vec<BigRational>]) -> Self {
        WitnessDoc {
            format: FORMAT_VERSION,
            points: pts.iter().map(|p| point_to_strings(p)).collect(),
        }
    }

    pub fn to_points(&self) -> Result<Vec<Vec<BigRational>>, JsonError> {
        check_version(self.format)?;
        self.points.iter().map(|p| point_from_strings(p)).collect()
    }
}

/// Point-report wire format; all numbers are exact rational text.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointReportDoc {
    #[serde(default = "default_format")]
    pub format: u32,
    pub point: Vec<String>,
    pub singular: bool,
    pub kupka: bool,
    pub rot_linear_part: Option<Vec<Vec<String>>>,
    pub nilpotent: Option<bool>,
    pub conic_ngk: Option<ConicDoc>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConicDoc {
    pub d: u32,
    pub mode: String,
    pub normal_type: FormDoc,
}

pub fn mode_name(mode: CertMode) -> &'static str {
    match mode {
        CertMode::Exact => "exact",
        CertMode::Probabilistic => "probabilistic",
        CertMode::Numerical => "numerical",
    }
}

impl PointReportDoc {
    pub fn from_report(r: &PointReport) -> Self {
        PointReportDoc {
            format: FORMAT_VERSION,
            point: point_to_strings(&r.point),
            singular: r.is_singular,
            kupka: r.is_kupka,
            rot_linear_part: r.rot_linear_part.as_ref().map(matrix_to_strings),
            nilpotent: r.is_nilpotent_rot,
            conic_ngk: r.conic_ngk.as_ref().map(|c: &ConicRecord| ConicDoc {
                d: c.degree,
                mode: mode_name(c.mode).to_string(),
                normal_type: FormDoc::from_form(&c.normal_type),
            }),
            notes: r.notes.clone(),
        }
    }
}

fn matrix_to_strings(info: &LinearPartInfo) -> Vec<Vec<String>> {
    info.matrix
        .iter()
        .map(|row| row.iter().map(rational_to_string).collect())
        .collect()
}

/// Parse a polynomial document entry into a `Poly` with explicit nvars.
pub fn poly_from_text(s: &str, nvars: usize) -> Result<Poly, JsonError> {
    Ok(parse::parse_poly(s, Some(nvars))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn form_doc_roundtrip() {
        let omega = gallery::plane_foliation_d2().omega();
        let doc = FormDoc::from_form(&omega);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: FormDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_form().unwrap(), omega);
    }

    #[test]
    fn map_doc_roundtrip() {
        let f = gallery::binomial_map(2);
        let doc = MapDoc::from_map(&f);
        let text = serde_json::to_string(&doc).unwrap();
        let back: MapDoc = serde_json::from_str(&text).unwrap();
        let f2 = back.to_map().unwrap();
        assert_eq!(f2.comps(), f.comps());
    }

    #[test]
    fn foliation_doc_tags() {
        let g = gallery::plane_foliation_d2();
        let doc = FoliationDoc::from_1d(&g);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"kind\":\"1d\""));
        let back: FoliationDoc = serde_json::from_str(&text).unwrap();
        assert!(back.to_1d().unwrap().same_foliation(&g));
    }

    #[test]
    fn version_gate() {
        let mut doc = FormDoc::from_form(&gallery::plane_foliation_d2().omega());
        doc.format = 99;
        assert!(matches!(doc.to_form(), Err(JsonError::BadVersion(99))));
    }

    #[test]
    fn witness_doc_roundtrip() {
        let pts = gallery::kupka_fiber_points();
        let doc = WitnessDoc::from_points(&pts);
        let text = serde_json::to_string(&doc).unwrap();
        let back: WitnessDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_points().unwrap(), pts);
    }
}
