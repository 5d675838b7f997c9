//! Assertion reports: deterministic JSON plus a human stream with timings.
//!
//! The JSON document is byte-identical across runs with the same inputs and
//! seed, so per-assertion wall time lives only in the human-readable
//! output.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Probabilistic,
    Numerical,
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub name: String,
    pub outcome: Outcome,
    pub mode: Mode,
    /// Minimal counterexample datum for failures, explanation otherwise.
    pub detail: Option<String>,
    pub millis: u128,
}

impl Assertion {
    pub fn new(name: impl Into<String>, outcome: Outcome, mode: Mode) -> Self {
        Assertion {
            name: name.into(),
            outcome,
            mode,
            detail: None,
            millis: 0,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub seed: u64,
    pub assertions: Vec<Assertion>,
}

#[derive(Serialize, Deserialize)]
struct ReportDoc {
    format: u32,
    seed: u64,
    assertions: Vec<AssertionDoc>,
}

#[derive(Serialize, Deserialize)]
struct AssertionDoc {
    name: String,
    outcome: Outcome,
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Report {
    pub fn new(seed: u64) -> Self {
        Report {
            seed,
            assertions: Vec::new(),
        }
    }

    pub fn push(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    /// Sort by name for deterministic output.
    pub fn finalize(&mut self) {
        self.assertions.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn json(&self) -> String {
        let doc = ReportDoc {
            format: 1,
            seed: self.seed,
            assertions: self
                .assertions
                .iter()
                .map(|a| AssertionDoc {
                    name: a.name.clone(),
                    outcome: a.outcome,
                    mode: a.mode,
                    detail: a.detail.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn print_human(&self) {
        println!("seed: {}", self.seed);
        for a in &self.assertions {
            let flag = match a.outcome {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
                Outcome::Inconclusive => "INCONCLUSIVE",
            };
            let mode = match a.mode {
                Mode::Exact => "exact",
                Mode::Probabilistic => "probabilistic",
                Mode::Numerical => "numerical",
            };
            print!("{flag:12} {:40} [{mode}, {} ms]", a.name, a.millis);
            if let Some(d) = &a.detail {
                print!("  {d}");
            }
            println!();
        }
    }

    /// 0 all pass; 1 any failure; 3 inconclusive results but no failures.
    pub fn exit_code(&self) -> i32 {
        if self.assertions.iter().any(|a| a.outcome == Outcome::Fail) {
            1
        } else if self
            .assertions
            .iter()
            .any(|a| a.outcome == Outcome::Inconclusive)
        {
            3
        } else {
            0
        }
    }
}

/// Run a closure, timing it into the assertion it returns.
pub fn timed(f: impl FnOnce() -> Assertion) -> Assertion {
    let t0 = std::time::Instant::now();
    let mut a = f();
    a.millis = t0.elapsed().as_millis();
    a
}
