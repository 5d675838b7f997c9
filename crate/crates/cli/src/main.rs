//! `foliage`: exact calculus for polynomial foliations on projective space.
//!
//! Subcommands: `parse`, `pullback`, `analyze`, `hypotheses`, `verify`.
//! Exit codes: 0 pass, 1 assertion failure, 2 input error, 3 inconclusive
//! results only.

mod report;
mod scenario;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use foliage_core::foliation::pullback_foliation;
use foliage_core::json::{
    mode_name, point_from_strings, FoliationDoc, FormDoc, JsonError, MapDoc, PointReportDoc,
};
use foliage_core::parse;
use foliage_core::sample::DEFAULT_SEED;
use foliage_core::singular::{analyze_point, AnalyzeOptions, IsolationOptions, PlaneSpec};

#[cfg(test)]
use report::{Mode, Outcome, Report};
use scenario::{Scenario, ScenarioDoc};
use suites::SuiteMode;

#[derive(Parser)]
#[command(
    name = "foliage",
    version,
    about = "Exact exterior calculus for foliations on projective space"
)]
struct Cli {
    /// Seed for probabilistic modes and randomized batteries
    /// (falls back to FOLIAGE_SEED, then a fixed default).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the machine-readable report/result to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a polynomial, form or vector field and print its canonical
    /// text.
    Parse(ParseArgs),
    /// Pull a one-dimensional foliation back along a rational map.
    Pullback(PullbackArgs),
    /// Analyze a form at a point: singular/Kupka flags, rotational linear
    /// part, conic test.
    Analyze(AnalyzeArgs),
    /// Run the hypothesis checks of a scenario file.
    Hypotheses(HypothesesArgs),
    /// Run a built-in verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ParseArgs {
    #[arg(long, group = "input")]
    poly: Option<String>,
    #[arg(long, group = "input")]
    form: Option<String>,
    #[arg(long, group = "input")]
    field: Option<String>,
    /// Explicit variable count (otherwise inferred from indices).
    #[arg(long)]
    nvars: Option<usize>,
}

#[derive(Args)]
struct PullbackArgs {
    /// Rational map JSON file.
    #[arg(long)]
    map: PathBuf,
    /// One-dimensional foliation JSON file.
    #[arg(long)]
    foliation: PathBuf,
    /// Output path for the pulled-back foliation document.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Form JSON file.
    #[arg(long)]
    form: PathBuf,
    /// Comma-separated rational coordinates, e.g. "1,1,1,1/2".
    #[arg(long)]
    point: String,
    /// Conic degree to test for.
    #[arg(long)]
    conic_d: Option<u32>,
    /// Plane spec JSON file for the restricted conic test.
    #[arg(long)]
    plane: Option<PathBuf>,
    /// Expected flags; when any is given the exit code reflects matching.
    #[arg(long)]
    expect_singular: Option<bool>,
    #[arg(long)]
    expect_kupka: Option<bool>,
    #[arg(long)]
    expect_conic: Option<bool>,
}

#[derive(Args)]
struct HypothesesArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: identities | degrees | kupka | counts | all.
    suite: String,
    /// Force exact mode (the default).
    #[arg(long, conflicts_with = "prob")]
    exact: bool,
    /// Probabilistic identity mode: "<prime>,<trials>".
    #[arg(long, value_name = "PRIME,TRIALS")]
    prob: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("FOLIAGE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_SEED);
    let code = match run(cli, seed) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    ExitCode::from(code as u8)
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] JsonError),
    #[error("{0}")]
    Serde(#[from] serde_json::Error),
    #[error("{0}")]
    Parse(#[from] parse::ParseError),
    #[error("{0}")]
    Scenario(#[from] scenario::ScenarioError),
    #[error("{0}")]
    Other(String),
}

fn run(cli: Cli, seed: u64) -> Result<i32, CliError> {
    match cli.command {
        Command::Parse(args) => cmd_parse(args, cli.json),
        Command::Pullback(args) => cmd_pullback(args, cli.json),
        Command::Analyze(args) => cmd_analyze(args, cli.json, seed),
        Command::Hypotheses(args) => cmd_hypotheses(args, cli.json, seed),
        Command::Verify(args) => cmd_verify(args, cli.json, seed),
    }
}

fn write_json(path: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, contents)?;
    }
    Ok(())
}

fn cmd_parse(args: ParseArgs, json: Option<PathBuf>) -> Result<i32, CliError> {
    if let Some(text) = &args.poly {
        let p = parse::parse_poly(text, args.nvars)?;
        println!("{p}");
        write_json(&json, &format!("{{\"format\":1,\"poly\":\"{p}\"}}\n"))?;
    } else if let Some(text) = &args.form {
        let f = parse::parse_form(text, args.nvars)?;
        println!("{f}");
        let doc = FormDoc::from_form(&f);
        write_json(&json, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    } else if let Some(text) = &args.field {
        let v = parse::parse_pvec(text, args.nvars)?;
        println!("{v}");
    } else {
        return Err(CliError::Other(
            "one of --poly, --form, --field is required".into(),
        ));
    }
    Ok(0)
}

#[derive(serde::Serialize)]
struct PullbackReportDoc {
    format: u32,
    theta: u32,
    predicted: u32,
    prediction_match: bool,
    gcd_removed_degree: u32,
    radial: bool,
    euler: bool,
    integrable: bool,
    foliation: FoliationDoc,
}

fn cmd_pullback(args: PullbackArgs, json: Option<PathBuf>) -> Result<i32, CliError> {
    let map_doc: MapDoc = serde_json::from_str(&std::fs::read_to_string(&args.map)?)?;
    let fol_doc: FoliationDoc = serde_json::from_str(&std::fs::read_to_string(&args.foliation)?)?;
    let f = map_doc.to_map()?;
    let g = fol_doc.to_1d()?;
    let out = pullback_foliation(&f, &g).map_err(|e| CliError::Other(e.to_string()))?;
    let eta = out.foliation.eta();
    let radial = foliage_core::foliation::radial_check(eta);
    let euler = foliage_core::foliation::euler_relation_check(eta).unwrap_or(false);
    let integrable = foliage_core::foliation::is_integrable(eta);
    let doc = PullbackReportDoc {
        format: 1,
        theta: out.foliation.degree(),
        predicted: out.predicted_degree,
        prediction_match: out.foliation.degree() == out.predicted_degree
            && out.removed_factor_degree == 0,
        gcd_removed_degree: out.removed_factor_degree,
        radial,
        euler,
        integrable,
        foliation: FoliationDoc::from_q(&out.foliation),
    };
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    if let Some(outpath) = &args.out {
        std::fs::write(outpath, &text)?;
    }
    write_json(&json, &text)?;
    println!(
        "theta = {}, predicted = {}, removed factor degree = {}",
        doc.theta, doc.predicted, doc.gcd_removed_degree
    );
    println!("radial: {radial}, euler: {euler}, integrable: {integrable}");
    Ok(if radial && euler && integrable { 0 } else { 1 })
}

fn parse_point(text: &str) -> Result<Vec<BigRational>, CliError> {
    let parts: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    Ok(point_from_strings(&parts)?)
}

fn cmd_analyze(args: AnalyzeArgs, json: Option<PathBuf>, seed: u64) -> Result<i32, CliError> {
    let form_doc: FormDoc = serde_json::from_str(&std::fs::read_to_string(&args.form)?)?;
    let form = form_doc.to_form()?;
    let point = parse_point(&args.point)?;
    let plane = match &args.plane {
        None => None,
        Some(path) => {
            let doc: scenario::PlaneDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let base = match &doc.base {
                Some(b) => point_from_strings(b)?,
                None => point.clone(),
            };
            let dirs = doc
                .dirs
                .iter()
                .map(|v| point_from_strings(v))
                .collect::<Result<Vec<_>, _>>()?;
            Some(PlaneSpec { base, dirs })
        }
    };
    let opts = AnalyzeOptions {
        conic_degree: args.conic_d,
        plane,
        isolation: Some(IsolationOptions {
            seed,
            ..IsolationOptions::default()
        }),
    };
    let rep = analyze_point(&form, &point, &opts).map_err(|e| CliError::Other(e.to_string()))?;
    let doc = PointReportDoc::from_report(&rep);
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    write_json(&json, &text)?;
    println!("singular: {}", rep.is_singular);
    println!("kupka: {}", rep.is_kupka);
    if let Some(nil) = rep.is_nilpotent_rot {
        println!("nilpotent rotational linear part: {nil}");
    }
    match &rep.conic_ngk {
        Some(c) => println!("conic: degree {} ({})", c.degree, mode_name(c.mode)),
        None => {
            if args.conic_d.is_some() {
                println!("conic: not detected");
            }
        }
    }
    for n in &rep.notes {
        println!("note: {n}");
    }
    // Expected-flag matching drives the exit code.
    let mut matched = true;
    if let Some(want) = args.expect_singular {
        matched &= rep.is_singular == want;
    }
    if let Some(want) = args.expect_kupka {
        matched &= rep.is_kupka == want;
    }
    if let Some(want) = args.expect_conic {
        matched &= rep.conic_ngk.is_some() == want;
    }
    Ok(if matched { 0 } else { 1 })
}

fn cmd_hypotheses(args: HypothesesArgs, json: Option<PathBuf>, seed: u64) -> Result<i32, CliError> {
    let doc: ScenarioDoc = serde_json::from_str(&std::fs::read_to_string(&args.scenario)?)?;
    let scenario = Scenario::resolve(&doc)?;
    let report = scenario.run(seed);
    report.print_human();
    write_json(&json, &report.json())?;
    Ok(report.exit_code())
}

fn cmd_verify(args: VerifyArgs, json: Option<PathBuf>, seed: u64) -> Result<i32, CliError> {
    let mode = match &args.prob {
        None => SuiteMode::Exact,
        Some(text) => {
            let (p, t) = text
                .split_once(',')
                .ok_or_else(|| CliError::Other("expected --prob <prime>,<trials>".into()))?;
            let prime: u64 = p
                .trim()
                .parse()
                .map_err(|_| CliError::Other("bad prime".into()))?;
            let trials: u32 = t
                .trim()
                .parse()
                .map_err(|_| CliError::Other("bad trial count".into()))?;
            SuiteMode::Probabilistic { prime, trials }
        }
    };
    let report = suites::run_suite(&args.suite, mode, seed).map_err(CliError::Other)?;
    report.print_human();
    write_json(&json, &report.json())?;
    Ok(report.exit_code())
}
