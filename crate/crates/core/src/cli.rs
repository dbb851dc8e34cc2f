//! Command-line front end. Every command writes one JSON document.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::certificate::{
    choose_small_epsilon2, verify_dual_feasibility, verify_third_certificate, DualCertificate, EpsilonChoice,
    FeasibilityReport,
};
use crate::error::{Error, Result};
use crate::measure::{disjoint_pair, mask_elements, ProbabilityVector, SubsetFamily};
use crate::oracle::{
    max_cross_product_with, probe_conjecture_weak, probe_single_family_conjecture, probe_stability,
    spot_check_all_families, verify_example_pairs, ORACLE_CAP, ORACLE_HARD_CAP,
};
use crate::rational::{half, parse_rational_list, rat};
use crate::reductions::{main_hypotheses_hold, verify_reduction_chain, ChainReport};
use crate::sdp::{build_primal_families, weak_duality_audit, GenericDualSolution, MeasuredBipartiteGraph};
use crate::surd::Surd;

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "crossmeasure", version, about = "Exact certificates and oracles for cross-intersecting families")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, env = "CROSSMEASURE_JOBS", default_value_t = 0)]
    pub jobs: usize,

    /// Seed for the randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Absolute tolerance for the floating-point checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Clone)]
pub struct Vectors {
    /// First probability vector, e.g. `1/2,1/3`.
    #[arg(long)]
    pub p1: String,
    /// Second probability vector.
    #[arg(long)]
    pub p2: String,
}

impl Vectors {
    fn parse(&self) -> Result<(ProbabilityVector, ProbabilityVector)> {
        let a = ProbabilityVector::parse(&self.p1)?;
        let b = ProbabilityVector::parse(&self.p2)?;
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch { left: a.n(), right: b.n() });
        }
        Ok((a, b))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify a closed-form dual certificate.
    Certify {
        #[command(flatten)]
        vectors: Vectors,
        /// Use the certificate for vectors with every entry at most 1/3.
        #[arg(long)]
        third: bool,
        /// `0`, `max`, `small`, or a literal such as `1/10*sqrt(p1p2)`.
        #[arg(long)]
        eps2: Option<String>,
    },
    /// Exhaustive maximum over up-set pairs.
    Oracle {
        #[arg(long)]
        p1: Option<String>,
        #[arg(long)]
        p2: Option<String>,
        /// Ground set size; vectors default to all 1/2.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        allow_six: bool,
        /// Random arbitrary-family pairs checked against the maximum.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Weak duality, slackness and (for p > 1/2) the reduction chain for two families.
    Audit {
        #[command(flatten)]
        vectors: Vectors,
        #[arg(long)]
        u1: PathBuf,
        #[arg(long)]
        u2: PathBuf,
        #[arg(long)]
        eps2: Option<String>,
    },
    /// Reduction chain for vectors with a first coordinate above 1/2.
    Chain {
        #[command(flatten)]
        vectors: Vectors,
        /// Families to check; defaults to every oracle-extremal pair.
        #[arg(long, requires = "u2")]
        u1: Option<PathBuf>,
        #[arg(long, requires = "u1")]
        u2: Option<PathBuf>,
    },
    /// Exhaustive probes of related open questions.
    #[command(subcommand)]
    Probe(Probe),
    /// Check the two exceptional example pairs.
    Examples,
}

#[derive(Debug, Subcommand)]
pub enum Probe {
    /// Maximum versus `p1 p2` when only the weak hypothesis holds.
    Weak {
        #[command(flatten)]
        vectors: Vectors,
    },
    /// Distance to the nearest star pair for near-optimal pairs.
    Stability {
        #[command(flatten)]
        vectors: Vectors,
        #[arg(long, default_value = "1/100,1/50,1/20,1/10,1/5")]
        eps: String,
    },
    /// Largest intersecting up-set for one vector.
    Single {
        #[arg(long)]
        p: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify { .. } => "certify",
            Command::Oracle { .. } => "oracle",
            Command::Audit { .. } => "audit",
            Command::Chain { .. } => "chain",
            Command::Probe(Probe::Weak { .. }) => "probe-weak",
            Command::Probe(Probe::Stability { .. }) => "probe-stability",
            Command::Probe(Probe::Single { .. }) => "probe-single",
            Command::Examples => "examples",
        }
    }
}

/// A finished command: exit code plus the report body.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn new(code: i32, report: impl Serialize) -> Result<Self> {
        Ok(Self { code, report: to_value(report)? })
    }

    fn pass(ok: bool, report: impl Serialize) -> Result<Self> {
        Self::new(if ok { EXIT_OK } else { EXIT_FALSE }, report)
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

/// Parse arguments from the process, run, print, and return the exit code.
pub fn run() -> i32 {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    run_config(&config)
}

pub fn run_config(config: &RunConfig) -> i32 {
    if config.jobs > 0 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build_global();
    }
    let (code, doc) = match execute(config) {
        Ok(out) => (out.code, envelope(config.command.name(), json!({ "report": out.report }))),
        Err(e) => {
            eprintln!("error: {e}");
            (EXIT_USAGE, envelope(config.command.name(), json!({ "error": e.to_string() })))
        }
    };
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{text}"),
    }
    code
}

fn envelope(command: &str, body: Value) -> Value {
    let mut doc = json!({ "schema": SCHEMA, "command": command });
    if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
        d.extend(b);
    }
    doc
}

/// Run one command without printing.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    match &config.command {
        Command::Certify { vectors, third, eps2 } => cmd_certify(vectors, *third, eps2.as_deref()),
        Command::Oracle { p1, p2, n, allow_six, samples } => {
            cmd_oracle(p1.as_deref(), p2.as_deref(), *n, *allow_six, *samples, config.seed)
        }
        Command::Audit { vectors, u1, u2, eps2 } => cmd_audit(vectors, u1, u2, eps2.as_deref(), config.tolerance),
        Command::Chain { vectors, u1, u2 } => cmd_chain(vectors, u1.as_deref().zip(u2.as_deref())),
        Command::Probe(p) => cmd_probe(p),
        Command::Examples => {
            let r = verify_example_pairs()?;
            Outcome::pass(r.pass, r)
        }
    }
}

fn epsilon_choice(text: Option<&str>, pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<EpsilonChoice> {
    Ok(match text.map(str::trim) {
        None | Some("0") => EpsilonChoice::Zero,
        Some("max") => EpsilonChoice::Max,
        Some("small") => EpsilonChoice::Value(choose_small_epsilon2(pv1, pv2)?),
        Some(t) => EpsilonChoice::Value(Surd::parse(t, &(pv1.first() * pv2.first()))?),
    })
}

#[derive(Serialize)]
struct CertifyOutput {
    #[serde(flatten)]
    report: FeasibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint: Option<String>,
}

pub fn cmd_certify(vectors: &Vectors, third: bool, eps2: Option<&str>) -> Result<Outcome> {
    let (pv1, pv2) = vectors.parse()?;
    let report = if third {
        verify_third_certificate(&pv1, &pv2)?
    } else {
        verify_dual_feasibility(&pv1, &pv2, epsilon_choice(eps2, &pv1, &pv2)?)?
    };
    let h = half();
    let hint = (!report.feasible && (pv1.first() > &h || pv2.first() > &h)).then(|| {
        "a first coordinate exceeds 1/2, so Z has negative entries; bound this case with `chain`".to_string()
    });
    Outcome::pass(report.feasible, CertifyOutput { report, hint })
}

#[derive(Serialize)]
struct OracleOutput {
    #[serde(flatten)]
    report: crate::oracle::ExtremalReport,
    spot_check_samples: usize,
    spot_check_violations: usize,
}

pub fn cmd_oracle(
    p1: Option<&str>,
    p2: Option<&str>,
    n: Option<usize>,
    allow_six: bool,
    samples: usize,
    seed: u64,
) -> Result<Outcome> {
    if let Some(n) = n {
        let cap = if allow_six { ORACLE_HARD_CAP } else { ORACLE_CAP };
        if n > cap {
            return Err(Error::SizeCap { n, cap });
        }
    }
    let vector = |text: Option<&str>| -> Result<ProbabilityVector> {
        match (text, n) {
            (Some(t), _) => ProbabilityVector::parse(t),
            (None, Some(n)) => ProbabilityVector::uniform(n, half()),
            (None, None) => Err(Error::Parse("give --p1/--p2 or --n".into())),
        }
    };
    let (pv1, pv2) = (vector(p1)?, vector(p2)?);
    if pv1.n() != pv2.n() {
        return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
    }
    if let Some(n) = n.filter(|&n| n != pv1.n()) {
        return Err(Error::DimensionMismatch { left: n, right: pv1.n() });
    }
    let report = max_cross_product_with(&pv1, &pv2, allow_six)?;
    let violations = spot_check_all_families(&pv1, &pv2, &report.max, samples, seed)?;
    let third = rat(1, 3);
    let third_regime = report.hypotheses.weak && pv1.entries().iter().chain(pv2.entries()).all(|p| p <= &third);
    let covered = report.hypotheses.main || third_regime;
    let ok = (!covered || report.max_equals_p1p2) && violations == 0;
    Outcome::pass(ok, OracleOutput { report, spot_check_samples: samples, spot_check_violations: violations })
}

fn read_family(path: &Path, n: usize) -> Result<SubsetFamily> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    SubsetFamily::from_json(n, &text)
}

#[derive(Serialize)]
struct DisjointWitness {
    cross_intersecting: bool,
    x: Vec<usize>,
    y: Vec<usize>,
}

#[derive(Serialize)]
struct AuditOutput {
    cross_intersecting: bool,
    primal: crate::sdp::PrimalWitness,
    certificate: FeasibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sdp: Option<crate::sdp::AuditReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain: Option<ChainReport>,
}

pub fn cmd_audit(vectors: &Vectors, u1: &Path, u2: &Path, eps2: Option<&str>, tolerance: f64) -> Result<Outcome> {
    let (pv1, pv2) = vectors.parse()?;
    let n = pv1.n();
    let (f1, f2) = (read_family(u1, n)?, read_family(u2, n)?);
    if let Some((x, y)) = disjoint_pair(&f1, &f2)? {
        eprintln!("families are not cross-intersecting: {:?} and {:?} are disjoint", mask_elements(x), mask_elements(y));
        return Outcome::new(
            EXIT_FALSE,
            DisjointWitness { cross_intersecting: false, x: mask_elements(x), y: mask_elements(y) },
        );
    }
    let graph = MeasuredBipartiteGraph::disjointness(&pv1, &pv2)?;
    let primal = build_primal_families(&graph, &f1, &f2)?;
    let cert = DualCertificate::new(&pv1, &pv2, epsilon_choice(eps2, &pv1, &pv2)?)?;
    let certificate = cert.verify();
    let sdp = if certificate.feasible {
        let dual = GenericDualSolution::from_certificate(&cert)?;
        Some(weak_duality_audit(&graph, &primal, &dual, tolerance)?)
    } else {
        None
    };
    let h = half();
    let chain = if n >= 2 && main_hypotheses_hold(&pv1, &pv2) && (pv1.first() > &h || pv2.first() > &h) {
        Some(verify_reduction_chain(&pv1, &pv2, &f1, &f2)?)
    } else {
        None
    };
    let ok = chain.as_ref().is_none_or(|c| c.holds());
    Outcome::pass(ok, AuditOutput { cross_intersecting: true, primal, certificate, sdp, chain })
}

#[derive(Serialize)]
struct ChainOutput {
    reports: Vec<ChainReport>,
    all_hold: bool,
    all_tight: bool,
}

pub fn cmd_chain(vectors: &Vectors, families: Option<(&Path, &Path)>) -> Result<Outcome> {
    let (pv1, pv2) = vectors.parse()?;
    let pairs = match families {
        Some((a, b)) => vec![(read_family(a, pv1.n())?, read_family(b, pv1.n())?)],
        None => max_cross_product_with(&pv1, &pv2, false)?.pairs.into_iter().map(|p| (p.u1, p.u2)).collect(),
    };
    let reports = pairs.iter().map(|(a, b)| verify_reduction_chain(&pv1, &pv2, a, b)).collect::<Result<Vec<_>>>()?;
    let all_hold = reports.iter().all(ChainReport::holds);
    let all_tight = reports.iter().all(ChainReport::all_tight);
    Outcome::pass(all_hold, ChainOutput { reports, all_hold, all_tight })
}

pub fn cmd_probe(probe: &Probe) -> Result<Outcome> {
    match probe {
        Probe::Weak { vectors } => {
            let (a, b) = vectors.parse()?;
            Outcome::new(EXIT_OK, probe_conjecture_weak(&a, &b)?)
        }
        Probe::Stability { vectors, eps } => {
            let (a, b) = vectors.parse()?;
            let grid: Vec<BigRational> = parse_rational_list(eps)?;
            Outcome::new(EXIT_OK, probe_stability(&a, &b, &grid)?)
        }
        Probe::Single { p } => Outcome::new(EXIT_OK, probe_single_family_conjecture(&ProbabilityVector::parse(p)?)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("crossmeasure").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn certify_exit_codes() {
        let out = execute(&config(&["certify", "--p1", "1/2,1/3", "--p2", "1/2,1/4"])).unwrap();
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(out.report["bound"], "1/4");
        let out = execute(&config(&["certify", "--p1", "3/5,1/3", "--p2", "1/2,1/3"])).unwrap();
        assert_eq!(out.code, EXIT_FALSE);
        assert!(out.report["hint"].as_str().unwrap().contains("chain"));
        assert!(execute(&config(&["certify", "--p1", "1/2,x", "--p2", "1/2,1/4"])).is_err());
    }

    #[test]
    fn oracle_cap() {
        assert!(matches!(
            execute(&config(&["oracle", "--n", "6"])),
            Err(Error::SizeCap { n: 6, cap: 5 })
        ));
    }

    #[test]
    fn envelope_has_schema() {
        let doc = envelope("x", json!({ "report": 1 }));
        assert_eq!(doc["schema"], 1);
        assert_eq!(doc["report"], 1);
    }
}
