//! Library side of the `pbox` command: every subcommand is a function
//! returning its output text and exit code, so it can be tested without a
//! process.

mod document;
mod export;

use std::fmt::Write;
use std::path::Path;

use thiserror::Error;

use pbox_core::cone::enumerate_mescs;
use pbox_core::extremes::build_fan;
use pbox_core::oracle::{cross_check, DEFAULT_LIMIT};
use pbox_core::rational::{format_decimal, format_rational};
use pbox_core::{
    enumerate_extremes, lower_expectation, upper_expectation, ExtremeError, Gamble, MassFunction,
    Method, ModelError, OracleError, Rational,
};

pub use document::{parse_list, value_to_rational, PBoxDocument};
pub use export::{fan_dot, fan_json, ExtremeRecord, ExtremesReport};

pub const ORACLE_LIMIT_VAR: &str = "PBOX_ORACLE_LIMIT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Invalid(ModelError),
    #[error("{0}")]
    SizeGuard(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Failed(_) => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::SizeGuard(_) => 3,
        }
    }
}

impl From<ExtremeError> for CliError {
    fn from(e: ExtremeError) -> Self {
        match e {
            ExtremeError::Model(m) => CliError::Invalid(m),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DomainTooLarge { .. } => CliError::SizeGuard(format!(
                "{e}; set {ORACLE_LIMIT_VAR} to raise the limit at your own risk"
            )),
            OracleError::Extreme(x) => x.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

/// Oracle size limit, overridable through `PBOX_ORACLE_LIMIT`.
pub fn oracle_limit() -> Result<usize, CliError> {
    match std::env::var(ORACLE_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{ORACLE_LIMIT_VAR}={v:?} is not a size"))),
        Err(_) => Ok(DEFAULT_LIMIT),
    }
}

struct Render {
    decimal: Option<usize>,
}

impl Render {
    fn value(&self, v: &Rational) -> String {
        match self.decimal {
            Some(places) => format_decimal(v, places),
            None => format_rational(v),
        }
    }

    fn vector(&self, vs: &[Rational]) -> String {
        let parts: Vec<String> = vs.iter().map(|v| self.value(v)).collect();
        format!("({})", parts.join(", "))
    }
}

pub fn cmd_validate(path: &Path) -> Result<Output, CliError> {
    let doc = PBoxDocument::read(path)?;
    let mut out = String::new();
    match doc.to_pbox() {
        Ok(p) => {
            let _ = writeln!(out, "valid: {} ({} points)", doc.label(), p.n());
            let _ = writeln!(out, "  lower = {}", Render { decimal: None }.vector(p.low()));
            let _ = writeln!(out, "  upper = {}", Render { decimal: None }.vector(p.up()));
            Ok(Output::ok(out))
        }
        Err(CliError::Invalid(ModelError::InvalidPBox(violations))) => {
            let _ = writeln!(out, "invalid: {}", doc.label());
            for v in violations {
                let _ = writeln!(out, "  - {v}");
            }
            Ok(Output { stdout: out, code: 1 })
        }
        Err(CliError::Invalid(e)) => {
            let _ = writeln!(out, "invalid: {}\n  - {e}", doc.label());
            Ok(Output { stdout: out, code: 1 })
        }
        Err(e) => Err(e),
    }
}

pub fn cmd_extremes(
    path: &Path,
    method: Method,
    format: Format,
    decimal: Option<usize>,
) -> Result<Output, CliError> {
    let doc = PBoxDocument::read(path)?;
    let p = doc.to_pbox()?;
    let extremes = enumerate_extremes(&p, method)?;
    let stdout = match format {
        Format::Json => {
            let report = ExtremesReport {
                name: doc.label().to_string(),
                domain: p.domain().labels().to_vec(),
                extremes: extremes.iter().map(ExtremeRecord::new).collect(),
            };
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
        Format::Table => {
            let r = Render { decimal };
            let mut out = String::new();
            let _ = writeln!(out, "{}: {} extreme points", doc.label(), extremes.len());
            for (k, e) in extremes.iter().enumerate() {
                let _ = writeln!(out, "[{}] F = {}", k + 1, r.vector(e.cdf.values()));
                let _ = writeln!(out, "    p = {}", r.vector(e.cdf.to_mass().masses()));
                for w in &e.witnesses {
                    let _ = writeln!(out, "    witness {w}");
                }
            }
            out
        }
    };
    Ok(Output::ok(stdout))
}

/// Where an export goes: a file, or standard output for `-`.
fn emit(target: &Path, text: &str, out: &mut String) -> Result<(), CliError> {
    if target == Path::new("-") {
        out.push_str(text);
        return Ok(());
    }
    std::fs::write(target, text).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
    let _ = writeln!(out, "wrote {}", target.display());
    Ok(())
}

pub fn cmd_fan(path: &Path, dot: Option<&Path>, json: Option<&Path>) -> Result<Output, CliError> {
    let doc = PBoxDocument::read(path)?;
    let p = doc.to_pbox()?;
    let fan = build_fan(&p)?;
    let mut out = String::new();
    let cross = fan
        .edges
        .iter()
        .filter(|e| e.kind == pbox_core::EdgeKind::CrossPoint)
        .count();
    let stdout_dot = dot.is_none() && json.is_none();
    if !stdout_dot {
        let _ = writeln!(
            out,
            "{}: {} cones, {} extreme points, {} edges ({} same-point, {} cross-point)",
            doc.label(),
            fan.nodes.len(),
            fan.points.len(),
            fan.edges.len(),
            fan.edges.len() - cross,
            cross
        );
    }
    if let Some(target) = dot {
        emit(target, &fan_dot(&fan, doc.label()), &mut out)?;
    }
    if let Some(target) = json {
        emit(target, &fan_json(&fan), &mut out)?;
    }
    if stdout_dot {
        out.push_str(&fan_dot(&fan, doc.label()));
    }
    Ok(Output::ok(out))
}

pub fn cmd_bounds(
    path: &Path,
    gamble: &str,
    at_distribution: Option<&str>,
    decimal: Option<usize>,
) -> Result<Output, CliError> {
    let doc = PBoxDocument::read(path)?;
    let p = doc.to_pbox()?;
    let h = Gamble::new(p.domain().clone(), parse_list(gamble, "gamble")?)?;
    let r = Render { decimal };
    let (lo, lo_at) = lower_expectation(&h, &p)?;
    let (hi, hi_at) = upper_expectation(&h, &p)?;
    let mut out = String::new();
    let _ = writeln!(out, "gamble h = {}", r.vector(h.values()));
    let _ = writeln!(out, "lower = {}  at F = {}", r.value(&lo), r.vector(lo_at.cdf.values()));
    let _ = writeln!(out, "upper = {}  at F = {}", r.value(&hi), r.vector(hi_at.cdf.values()));
    if let Some(masses) = at_distribution {
        let m = MassFunction::new(p.domain().clone(), parse_list(masses, "distribution")?)?;
        let cdf = m.to_cdf();
        let e = m.expectation(&h)?;
        let inside = if p.contains(cdf.values()) { "inside" } else { "outside" };
        let _ = writeln!(
            out,
            "at p = {}: {} (F = {}, {inside} the p-box)",
            r.vector(m.masses()),
            r.value(&e),
            r.vector(cdf.values())
        );
    }
    Ok(Output::ok(out))
}

pub fn cmd_check(path: &Path, trials: usize, seed: u64) -> Result<Output, CliError> {
    let doc = PBoxDocument::read(path)?;
    let p = doc.to_pbox()?;
    let report = cross_check(&p, trials, seed, oracle_limit()?)?;
    let code = if report.passed() { 0 } else { 1 };
    Ok(Output {
        stdout: format!("{}: {report}\n", doc.label()),
        code,
    })
}

pub fn cmd_enumerate_mescs(n: usize, format: Format) -> Result<Output, CliError> {
    let limit = oracle_limit()?;
    if n == 0 || n > limit {
        return Err(CliError::SizeGuard(format!(
            "domain size {n} is outside 1..={limit}; set {ORACLE_LIMIT_VAR} to raise the limit"
        )));
    }
    let families = enumerate_mescs(n);
    let stdout = match format {
        Format::Json => {
            let lists: Vec<Vec<String>> = families
                .iter()
                .map(|g| g.display_order().iter().map(ToString::to_string).collect())
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({ "n": n, "families": lists }))
                .expect("families serialize")
                + "\n"
        }
        Format::Table => {
            let mut out = format!("{} structural families for n = {n}\n", families.len());
            for g in &families {
                let _ = writeln!(out, "{g}");
            }
            out
        }
    };
    Ok(Output::ok(stdout))
}
