//! Library side of the `boundinfo` binary: configuration, the five
//! subcommands, and the verification criteria. Each command returns a
//! [`Report`] whose `pass` flag decides the exit status.

mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::dist::{DistError, JointDistribution};
use crate::measures::{
    conditional_mutual_information, entropy, intrinsic_information_search, mutual_information, MeasureError,
    SearchConfig, Strategy,
};
use crate::protocols::tables::{
    after_first_teleport_reference, after_second_teleport_compact, after_second_teleport_reference,
    corrected_reference, parity_reference, two_copy_reference, unlock_reference,
};
use crate::protocols::verify::{
    five_copy_checks, secret_distribution_checks, superactivation_checks, unlock_checks, Check,
};
use crate::protocols::{
    compact_table, distribute_secret, smolin_table, superactivate_pair, symmetrized_five, unlock, PairTarget,
    ProtocolError, ProtocolTranscript,
};
use crate::quantum::{ghz_extend, quantum_superactivation, quantum_unlock_branches, smolin_state, QuantumError};

pub use verify::{cmd_verify, random_distribution, run_criterion, CriterionResult, Fixtures, CRITERIA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown table {0}; known tables: {known}", known = TABLES.join(", "))]
    UnknownTable(String),
    #[error("unknown protocol {0}; known protocols: {known}", known = PROTOCOLS.join(", "))]
    UnknownProtocol(String),
    #[error("unknown export target {0}")]
    UnknownTarget(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const TABLES: [&str; 11] = [
    "smolin",
    "unlock",
    "prob1",
    "prob2",
    "sprob3",
    "dprob",
    "csec",
    "csec2",
    "appendixA-1",
    "appendixA-2",
    "appendixB",
];

pub const PROTOCOLS: [&str; 7] = [
    "unlock",
    "superactivate",
    "five-copy",
    "distribute-secret",
    "quantum-unlock",
    "quantum-superactivate",
    "ghz-extend",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Command {
    Tables,
    Measures,
    Protocol,
    Verify,
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(CliError::Config(format!("unknown format {s}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub target: Option<String>,
    pub format: Format,
    pub tolerance: f64,
    pub seed: u64,
    pub search_budget: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            target: None,
            format: Format::Text,
            tolerance: 1e-9,
            seed: 0,
            search_budget: 10_000,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.search_budget == 0 {
            return Err(CliError::Config("search budget must be positive".into()));
        }
        Ok(())
    }

    fn search(&self, strategy: Strategy) -> SearchConfig {
        SearchConfig {
            strategy,
            max_evaluations: self.search_budget,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }
}

/// Rendered command output and whether every check in it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub output: String,
    pub pass: bool,
}

impl Report {
    fn ok(output: String) -> Self {
        Report { output, pass: true }
    }
}

/// A reference table by name.
pub fn table(name: &str) -> Result<JointDistribution> {
    Ok(match name {
        "smolin" => smolin_table(),
        "unlock" => unlock_reference(),
        "prob1" => two_copy_reference(),
        "prob2" => after_first_teleport_reference(),
        "sprob3" => after_second_teleport_compact(),
        "dprob" => symmetrized_five(),
        "csec" => parity_reference(),
        "csec2" => corrected_reference(),
        "appendixA-1" => compact_table(1)?,
        "appendixA-2" => compact_table(2)?,
        "appendixB" => after_second_teleport_reference(),
        _ => return Err(CliError::UnknownTable(name.to_string())),
    })
}

fn render(d: &JointDistribution, format: Format) -> String {
    match format {
        Format::Text => d.to_text(),
        Format::Json => d.to_json(),
        Format::Csv => d.to_csv(),
    }
}

pub fn cmd_tables(name: &str, format: Format) -> Result<Report> {
    log::info!("rendering table {name}");
    Ok(Report::ok(render(&table(name)?, format)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutMeasures {
    pub cut: String,
    pub mutual_information: f64,
    pub conditional_on_eve: f64,
    pub conditional_exact_zero: bool,
    /// `None` when the exhaustive search does not fit the budget.
    pub search_upper: Option<f64>,
    pub search_exact_zero: bool,
    pub evaluations: u64,
}

fn cuts(honest: &[String]) -> Vec<(Vec<String>, Vec<String>)> {
    if honest.len() == 4 {
        let first = &honest[0];
        (1..4)
            .map(|k| {
                let x = vec![first.clone(), honest[k].clone()];
                let y = honest.iter().filter(|n| !x.contains(n)).cloned().collect();
                (x, y)
            })
            .collect()
    } else {
        let mut out = Vec::new();
        for i in 0..honest.len() {
            for j in i + 1..honest.len() {
                out.push((vec![honest[i].clone()], vec![honest[j].clone()]));
            }
        }
        out
    }
}

/// Entropies of every register and, for every cut of the honest
/// registers, `I(X:Y)`, `I(X:Y|Eve)` and the searched intrinsic bound.
pub fn cmd_measures(name: &str, cfg: &RunConfig) -> Result<Report> {
    let d = table(name)?;
    let honest: Vec<String> = d
        .registers()
        .iter()
        .filter(|r| !r.owner.visible_to_eve())
        .map(|r| r.name.clone())
        .collect();
    let eve: Vec<String> = d.eve_view().into_iter().map(String::from).collect();
    let mut entropies = Vec::new();
    for n in d.names() {
        entropies.push((n.to_string(), entropy(&d, &[n])?.value));
    }
    let mut rows = Vec::new();
    for (x, y) in cuts(&honest) {
        log::info!("measures for {x:?} : {y:?}");
        let mi = mutual_information(&d, &x, &y)?;
        let cmi = conditional_mutual_information(&d, &x, &y, &eve)?;
        let (search_upper, search_exact_zero, evaluations) =
            match intrinsic_information_search(&d, &x, &y, &eve, &cfg.search(Strategy::DeterministicExhaustive)) {
                Ok(r) => (Some(r.value.value), r.value.exact, r.evaluations),
                Err(MeasureError::SearchBudget { needed, budget }) => {
                    log::warn!("search skipped: needs {needed} evaluations, budget {budget}");
                    (None, false, 0)
                }
                Err(e) => return Err(e.into()),
            };
        rows.push(CutMeasures {
            cut: format!("{}:{}", x.join(""), y.join("")),
            mutual_information: mi.value,
            conditional_on_eve: cmi.value,
            conditional_exact_zero: cmi.exact,
            search_upper,
            search_exact_zero,
            evaluations,
        });
    }
    let output = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "table": name,
            "entropies": entropies.iter().map(|(n, h)| json!({"register": n, "entropy": h})).collect::<Vec<_>>(),
            "cuts": rows,
        }))
        .expect("serializable"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            for (n, h) in &entropies {
                let _ = writeln!(s, "H({n}) = {h:.9}");
            }
            for r in &rows {
                let search = match r.search_upper {
                    Some(_) if r.search_exact_zero => format!("search=0 exact ({} channels)", r.evaluations),
                    Some(v) => format!("search={v:.9} ({} channels)", r.evaluations),
                    None => "search skipped (budget)".to_string(),
                };
                let cmi = if r.conditional_exact_zero {
                    "0 exact".to_string()
                } else {
                    format!("{:.9}", r.conditional_on_eve)
                };
                let _ = writeln!(
                    s,
                    "cut {}: I(X:Y)={:.9} I(X:Y|Eve)={cmi} {search}",
                    r.cut, r.mutual_information
                );
            }
            s
        }
    };
    Ok(Report::ok(output))
}

/// `name PASS`, or `table-N MATCH` for table comparisons.
pub fn check_line(c: &Check) -> String {
    if c.detail == "MATCH" || c.detail == "MISMATCH" {
        format!("{} {}", c.name, c.detail)
    } else {
        format!("{} {}", c.name, pass_word(c.pass))
    }
}

pub(crate) fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fidelity_line(label: &str, fidelities: &[f64], tol: f64) -> Check {
    let good = fidelities.iter().filter(|f| (1.0 - **f).abs() <= tol).count();
    let min = fidelities.iter().copied().fold(f64::INFINITY, f64::min);
    Check::new(
        format!("{good}/{} {label} fidelity {min:.9}", fidelities.len()),
        good == fidelities.len(),
        "",
    )
}

struct ProtocolRun {
    checks: Vec<Check>,
    summary: Option<String>,
    transcript: Option<ProtocolTranscript>,
    extra: serde_json::Value,
}

fn run_protocol(name: &str, cfg: &RunConfig) -> Result<ProtocolRun> {
    let tol = cfg.tolerance;
    let mut summary = None;
    let mut extra = serde_json::Value::Null;
    let (checks, transcript) = match name {
        "unlock" => {
            let (j, t) = (PairTarget::new("B", "D")?, PairTarget::new("A", "C")?);
            let checks = unlock_checks(&smolin_table(), &j, &t)?;
            let (_, transcript) = unlock(&smolin_table(), &j, &t)?;
            (checks, Some(transcript))
        }
        "superactivate" => {
            let (_, t) = superactivate_pair()?;
            (superactivation_checks(&t)?, Some(t))
        }
        "five-copy" => (five_copy_checks(&symmetrized_five())?, None),
        "distribute-secret" => {
            let (_, t) = distribute_secret(&smolin_table(), &["A", "B", "C"], "D")?;
            let checks = secret_distribution_checks(&t)?;
            summary = Some(
                checks
                    .iter()
                    .filter(|c| c.name.starts_with("David") || c.name.starts_with("I(s"))
                    .map(check_line)
                    .collect::<Vec<_>>()
                    .join("; "),
            );
            (checks, Some(t))
        }
        "quantum-unlock" => {
            let branches = quantum_unlock_branches(("A", "B"), ("C", "D"), true)?;
            let f: Vec<f64> = branches.iter().map(|b| b.fidelity).collect();
            extra = json!(branches
                .iter()
                .map(|b| json!({"outcomes": b.outcomes, "probability": b.probability, "fidelity": b.fidelity}))
                .collect::<Vec<_>>());
            (vec![fidelity_line("branches", &f, tol)], None)
        }
        "quantum-superactivate" => {
            let r = quantum_superactivation()?;
            let f: Vec<f64> = r.branches.iter().map(|b| b.fidelity).collect();
            extra = json!({
                "checkpoint_distance": r.checkpoint_distance,
                "branches": r.branches.iter().map(|b| json!({"outcomes": b.outcomes, "probability": b.probability, "fidelity": b.fidelity})).collect::<Vec<_>>(),
                "key": r.key.to_json_value(),
            });
            let checks = vec![
                Check::new(
                    format!("checkpoint distance {:.3e}", r.checkpoint_distance),
                    r.checkpoint_distance <= tol,
                    "",
                ),
                fidelity_line("branches", &f, tol),
                Check::new("sbit(D,E) on measured key", r.key.is_sbit("D'", "E"), ""),
            ];
            (checks, None)
        }
        "ghz-extend" => {
            let r = ghz_extend()?;
            let f: Vec<f64> = r.branches.iter().map(|b| b.fidelity).collect();
            extra = json!({
                "branches": r.branches.iter().map(|b| json!({"outcomes": b.outcomes, "probability": b.probability, "fidelity": b.fidelity})).collect::<Vec<_>>(),
                "outcomes": r.outcomes.to_json_value(),
            });
            (vec![fidelity_line("branches", &f, tol)], None)
        }
        _ => return Err(CliError::UnknownProtocol(name.to_string())),
    };
    Ok(ProtocolRun {
        checks,
        summary,
        transcript,
        extra,
    })
}

/// Runs a driver and reports its checkpoints and final checks.
pub fn cmd_protocol(name: &str, cfg: &RunConfig) -> Result<Report> {
    log::info!("running protocol {name}");
    let run = run_protocol(name, cfg)?;
    let pass = run.checks.iter().all(|c| c.pass);
    let output = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "protocol": name,
            "pass": pass,
            "checks": run.checks,
            "transcript": run.transcript.as_ref().map(|t| t.to_json_struct()),
            "branches": run.extra,
        }))
        .expect("serializable"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &run.checks {
                w.serialize(c).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            if let Some(t) = &run.transcript {
                for (i, step) in t.steps().iter().enumerate() {
                    let ann = if step.announced.is_empty() {
                        String::new()
                    } else {
                        format!(" announces {}", step.announced.join(", "))
                    };
                    let _ = writeln!(s, "{:>3}. {}: {}{ann}", i + 1, step.actor, step.op);
                }
            }
            for c in &run.checks {
                let _ = writeln!(s, "{}", check_line(c));
            }
            if let Some(line) = &run.summary {
                let _ = writeln!(s, "{line}");
            }
            s
        }
    };
    Ok(Report { output, pass })
}

/// Table, transcript or state export in the module file formats.
pub fn export(target: &str, cfg: &RunConfig) -> Result<Report> {
    let output = if TABLES.contains(&target) {
        render(&table(target)?, if cfg.format == Format::Text { Format::Json } else { cfg.format })
    } else if target == "smolin-state" {
        smolin_state().to_json()
    } else if let Some(p) = target.strip_suffix("-transcript") {
        match run_protocol(p, cfg)?.transcript {
            Some(t) => t.to_json(),
            None => return Err(CliError::UnknownTarget(target.to_string())),
        }
    } else {
        return Err(CliError::UnknownTarget(target.to_string()));
    };
    Ok(Report::ok(output))
}

/// Dispatches on `cfg.command` and writes to `cfg.out` when set.
pub fn run(cfg: &RunConfig, fixtures: &Fixtures) -> Result<Report> {
    cfg.validate()?;
    let target = cfg.target.as_deref();
    let need = |what: &str| target.ok_or_else(|| CliError::Config(format!("missing {what} name")));
    let report = match cfg.command {
        Command::Tables => cmd_tables(need("table")?, cfg.format)?,
        Command::Measures => cmd_measures(target.unwrap_or("smolin"), cfg)?,
        Command::Protocol => cmd_protocol(need("protocol")?, cfg)?,
        Command::Verify => cmd_verify(cfg, fixtures),
        Command::Export => export(need("export target")?, cfg)?,
    };
    if let Some(path) = &cfg.out {
        std::fs::write(path, &report.output).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
