//! CSV artifacts. Every file opens with `#` metadata lines (tool version,
//! config hash, seed, constants) followed by a header row.
//!
//! Columns:
//! - `reports.csv`: `check_name,verdict,hypothesis_satisfied,conclusion_satisfied,refinement_stability,measured_constants`
//!   where `measured_constants` is `name=value` pairs joined by `;`.
//! - `constants.csv`: `ledger,constant,value`.
//! - `summary.csv`: `stage,key,value`.
//! - `trace.csv`: `n,rho,omega_bound,measured_osc,radius,length`.

use std::fmt::Write as _;

use holderlab::checks::CheckReport;
use holderlab::oscillation::OscillationTrace;
use sha2::{Digest, Sha256};

use crate::config::{emit_config, RunConfig};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Hex SHA-256 of the canonical config text, without `output_dir` so that
/// the same experiment hashes alike wherever it is written.
pub fn config_hash(cfg: &RunConfig) -> String {
    let text: String = emit_config(cfg)
        .lines()
        .filter(|l| !l.starts_with("output_dir="))
        .flat_map(|l| [l, "\n"])
        .collect();
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtifactHeader {
    pub config_hash: String,
    pub seed: u64,
    pub constants: Vec<(String, f64)>,
}

impl ArtifactHeader {
    pub fn new(cfg: &RunConfig, constants: Vec<(String, f64)>) -> Self {
        ArtifactHeader {
            config_hash: config_hash(cfg),
            seed: cfg.seed,
            constants,
        }
    }

    fn render(&self) -> String {
        let consts = self
            .constants
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "# tool={TOOL_VERSION}\n# config_sha256={}\n# seed={}\n# constants={consts}\n",
            self.config_hash, self.seed
        )
    }
}

fn render_table(header: &ArtifactHeader, columns: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = header.render().into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    out.extend(w.into_inner().expect("in-memory flush"));
    out
}

pub fn render_reports(header: &ArtifactHeader, reports: &[CheckReport]) -> Vec<u8> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.check_name.clone(),
                r.verdict.as_str().to_string(),
                r.hypothesis_satisfied.to_string(),
                r.conclusion_satisfied.to_string(),
                r.refinement_stability.map(|v| v.to_string()).unwrap_or_default(),
                r.measured_constants
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            ]
        })
        .collect();
    render_table(
        header,
        &[
            "check_name",
            "verdict",
            "hypothesis_satisfied",
            "conclusion_satisfied",
            "refinement_stability",
            "measured_constants",
        ],
        &rows,
    )
}

pub fn render_constants(header: &ArtifactHeader, rows: &[(String, String, f64)]) -> Vec<u8> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(ledger, k, v)| vec![ledger.clone(), k.clone(), v.to_string()])
        .collect();
    render_table(header, &["ledger", "constant", "value"], &rows)
}

pub fn render_summary(header: &ArtifactHeader, rows: &[(String, String, String)]) -> Vec<u8> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(a, b, c)| vec![a.clone(), b.clone(), c.clone()])
        .collect();
    render_table(header, &["stage", "key", "value"], &rows)
}

pub fn render_trace(header: &ArtifactHeader, trace: &OscillationTrace) -> Vec<u8> {
    let rows: Vec<Vec<String>> = (0..trace.len())
        .map(|n| {
            vec![
                n.to_string(),
                trace.rho_seq[n].to_string(),
                trace.omega_seq[n].to_string(),
                trace.measured_osc_seq[n].to_string(),
                trace.cylinders[n].radius.to_string(),
                trace.cylinders[n].length.to_string(),
            ]
        })
        .collect();
    render_table(
        header,
        &["n", "rho", "omega_bound", "measured_osc", "radius", "length"],
        &rows,
    )
}
