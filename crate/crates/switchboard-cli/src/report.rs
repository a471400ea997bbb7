//! Machine-readable run reports.
//!
//! Every command prints exactly one JSON report on success. Field order is
//! fixed by declaration order and all numbers serialize losslessly, so a
//! rerun with identical inputs produces byte-identical output.

use std::io::{self, ErrorKind, Write};
use std::path::Path;
use std::fs;

use serde::Serialize;
use switchboard::DickeExpansion;

use crate::Fail;

/// A state's expansion over the symmetric basis, as re/im coefficient pairs
/// plus the norm of whatever part of the state the basis cannot reach.
#[derive(Serialize)]
pub struct DickeReport {
    pub coefficients: Vec<[f64; 2]>,
    pub residual_norm: f64,
}

impl From<&DickeExpansion> for DickeReport {
    fn from(expansion: &DickeExpansion) -> Self {
        DickeReport {
            coefficients: expansion
                .coefficients
                .iter()
                .map(|c| [c.re, c.im])
                .collect(),
            residual_norm: expansion.residual_norm,
        }
    }
}

/// The result of one command invocation. Fields irrelevant to the command
/// that ran are omitted from the output.
#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub input_digest: String,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Designed polarizer settings as [[alpha_re, alpha_im], [beta_re, beta_im]].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<Vec<[[f64; 2]; 2]>>,
    /// Normalized heralded state, one dump line per nonzero amplitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub destructive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dicke: Option<DickeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, input_digest: String) -> Self {
        Report {
            command,
            input_digest,
            violations: Vec::new(),
            n_modes: None,
            path: None,
            settings: None,
            state: None,
            success_weight: None,
            destructive: None,
            dicke: None,
            fidelity: None,
            max_deviation: None,
            trials: None,
            seed: None,
            cap: None,
            config_path: None,
        }
    }
}

/// Print the report to stdout and, when asked, mirror it to a file. A
/// reader that hangs up early (a closed pipe) ends the print quietly.
pub fn emit(report: &Report, copy: Option<&Path>) -> Result<(), Fail> {
    let text = serde_json::to_string_pretty(report).expect("reports always serialize");
    if let Err(err) = writeln!(io::stdout(), "{text}") {
        if err.kind() != ErrorKind::BrokenPipe {
            return Err(Fail::Input(format!("cannot write to stdout: {err}")));
        }
    }
    if let Some(path) = copy {
        fs::write(path, format!("{text}\n"))
            .map_err(|err| Fail::Input(format!("cannot write {}: {err}", path.display())))?;
    }
    Ok(())
}
