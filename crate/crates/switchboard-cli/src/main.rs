//! Command-line front end for the simulator and the two designers.
//!
//! Five commands: `simulate` computes the heralded state of a setup file,
//! `design-sym` and `design-angmom` synthesize setups for symmetric targets
//! and coupled-spin eigenstates, `decompose` expands a state over the
//! symmetric basis, and `oracle-check` cross-validates the two state
//! engines. Every successful run prints one JSON report; reruns with
//! identical inputs print identical bytes.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 a setup or
//! target that fails validation, 3 a numerical cross-check failure.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use switchboard::{
    compile_protocol, decompose, design_symmetric, dicke_superposition, fidelity,
    generate_state, parse_path_literal, permutation_oracle_capped, random_config,
    reference_state, seeded_rng, Error, PolarizerSetting, RawState, SetupConfig, StateVector,
};

use config::{digest_bytes, parse_coefficients, parse_target, read_config, write_config};
use report::{emit, DickeReport, Report};

/// How far the two engines may drift apart before `oracle-check` fails.
const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "switchboard",
    version,
    about = "Simulate and inverse-design post-selected multiphoton polarization states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the heralded state of a source/fiber setup.
    Simulate {
        /// Setup description file.
        #[arg(long)]
        config: PathBuf,
        /// Target to score the heralded state against
        /// (dicke:K, d:c0,c1,..., dump:FILE, or path:LITERAL).
        #[arg(long)]
        target: Option<String>,
        /// Accept attenuating links.
        #[arg(long)]
        lossy: bool,
        /// Mirror the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find polarizer settings whose heralded state has the given
    /// symmetric-basis coefficients.
    DesignSym {
        /// Number of sources (and detectors).
        #[arg(long)]
        n: usize,
        /// Comma-separated coefficients c0,...,cN (complex entries allowed).
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        /// Write the designed setup file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a coupled-spin path literal such as 1/2,1;m=0 into a setup.
    DesignAngmom {
        /// Intermediate spins joined by commas, then ;m=PROJECTION,
        /// halves written as 1/2, 3/2, ...
        path: String,
        /// Write the compiled setup file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a state over the symmetric (Dicke) basis.
    Decompose {
        /// Setup file to simulate first.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Target specifier to expand directly.
        #[arg(long)]
        target: Option<String>,
        /// Mode count for targets that need one (dicke:K).
        #[arg(long)]
        n: Option<usize>,
        /// Mirror the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the sequential engine against the permutation sum.
    OracleCheck {
        /// Check this setup file instead of random draws.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Fix the register size for random draws.
        #[arg(long)]
        n: Option<usize>,
        /// Number of random draws.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Seed for the random draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest register the permutation sum will expand.
        #[arg(long, default_value_t = switchboard::ORACLE_CAP)]
        cap: usize,
        /// Mirror the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run, bucketed by exit code.
#[derive(Debug)]
pub enum Fail {
    /// Unreadable files, malformed text, inconsistent arguments — exit 1.
    Input(String),
    /// Well-formed input describing an invalid setup, path, or target —
    /// exit 2, with the individual findings.
    Validation(String, Vec<String>),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Input(_) => 1,
            Fail::Validation(..) => 2,
        }
    }
}

/// Map a library error onto an exit bucket: text that failed to parse is an
/// input problem, everything else is a validation finding.
pub fn fail_from_error(err: Error) -> Fail {
    match err {
        Error::PathParse { .. } | Error::DumpParse { .. } => Fail::Input(err.to_string()),
        Error::InvalidSetup { ref violations } => Fail::Validation(
            "invalid setup".into(),
            violations.iter().map(ToString::to_string).collect(),
        ),
        Error::InvalidPath { ref violations } => Fail::Validation(
            "invalid coupling path".into(),
            violations.iter().map(ToString::to_string).collect(),
        ),
        other => Fail::Validation(other.to_string(), Vec::new()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            err.print().expect("diagnostics print");
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Simulate {
            config,
            target,
            lossy,
            out,
        } => cmd_simulate(&config, target.as_deref(), lossy, out.as_deref()),
        Command::DesignSym { n, d, out } => cmd_design_sym(n, &d, out.as_deref()),
        Command::DesignAngmom { path, out } => cmd_design_angmom(&path, out.as_deref()),
        Command::Decompose {
            config,
            target,
            n,
            out,
        } => cmd_decompose(config.as_deref(), target.as_deref(), n, out.as_deref()),
        Command::OracleCheck {
            config,
            n,
            trials,
            seed,
            cap,
            out,
        } => cmd_oracle_check(config.as_deref(), n, trials, seed, cap, out.as_deref()),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(fail) => {
            match &fail {
                Fail::Input(message) => eprintln!("error: {message}"),
                Fail::Validation(message, violations) => {
                    eprintln!("error: {message}");
                    for violation in violations {
                        eprintln!("  - {violation}");
                    }
                }
            }
            ExitCode::from(fail.code())
        }
    }
}

fn cmd_simulate(
    config_path: &Path,
    target: Option<&str>,
    lossy: bool,
    out: Option<&Path>,
) -> Result<u8, Fail> {
    let (mut setup, digest) = read_config(config_path)?;
    if lossy {
        setup.lossy = true;
    }
    let mut report = Report::new("simulate", digest);
    let raw = run_setup(&setup, &mut report)?;

    report.n_modes = Some(setup.n_sources());
    report.success_weight = Some(raw.success_weight());
    report.destructive = Some(raw.is_destructive());
    if !raw.is_destructive() {
        let state = raw.normalized().map_err(fail_from_error)?;
        report.state = Some(dump_lines(&state));
        report.dicke = Some(DickeReport::from(&decompose(&state)));
        if let Some(spec) = target {
            let (wanted, _) = parse_target(spec, Some(setup.n_sources()))?;
            report.fidelity = Some(fidelity(&state, &wanted).map_err(fail_from_error)?);
        }
    }

    emit(&report, out)?;
    Ok(0)
}

fn cmd_design_sym(n: usize, d: &str, out: Option<&Path>) -> Result<u8, Fail> {
    let digest_text = format!("design-sym n={n} d={d}");
    let mut report = Report::new("design-sym", digest_bytes(digest_text.as_bytes()));

    let coefficients = parse_coefficients(d)?;
    let norm = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 && (norm - 1.0).abs() > 1e-9 {
        eprintln!(
            "warning: target coefficients have norm {norm:.6}; \
             designing for the normalized target"
        );
    }

    let setup = design_symmetric(&coefficients, n).map_err(fail_from_error)?;
    let raw = generate_state(&setup).map_err(fail_from_error)?;
    let wanted = dicke_superposition(n, &coefficients).map_err(fail_from_error)?;

    report.n_modes = Some(n);
    report.settings = Some(setting_pairs(&setup.settings));
    report.success_weight = Some(raw.success_weight());
    report.fidelity = Some(fidelity(raw.state(), &wanted).map_err(fail_from_error)?);
    if let Some(path) = out {
        write_config(&setup, path)?;
        report.config_path = Some(path.display().to_string());
    }

    emit(&report, None)?;
    Ok(0)
}

fn cmd_design_angmom(literal: &str, out: Option<&Path>) -> Result<u8, Fail> {
    let mut report = Report::new("design-angmom", digest_bytes(literal.as_bytes()));

    let path = parse_path_literal(literal).map_err(fail_from_error)?;
    let setup = compile_protocol(&path).map_err(fail_from_error)?;
    let wanted = reference_state(&path).map_err(fail_from_error)?;
    let raw = generate_state(&setup).map_err(fail_from_error)?;

    report.path = Some(path.to_string());
    report.n_modes = Some(path.n());
    report.settings = Some(setting_pairs(&setup.settings));
    report.success_weight = Some(raw.success_weight());
    report.fidelity = Some(fidelity(raw.state(), &wanted).map_err(fail_from_error)?);
    if let Some(out_path) = out {
        write_config(&setup, out_path)?;
        report.config_path = Some(out_path.display().to_string());
    }

    emit(&report, None)?;
    Ok(0)
}

fn cmd_decompose(
    config_path: Option<&Path>,
    target: Option<&str>,
    n: Option<usize>,
    out: Option<&Path>,
) -> Result<u8, Fail> {
    let report = match (config_path, target) {
        (Some(path), None) => {
            let (setup, digest) = read_config(path)?;
            let mut report = Report::new("decompose", digest);
            let raw = run_setup(&setup, &mut report)?;
            report.n_modes = Some(setup.n_sources());
            report.success_weight = Some(raw.success_weight());
            report.destructive = Some(raw.is_destructive());
            if !raw.is_destructive() {
                let state = raw.normalized().map_err(fail_from_error)?;
                report.state = Some(dump_lines(&state));
                report.dicke = Some(DickeReport::from(&decompose(&state)));
            }
            report
        }
        (None, Some(spec)) => {
            let (target, digest) = parse_target(spec, n)?;
            let mut report = Report::new("decompose", digest);
            let state = target.normalized().map_err(fail_from_error)?;
            report.n_modes = Some(state.n_modes());
            report.state = Some(dump_lines(&state));
            report.dicke = Some(DickeReport::from(&decompose(&state)));
            report
        }
        _ => return Err(Fail::Input("give exactly one of --config and --target".into())),
    };

    emit(&report, out)?;
    Ok(0)
}

fn cmd_oracle_check(
    config_path: Option<&Path>,
    n: Option<usize>,
    trials: usize,
    seed: u64,
    cap: usize,
    out: Option<&Path>,
) -> Result<u8, Fail> {
    let mut report;
    let max_deviation;

    if let Some(path) = config_path {
        let (setup, digest) = read_config(path)?;
        report = Report::new("oracle-check", digest);
        let fast = run_setup(&setup, &mut report)?;
        let slow = permutation_oracle_capped(&setup, cap).map_err(fail_from_error)?;
        max_deviation = amplitude_gap(fast.state(), slow.state());
        report.n_modes = Some(setup.n_sources());
    } else {
        let digest_text = match n {
            Some(n) => format!("oracle-check n={n} trials={trials} seed={seed} cap={cap}"),
            None => format!("oracle-check trials={trials} seed={seed} cap={cap}"),
        };
        report = Report::new("oracle-check", digest_bytes(digest_text.as_bytes()));
        let mut rng = seeded_rng(seed);
        let mut worst = 0.0_f64;
        for trial in 0..trials {
            let modes = n.unwrap_or(2 + trial % 4);
            let setup = random_config(modes, 0.2, &mut rng);
            let fast = generate_state(&setup).map_err(fail_from_error)?;
            let slow = permutation_oracle_capped(&setup, cap).map_err(fail_from_error)?;
            worst = worst.max(amplitude_gap(fast.state(), slow.state()));
        }
        max_deviation = worst;
        report.n_modes = n;
        report.trials = Some(trials);
        report.seed = Some(seed);
    }

    report.cap = Some(cap);
    report.max_deviation = Some(max_deviation);
    emit(&report, out)?;

    if max_deviation <= ORACLE_TOLERANCE {
        Ok(0)
    } else {
        eprintln!(
            "error: engines disagree by {max_deviation:.3e} (tolerance {ORACLE_TOLERANCE:.0e})"
        );
        Ok(3)
    }
}

/// Validate a setup, record its findings on the report, and run the
/// emission engine. Error-severity findings abort with the validation
/// bucket; warnings stay on the report.
fn run_setup(setup: &SetupConfig, report: &mut Report) -> Result<RawState, Fail> {
    let findings = setup.validate();
    report.violations = findings.iter().map(ToString::to_string).collect();
    let errors = setup.errors();
    if !errors.is_empty() {
        return Err(Fail::Validation(
            "invalid setup".into(),
            errors.iter().map(ToString::to_string).collect(),
        ));
    }
    generate_state(setup).map_err(fail_from_error)
}

fn dump_lines(state: &StateVector) -> Vec<String> {
    state.dump().lines().map(String::from).collect()
}

fn setting_pairs(settings: &[PolarizerSetting]) -> Vec<[[f64; 2]; 2]> {
    settings
        .iter()
        .map(|s| {
            [
                [s.alpha().re, s.alpha().im],
                [s.beta().re, s.beta().im],
            ]
        })
        .collect()
}

fn amplitude_gap(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
