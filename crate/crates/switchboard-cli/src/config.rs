//! Text formats the tool reads and writes: the TOML setup file describing
//! sources and fibers, and the target-state specifiers given on the command
//! line.
//!
//! Source and detector indices in setup files are 1-based. A fiber absent
//! from the `links` list is a removed fiber; a link's optical phase is given
//! either directly (`phase`) or as a physical `length` together with the
//! light's `wavenumber`. A `modulus` other than one describes an attenuating
//! link and only passes validation when the file sets `lossy = true`.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use switchboard::{
    dicke_state, dicke_superposition, parse_path_literal, phase_from_length, reference_state,
    FiberNetwork, PolarizerSetting, SetupConfig, StateVector,
};

use crate::{fail_from_error, Fail};

const TAU: f64 = std::f64::consts::TAU;
const LOSSLESS_EPS: f64 = 1e-12;

/// One polarizer setting: explicit Jones amplitudes or a polar-angle pair.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SettingSpec {
    Amplitudes([f64; 4]),
    Angles { theta: f64, phi: f64 },
}

/// One fiber link between a source and a detector.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub source: usize,
    pub detector: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<f64>,
}

/// The full on-disk setup description.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_sources: usize,
    #[serde(default)]
    pub lossy: bool,
    pub settings: Vec<SettingSpec>,
    #[serde(default)]
    pub links: Vec<LinkSpec>,
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Read and decode a setup file. Returns the setup together with the digest
/// of the file's bytes. Malformed text or inconsistent link entries fail
/// here; physical validity is checked later by the setup itself.
pub fn read_config(path: &Path) -> Result<(SetupConfig, String), Fail> {
    let bytes = fs::read(path)
        .map_err(|err| Fail::Input(format!("cannot read {}: {err}", path.display())))?;
    let digest = digest_bytes(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Fail::Input(format!("{} is not UTF-8 text", path.display())))?;
    let file: ConfigFile = toml::from_str(&text)
        .map_err(|err| Fail::Input(format!("cannot parse {}: {err}", path.display())))?;
    Ok((decode_config(&file)?, digest))
}

fn decode_config(file: &ConfigFile) -> Result<SetupConfig, Fail> {
    let settings = file
        .settings
        .iter()
        .map(|spec| match *spec {
            SettingSpec::Amplitudes([are, aim, bre, bim]) => {
                PolarizerSetting::new_unchecked(C64::new(are, aim), C64::new(bre, bim))
            }
            SettingSpec::Angles { theta, phi } => PolarizerSetting::from_angles(theta, phi),
        })
        .collect();

    let n = file.n_sources;
    let mut network = FiberNetwork::disconnected(n);
    let mut seen = vec![false; n * n];
    for (index, link) in file.links.iter().enumerate() {
        let describe = |what: &str| format!("links[{index}]: {what}");
        if link.source == 0 || link.source > n {
            return Err(Fail::Input(describe(&format!(
                "source {} outside 1..={n}",
                link.source
            ))));
        }
        if link.detector == 0 || link.detector > n {
            return Err(Fail::Input(describe(&format!(
                "detector {} outside 1..={n}",
                link.detector
            ))));
        }
        let (source, detector) = (link.source - 1, link.detector - 1);
        if seen[source * n + detector] {
            return Err(Fail::Input(describe("duplicate source/detector pair")));
        }
        seen[source * n + detector] = true;

        let phase = match (link.phase, link.length, link.wavenumber) {
            (Some(phase), None, None) => phase,
            (None, Some(length), Some(wavenumber)) => {
                phase_from_length(wavenumber, length).map_err(|err| {
                    Fail::Input(describe(&err.to_string()))
                })?
            }
            (Some(_), _, _) => {
                return Err(Fail::Input(describe(
                    "give either phase or length + wavenumber, not both",
                )))
            }
            _ => {
                return Err(Fail::Input(describe(
                    "give either phase or length + wavenumber",
                )))
            }
        };
        let modulus = link.modulus.unwrap_or(1.0);
        if !(modulus.is_finite() && modulus > 0.0) {
            return Err(Fail::Input(describe("modulus must be positive and finite")));
        }
        network.set_coupling(source, detector, C64::from_polar(modulus, phase));
    }

    let mut config = SetupConfig::new(settings, network);
    config.lossy = file.lossy;
    Ok(config)
}

/// Encode a setup as TOML text that `read_config` maps back to the same
/// settings and couplings.
pub fn render_config(config: &SetupConfig) -> String {
    let settings = config
        .settings
        .iter()
        .map(|s| SettingSpec::Amplitudes([s.alpha().re, s.alpha().im, s.beta().re, s.beta().im]))
        .collect();

    let n = config.network.n();
    let mut links = Vec::new();
    for source in 0..n {
        for detector in 0..n {
            let coupling = config.network.coupling(source, detector);
            if coupling.norm_sqr() == 0.0 {
                continue;
            }
            let modulus = coupling.norm();
            links.push(LinkSpec {
                source: source + 1,
                detector: detector + 1,
                phase: Some(coupling.arg().rem_euclid(TAU)),
                length: None,
                wavenumber: None,
                modulus: ((modulus - 1.0).abs() > LOSSLESS_EPS).then_some(modulus),
            });
        }
    }

    let file = ConfigFile {
        n_sources: config.n_sources(),
        lossy: config.lossy,
        settings,
        links,
    };
    toml::to_string(&file).expect("setup files always serialize")
}

pub fn write_config(config: &SetupConfig, path: &Path) -> Result<(), Fail> {
    fs::write(path, render_config(config))
        .map_err(|err| Fail::Input(format!("cannot write {}: {err}", path.display())))
}

/// Decode a target-state specifier. Returns the target together with a
/// digest of what defined it: the referenced file's bytes for `dump:`
/// targets, the specifier text itself otherwise.
///
/// Forms: `dicke:K` (needs `--n`), `d:c0,c1,...` (symmetric-basis
/// coefficients), `dump:FILE` (amplitude dump), `path:LITERAL` (coupled-spin
/// eigenstate).
pub fn parse_target(spec: &str, n: Option<usize>) -> Result<(StateVector, String), Fail> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Fail::Input(format!("target {spec:?} has no kind prefix")))?;
    match kind {
        "dicke" => {
            let excitation: usize = rest
                .parse()
                .map_err(|_| Fail::Input(format!("bad excitation count {rest:?}")))?;
            let n = n.ok_or_else(|| Fail::Input("dicke targets need --n".into()))?;
            let state = dicke_state(n, excitation).map_err(fail_from_error)?;
            Ok((state, digest_bytes(spec.as_bytes())))
        }
        "d" => {
            let coefficients = parse_coefficients(rest)?;
            let modes = coefficients.len() - 1;
            check_mode_count(n, modes)?;
            let state = dicke_superposition(modes, &coefficients).map_err(fail_from_error)?;
            Ok((state, digest_bytes(spec.as_bytes())))
        }
        "dump" => {
            let bytes = fs::read(rest)
                .map_err(|err| Fail::Input(format!("cannot read {rest}: {err}")))?;
            let digest = digest_bytes(&bytes);
            let text = String::from_utf8(bytes)
                .map_err(|_| Fail::Input(format!("{rest} is not UTF-8 text")))?;
            let state = StateVector::from_dump(&text).map_err(fail_from_error)?;
            check_mode_count(n, state.n_modes())?;
            Ok((state, digest))
        }
        "path" => {
            let path = parse_path_literal(rest).map_err(fail_from_error)?;
            check_mode_count(n, path.n())?;
            let state = reference_state(&path).map_err(fail_from_error)?;
            Ok((state, digest_bytes(spec.as_bytes())))
        }
        other => Err(Fail::Input(format!(
            "unknown target kind {other:?}; use dicke:, d:, dump:, or path:"
        ))),
    }
}

/// Parse a comma-separated complex coefficient list such as
/// `0.7071,0,0,0.7071` or `0.5+0.5i,0,1i`.
pub fn parse_coefficients(text: &str) -> Result<Vec<C64>, Fail> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens.is_empty() || tokens == [""] {
        return Err(Fail::Input("empty coefficient list".into()));
    }
    tokens
        .iter()
        .map(|token| {
            C64::from_str(token)
                .map_err(|err| Fail::Input(format!("bad coefficient {token:?}: {err}")))
        })
        .collect()
}

fn check_mode_count(given: Option<usize>, derived: usize) -> Result<(), Fail> {
    match given {
        Some(n) if n != derived => Err(Fail::Input(format!(
            "--n {n} disagrees with the target's {derived} modes"
        ))),
        _ => Ok(()),
    }
}
