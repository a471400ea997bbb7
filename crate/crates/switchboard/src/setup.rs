//! Polarizer settings, fiber networks, and configuration validation.
//!
//! A run of the apparatus is described by one [`PolarizerSetting`] per photon
//! source plus a [`FiberNetwork`] of complex couplings from sources to
//! detectors.  A coupling of modulus 1 is a lossless fiber whose only effect
//! is its optical phase; an absent fiber is a coupling of exactly zero.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance on norms that must equal 1.
const UNIT_EPS: f64 = 1e-12;

/// Reduced phases within this distance of a full turn collapse to zero.
const PHASE_SNAP_EPS: f64 = 1e-12;

/// The fractional tail of a full turn left out by its double representation.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// A polarization device preparing `alpha |sigma+> + beta |sigma->`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizerSetting {
    alpha: C64,
    beta: C64,
}

impl PolarizerSetting {
    /// Wrap a pair of amplitudes, requiring unit norm within `1e-12`.
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > UNIT_EPS {
            return Err(Error::UnnormalizedSetting { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    /// Wrap a pair of amplitudes without the norm check.
    pub fn new_unchecked(alpha: C64, beta: C64) -> Self {
        Self { alpha, beta }
    }

    /// The setting `cos(theta) |sigma+> + e^{i phi} sin(theta) |sigma->`.
    ///
    /// Any angle pair yields a unit-norm setting.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            alpha: C64::new(theta.cos(), 0.0),
            beta: C64::from_polar(theta.sin(), phi),
        }
    }

    /// The pure sigma-plus setting.
    pub fn sigma_plus() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.0),
        }
    }

    /// The pure sigma-minus setting.
    pub fn sigma_minus() -> Self {
        Self {
            alpha: C64::new(0.0, 0.0),
            beta: C64::new(1.0, 0.0),
        }
    }

    /// Amplitude on sigma-plus.
    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    /// Amplitude on sigma-minus.
    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// Total squared norm of the two amplitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }
}

/// Complex couplings from each source to each detector, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberNetwork {
    n: usize,
    couplings: Vec<C64>,
}

impl FiberNetwork {
    /// Every source linked to every detector with coupling 1.
    pub fn fully_connected(n: usize) -> Self {
        Self {
            n,
            couplings: vec![C64::new(1.0, 0.0); n * n],
        }
    }

    /// No fibers at all; couplings are added afterwards.
    pub fn disconnected(n: usize) -> Self {
        Self {
            n,
            couplings: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    /// Wrap a row-major coupling matrix of dimension `n * n`.
    pub fn from_couplings(n: usize, couplings: Vec<C64>) -> Result<Self> {
        if couplings.len() != n * n {
            return Err(Error::AmplitudeCount {
                expected: n * n,
                got: couplings.len(),
            });
        }
        Ok(Self { n, couplings })
    }

    /// Number of sources, which equals the number of detectors.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coupling from a source to a detector, both 0-based.
    pub fn coupling(&self, source: usize, detector: usize) -> C64 {
        self.couplings[source * self.n + detector]
    }

    /// The full row-major coupling matrix.
    pub fn couplings(&self) -> &[C64] {
        &self.couplings
    }

    /// Overwrite one coupling.
    pub fn set_coupling(&mut self, source: usize, detector: usize, value: C64) {
        self.couplings[source * self.n + detector] = value;
    }

    /// Install a lossless fiber with the given optical phase.
    pub fn set_phase(&mut self, source: usize, detector: usize, phase: f64) {
        self.set_coupling(source, detector, C64::from_polar(1.0, phase));
    }

    /// Remove the fiber between a source and a detector.
    pub fn remove(&mut self, source: usize, detector: usize) {
        self.set_coupling(source, detector, C64::new(0.0, 0.0));
    }

    /// Whether any fiber joins the source to the detector.
    pub fn is_connected(&self, source: usize, detector: usize) -> bool {
        self.coupling(source, detector).norm_sqr() != 0.0
    }
}

/// One finding from configuration validation.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Violation {
    /// The configuration has no sources at all.
    #[error("configuration has no sources")]
    NoSources,

    /// A setting's two amplitudes are not unit-norm together.
    #[error("source {source_index}: setting norm-squared {norm_sqr} is not 1")]
    UnnormalizedSetting { source_index: usize, norm_sqr: f64 },

    /// The network dimension disagrees with the number of settings.
    #[error("{sources} settings but the network is {network}x{network}")]
    DimensionMismatch { sources: usize, network: usize },

    /// A coupling is present but not unit-modulus in lossless mode.
    #[error("link {source_index}->{detector}: modulus {modulus} is not 1")]
    NonUnimodularLink {
        source_index: usize,
        detector: usize,
        modulus: f64,
    },

    /// A non-unit coupling accepted because lossy mode is enabled.
    #[error("link {source_index}->{detector}: lossy modulus {modulus}")]
    LossyLink {
        source_index: usize,
        detector: usize,
        modulus: f64,
    },

    /// A source with no fiber to any detector.
    #[error("source {source_index} reaches no detector")]
    UnreachableSource { source_index: usize },
}

impl Violation {
    /// Warnings are reported but do not make a configuration invalid.
    pub fn is_warning(&self) -> bool {
        matches!(self, Violation::LossyLink { .. })
    }
}

/// Settings and network for one run of the apparatus.
#[derive(Clone, Debug, PartialEq)]
pub struct SetupConfig {
    /// One polarizer setting per source, source 0 first.
    pub settings: Vec<PolarizerSetting>,
    /// Couplings from sources to detectors.
    pub network: FiberNetwork,
    /// Accept couplings of non-unit modulus (attenuated or amplified fibers).
    pub lossy: bool,
}

impl SetupConfig {
    /// Bundle settings with a network; lossy mode starts disabled.
    pub fn new(settings: Vec<PolarizerSetting>, network: FiberNetwork) -> Self {
        Self {
            settings,
            network,
            lossy: false,
        }
    }

    /// Number of sources described by the settings list.
    pub fn n_sources(&self) -> usize {
        self.settings.len()
    }

    /// Every finding, warnings included, in a deterministic order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut findings = Vec::new();
        if self.settings.is_empty() {
            findings.push(Violation::NoSources);
        }
        for (source, setting) in self.settings.iter().enumerate() {
            let norm_sqr = setting.norm_sqr();
            if (norm_sqr - 1.0).abs() > UNIT_EPS {
                findings.push(Violation::UnnormalizedSetting {
                    source_index: source,
                    norm_sqr,
                });
            }
        }
        if self.settings.len() != self.network.n() {
            findings.push(Violation::DimensionMismatch {
                sources: self.settings.len(),
                network: self.network.n(),
            });
        }
        let n = self.network.n();
        for source in 0..n {
            for detector in 0..n {
                if !self.network.is_connected(source, detector) {
                    continue;
                }
                let modulus = self.network.coupling(source, detector).norm();
                if (modulus - 1.0).abs() > UNIT_EPS {
                    findings.push(if self.lossy {
                        Violation::LossyLink {
                            source_index: source,
                            detector,
                            modulus,
                        }
                    } else {
                        Violation::NonUnimodularLink {
                            source_index: source,
                            detector,
                            modulus,
                        }
                    });
                }
            }
        }
        for source in 0..n {
            if (0..n).all(|detector| !self.network.is_connected(source, detector)) {
                findings.push(Violation::UnreachableSource { source_index: source });
            }
        }
        findings
    }

    /// The findings that make the configuration invalid.
    pub fn errors(&self) -> Vec<Violation> {
        self.validate()
            .into_iter()
            .filter(|v| !v.is_warning())
            .collect()
    }

    /// Whether the configuration is accepted for simulation.
    pub fn is_valid(&self) -> bool {
        self.errors().is_empty()
    }
}

/// Optical phase `k * L` folded into `[0, 2*pi)`.
///
/// The product is split into exact high and low parts and the fold subtracts
/// an extended-precision full turn, so the result stays accurate even after
/// millions of turns instead of inheriting the full rounding error of `k * L`.
/// A result within `1e-12` of a full turn collapses to zero, since both ends
/// of the interval represent the same phase.
pub fn phase_from_length(wavenumber: f64, length: f64) -> Result<f64> {
    if !wavenumber.is_finite() || wavenumber <= 0.0 {
        return Err(Error::NonPositiveWavenumber { value: wavenumber });
    }
    if !length.is_finite() || length < 0.0 {
        return Err(Error::NegativeLength { value: length });
    }
    let hi = wavenumber * length;
    if !hi.is_finite() {
        return Err(Error::PhaseOverflow { wavenumber, length });
    }
    let lo = wavenumber.mul_add(length, -hi);
    let turns = (hi / TAU).round();
    let mut reduced = (-turns).mul_add(TAU, hi);
    reduced = (-turns).mul_add(TAU_LO, reduced);
    reduced += lo;
    let mut phase = reduced % TAU;
    if phase < 0.0 {
        phase += TAU;
    }
    if TAU - phase < PHASE_SNAP_EPS {
        phase = 0.0;
    }
    Ok(phase + 0.0)
}
