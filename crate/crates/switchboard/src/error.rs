//! Error and result types shared across the crate.

use thiserror::Error;

use crate::angmom::PathViolation;
use crate::setup::Violation;

/// Convenience alias for fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Any failure the library reports.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    /// A register must hold at least one detector mode.
    #[error("register needs at least one mode")]
    NoModes,

    /// The dense representation refuses registers past the cap.
    #[error("register of {n} modes exceeds the cap of {cap}")]
    TooManyModes { n: usize, cap: usize },

    /// An amplitude vector had the wrong length for its register.
    #[error("expected {expected} amplitudes, got {got}")]
    AmplitudeCount { expected: usize, got: usize },

    /// Two states that should share a register span different mode counts.
    #[error("operands span {left} and {right} modes")]
    DimensionMismatch { left: usize, right: usize },

    /// The operation is undefined on a zero vector.
    #[error("state has zero norm")]
    ZeroNorm,

    /// A basis index fell outside the register's dimension.
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// A mode label fell outside the register.
    #[error("mode {mode} out of range for a register of {n}")]
    ModeOutOfRange { mode: usize, n: usize },

    /// A polarizer setting was not unit-norm.
    #[error("setting norm-squared {norm_sqr} deviates from 1 beyond tolerance")]
    UnnormalizedSetting { norm_sqr: f64 },

    /// Wavenumbers must be positive and finite.
    #[error("wavenumber {value} must be positive and finite")]
    NonPositiveWavenumber { value: f64 },

    /// Fiber lengths must be non-negative and finite.
    #[error("fiber length {value} must be non-negative and finite")]
    NegativeLength { value: f64 },

    /// The optical path k*L was too large to reduce.
    #[error("optical phase overflows for wavenumber {wavenumber} and length {length}")]
    PhaseOverflow { wavenumber: f64, length: f64 },

    /// A configuration failed validation; the offending findings are listed.
    #[error("invalid setup: {}", join(.violations))]
    InvalidSetup { violations: Vec<Violation> },

    /// A source label fell outside the configuration.
    #[error("source {source_index} out of range for {n} sources")]
    SourceOutOfRange { source_index: usize, n: usize },

    /// Each source emits exactly once per run.
    #[error("source {source_index} already emitted")]
    SourceAlreadyApplied { source_index: usize },

    /// The factorial-sum checker refuses registers past its cap.
    #[error("factorial-sum check over {n} sources exceeds the cap of {cap}")]
    OracleTooLarge { n: usize, cap: usize },

    /// A collective excitation number larger than the register.
    #[error("excitation {excitation} out of range for {n} modes")]
    ExcitationOutOfRange { excitation: usize, n: usize },

    /// At least one polarizer setting is required.
    #[error("no polarizer settings given")]
    EmptySettings,

    /// A coefficient list had the wrong length for its register.
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCountMismatch { expected: usize, got: usize },

    /// Design targets must have at least one nonzero coefficient.
    #[error("target coefficients are empty or all zero")]
    ZeroTarget,

    /// More roots than sources cannot be realized.
    #[error("{roots} roots cannot be realized with {n_sources} sources")]
    TooManyRoots { roots: usize, n_sources: usize },

    /// A coupling path failed validation; the offending findings are listed.
    #[error("invalid coupling path: {}", join(.violations))]
    InvalidPath { violations: Vec<PathViolation> },

    /// The coupled-basis builder refuses registers past its cap.
    #[error("coupled basis of {n} modes exceeds the cap of {cap}")]
    BasisTooLarge { n: usize, cap: usize },

    /// A coupling-path literal could not be parsed.
    #[error("bad coupling-path literal: {message}")]
    PathParse { message: String },

    /// A state dump could not be parsed.
    #[error("bad state dump at line {line}: {message}")]
    DumpParse { line: usize, message: String },
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
