//! Exact simulation and inverse design of post-selected multiphoton
//! polarization states.
//!
//! The apparatus: `n` single-photon sources, each behind a polarization
//! device preparing `alpha |sigma+> + beta |sigma->`, feed `n` detectors
//! through a network of optical fibers whose couplings carry phases.  Runs
//! are kept only when every detector fires once; the surviving amplitudes
//! define an `n`-photon polarization state that depends on nothing but the
//! settings and the wiring.
//!
//! The crate computes that state exactly and solves the inverse problem:
//!
//! - [`state`] — dense state vectors over the detector register.
//! - [`setup`] — polarizer settings, fiber networks, validation.
//! - [`emission`] — the sequential simulation engine and an independent
//!   factorial-cost check.
//! - [`dicke`] — collective-excitation states and expansions over them.
//! - [`design`] — settings realizing any symmetric target, via polynomial
//!   roots.
//! - [`angmom`] — sequentially coupled spin basis states and the wiring
//!   protocol that produces each of them.
//! - [`sample`] — seeded random inputs for checks.
//!
//! Designing and verifying a three-photon GHZ state:
//!
//! ```
//! use num_complex::Complex64 as C64;
//! use switchboard::{design_symmetric, dicke_superposition, fidelity, generate_state};
//!
//! let half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
//! let zero = C64::new(0.0, 0.0);
//! let ghz = [half, zero, zero, half];
//!
//! let config = design_symmetric(&ghz, 3)?;
//! let raw = generate_state(&config)?;
//! let target = dicke_superposition(3, &ghz)?;
//!
//! assert!(fidelity(raw.state(), &target)? > 1.0 - 1e-10);
//! assert!(raw.success_weight() > 0.0);
//! # Ok::<(), switchboard::Error>(())
//! ```

pub mod angmom;
pub mod design;
pub mod dicke;
pub mod emission;
pub mod error;
pub mod sample;
pub mod setup;
pub mod state;

pub use angmom::{angmom_basis, compile_protocol, parse_path_literal, reference_state, BASIS_CAP,
    CouplingPath, PathViolation};
pub use design::{build_polynomial, design_symmetric, find_roots, settings_from_roots,
    DesignPolynomial};
pub use dicke::{decompose, dicke_coefficients, dicke_config, dicke_state, dicke_superposition,
    DickeExpansion};
pub use emission::{apply_emission, generate_state, permutation_oracle, permutation_oracle_capped,
    PartialState, RawState, ORACLE_CAP};
pub use error::{Error, Result};
pub use sample::{random_config, random_setting, random_target, seeded_rng};
pub use setup::{phase_from_length, FiberNetwork, PolarizerSetting, SetupConfig, Violation};
pub use state::{basis_index, fidelity, index_polarizations, inner_product, Polarization,
    StateVector, MODE_CAP};
