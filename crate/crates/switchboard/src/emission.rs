//! Sequential photon emission with single-occupancy bookkeeping and
//! full-coincidence post-selection.
//!
//! Each source emits exactly one photon, spread coherently over every fiber
//! leaving it.  Emission only populates detectors that are still empty:
//! branches that would put two photons on one detector carry no weight in the
//! post-selected outcome, so they are excluded as the state is built rather
//! than projected away at the end.  After every source has emitted, the
//! surviving terms all occupy every detector once and form the post-selected
//! polarization state.
//!
//! [`generate_state`] builds that state in `O(3^n)` terms.  The independent
//! check [`permutation_oracle`] sums one routing per source-to-detector
//! bijection at factorial cost; the two must agree to rounding for every
//! accepted configuration.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::setup::SetupConfig;
use crate::state::{StateVector, MODE_CAP};

/// Largest register the factorial-sum check accepts by default.
pub const ORACLE_CAP: usize = 8;

/// Squared norms at or below this count as complete destructive interference.
const DESTRUCTIVE_EPS: f64 = 1e-24;

/// A partially built state in which only some sources have emitted.
///
/// Terms are keyed by `(occupied, minus)`: bit `m` of `occupied` marks a
/// photon on detector `m`, and bit `m` of `minus` marks that photon as
/// sigma-minus.  Bits of `minus` outside `occupied` are never set.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialState {
    n_modes: usize,
    applied: u32,
    terms: BTreeMap<(u32, u32), C64>,
}

impl PartialState {
    /// The state before any source has emitted: one vacuum term of weight 1.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NoModes);
        }
        if n_modes > MODE_CAP {
            return Err(Error::TooManyModes {
                n: n_modes,
                cap: MODE_CAP,
            });
        }
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), C64::new(1.0, 0.0));
        Ok(Self {
            n_modes,
            applied: 0,
            terms,
        })
    }

    /// Number of detector modes.
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Bitmask of sources that have emitted so far.
    pub fn applied_sources(&self) -> u32 {
        self.applied
    }

    /// Number of photons in flight.
    pub fn photon_count(&self) -> u32 {
        self.applied.count_ones()
    }

    /// Amplitude of one occupancy term; absent terms are zero.
    pub fn amplitude(&self, occupied: u32, minus: u32) -> C64 {
        self.terms
            .get(&(occupied, minus))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

/// Emit the photon of one source into every empty detector it couples to.
///
/// Each existing term branches over the source's reachable empty detectors
/// and over the two polarizations, weighted by the coupling and the source's
/// polarizer amplitudes.  The configuration must be valid and the source must
/// not have emitted before.
pub fn apply_emission(
    state: &PartialState,
    source: usize,
    config: &SetupConfig,
) -> Result<PartialState> {
    let errors = config.errors();
    if !errors.is_empty() {
        return Err(Error::InvalidSetup { violations: errors });
    }
    let n = config.n_sources();
    if n != state.n_modes {
        return Err(Error::DimensionMismatch {
            left: state.n_modes,
            right: n,
        });
    }
    if source >= n {
        return Err(Error::SourceOutOfRange {
            source_index: source,
            n,
        });
    }
    if state.applied >> source & 1 == 1 {
        return Err(Error::SourceAlreadyApplied { source_index: source });
    }
    let alpha = config.settings[source].alpha();
    let beta = config.settings[source].beta();
    let mut terms: BTreeMap<(u32, u32), C64> = BTreeMap::new();
    for (&(occupied, minus), &amp) in &state.terms {
        for detector in 0..n {
            if occupied >> detector & 1 == 1 {
                continue;
            }
            let coupling = config.network.coupling(source, detector);
            if coupling.norm_sqr() == 0.0 {
                continue;
            }
            let weight = amp * coupling;
            let filled = occupied | 1 << detector;
            if alpha.norm_sqr() != 0.0 {
                *terms.entry((filled, minus)).or_insert(C64::new(0.0, 0.0)) += weight * alpha;
            }
            if beta.norm_sqr() != 0.0 {
                *terms
                    .entry((filled, minus | 1 << detector))
                    .or_insert(C64::new(0.0, 0.0)) += weight * beta;
            }
        }
    }
    Ok(PartialState {
        n_modes: state.n_modes,
        applied: state.applied | 1 << source,
        terms,
    })
}

/// A post-selected state before normalization.
///
/// The squared norm is the post-selection weight of the raw amplitude sum; it
/// is kept alongside the state because normalization discards it.
#[derive(Clone, Debug)]
pub struct RawState {
    state: StateVector,
    norm_sqr: f64,
}

impl RawState {
    /// The unnormalized amplitude vector.
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Squared norm of the raw amplitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.norm_sqr
    }

    /// Whether the amplitudes cancelled completely.
    ///
    /// The threshold sits far above the rounding floor of cancelling unit
    /// products but far below any genuinely surviving amplitude.
    pub fn is_destructive(&self) -> bool {
        self.norm_sqr <= DESTRUCTIVE_EPS
    }

    /// The normalized post-selected state; errors on complete cancellation.
    pub fn normalized(&self) -> Result<StateVector> {
        if self.is_destructive() {
            return Err(Error::ZeroNorm);
        }
        self.state.normalized()
    }

    /// Probability that one shot passes full-coincidence post-selection.
    ///
    /// Each of the `n` sources spreads over `n` detectors, so the raw
    /// amplitudes sit in a space scaled by `n^n`.
    pub fn success_weight(&self) -> f64 {
        let n = self.state.n_modes();
        self.norm_sqr / (n as f64).powi(n as i32)
    }
}

fn collect_full_terms(partial: PartialState) -> Result<RawState> {
    let n = partial.n_modes;
    let full = (1u32 << n) - 1;
    let mut state = StateVector::zero(n)?;
    let mut amps = vec![C64::new(0.0, 0.0); state.dim()];
    for ((occupied, minus), amp) in partial.terms {
        debug_assert_eq!(occupied, full);
        if occupied == full {
            amps[minus as usize] += amp;
        }
    }
    state = StateVector::from_amplitudes(n, amps)?;
    let norm_sqr = state.norm_sqr();
    Ok(RawState { state, norm_sqr })
}

/// Post-selected state of a configuration via sequential emission.
///
/// Sources emit in index order; the result is independent of that order.
pub fn generate_state(config: &SetupConfig) -> Result<RawState> {
    let errors = config.errors();
    if !errors.is_empty() {
        return Err(Error::InvalidSetup { violations: errors });
    }
    let n = config.n_sources();
    let mut partial = PartialState::vacuum(n)?;
    for source in 0..n {
        partial = apply_emission(&partial, source, config)?;
    }
    collect_full_terms(partial)
}

/// Post-selected state via the explicit sum over routings, with a cap.
///
/// Every bijection of sources onto detectors contributes the product of its
/// couplings times the tensor product of the source polarizations placed at
/// the routed detectors.  Factorial cost; intended as an independent check of
/// [`generate_state`], not as the production path.
pub fn permutation_oracle_capped(config: &SetupConfig, cap: usize) -> Result<RawState> {
    let errors = config.errors();
    if !errors.is_empty() {
        return Err(Error::InvalidSetup { violations: errors });
    }
    let n = config.n_sources();
    if n > MODE_CAP {
        return Err(Error::TooManyModes { n, cap: MODE_CAP });
    }
    if n > cap {
        return Err(Error::OracleTooLarge { n, cap });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let mut layer: Vec<(u32, C64)> = Vec::with_capacity(1 << n);
    let mut next: Vec<(u32, C64)> = Vec::with_capacity(1 << n);
    for routing in (0..n).permutations(n) {
        let mut weight = C64::new(1.0, 0.0);
        let mut blocked = false;
        for (source, &detector) in routing.iter().enumerate() {
            let coupling = config.network.coupling(source, detector);
            if coupling.norm_sqr() == 0.0 {
                blocked = true;
                break;
            }
            weight *= coupling;
        }
        if blocked {
            continue;
        }
        layer.clear();
        layer.push((0, weight));
        for (source, &detector) in routing.iter().enumerate() {
            let alpha = config.settings[source].alpha();
            let beta = config.settings[source].beta();
            next.clear();
            for &(minus, amp) in &layer {
                if alpha.norm_sqr() != 0.0 {
                    next.push((minus, amp * alpha));
                }
                if beta.norm_sqr() != 0.0 {
                    next.push((minus | 1 << detector, amp * beta));
                }
            }
            std::mem::swap(&mut layer, &mut next);
        }
        for &(minus, amp) in &layer {
            amps[minus as usize] += amp;
        }
    }
    let state = StateVector::from_amplitudes(n, amps)?;
    let norm_sqr = state.norm_sqr();
    Ok(RawState { state, norm_sqr })
}

/// [`permutation_oracle_capped`] at the default cap of [`ORACLE_CAP`].
pub fn permutation_oracle(config: &SetupConfig) -> Result<RawState> {
    permutation_oracle_capped(config, ORACLE_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::sample::{random_config, seeded_rng};
    use crate::setup::{FiberNetwork, PolarizerSetting};
    use crate::state::fidelity;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plus_minus_config() -> SetupConfig {
        SetupConfig::new(
            vec![PolarizerSetting::sigma_plus(), PolarizerSetting::sigma_minus()],
            FiberNetwork::fully_connected(2),
        )
    }

    /// Settings sigma-minus, sigma-plus routed through couplings
    /// `[[1, -1], [1, 1]]` produce the antisymmetric two-photon state.
    fn antisymmetric_config() -> SetupConfig {
        let mut network = FiberNetwork::fully_connected(2);
        network.set_coupling(0, 1, c(-1.0, 0.0));
        SetupConfig::new(
            vec![PolarizerSetting::sigma_minus(), PolarizerSetting::sigma_plus()],
            network,
        )
    }

    #[test]
    fn first_emission_spreads_over_empty_detectors() {
        let config = plus_minus_config();
        let vacuum = PartialState::vacuum(2).unwrap();
        let after = apply_emission(&vacuum, 0, &config).unwrap();
        assert_eq!(after.photon_count(), 1);
        assert_eq!(after.term_count(), 2);
        assert_eq!(after.amplitude(0b01, 0), c(1.0, 0.0));
        assert_eq!(after.amplitude(0b10, 0), c(1.0, 0.0));
    }

    #[test]
    fn emission_rejects_repeats_and_bad_sources() {
        let config = plus_minus_config();
        let vacuum = PartialState::vacuum(2).unwrap();
        let after = apply_emission(&vacuum, 0, &config).unwrap();
        assert_eq!(
            apply_emission(&after, 0, &config),
            Err(Error::SourceAlreadyApplied { source_index: 0 })
        );
        assert_eq!(
            apply_emission(&vacuum, 5, &config),
            Err(Error::SourceOutOfRange { source_index: 5, n: 2 })
        );
    }

    #[test]
    fn emission_rejects_invalid_setups() {
        let mut config = plus_minus_config();
        config.settings[1] = PolarizerSetting::new_unchecked(c(0.2, 0.0), c(0.0, 0.0));
        let vacuum = PartialState::vacuum(2).unwrap();
        assert!(matches!(
            apply_emission(&vacuum, 0, &config),
            Err(Error::InvalidSetup { .. })
        ));
        assert!(matches!(generate_state(&config), Err(Error::InvalidSetup { .. })));
        assert!(matches!(
            permutation_oracle(&config),
            Err(Error::InvalidSetup { .. })
        ));
    }

    #[test]
    fn plus_minus_sources_make_the_balanced_pair_state() {
        let raw = generate_state(&plus_minus_config()).unwrap();
        assert_eq!(raw.state().amplitude(0b01), c(1.0, 0.0));
        assert_eq!(raw.state().amplitude(0b10), c(1.0, 0.0));
        assert_eq!(raw.state().amplitude(0b00), c(0.0, 0.0));
        assert_eq!(raw.state().amplitude(0b11), c(0.0, 0.0));
        assert!((raw.norm_sqr() - 2.0).abs() < 1e-15);
        assert_eq!(raw.success_weight(), 0.5);
    }

    #[test]
    fn antisymmetric_config_flips_sign_under_mode_swap() {
        let raw = generate_state(&antisymmetric_config()).unwrap();
        let state = raw.normalized().unwrap();
        let swapped = state.swap_modes(0, 1).unwrap();
        for index in 0..state.dim() {
            assert!((state.amplitude(index) + swapped.amplitude(index)).norm() < 1e-12);
        }
    }

    #[test]
    fn unique_routing_gives_an_exact_product_state() {
        // Only the routing 0->2, 1->0, 2->1 survives, so the state is the
        // tensor product of the settings at the routed detectors with the
        // product of the three phases as a prefactor.
        let settings = vec![
            PolarizerSetting::from_angles(0.3, 0.9),
            PolarizerSetting::from_angles(1.1, -0.4),
            PolarizerSetting::from_angles(0.7, 2.2),
        ];
        let mut network = FiberNetwork::disconnected(3);
        network.set_phase(0, 2, 0.5);
        network.set_phase(1, 0, 1.9);
        network.set_phase(2, 1, 4.4);
        let config = SetupConfig::new(settings.clone(), network);
        let raw = generate_state(&config).unwrap();
        let prefactor =
            C64::from_polar(1.0, 0.5) * C64::from_polar(1.0, 1.9) * C64::from_polar(1.0, 4.4);
        for index in 0..8usize {
            // Source 0 sits at detector 2, source 1 at detector 0, source 2
            // at detector 1.
            let pick = |setting: &PolarizerSetting, bit: usize| {
                if index >> bit & 1 == 1 {
                    setting.beta()
                } else {
                    setting.alpha()
                }
            };
            let expected = prefactor
                * pick(&settings[0], 2)
                * pick(&settings[1], 0)
                * pick(&settings[2], 1);
            assert!((raw.state().amplitude(index) - expected).norm() < 1e-14);
        }
        let oracle = permutation_oracle(&config).unwrap();
        for index in 0..8usize {
            assert!((raw.state().amplitude(index) - oracle.state().amplitude(index)).norm() < 1e-14);
        }
    }

    #[test]
    fn engines_agree_on_seeded_random_configs() {
        let mut rng = seeded_rng(0x5eed_0001);
        for trial in 0..50 {
            let n = 2 + (trial % 4);
            let config = random_config(n, 0.2, &mut rng);
            let sequential = generate_state(&config).unwrap();
            let oracle = permutation_oracle(&config).unwrap();
            for index in 0..sequential.state().dim() {
                let gap = (sequential.state().amplitude(index)
                    - oracle.state().amplitude(index))
                .norm();
                assert!(gap <= 1e-10, "trial {trial} index {index} gap {gap}");
            }
        }
    }

    #[test]
    fn emission_order_does_not_change_the_state() {
        let mut rng = seeded_rng(0x5eed_0002);
        let config = random_config(4, 0.25, &mut rng);
        let forward = generate_state(&config).unwrap();
        let mut partial = PartialState::vacuum(4).unwrap();
        for source in [2usize, 0, 3, 1] {
            partial = apply_emission(&partial, source, &config).unwrap();
        }
        let full = (1u32 << 4) - 1;
        for index in 0..forward.state().dim() {
            let gap =
                (partial.amplitude(full, index as u32) - forward.state().amplitude(index)).norm();
            assert!(gap < 1e-12);
        }
    }

    #[test]
    fn opposite_phases_cancel_completely() {
        // Two identical sigma-plus photons routed with couplings
        // `[[1, 1], [1, -1]]`: the two routings carry weights 1 and -1 and
        // interfere to nothing.
        let mut network = FiberNetwork::fully_connected(2);
        network.set_coupling(1, 1, c(-1.0, 0.0));
        let config = SetupConfig::new(
            vec![PolarizerSetting::sigma_plus(), PolarizerSetting::sigma_plus()],
            network,
        );
        let raw = generate_state(&config).unwrap();
        assert!(raw.is_destructive());
        assert_eq!(raw.success_weight(), 0.0);
        assert_eq!(raw.normalized(), Err(Error::ZeroNorm));
    }

    #[test]
    fn detector_without_fibers_blocks_every_routing() {
        let mut network = FiberNetwork::fully_connected(2);
        network.remove(0, 1);
        network.remove(1, 1);
        let config = SetupConfig::new(
            vec![PolarizerSetting::sigma_plus(), PolarizerSetting::sigma_minus()],
            network,
        );
        let raw = generate_state(&config).unwrap();
        assert!(raw.is_destructive());
        let oracle = permutation_oracle(&config).unwrap();
        assert!(oracle.is_destructive());
    }

    #[test]
    fn oracle_refuses_oversized_registers() {
        let config = SetupConfig::new(
            vec![PolarizerSetting::sigma_plus(); 9],
            FiberNetwork::fully_connected(9),
        );
        assert_eq!(
            permutation_oracle(&config).unwrap_err(),
            Error::OracleTooLarge { n: 9, cap: ORACLE_CAP }
        );
        assert!(permutation_oracle_capped(&config, 9).is_ok());
    }

    #[test]
    fn lossy_couplings_simulate_when_enabled() {
        let mut config = plus_minus_config();
        config.network.set_coupling(0, 0, c(0.5, 0.0));
        assert!(matches!(generate_state(&config), Err(Error::InvalidSetup { .. })));
        config.lossy = true;
        let raw = generate_state(&config).unwrap();
        let oracle = permutation_oracle(&config).unwrap();
        assert!(fidelity(raw.state(), oracle.state()).unwrap() > 1.0 - 1e-12);
        assert!((raw.norm_sqr() - oracle.norm_sqr()).abs() < 1e-12);
    }
}
