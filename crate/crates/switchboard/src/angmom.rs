//! Sequential spin-coupling basis states and the wiring protocol that
//! produces them.
//!
//! Mapping each sigma-minus photon to spin-up and each sigma-plus photon to
//! spin-down turns the register into a chain of spin-1/2 systems.  Coupling
//! them one at a time — photon 1, then photon 2, and so on — labels an
//! orthonormal basis by the intermediate total spins `S_1, S_2, ..., S_N`
//! together with the final projection `m`.  Spins are stored doubled so that
//! half-integers stay exact integers.
//!
//! [`reference_state`] builds the basis states from the standard two-branch
//! recursion for adding one spin-1/2; [`compile_protocol`] emits the fiber
//! wiring and polarizer settings whose post-selected output is that state.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::setup::{FiberNetwork, PolarizerSetting, SetupConfig};
use crate::state::{StateVector, MODE_CAP};

/// Largest register for which the full coupled basis is enumerated.
pub const BASIS_CAP: usize = 10;

/// A sequential coupling scheme: intermediate total spins plus the final
/// projection, all doubled to keep half-integers exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CouplingPath {
    doubled_spins: Vec<i32>,
    doubled_m: i32,
}

/// One finding from coupling-path validation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PathViolation {
    /// The path lists no spins at all.
    #[error("path has no spins")]
    Empty,

    /// A single spin-1/2 must open the chain.
    #[error("first spin is {}, not 1/2", Halves(*.doubled))]
    FirstSpinNotHalf { doubled: i32 },

    /// Adding one spin-1/2 changes the total by exactly 1/2.
    #[error("step {index}: spin {} cannot follow {}", Halves(*.to), Halves(*.from))]
    InvalidStep { index: usize, from: i32, to: i32 },

    /// Total spins never drop below zero.
    #[error("step {index}: spin {} is negative", Halves(*.doubled))]
    NegativeSpin { index: usize, doubled: i32 },

    /// The projection cannot exceed the final total spin.
    #[error(
        "projection {} outside the range of total spin {}",
        Halves(*.doubled_m),
        Halves(*.doubled_total)
    )]
    ProjectionOutOfRange { doubled_m: i32, doubled_total: i32 },

    /// The projection must have the parity of the final total spin.
    #[error(
        "projection {} has the wrong parity for total spin {}",
        Halves(*.doubled_m),
        Halves(*.doubled_total)
    )]
    ProjectionParity { doubled_m: i32, doubled_total: i32 },
}

/// Formats a doubled spin value as an integer or a half fraction.
struct Halves(i32);

impl fmt::Display for Halves {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl CouplingPath {
    /// Wrap doubled intermediate spins and a doubled projection.
    ///
    /// No validity check happens here; see [`CouplingPath::validate`].
    pub fn new(doubled_spins: Vec<i32>, doubled_m: i32) -> Self {
        Self {
            doubled_spins,
            doubled_m,
        }
    }

    /// Parse a literal like `1/2,1,3/2;m=+1/2`; see [`parse_path_literal`].
    pub fn parse(text: &str) -> Result<Self> {
        parse_path_literal(text)
    }

    /// Number of photons coupled, one per listed spin.
    pub fn n(&self) -> usize {
        self.doubled_spins.len()
    }

    /// The doubled intermediate total spins, `S_1` first.
    pub fn doubled_spins(&self) -> &[i32] {
        &self.doubled_spins
    }

    /// The doubled final projection.
    pub fn doubled_m(&self) -> i32 {
        self.doubled_m
    }

    /// The doubled final total spin.
    pub fn doubled_total(&self) -> i32 {
        *self.doubled_spins.last().unwrap_or(&0)
    }

    /// How many sigma-minus photons the state contains: `n/2 + m`.
    pub fn sigma_minus_count(&self) -> usize {
        ((self.n() as i32 + self.doubled_m) / 2) as usize
    }

    /// Every defect of the path, in positional order.
    pub fn validate(&self) -> Vec<PathViolation> {
        let mut findings = Vec::new();
        let spins = &self.doubled_spins;
        if spins.is_empty() {
            findings.push(PathViolation::Empty);
            return findings;
        }
        if spins[0] != 1 {
            findings.push(PathViolation::FirstSpinNotHalf { doubled: spins[0] });
        }
        for index in 1..spins.len() {
            let from = spins[index - 1];
            let to = spins[index];
            if to < 0 {
                findings.push(PathViolation::NegativeSpin { index, doubled: to });
            } else if (to - from).abs() != 1 {
                findings.push(PathViolation::InvalidStep { index, from, to });
            }
        }
        if findings.is_empty() {
            let total = self.doubled_total();
            if self.doubled_m.abs() > total {
                findings.push(PathViolation::ProjectionOutOfRange {
                    doubled_m: self.doubled_m,
                    doubled_total: total,
                });
            } else if (self.doubled_m - total) % 2 != 0 {
                findings.push(PathViolation::ProjectionParity {
                    doubled_m: self.doubled_m,
                    doubled_total: total,
                });
            }
        }
        findings
    }

    /// Whether the path labels a coupled basis state.
    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

impl fmt::Display for CouplingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (index, &spin) in self.doubled_spins.iter().enumerate() {
            if index > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", Halves(spin))?;
        }
        write!(f, ";m={}", Halves(self.doubled_m))
    }
}

/// Parse a coupling-path literal: comma-separated spins, then `;m=` and the
/// projection.  Spins and projection are integers or halves like `3/2`; the
/// projection may carry a sign, as in `m=+1/2`.
pub fn parse_path_literal(text: &str) -> Result<CouplingPath> {
    let bad = |message: &str| Error::PathParse {
        message: message.to_string(),
    };
    let (spins_part, m_part) = text
        .split_once(';')
        .ok_or_else(|| bad("missing ';m=' section"))?;
    let m_text = m_part
        .trim()
        .strip_prefix("m=")
        .ok_or_else(|| bad("projection must be written 'm=VALUE'"))?;
    let doubled_m = parse_halves(m_text).ok_or_else(|| bad("unreadable projection"))?;
    let mut doubled_spins = Vec::new();
    for token in spins_part.split(',') {
        let spin = parse_halves(token).ok_or_else(|| bad("unreadable spin"))?;
        doubled_spins.push(spin);
    }
    Ok(CouplingPath::new(doubled_spins, doubled_m))
}

/// Parse an integer or half fraction into doubled units.
fn parse_halves(token: &str) -> Option<i32> {
    let token = token.trim();
    match token.split_once('/') {
        Some((numerator, denominator)) => {
            if denominator.trim() != "2" {
                return None;
            }
            numerator.trim().parse::<i32>().ok()
        }
        None => token.parse::<i32>().ok().and_then(|v| v.checked_mul(2)),
    }
}

/// The coupled basis state a path labels, as a polarization state.
///
/// Built by adding one spin-1/2 per photon with the standard two-branch
/// recursion; both increasing and decreasing steps keep the conventional
/// signs, so equal paths always produce byte-identical amplitudes.  All
/// amplitudes are real.
pub fn reference_state(path: &CouplingPath) -> Result<StateVector> {
    let violations = path.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidPath { violations });
    }
    let n = path.n();
    if n > MODE_CAP {
        return Err(Error::TooManyModes { n, cap: MODE_CAP });
    }
    let spins = path.doubled_spins();
    // Amplitude tables for every projection at the current chain length:
    // `level[t]` holds the state with doubled projection `2t - S`.
    let mut level: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    for photon in 2..=n {
        let previous = spins[photon - 2];
        let current = spins[photon - 1];
        let increased = current > previous;
        let denominator = 2.0 * (f64::from(previous) + 1.0);
        let dim = 1usize << photon;
        let mut next: Vec<Vec<f64>> = vec![vec![0.0; dim]; current as usize + 1];
        for (slot, table) in next.iter_mut().enumerate() {
            let m = -current + 2 * slot as i32;
            // Weight of the branch whose new photon is sigma-minus (up) and
            // of the branch whose new photon is sigma-plus (down).
            let (up_weight, down_weight) = if increased {
                (
                    (f64::from(previous + m + 1) / denominator).sqrt(),
                    (f64::from(previous - m + 1) / denominator).sqrt(),
                )
            } else {
                (
                    -(f64::from(previous - m + 1) / denominator).sqrt(),
                    (f64::from(previous + m + 1) / denominator).sqrt(),
                )
            };
            if up_weight != 0.0 && (m - 1).abs() <= previous {
                let source = &level[((m - 1 + previous) / 2) as usize];
                let bit = 1usize << (photon - 1);
                for (index, &amp) in source.iter().enumerate() {
                    if amp != 0.0 {
                        table[index | bit] += up_weight * amp;
                    }
                }
            }
            if down_weight != 0.0 && (m + 1).abs() <= previous {
                let source = &level[((m + 1 + previous) / 2) as usize];
                for (index, &amp) in source.iter().enumerate() {
                    if amp != 0.0 {
                        table[index] += down_weight * amp;
                    }
                }
            }
        }
        level = next;
    }
    let slot = ((path.doubled_m() + path.doubled_total()) / 2) as usize;
    let amps = level[slot].iter().map(|&x| C64::new(x, 0.0)).collect();
    let state = StateVector::from_amplitudes(n, amps)?;
    debug_assert!((state.norm() - 1.0).abs() < 1e-12);
    Ok(state)
}

/// Every coupled basis state on `n` photons, with its path.
///
/// Paths are listed in lexicographic order of their spin sequences, with the
/// projection ascending within a path; the states form an orthonormal basis
/// of the full `2^n`-dimensional space.
pub fn angmom_basis(n: usize) -> Result<Vec<(CouplingPath, StateVector)>> {
    if n == 0 {
        return Err(Error::NoModes);
    }
    if n > BASIS_CAP {
        return Err(Error::BasisTooLarge { n, cap: BASIS_CAP });
    }
    let mut basis = Vec::with_capacity(1 << n);
    let mut spins = vec![1i32];
    extend_paths(&mut spins, n, &mut basis)?;
    Ok(basis)
}

fn extend_paths(
    spins: &mut Vec<i32>,
    n: usize,
    basis: &mut Vec<(CouplingPath, StateVector)>,
) -> Result<()> {
    if spins.len() == n {
        let total = *spins.last().unwrap();
        let mut m = -total;
        while m <= total {
            let path = CouplingPath::new(spins.clone(), m);
            let state = reference_state(&path)?;
            basis.push((path, state));
            m += 2;
        }
        return Ok(());
    }
    let last = *spins.last().unwrap();
    if last >= 1 {
        spins.push(last - 1);
        extend_paths(spins, n, basis)?;
        spins.pop();
    }
    spins.push(last + 1);
    extend_paths(spins, n, basis)?;
    spins.pop();
    Ok(())
}

/// The wiring and settings whose post-selected output is the path's state.
///
/// Sources `0..n/2+m` are set to sigma-minus, the rest to sigma-plus, and
/// every source couples to detector 0 with phase zero.  Walking the path,
/// a detector after an increasing step couples to every source still
/// available; a detector after a decreasing step couples to exactly one
/// available sigma-minus source through a phase-pi fiber and one available
/// sigma-plus source through a phase-zero fiber, and that pair is consumed —
/// no later detector may couple to it.
pub fn compile_protocol(path: &CouplingPath) -> Result<SetupConfig> {
    let violations = path.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidPath { violations });
    }
    let n = path.n();
    if n > MODE_CAP {
        return Err(Error::TooManyModes { n, cap: MODE_CAP });
    }
    let minus_count = path.sigma_minus_count();
    let settings: Vec<PolarizerSetting> = (0..n)
        .map(|source| {
            if source < minus_count {
                PolarizerSetting::sigma_minus()
            } else {
                PolarizerSetting::sigma_plus()
            }
        })
        .collect();
    let spins = path.doubled_spins();
    let mut network = FiberNetwork::disconnected(n);
    let one = C64::new(1.0, 0.0);
    for source in 0..n {
        network.set_coupling(source, 0, one);
    }
    let mut consumed = vec![false; n];
    for detector in 1..n {
        if spins[detector] > spins[detector - 1] {
            for (source, used) in consumed.iter().enumerate() {
                if !used {
                    network.set_coupling(source, detector, one);
                }
            }
        } else {
            let minus_source = (0..minus_count)
                .find(|&source| !consumed[source])
                .expect("a valid decreasing path always has a sigma-minus source left");
            let plus_source = (minus_count..n)
                .find(|&source| !consumed[source])
                .expect("a valid decreasing path always has a sigma-plus source left");
            network.set_coupling(minus_source, detector, -one);
            network.set_coupling(plus_source, detector, one);
            consumed[minus_source] = true;
            consumed[plus_source] = true;
        }
    }
    Ok(SetupConfig::new(settings, network))
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::dicke::dicke_state;
    use crate::emission::generate_state;
    use crate::state::{fidelity, inner_product};

    fn path(spins: &[i32], m: i32) -> CouplingPath {
        CouplingPath::new(spins.to_vec(), m)
    }

    fn assert_amplitudes(state: &StateVector, expected: &[(usize, f64)]) {
        let mut full = vec![0.0f64; state.dim()];
        for &(index, value) in expected {
            full[index] = value;
        }
        for (index, &value) in full.iter().enumerate() {
            let amp = state.amplitude(index);
            assert!(
                (amp - C64::new(value, 0.0)).norm() < 1e-12,
                "index {index}: got {amp}, expected {value}"
            );
        }
    }

    #[test]
    fn validation_catches_each_defect() {
        assert!(path(&[1], 1).is_valid());
        assert!(path(&[1, 0], 0).is_valid());
        assert!(path(&[1, 2, 1, 2], 2).is_valid());

        assert_eq!(path(&[], 0).validate(), vec![PathViolation::Empty]);
        assert_eq!(
            path(&[2, 1], 1).validate(),
            vec![PathViolation::FirstSpinNotHalf { doubled: 2 }]
        );
        assert_eq!(
            path(&[1, 3], 1).validate(),
            vec![PathViolation::InvalidStep { index: 1, from: 1, to: 3 }]
        );
        assert_eq!(
            path(&[1, 0, -1], 1).validate(),
            vec![PathViolation::NegativeSpin { index: 2, doubled: -1 }]
        );
        assert_eq!(
            path(&[1, 2], 4).validate(),
            vec![PathViolation::ProjectionOutOfRange { doubled_m: 4, doubled_total: 2 }]
        );
        assert_eq!(
            path(&[1, 2], 1).validate(),
            vec![PathViolation::ProjectionParity { doubled_m: 1, doubled_total: 2 }]
        );
    }

    #[test]
    fn literals_round_trip_through_display() {
        let p = parse_path_literal("1/2,1,3/2;m=+1/2").unwrap();
        assert_eq!(p, path(&[1, 2, 3], 1));
        assert_eq!(p.to_string(), "1/2,1,3/2;m=1/2");
        assert_eq!(parse_path_literal(&p.to_string()).unwrap(), p);

        let p = parse_path_literal(" 1/2 , 0 ; m=0 ").unwrap();
        assert_eq!(p, path(&[1, 0], 0));

        let p = parse_path_literal("1/2,1,1/2;m=-1/2").unwrap();
        assert_eq!(p, path(&[1, 2, 1], -1));

        for bad in ["", "1/2,1", "1/2;1/2", "1/2;m=", "1/3;m=0", "1/2,x;m=0", "1/2;mm=0"] {
            assert!(
                matches!(parse_path_literal(bad), Err(Error::PathParse { .. })),
                "literal {bad:?} should fail"
            );
        }
    }

    #[test]
    fn single_photon_states_are_the_two_polarizations() {
        let down = reference_state(&path(&[1], -1)).unwrap();
        assert_amplitudes(&down, &[(0, 1.0)]);
        let up = reference_state(&path(&[1], 1)).unwrap();
        assert_amplitudes(&up, &[(1, 1.0)]);
    }

    #[test]
    fn two_photon_states_match_the_singlet_triplet_table() {
        let amp = 0.5f64.sqrt();
        let singlet = reference_state(&path(&[1, 0], 0)).unwrap();
        assert_amplitudes(&singlet, &[(1, amp), (2, -amp)]);

        let triplet_low = reference_state(&path(&[1, 2], -2)).unwrap();
        assert_amplitudes(&triplet_low, &[(0, 1.0)]);
        let triplet_mid = reference_state(&path(&[1, 2], 0)).unwrap();
        assert_amplitudes(&triplet_mid, &[(1, amp), (2, amp)]);
        let triplet_high = reference_state(&path(&[1, 2], 2)).unwrap();
        assert_amplitudes(&triplet_high, &[(3, 1.0)]);
    }

    #[test]
    fn three_photon_states_match_the_coupling_tables() {
        let amp2 = 0.5f64.sqrt();
        let lambda_up = reference_state(&path(&[1, 0, 1], 1)).unwrap();
        assert_amplitudes(&lambda_up, &[(5, amp2), (6, -amp2)]);
        let lambda_down = reference_state(&path(&[1, 0, 1], -1)).unwrap();
        assert_amplitudes(&lambda_down, &[(1, amp2), (2, -amp2)]);

        let six = 6.0f64.sqrt();
        let vee_up = reference_state(&path(&[1, 2, 1], 1)).unwrap();
        assert_amplitudes(&vee_up, &[(3, 2.0 / six), (5, -1.0 / six), (6, -1.0 / six)]);
        let vee_down = reference_state(&path(&[1, 2, 1], -1)).unwrap();
        assert_amplitudes(&vee_down, &[(1, 1.0 / six), (2, 1.0 / six), (4, -2.0 / six)]);

        let third = (1.0f64 / 3.0).sqrt();
        let stretched_mid = reference_state(&path(&[1, 2, 3], 1)).unwrap();
        assert_amplitudes(&stretched_mid, &[(3, third), (5, third), (6, third)]);
        let stretched_top = reference_state(&path(&[1, 2, 3], 3)).unwrap();
        assert_amplitudes(&stretched_top, &[(7, 1.0)]);
    }

    #[test]
    fn four_photon_state_matches_the_coupling_table() {
        let s = 3.0f64.sqrt();
        let state = reference_state(&path(&[1, 2, 1, 2], 0)).unwrap();
        assert_amplitudes(
            &state,
            &[
                (3, 1.0 / s),
                (5, -0.5 / s),
                (6, -0.5 / s),
                (9, 0.5 / s),
                (10, 0.5 / s),
                (12, -1.0 / s),
            ],
        );
    }

    #[test]
    fn maximal_paths_give_excitation_ladder_states() {
        for n in 1..=6usize {
            let spins: Vec<i32> = (1..=n as i32).collect();
            let total = n as i32;
            let mut m = -total;
            while m <= total {
                let state = reference_state(&path(&spins, m)).unwrap();
                let excitation = ((n as i32 + m) / 2) as usize;
                let ladder = dicke_state(n, excitation).unwrap();
                let fid = fidelity(&state, &ladder).unwrap();
                assert!(fid > 1.0 - 1e-12, "n={n} m={m} fidelity={fid}");
                m += 2;
            }
        }
    }

    #[test]
    fn reference_state_rejects_invalid_paths() {
        assert!(matches!(
            reference_state(&path(&[1, 3], 1)),
            Err(Error::InvalidPath { .. })
        ));
    }

    #[test]
    fn basis_is_complete_and_orthonormal() {
        for n in 1..=5usize {
            let basis = angmom_basis(n).unwrap();
            assert_eq!(basis.len(), 1 << n, "n={n}");
            for (i, (_, a)) in basis.iter().enumerate() {
                for (j, (_, b)) in basis.iter().enumerate() {
                    let overlap = inner_product(a, b).unwrap();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - C64::new(expected, 0.0)).norm() < 1e-12,
                        "n={n} i={i} j={j}"
                    );
                }
            }
        }
        assert!(matches!(angmom_basis(11), Err(Error::BasisTooLarge { .. })));
    }

    #[test]
    fn basis_order_is_lexicographic_in_the_spin_sequence() {
        let basis = angmom_basis(3).unwrap();
        let paths: Vec<String> = basis.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(
            paths,
            vec![
                "1/2,0,1/2;m=-1/2",
                "1/2,0,1/2;m=1/2",
                "1/2,1,1/2;m=-1/2",
                "1/2,1,1/2;m=1/2",
                "1/2,1,3/2;m=-3/2",
                "1/2,1,3/2;m=-1/2",
                "1/2,1,3/2;m=1/2",
                "1/2,1,3/2;m=3/2",
            ]
        );
    }

    #[test]
    fn singlet_wiring_matches_the_expected_network() {
        let config = compile_protocol(&path(&[1, 0], 0)).unwrap();
        assert!(config.validate().is_empty());
        assert!((config.settings[0].beta().norm() - 1.0).abs() < 1e-15);
        assert!((config.settings[1].alpha().norm() - 1.0).abs() < 1e-15);
        let one = C64::new(1.0, 0.0);
        assert_eq!(config.network.coupling(0, 0), one);
        assert_eq!(config.network.coupling(1, 0), one);
        assert_eq!(config.network.coupling(0, 1), -one);
        assert_eq!(config.network.coupling(1, 1), one);
    }

    #[test]
    fn increasing_steps_wire_fully_connected_networks() {
        let config = compile_protocol(&path(&[1, 2, 3, 4], 0)).unwrap();
        let one = C64::new(1.0, 0.0);
        for source in 0..4 {
            for detector in 0..4 {
                assert_eq!(config.network.coupling(source, detector), one);
            }
        }
    }

    #[test]
    fn consumed_pairs_leave_later_detectors() {
        // Spins rise, dip at detector 2, then rise again: the pair consumed
        // by the dip must not couple to detectors 3 and 4.
        let config = compile_protocol(&path(&[1, 2, 1, 2, 3], 1)).unwrap();
        let coupled: Vec<Vec<usize>> = (0..5)
            .map(|detector| {
                (0..5)
                    .filter(|&source| config.network.is_connected(source, detector))
                    .collect()
            })
            .collect();
        assert_eq!(coupled[0], vec![0, 1, 2, 3, 4]);
        assert_eq!(coupled[1], vec![0, 1, 2, 3, 4]);
        // The dip pairs sigma-minus source 0 with sigma-plus source 3.
        assert_eq!(coupled[2], vec![0, 3]);
        assert_eq!(config.network.coupling(0, 2), C64::new(-1.0, 0.0));
        assert_eq!(config.network.coupling(3, 2), C64::new(1.0, 0.0));
        // Later detectors only see the still-available sources.
        assert_eq!(coupled[3], vec![1, 2, 4]);
        assert_eq!(coupled[4], vec![1, 2, 4]);
    }

    #[test]
    fn compiled_configs_reproduce_their_reference_states() {
        for n in 2..=4usize {
            for (path, reference) in angmom_basis(n).unwrap() {
                let config = compile_protocol(&path).unwrap();
                assert!(config.validate().is_empty(), "path {path}");
                let raw = generate_state(&config).unwrap();
                assert!(!raw.is_destructive(), "path {path}");
                let fid = fidelity(raw.state(), &reference).unwrap();
                assert!(fid > 1.0 - 1e-9, "path {path} fidelity {fid}");
            }
        }
    }

    #[test]
    fn compiled_singlet_is_antisymmetric() {
        let config = compile_protocol(&path(&[1, 0], 0)).unwrap();
        let state = generate_state(&config).unwrap().normalized().unwrap();
        let swapped = state.swap_modes(0, 1).unwrap();
        for index in 0..state.dim() {
            assert!(
                (state.amplitude(index) + swapped.amplitude(index)).norm() < 1e-12,
                "index {index}"
            );
        }
    }

    #[test]
    fn compile_rejects_invalid_paths() {
        let err = compile_protocol(&path(&[1, 2], 1)).unwrap_err();
        assert!(matches!(err, Error::InvalidPath { .. }));
    }
}
