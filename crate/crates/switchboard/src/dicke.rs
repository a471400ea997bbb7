//! Collective-excitation states and expansions over them.
//!
//! The excitation-`k` state on `n` modes is the equal-weight superposition of
//! every basis state carrying exactly `k` sigma-minus photons.  These `n + 1`
//! states span the permutation-symmetric sector, which is exactly the set of
//! states a fully connected network with equal phases can produce; the
//! expansion coefficients of such a state follow from the polarizer settings
//! alone through an elementary-symmetric-polynomial product.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::setup::{FiberNetwork, PolarizerSetting, SetupConfig};
use crate::state::{StateVector, MODE_CAP};

/// Binomial coefficient as an exact integer; register caps keep it tiny.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result = 1u64;
    for i in 0..k {
        result = result * (n - i) as u64 / (i as u64 + 1);
    }
    result
}

/// Factorial as an exact integer, valid through 20.
pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The normalized excitation-`k` state on `n` modes.
pub fn dicke_state(n: usize, excitation: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(n)?;
    if excitation > n {
        return Err(Error::ExcitationOutOfRange { excitation, n });
    }
    let amp = C64::new(1.0 / (binomial(n, excitation) as f64).sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); state.dim()];
    for (index, slot) in amps.iter_mut().enumerate() {
        if index.count_ones() as usize == excitation {
            *slot = amp;
        }
    }
    state = StateVector::from_amplitudes(n, amps)?;
    Ok(state)
}

/// The (generally unnormalized) combination `sum_k d_k |excitation k>`.
pub fn dicke_superposition(n: usize, coefficients: &[C64]) -> Result<StateVector> {
    let state = StateVector::zero(n)?;
    if coefficients.len() != n + 1 {
        return Err(Error::CoefficientCountMismatch {
            expected: n + 1,
            got: coefficients.len(),
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); state.dim()];
    for (index, slot) in amps.iter_mut().enumerate() {
        let k = index.count_ones() as usize;
        *slot = coefficients[k] / (binomial(n, k) as f64).sqrt();
    }
    StateVector::from_amplitudes(n, amps)
}

/// Excitation-ladder coefficients of the state a fully connected,
/// equal-phase network produces from these settings.
///
/// Coefficient `k` is `sqrt(C(n,k)) * k! * (n-k)!` times the degree-`k`
/// coefficient of `prod_i (alpha_i + beta_i z)`: each of the `k!(n-k)!`
/// routings of a chosen source subset contributes once, and the square root
/// converts the symmetric basis-state sum into the normalized ladder state.
pub fn dicke_coefficients(settings: &[PolarizerSetting]) -> Result<Vec<C64>> {
    if settings.is_empty() {
        return Err(Error::EmptySettings);
    }
    let n = settings.len();
    if n > MODE_CAP {
        return Err(Error::TooManyModes { n, cap: MODE_CAP });
    }
    let mut poly = vec![C64::new(1.0, 0.0)];
    for setting in settings {
        let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (power, &coeff) in poly.iter().enumerate() {
            next[power] += coeff * setting.alpha();
            next[power + 1] += coeff * setting.beta();
        }
        poly = next;
    }
    Ok((0..=n)
        .map(|k| {
            let scale =
                (binomial(n, k) as f64).sqrt() * (factorial(k) * factorial(n - k)) as f64;
            poly[k] * scale
        })
        .collect())
}

/// A state's projection onto the excitation ladder.
#[derive(Clone, Debug)]
pub struct DickeExpansion {
    /// Number of detector modes.
    pub n_modes: usize,
    /// Projection coefficient per excitation number, `n_modes + 1` entries.
    pub coefficients: Vec<C64>,
    /// Norm of the component outside the symmetric sector.
    pub residual_norm: f64,
}

/// Project a state onto the excitation ladder.
///
/// The input is taken as-is; rescale first if normalized coefficients are
/// wanted.  The coefficients and residual satisfy
/// `sum_k |d_k|^2 + residual^2 = |v|^2`.
pub fn decompose(state: &StateVector) -> DickeExpansion {
    let n = state.n_modes();
    let mut coefficients = vec![C64::new(0.0, 0.0); n + 1];
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let k = index.count_ones() as usize;
        coefficients[k] += amp / (binomial(n, k) as f64).sqrt();
    }
    let mut residual_sqr = 0.0f64;
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let k = index.count_ones() as usize;
        let projected = coefficients[k] / (binomial(n, k) as f64).sqrt();
        residual_sqr += (amp - projected).norm_sqr();
    }
    DickeExpansion {
        n_modes: n,
        coefficients,
        residual_norm: residual_sqr.sqrt(),
    }
}

/// The canonical configuration whose output is the excitation-`k` state:
/// `k` sigma-minus sources, `n - k` sigma-plus sources, fully connected.
pub fn dicke_config(n: usize, excitation: usize) -> Result<SetupConfig> {
    if n == 0 {
        return Err(Error::NoModes);
    }
    if n > MODE_CAP {
        return Err(Error::TooManyModes { n, cap: MODE_CAP });
    }
    if excitation > n {
        return Err(Error::ExcitationOutOfRange { excitation, n });
    }
    let settings = (0..n)
        .map(|source| {
            if source < excitation {
                PolarizerSetting::sigma_minus()
            } else {
                PolarizerSetting::sigma_plus()
            }
        })
        .collect();
    Ok(SetupConfig::new(settings, FiberNetwork::fully_connected(n)))
}
