//! Seeded random settings, networks, and targets for checks and stress runs.
//!
//! Everything here is driven by a caller-supplied generator, so a fixed seed
//! reproduces the same configurations on every run and platform.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::setup::{FiberNetwork, PolarizerSetting, SetupConfig};

/// A deterministic generator for the given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A polarizer setting drawn uniformly from the unit sphere of amplitudes.
pub fn random_setting<R: Rng + ?Sized>(rng: &mut R) -> PolarizerSetting {
    loop {
        let alpha = complex_normal(rng);
        let beta = complex_normal(rng);
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm > 1e-6 {
            return PolarizerSetting::new_unchecked(alpha / norm, beta / norm);
        }
    }
}

/// Normalized target coefficients for `n` modes, uniform on the sphere.
pub fn random_target<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let raw: Vec<C64> = (0..=n).map(|_| complex_normal(rng)).collect();
        let norm = raw.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return raw.into_iter().map(|d| d / norm).collect();
        }
    }
}

/// A valid random configuration: random settings, random phases, and each
/// fiber independently removed with the given probability.
///
/// A source left with no fiber gets one random fiber back, so the result
/// always passes validation.
pub fn random_config<R: Rng + ?Sized>(
    n: usize,
    removal_probability: f64,
    rng: &mut R,
) -> SetupConfig {
    let settings = (0..n).map(|_| random_setting(rng)).collect();
    let mut network = FiberNetwork::disconnected(n);
    for source in 0..n {
        for detector in 0..n {
            if rng.random::<f64>() >= removal_probability {
                network.set_phase(source, detector, rng.random_range(0.0..TAU));
            }
        }
    }
    for source in 0..n {
        if (0..n).all(|detector| !network.is_connected(source, detector)) {
            let detector = rng.random_range(0..n);
            network.set_phase(source, detector, rng.random_range(0.0..TAU));
        }
    }
    SetupConfig::new(settings, network)
}
