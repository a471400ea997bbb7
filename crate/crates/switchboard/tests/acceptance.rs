//! End-to-end acceptance checks for the simulation and design pipeline.
//!
//! Each test exercises one headline guarantee of the crate — Dicke
//! generation, engine cross-validation, design round trips, canonical
//! entangled states, the angular-momentum protocol, basis completeness,
//! success weights, and the symmetric decomposition law — and prints a
//! single `criterion N: PASS` line with the observed worst case. Run with
//! `cargo test --test acceptance -- --nocapture` to see the summary lines.

use std::time::Instant;

use num_complex::Complex64 as C64;
use switchboard::{
    angmom_basis, compile_protocol, decompose, design_symmetric, dicke_coefficients,
    dicke_config, dicke_state, dicke_superposition, fidelity, generate_state,
    permutation_oracle, random_config, random_setting, random_target, reference_state,
    seeded_rng, FiberNetwork, SetupConfig,
};

fn infidelity(fid: f64) -> f64 {
    (1.0 - fid).max(0.0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[test]
fn criterion_1_dicke_generation() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for n in 2..=6 {
        for k in 0..=n {
            let config = dicke_config(n, k).expect("canonical config builds");
            let raw = generate_state(&config).expect("emission succeeds");
            let target = dicke_state(n, k).expect("dicke state builds");
            let fid = fidelity(raw.state(), &target).expect("states overlap");
            assert!(
                fid >= 1.0 - 1e-10,
                "n={n} k={k}: fidelity {fid} below 1 - 1e-10"
            );
            worst = worst.max(infidelity(fid));
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "dicke generation took {elapsed:?}, budget is 1 s"
    );
    println!(
        "criterion 1: PASS ({cases} configs, worst infidelity {worst:.3e}, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_2_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = seeded_rng(0x0bae_5eed);
    let mut worst = 0.0_f64;
    for trial in 0..200 {
        let n = 2 + trial % 4;
        let config = random_config(n, 0.2, &mut rng);
        let fast = generate_state(&config).expect("emission succeeds");
        let slow = permutation_oracle(&config).expect("oracle succeeds");
        let deviation = fast
            .state()
            .amplitudes()
            .iter()
            .zip(slow.state().amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(
            deviation <= 1e-10,
            "trial {trial} (n={n}): engines disagree by {deviation:.3e}"
        );
        worst = worst.max(deviation);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "oracle equivalence took {elapsed:?}, budget is 5 s"
    );
    println!(
        "criterion 2: PASS (200 configs, worst amplitude gap {worst:.3e}, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_3_symmetric_design_round_trip() {
    let start = Instant::now();
    let mut rng = seeded_rng(0xd151_c0de);
    let mut worst = 0.0_f64;
    for n in 2..=6 {
        for trial in 0..100 {
            let target = random_target(n, &mut rng);
            let config = design_symmetric(&target, n).expect("design succeeds");
            let raw = generate_state(&config).expect("emission succeeds");
            let wanted = dicke_superposition(n, &target).expect("target builds");
            let fid = fidelity(raw.state(), &wanted).expect("states overlap");
            assert!(
                fid >= 1.0 - 1e-8,
                "n={n} trial {trial}: fidelity {fid} below 1 - 1e-8"
            );
            worst = worst.max(infidelity(fid));
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "design round trip took {elapsed:?}, budget is 10 s"
    );
    println!(
        "criterion 3: PASS (500 targets, worst infidelity {worst:.3e}, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_4_canonical_states() {
    let mut worst = 0.0_f64;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for n in 2..=4 {
        let mut ghz = vec![C64::new(0.0, 0.0); n + 1];
        ghz[0] = C64::new(inv_sqrt2, 0.0);
        ghz[n] = C64::new(inv_sqrt2, 0.0);
        let mut w = vec![C64::new(0.0, 0.0); n + 1];
        w[1] = C64::new(1.0, 0.0);
        for (name, target) in [("GHZ", ghz), ("W", w)] {
            let config = design_symmetric(&target, n).expect("design succeeds");
            let raw = generate_state(&config).expect("emission succeeds");
            let wanted = dicke_superposition(n, &target).expect("target builds");
            let fid = fidelity(raw.state(), &wanted).expect("states overlap");
            assert!(
                fid >= 1.0 - 1e-9,
                "{name} n={n}: fidelity {fid} below 1 - 1e-9"
            );
            worst = worst.max(infidelity(fid));
        }
    }

    let ghz2 = [
        C64::new(inv_sqrt2, 0.0),
        C64::new(0.0, 0.0),
        C64::new(inv_sqrt2, 0.0),
    ];
    let config = design_symmetric(&ghz2, 2).expect("design succeeds");
    let mut ratios: Vec<C64> = config
        .settings
        .iter()
        .map(|s| s.beta() / s.alpha())
        .collect();
    ratios.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
    assert!(
        (ratios[0] - C64::new(0.0, -1.0)).norm() < 1e-9
            && (ratios[1] - C64::new(0.0, 1.0)).norm() < 1e-9,
        "balanced-pair ratios {ratios:?} are not the two circular units"
    );

    println!("criterion 4: PASS (GHZ and W for 2..=4 modes, worst infidelity {worst:.3e})");
}

#[test]
fn criterion_5_angular_momentum_protocol() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for n in 2..=4 {
        let basis = angmom_basis(n).expect("basis builds");
        assert_eq!(basis.len(), 1 << n, "n={n}: basis size is not 2^n");
        for (path, wanted) in &basis {
            let config = compile_protocol(path).expect("protocol compiles");
            let raw = generate_state(&config).expect("emission succeeds");
            let fid = fidelity(raw.state(), wanted).expect("states overlap");
            assert!(
                fid >= 1.0 - 1e-9,
                "path {path}: fidelity {fid} below 1 - 1e-9"
            );
            worst = worst.max(infidelity(fid));
            cases += 1;
        }
    }
    assert_eq!(cases, 28, "expected 4 + 8 + 16 coupled states");

    let singlet = reference_state(&switchboard::CouplingPath::new(vec![1, 0], 0))
        .expect("singlet builds");
    let config = compile_protocol(&switchboard::CouplingPath::new(vec![1, 0], 0))
        .expect("singlet compiles");
    let raw = generate_state(&config).expect("emission succeeds");
    let produced = raw.state().normalized().expect("nonzero state");
    let swapped = produced.swap_modes(0, 1).expect("swap succeeds");
    let flipped = swapped.scale(C64::new(-1.0, 0.0));
    let asymmetry = produced
        .amplitudes()
        .iter()
        .zip(flipped.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0_f64, f64::max);
    assert!(
        asymmetry <= 1e-12,
        "singlet is not antisymmetric: transposition residue {asymmetry:.3e}"
    );
    let fid = fidelity(&produced, &singlet).expect("states overlap");
    assert!(fid >= 1.0 - 1e-9, "singlet fidelity {fid} below 1 - 1e-9");

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "protocol check took {elapsed:?}, budget is 5 s"
    );
    println!(
        "criterion 5: PASS ({cases} coupled states, worst infidelity {worst:.3e}, \
         singlet antisymmetry residue {asymmetry:.3e}, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_6_basis_completeness() {
    let basis = angmom_basis(4).expect("basis builds");
    assert_eq!(basis.len(), 16, "four coupled spins span 16 states");
    let mut worst = 0.0_f64;
    for (i, (_, a)) in basis.iter().enumerate() {
        for (j, (_, b)) in basis.iter().enumerate() {
            let overlap = switchboard::inner_product(a, b).expect("dimensions match");
            let wanted = if i == j { 1.0 } else { 0.0 };
            let gap = (overlap - C64::new(wanted, 0.0)).norm();
            assert!(
                gap <= 1e-10,
                "Gram entry ({i},{j}) off by {gap:.3e}"
            );
            worst = worst.max(gap);
        }
    }
    println!("criterion 6: PASS (16 states, worst Gram deviation {worst:.3e})");
}

#[test]
fn criterion_7_success_weight() {
    let mut worst = 0.0_f64;
    for n in 2..=6 {
        for k in 0..=n {
            let config = dicke_config(n, k).expect("canonical config builds");
            let raw = generate_state(&config).expect("emission succeeds");
            let expected =
                factorial(n) * factorial(k) * factorial(n - k) / (n as f64).powi(n as i32);
            let gap = (raw.success_weight() - expected).abs();
            assert!(
                gap <= 1e-12,
                "n={n} k={k}: success weight off by {gap:.3e}"
            );
            worst = worst.max(gap);
        }
    }

    let config = dicke_config(2, 1).expect("canonical config builds");
    let raw = generate_state(&config).expect("emission succeeds");
    assert_eq!(
        raw.success_weight(),
        0.5,
        "the balanced pair heralds with weight exactly one half"
    );

    println!("criterion 7: PASS (25 configs, worst weight deviation {worst:.3e})");
}

#[test]
fn criterion_8_symmetric_decomposition_law() {
    let mut rng = seeded_rng(0x5e77_1e50);
    let mut worst_residual = 0.0_f64;
    let mut worst_infidelity = 0.0_f64;
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let settings: Vec<_> = (0..n).map(|_| random_setting(&mut rng)).collect();
        let coefficients = dicke_coefficients(&settings).expect("coefficients build");
        let config = SetupConfig::new(settings, FiberNetwork::fully_connected(n));
        let raw = generate_state(&config).expect("emission succeeds");
        let produced = raw.normalized().expect("nonzero state");
        let expansion = decompose(&produced);
        assert!(
            expansion.residual_norm <= 1e-10,
            "trial {trial} (n={n}): residual {:.3e} outside the symmetric span",
            expansion.residual_norm
        );
        let wanted = dicke_superposition(n, &coefficients).expect("superposition builds");
        let fid = fidelity(&produced, &wanted).expect("states overlap");
        assert!(
            fid >= 1.0 - 1e-10,
            "trial {trial} (n={n}): fidelity {fid} below 1 - 1e-10"
        );
        worst_residual = worst_residual.max(expansion.residual_norm);
        worst_infidelity = worst_infidelity.max(infidelity(fid));
    }
    println!(
        "criterion 8: PASS (100 configs, worst residual {worst_residual:.3e}, \
         worst infidelity {worst_infidelity:.3e})"
    );
}
