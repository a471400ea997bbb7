//! Inverse design of polarizer settings for symmetric targets.
//!
//! Any target in the excitation ladder is reachable with a fully connected,
//! equal-phase network: the target coefficients define a polynomial whose
//! roots are exactly the sigma-minus/sigma-plus amplitude ratios of the
//! settings that produce it.  Degree drops below the mode count simply pin
//! the remaining sources to sigma-plus.
//!
//! Roots come from the eigenvalues of the companion matrix, computed by a
//! shifted QR iteration specialized to complex Hessenberg matrices, then
//! sharpened by a few Newton steps on the polynomial itself.

use num_complex::Complex64 as C64;

use crate::dicke::binomial;
use crate::error::{Error, Result};
use crate::setup::{FiberNetwork, PolarizerSetting, SetupConfig};
use crate::state::MODE_CAP;

/// Normalized target coefficients below this threshold count as zero when
/// picking the top excitation.
const COEFF_EPS: f64 = 1e-12;

/// A polynomial in the closed unknown `z = beta / alpha`, ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignPolynomial {
    coeffs: Vec<C64>,
}

impl DesignPolynomial {
    /// Wrap ascending coefficients, trimming exactly-zero leading terms.
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::ZeroTarget);
        }
        Ok(Self { coeffs })
    }

    /// Degree after trimming.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Ascending coefficients; the last is nonzero unless the degree is 0.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    /// Evaluate by Horner's rule.
    pub fn eval(&self, z: C64) -> C64 {
        self.eval_with_derivative(z).0
    }

    /// Evaluate the polynomial and its derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut value = C64::new(0.0, 0.0);
        let mut derivative = C64::new(0.0, 0.0);
        for &coeff in self.coeffs.iter().rev() {
            derivative = derivative * z + value;
            value = value * z + coeff;
        }
        (value, derivative)
    }
}

/// The design polynomial of a target coefficient vector over `n` modes,
/// where `n = d.len() - 1`.
///
/// The target is normalized first; its top surviving excitation `K` sets the
/// degree, and coefficient `k` is `(-1)^(K-k) sqrt(C(n,k)/C(n,K)) d_k`.  The
/// roots of this polynomial are the amplitude ratios realizing the target.
pub fn build_polynomial(target: &[C64]) -> Result<DesignPolynomial> {
    if target.is_empty() {
        return Err(Error::ZeroTarget);
    }
    let n = target.len() - 1;
    let norm = target.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroTarget);
    }
    let top = match target.iter().rposition(|d| d.norm() / norm > COEFF_EPS) {
        Some(top) => top,
        None => return Err(Error::ZeroTarget),
    };
    let coeffs = (0..=top)
        .map(|k| {
            let ratio = (binomial(n, k) as f64 / binomial(n, top) as f64).sqrt();
            let sign = if (top - k) % 2 == 1 { -1.0 } else { 1.0 };
            target[k] / norm * ratio * sign
        })
        .collect();
    DesignPolynomial::new(coeffs)
}

/// All complex roots, with multiplicity, in deterministic order.
///
/// Degrees 1 and 2 are solved in closed form; higher degrees go through the
/// companion matrix.  Every root is polished by Newton steps, keeping the
/// iterate with the smallest residual.
pub fn find_roots(poly: &DesignPolynomial) -> Vec<C64> {
    let coeffs = poly.coefficients();
    let mut roots = match poly.degree() {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2]),
        _ => hessenberg_eigenvalues(companion_matrix(coeffs)),
    };
    for root in &mut roots {
        *root = polish(poly, *root);
    }
    roots
}

/// Both roots of `c2 z^2 + c1 z + c0`, avoiding cancellation in `-c1 ± s`.
fn quadratic_roots(c0: C64, c1: C64, c2: C64) -> Vec<C64> {
    if c0.norm_sqr() == 0.0 {
        return vec![C64::new(0.0, 0.0), -c1 / c2];
    }
    let discriminant = c1 * c1 - c2 * c0 * 4.0;
    let mut s = discriminant.sqrt();
    if (c1.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -(c1 + s) * 0.5;
    vec![q / c2, c0 / q]
}

/// Companion matrix of a polynomial with nonzero leading coefficient.
fn companion_matrix(coeffs: &[C64]) -> Vec<Vec<C64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let mut matrix = vec![vec![C64::new(0.0, 0.0); degree]; degree];
    for row in 0..degree {
        matrix[row][degree - 1] = -coeffs[row] / lead;
    }
    for row in 1..degree {
        matrix[row][row - 1] = C64::new(1.0, 0.0);
    }
    matrix
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR iteration.
///
/// Single Wilkinson shifts with deflation from the bottom; a stalled block
/// takes an exceptional shift every tenth sweep.  The iteration is entirely
/// deterministic.
fn hessenberg_eigenvalues(mut h: Vec<Vec<C64>>) -> Vec<C64> {
    let n = h.len();
    let mut eigenvalues = Vec::with_capacity(n);
    if n == 0 {
        return eigenvalues;
    }
    let frobenius = h
        .iter()
        .flat_map(|row| row.iter())
        .map(C64::norm_sqr)
        .sum::<f64>()
        .sqrt();
    let mut hi = n;
    let mut stalled = 0usize;
    while hi > 0 {
        // Split off the trailing irreducible block [lo, hi).
        let mut lo = hi - 1;
        while lo > 0 {
            let off = h[lo][lo - 1].norm();
            let mut scale = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if scale == 0.0 {
                scale = frobenius;
            }
            if off <= f64::EPSILON * scale {
                h[lo][lo - 1] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigenvalues.push(h[lo][lo]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if lo == hi - 2 {
            let (first, second) =
                two_by_two_eigenvalues(h[lo][lo], h[lo][lo + 1], h[lo + 1][lo], h[lo + 1][lo + 1]);
            eigenvalues.push(first);
            eigenvalues.push(second);
            hi -= 2;
            stalled = 0;
            continue;
        }
        stalled += 1;
        let shift = if stalled.is_multiple_of(10) {
            h[hi - 1][hi - 1] + C64::new(0.75 * h[hi - 1][hi - 2].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1])
        };
        qr_step(&mut h, lo, hi, shift);
        if stalled > 40 * n {
            // Give up on further deflation; the Newton polish downstream
            // still improves whatever the diagonal holds.  Not reached by
            // any known input.
            for row in (lo..hi).rev() {
                eigenvalues.push(h[row][row]);
            }
            hi = lo;
            stalled = 0;
        }
    }
    eigenvalues
}

/// Both eigenvalues of a 2x2 block, in a fixed order.
fn two_by_two_eigenvalues(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let mid = (a + d) * 0.5;
    let delta = (a - d) * 0.5;
    let s = (delta * delta + b * c).sqrt();
    (mid + s, mid - s)
}

/// The eigenvalue of the 2x2 block closer to its bottom-right entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let (first, second) = two_by_two_eigenvalues(a, b, c, d);
    if (first - d).norm() <= (second - d).norm() {
        first
    } else {
        second
    }
}

/// One explicit shifted QR sweep on the block `[lo, hi)`.
#[allow(clippy::needless_range_loop)]
fn qr_step(h: &mut [Vec<C64>], lo: usize, hi: usize, shift: C64) {
    for j in lo..hi {
        h[j][j] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for j in lo..hi - 1 {
        let (c, s, r) = givens(h[j][j], h[j + 1][j]);
        h[j][j] = r;
        h[j + 1][j] = C64::new(0.0, 0.0);
        for k in j + 1..hi {
            let x = h[j][k];
            let y = h[j + 1][k];
            h[j][k] = x * c + y * s;
            h[j + 1][k] = y * c - x * s.conj();
        }
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.into_iter().enumerate() {
        let j = lo + offset;
        let bottom = (j + 2).min(hi);
        for row in lo..bottom {
            let x = h[row][j];
            let y = h[row][j + 1];
            h[row][j] = x * c + y * s.conj();
            h[row][j + 1] = y * c - x * s;
        }
    }
    for j in lo..hi {
        h[j][j] += shift;
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` sending `(a, b)` to
/// `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    if b.norm_sqr() == 0.0 {
        return (1.0, C64::new(0.0, 0.0), a);
    }
    if a.norm_sqr() == 0.0 {
        let modulus = b.norm();
        return (0.0, b.conj() / modulus, C64::new(modulus, 0.0));
    }
    let a_mod = a.norm();
    let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let phase = a / a_mod;
    (a_mod / rho, phase * b.conj() / rho, phase * rho)
}

/// Sharpen a root estimate with Newton steps, keeping the best residual.
fn polish(poly: &DesignPolynomial, start: C64) -> C64 {
    let mut z = start;
    let mut best = start;
    let mut best_residual = f64::INFINITY;
    for _ in 0..=20 {
        let (value, derivative) = poly.eval_with_derivative(z);
        let residual = value.norm();
        if residual < best_residual {
            best = z;
            best_residual = residual;
        }
        if residual == 0.0 || derivative.norm_sqr() == 0.0 {
            break;
        }
        z -= value / derivative;
    }
    best
}

/// Settings whose amplitude ratios are the given roots, padded to `n`.
///
/// Root `r` becomes the unit setting proportional to `(r, 1)`; sources past
/// the root list are pinned to sigma-plus, which keeps them out of the top
/// excitation entirely.
pub fn settings_from_roots(roots: &[C64], n_sources: usize) -> Result<Vec<PolarizerSetting>> {
    if roots.len() > n_sources {
        return Err(Error::TooManyRoots {
            roots: roots.len(),
            n_sources,
        });
    }
    let mut settings = Vec::with_capacity(n_sources);
    for &root in roots {
        let modulus = root.norm();
        let setting = if modulus <= 1.0 {
            let scale = 1.0 / (1.0 + modulus * modulus).sqrt();
            PolarizerSetting::new(root * scale, C64::new(scale, 0.0))?
        } else {
            // Scale by 1/|r| first so huge ratios cannot overflow.
            let inverse = 1.0 / modulus;
            let scale = 1.0 / (1.0 + inverse * inverse).sqrt();
            PolarizerSetting::new(
                root * (inverse * scale),
                C64::new(inverse * scale, 0.0),
            )?
        };
        settings.push(setting);
    }
    settings.resize(n_sources, PolarizerSetting::sigma_plus());
    Ok(settings)
}

/// Polarizer settings and network producing the symmetric target state
/// `sum_k d_k |excitation k>` on `n_sources` modes.
///
/// The returned configuration is fully connected with all phases zero; only
/// the settings vary.  The target need not be normalized.
pub fn design_symmetric(target: &[C64], n_sources: usize) -> Result<SetupConfig> {
    if n_sources == 0 {
        return Err(Error::NoModes);
    }
    if n_sources > MODE_CAP {
        return Err(Error::TooManyModes {
            n: n_sources,
            cap: MODE_CAP,
        });
    }
    if target.len() != n_sources + 1 {
        return Err(Error::CoefficientCountMismatch {
            expected: n_sources + 1,
            got: target.len(),
        });
    }
    let poly = build_polynomial(target)?;
    let roots = find_roots(&poly);
    let settings = settings_from_roots(&roots, n_sources)?;
    Ok(SetupConfig::new(
        settings,
        FiberNetwork::fully_connected(n_sources),
    ))
}
