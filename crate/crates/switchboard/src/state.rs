//! Dense polarization states over a register of detector modes.
//!
//! A register of `n` modes, each holding exactly one photon, spans a
//! `2^n`-dimensional space.  Basis states are indexed by bitmask: bit `m` of
//! the index is set when mode `m` carries a sigma-minus photon, so index 0 is
//! the all-sigma-plus state and index `2^n - 1` is all-sigma-minus.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest register the dense representation accepts.
pub const MODE_CAP: usize = 14;

/// Amplitudes with modulus at or below this are omitted from dumps.
const DUMP_EPS: f64 = 1e-14;

/// Relative threshold for picking the phase-reference amplitude.
const CANONICAL_EPS: f64 = 1e-12;

/// Photon polarization in the circular basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// The sigma-plus state, bit value 0.
    Plus,
    /// The sigma-minus state, bit value 1.
    Minus,
}

/// Basis index of a product state given per-mode polarizations, mode 0 first.
pub fn basis_index(polarizations: &[Polarization]) -> Result<usize> {
    if polarizations.is_empty() {
        return Err(Error::NoModes);
    }
    if polarizations.len() > MODE_CAP {
        return Err(Error::TooManyModes {
            n: polarizations.len(),
            cap: MODE_CAP,
        });
    }
    Ok(polarizations
        .iter()
        .enumerate()
        .filter(|(_, p)| **p == Polarization::Minus)
        .fold(0, |index, (mode, _)| index | (1 << mode)))
}

/// Per-mode polarizations of a basis index, mode 0 first.
pub fn index_polarizations(index: usize, n_modes: usize) -> Result<Vec<Polarization>> {
    if n_modes == 0 {
        return Err(Error::NoModes);
    }
    if n_modes > MODE_CAP {
        return Err(Error::TooManyModes {
            n: n_modes,
            cap: MODE_CAP,
        });
    }
    if index >= 1 << n_modes {
        return Err(Error::IndexOutOfRange {
            index,
            dim: 1 << n_modes,
        });
    }
    Ok((0..n_modes)
        .map(|mode| {
            if index >> mode & 1 == 1 {
                Polarization::Minus
            } else {
                Polarization::Plus
            }
        })
        .collect())
}

/// A complex amplitude vector over the polarization basis of a register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_modes: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// The zero vector on `n_modes` modes.
    pub fn zero(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NoModes);
        }
        if n_modes > MODE_CAP {
            return Err(Error::TooManyModes {
                n: n_modes,
                cap: MODE_CAP,
            });
        }
        Ok(Self {
            n_modes,
            amps: vec![C64::new(0.0, 0.0); 1 << n_modes],
        })
    }

    /// Wrap a full amplitude vector; its length must be `2^n_modes`.
    pub fn from_amplitudes(n_modes: usize, amps: Vec<C64>) -> Result<Self> {
        let mut state = Self::zero(n_modes)?;
        if amps.len() != state.amps.len() {
            return Err(Error::AmplitudeCount {
                expected: state.amps.len(),
                got: amps.len(),
            });
        }
        state.amps = amps;
        Ok(state)
    }

    /// The computational basis state with the given index.
    pub fn basis(n_modes: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(n_modes)?;
        if index >= state.amps.len() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: state.amps.len(),
            });
        }
        state.amps[index] = C64::new(1.0, 0.0);
        Ok(state)
    }

    /// Number of detector modes.
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Dimension of the amplitude vector, `2^n_modes`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// All amplitudes, indexed by basis bitmask.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude on one basis index.  Panics if the index is out of range.
    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescale by a complex factor.
    pub fn scale(&self, factor: C64) -> Self {
        Self {
            n_modes: self.n_modes,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Componentwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        Ok(Self {
            n_modes: self.n_modes,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Unit-norm copy with the canonical global phase.
    ///
    /// The result has norm 1 and its first amplitude of non-negligible
    /// modulus is real and positive, which makes equal states compare equal
    /// componentwise regardless of how they were produced.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scaled = self.scale(C64::new(1.0 / norm, 0.0));
        Ok(scaled.canonical_phase())
    }

    /// Rotate the global phase so the reference amplitude is real positive.
    ///
    /// The reference is the lowest basis index whose modulus exceeds a small
    /// fraction of the norm.  The vector's norm is unchanged; a zero vector
    /// is returned as-is.
    pub fn canonical_phase(&self) -> Self {
        let threshold = CANONICAL_EPS * self.norm();
        let reference = self.amps.iter().find(|a| a.norm() > threshold);
        match reference {
            Some(amp) => self.scale(amp.conj() / amp.norm()),
            None => self.clone(),
        }
    }

    /// Exchange two mode labels, reindexing every amplitude.
    pub fn swap_modes(&self, mode_a: usize, mode_b: usize) -> Result<Self> {
        for mode in [mode_a, mode_b] {
            if mode >= self.n_modes {
                return Err(Error::ModeOutOfRange {
                    mode,
                    n: self.n_modes,
                });
            }
        }
        let mut swapped = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            let bit_a = index >> mode_a & 1;
            let bit_b = index >> mode_b & 1;
            let mut target = index & !(1 << mode_a) & !(1 << mode_b);
            target |= bit_a << mode_b | bit_b << mode_a;
            swapped[target] = *amp;
        }
        Ok(Self {
            n_modes: self.n_modes,
            amps: swapped,
        })
    }

    /// Render the non-negligible amplitudes, one basis state per line.
    ///
    /// Each line is `<bits> <re> <im>` where `<bits>` lists modes left to
    /// right starting at mode 0 (`1` marks sigma-minus) and both floats carry
    /// 17 significant digits, enough to reproduce the doubles exactly.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (index, amp) in self.amps.iter().enumerate() {
            if amp.norm() <= DUMP_EPS {
                continue;
            }
            let bits: String = (0..self.n_modes)
                .map(|mode| if index >> mode & 1 == 1 { '1' } else { '0' })
                .collect();
            out.push_str(&format!("{bits} {:.16e} {:.16e}\n", amp.re, amp.im));
        }
        out
    }

    /// Parse the format produced by [`StateVector::dump`].
    ///
    /// Blank lines are ignored; amplitudes not listed are zero.  The mode
    /// count is taken from the bitstrings, which must all agree.
    pub fn from_dump(text: &str) -> Result<Self> {
        let mut state: Option<StateVector> = None;
        let mut seen = Vec::new();
        for (line_index, raw_line) in text.lines().enumerate() {
            let line_no = line_index + 1;
            let line = raw_line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_error = |message: &str| Error::DumpParse {
                line: line_no,
                message: message.to_string(),
            };
            let mut fields = line.split_whitespace();
            let bits = fields.next().ok_or_else(|| parse_error("missing fields"))?;
            let re: f64 = fields
                .next()
                .ok_or_else(|| parse_error("missing real part"))?
                .parse()
                .map_err(|_| parse_error("unreadable real part"))?;
            let im: f64 = fields
                .next()
                .ok_or_else(|| parse_error("missing imaginary part"))?
                .parse()
                .map_err(|_| parse_error("unreadable imaginary part"))?;
            if fields.next().is_some() {
                return Err(parse_error("trailing fields"));
            }
            let mut index = 0usize;
            for (mode, ch) in bits.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => index |= 1 << mode,
                    _ => return Err(parse_error("bitstring must be 0s and 1s")),
                }
            }
            let target = match &mut state {
                None => {
                    state = Some(StateVector::zero(bits.len()).map_err(|_| {
                        parse_error("bitstring length outside the register cap")
                    })?);
                    state.as_mut().unwrap()
                }
                Some(existing) => {
                    if bits.len() != existing.n_modes {
                        return Err(parse_error("bitstring length changed"));
                    }
                    existing
                }
            };
            if seen.contains(&index) {
                return Err(parse_error("duplicate basis state"));
            }
            seen.push(index);
            target.amps[index] = C64::new(re, im);
        }
        state.ok_or(Error::DumpParse {
            line: 0,
            message: "no amplitude lines".to_string(),
        })
    }
}

/// Hermitian inner product `<a|b>`, conjugating `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.n_modes != b.n_modes {
        return Err(Error::DimensionMismatch {
            left: a.n_modes,
            right: b.n_modes,
        });
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Squared overlap `|<a|b>|^2` of the normalized states.
///
/// Insensitive to the scale and global phase of either argument; errors on a
/// zero vector.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = inner_product(a, b)?;
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((overlap.norm_sqr() / (na * nb)).min(1.0))
}
